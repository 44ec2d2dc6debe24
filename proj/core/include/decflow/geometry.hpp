#pragma once

#include "decflow/complex.hpp"

#include <array>
#include <span>
#include <vector>

namespace decflow {

/// Where dual 0-cells sit. Circumcentric is the DEC dual; barycentric exists
/// only to demonstrate that it loses exactness on linear pressure.
enum class DualCenter { circumcentric, barycentric };

/// Metric data of the primal mesh and its dual.
///
/// Dual cell volumes are sums of signed elementary simplices spanned by
/// chains of centers cc(s^k) -> cc(s^{k+1}) -> ... -> cc(s^n). A piece is
/// negative when some center in the chain falls on the far side of the
/// previous simplex, which is what lets obtuse Delaunay meshes work.
struct DualMeasures {
  DualCenter center = DualCenter::circumcentric;

  /// center[k][i]: circumcenter (or barycenter) of the i-th k-simplex.
  std::array<std::vector<Point>, 4> center_point;
  /// Unsigned k-volume; 1 for vertices.
  std::array<std::vector<double>, 4> primal_volume;
  /// Signed (n-k)-volume of the dual cell of each k-simplex; 1 for top simplices.
  std::array<std::vector<double>, 4> dual_volume;
  /// For each (n-1)-face, signed length of its dual edge inside cofaces(face)[0]
  /// and cofaces(face)[1] (zero for the missing coface of a boundary face).
  std::vector<std::array<double, 2>> side_portion;

  const Point& circumcenter(int k, int i) const { return center_point[k][i]; }
};

/// Circumcenter of the simplex whose vertices are the columns of `points`,
/// computed in the affine hull (works for any embedding dimension).
/// Throws GeometryError on a degenerate simplex.
Point circumcenter(const Eigen::MatrixXd& points);

/// Unsigned k-volume of the simplex spanned by the columns of `points`.
double simplex_volume(const Eigen::MatrixXd& points);

/// Barycentric coordinates of `x` (assumed in the affine hull) with respect to the simplex.
Eigen::VectorXd barycentric_coordinates(const Eigen::MatrixXd& points, const Point& x);

DualMeasures dual_measures(const SimplicialComplex& complex,
                           DualCenter center = DualCenter::circumcentric);

struct DelaunayReport {
  bool ok = true;
  /// Interior faces with negative dual length beyond tolerance.
  std::vector<int> violating_faces;
  /// Interior faces whose dual length is zero within tolerance (cocircular pairs).
  std::vector<int> borderline_faces;
};

/// Local Delaunay test on every interior (n-1)-face: its dual edge must not be negative.
DelaunayReport is_delaunay(const SimplicialComplex& complex, const DualMeasures& measures);

struct InterfaceReport {
  struct Entry {
    int face = -1;
    std::array<double, 2> portion{};
  };
  bool ok = true;
  std::vector<Entry> failures;
};

/// Both cofaces of each listed face must contain their own circumcenter,
/// i.e. both side portions strictly positive. Throws MeshError for boundary faces.
InterfaceReport is_well_centered_interface(const SimplicialComplex& complex,
                                           const DualMeasures& measures,
                                           std::span<const int> interface_faces);

/// Relative tolerance used to snap near-zero dual portions and classify faces.
inline constexpr double kDualTolerance = 1e-12;

/// Longest edge among the cofaces of a face; the local length scale for tolerances.
double face_length_scale(const SimplicialComplex& complex, int face);

}  // namespace decflow
