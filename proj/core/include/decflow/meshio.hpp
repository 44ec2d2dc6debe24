#pragma once

#include "decflow/complex.hpp"
#include "decflow/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace decflow {

/// Vertices and top simplices as read from or written to disk.
struct MeshData {
  Eigen::MatrixXd vertices;  // one row per vertex
  std::vector<std::vector<int>> cells;
  /// One region attribute per cell; empty when the mesh has none.
  std::vector<double> regions;

  int dim() const { return static_cast<int>(vertices.cols()); }
  SimplicialComplex to_complex() const { return SimplicialComplex::build(vertices, cells); }
};

/// Reads a Triangle/tetgen `.node` + `.ele` pair. Indices may start at 0 or 1
/// (detected from the first vertex record); '#' starts a comment.
/// Throws ParseError on malformed headers or records, out-of-range or
/// non-contiguous indices, and element sizes that do not match the dimension.
MeshData read_node_ele(const std::filesystem::path& node_path,
                       const std::filesystem::path& ele_path);

/// Writes `<base>.node` and `<base>.ele` with 0-based indices.
void write_node_ele(const std::filesystem::path& base, const MeshData& mesh);

enum class GridPattern {
  /// Every square split along the same diagonal; cubes get the Kuhn split.
  right,
  /// Odd vertex columns shifted by half a cell in y: isosceles triangles
  /// that are acute whenever hx > hy / 2. Vertical grid lines stay mesh lines.
  offset_columns,
  /// Same with odd rows shifted in x; horizontal grid lines stay mesh lines.
  offset_rows,
};

struct GridOptions {
  GridPattern pattern = GridPattern::right;
  /// Interior vertex jitter as a fraction of the cell size (2D only).
  /// Right-pattern meshes are made Delaunay again by edge flips.
  double perturb = 0.0;
  std::uint64_t seed = 1;
};

/// Structured mesh of the box [lower, upper] with `divisions` cells per axis.
/// The dimension is divisions.size() (2 or 3). Every cell is positively oriented.
/// Throws MeshError for invalid boxes or divisions, and for perturbation or
/// offset patterns in 3D.
MeshData generate_structured(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const std::vector<int>& divisions, const GridOptions& options = {});

/// Splits every triangle into four similar children through the edge
/// midpoints. Regions are inherited. Throws MeshError unless n = 2.
MeshData refine_4to1(const MeshData& mesh);
SimplicialComplex refine_4to1(const SimplicialComplex& complex);

/// Lawson edge flips until every interior edge is locally Delaunay (2D).
/// Returns the number of flips.
int make_delaunay(MeshData& mesh);

struct VtkFields {
  std::vector<std::pair<std::string, Eigen::VectorXd>> cell_scalars;
  /// One row per cell; padded to 3 components on output.
  std::vector<std::pair<std::string, Eigen::MatrixXd>> cell_vectors;
  std::vector<std::pair<std::string, Eigen::VectorXd>> point_scalars;
};

/// Legacy ASCII VTK unstructured grid with 17 significant digits.
/// Throws MeshError for fields of the wrong size and IoError on I/O failure.
void write_vtk(const std::filesystem::path& path, const SimplicialComplex& complex,
               const VtkFields& fields);

/// One row per cell: index, dual vertex coordinates, pressure, velocity.
void write_cells_csv(const std::filesystem::path& path, const SimplicialComplex& complex,
                     const DualMeasures& measures, const Eigen::VectorXd& pressure,
                     const Eigen::MatrixXd& velocity);

/// One row per (n-1)-face: index, vertex indices, boundary flag, flux.
void write_faces_csv(const std::filesystem::path& path, const SimplicialComplex& complex,
                     const Eigen::VectorXd& flux);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace decflow
