#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace decflow {

/// A point in the embedding space (N <= 3), stored inline.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

using IntSparseMatrix = Eigen::SparseMatrix<int, Eigen::RowMajor>;

/// Oriented manifold simplicial complex of intrinsic dimension n embedded in R^N.
///
/// Simplices of every dimension are identified by their ascending vertex
/// tuple and stored in dictionary order, so the index of a simplex is a
/// pure function of the input. Simplices of dimension k < n carry the
/// orientation of their sorted tuple; each top simplex additionally stores
/// a sign relating its sorted tuple to the consistent mesh orientation.
/// Boundary and derivative matrices involving top simplices are expressed
/// in that oriented basis, so the two cofaces of an interior face always
/// induce opposite signs on it.
///
/// Immutable once built.
class SimplicialComplex {
 public:
  /// Builds the complex from vertex coordinates (one row per vertex) and
  /// top-dimensional simplices. Requires N == n; orientation is chosen so
  /// that every top simplex has positive signed volume.
  static SimplicialComplex build(Eigen::MatrixXd vertices,
                                 const std::vector<std::vector<int>>& top_simplices);

  /// Same as above with a caller-supplied sign per top simplex (relative to
  /// its sorted tuple). Mandatory when N > n.
  static SimplicialComplex build(Eigen::MatrixXd vertices,
                                 const std::vector<std::vector<int>>& top_simplices,
                                 std::vector<int> orientation);

  int dim() const { return n_; }
  int embedding_dim() const { return static_cast<int>(vertices_.cols()); }
  int num_vertices() const { return static_cast<int>(vertices_.rows()); }

  /// Number of k-simplices.
  int count(int k) const;
  int num_cells() const { return count(n_); }
  int num_faces() const { return count(n_ - 1); }

  /// Sorted vertex tuple of the i-th k-simplex.
  std::span<const int> simplex(int k, int i) const;

  /// Index of the k-simplex with the given sorted tuple, if present.
  std::optional<int> find(int k, std::span<const int> sorted_vertices) const;

  /// +1 or -1 for each top simplex.
  int orientation(int cell) const { return orientation_[static_cast<std::size_t>(cell)]; }
  std::span<const int> orientations() const { return orientation_; }

  Point vertex(int v) const { return vertices_.row(v).transpose(); }
  const Eigen::MatrixXd& vertices() const { return vertices_; }

  /// Coordinates of the vertices of a k-simplex, one column per vertex.
  Eigen::MatrixXd simplex_points(int k, int i) const;

  /// Face (dimension n-1) of `cell` opposite its local vertex `local` (sorted order).
  int cell_face(int cell, int local) const {
    return cell_faces_[static_cast<std::size_t>(cell * (n_ + 1) + local)];
  }
  std::span<const int> cell_faces(int cell) const {
    return {cell_faces_.data() + static_cast<std::size_t>(cell * (n_ + 1)),
            static_cast<std::size_t>(n_ + 1)};
  }

  /// Entry of D_{n-1} for (cell, local face): (-1)^local times the cell orientation.
  int cell_face_sign(int cell, int local) const {
    return ((local % 2 == 0) ? 1 : -1) * orientation(cell);
  }

  /// Top simplices containing a given (n-1)-face: one (boundary) or two (interior).
  /// The second entry is -1 for boundary faces.
  std::array<int, 2> cofaces(int face) const {
    return {cofaces_[static_cast<std::size_t>(2 * face)],
            cofaces_[static_cast<std::size_t>(2 * face + 1)]};
  }
  bool is_boundary_face(int face) const { return cofaces(face)[1] < 0; }

  /// Sign with which `cell` sees `face` in D_{n-1}; 0 if not incident.
  int incidence(int cell, int face) const;

  /// Boundary operator on k-chains, N_{k-1} x N_k, 1 <= k <= n.
  IntSparseMatrix boundary_matrix(int k) const;

  /// Discrete exterior derivative D_k = transpose(boundary_matrix(k+1)), 0 <= k <= n-1.
  IntSparseMatrix exterior_derivative_matrix(int k) const;

  /// Matrix of the dual derivative d*_0 on dual 0-cochains: (-1)^n D_{n-1}^T.
  IntSparseMatrix dual_derivative_matrix_d0() const;

  /// (n-1)-simplices with exactly one coface, ascending.
  std::vector<int> boundary_faces() const;
  std::vector<int> interior_faces() const;

  /// Number of connected components of the cell adjacency graph (through shared faces).
  int num_components() const;

 private:
  SimplicialComplex() = default;

  int n_ = 0;
  Eigen::MatrixXd vertices_;
  // simplices_[k] holds count(k) tuples of length k+1, flattened.
  std::array<std::vector<int>, 4> simplices_;
  std::vector<int> orientation_;
  std::vector<int> cell_faces_;
  std::vector<int> cofaces_;
};

/// Primal (on simplices) or dual (on circumcentric dual cells).
enum class CochainKind { primal, dual };

/// Real-valued cochain. Primal k-cochains index k-simplices; dual k-cochains
/// index dual cells of (n-k)-simplices.
struct Cochain {
  int degree = 0;
  CochainKind kind = CochainKind::primal;
  Eigen::VectorXd values;

  /// Zero cochain sized against the complex.
  static Cochain zeros(const SimplicialComplex& complex, int degree, CochainKind kind);

  /// Throws MeshError unless `values` has the matching simplex count.
  void check_against(const SimplicialComplex& complex) const;
};

/// Integer-weighted chain of k-simplices, stored densely.
struct Chain {
  int degree = 0;
  Eigen::VectorXi coefficients;
};

/// Pairing <cochain, chain>; linear in both arguments.
double evaluate(const Cochain& cochain, const Chain& chain);

}  // namespace decflow
