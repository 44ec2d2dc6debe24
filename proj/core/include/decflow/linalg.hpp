#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <string>

namespace decflow {

/// Compressed row storage with sorted column indices and no duplicates.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Block system [A B^T; B 0] [f; p] = [rhs_top; rhs_bottom] with diagonal A.
struct SaddleSystem {
  Eigen::VectorXd a_diag;
  SparseMatrix b;  // pressure rows x flux columns
  Eigen::VectorXd rhs_top;
  Eigen::VectorXd rhs_bottom;

  Eigen::Index num_flux() const { return a_diag.size(); }
  Eigen::Index num_pressure() const { return b.rows(); }
  Eigen::Index dim() const { return num_flux() + num_pressure(); }

  /// Throws SolverError on inconsistent block sizes.
  void validate() const;
};

struct SolveStats {
  std::string method;
  int iterations = 0;
  /// ||residual|| / ||rhs|| of the full block system.
  double relative_residual = 0.0;
  /// Flux unknowns with a zero A entry that were condensed out of the Schur complement.
  int condensed_fluxes = 0;
};

struct SaddleSolution {
  Eigen::VectorXd flux;
  Eigen::VectorXd pressure;
  SolveStats stats;
};

struct SchurOptions {
  double rel_tol = 1e-12;
  /// 0 means 10 x (number of Schur unknowns).
  int max_iter = 0;
  bool jacobi = false;
};

/// Eliminates the fluxes through A^{-1} and solves -S p = rhs_bottom - B A^{-1} rhs_top,
/// S = B A^{-1} B^T, by conjugate gradients. A must be negative on its nonzero entries.
///
/// Zero entries of A (faces with zero dual length) are handled by condensation:
/// their rows force p_i - p_j = rhs, so the two pressures are merged into one
/// unknown before forming S, and their fluxes are recovered afterwards as the
/// minimum-norm solution of the local mass balance.
///
/// Throws SolverError("pressure nullspace ...") when a group of pressures is not
/// tied to any eliminated value, and on CG non-convergence.
SaddleSolution schur_solve(const SaddleSystem& system, const SchurOptions& options = {});

struct DirectOptions {
  Eigen::Index dense_limit = 4000;
};

/// Dense LU with partial pivoting on the full block matrix.
/// Throws SolverError when the dimension exceeds the limit or the matrix is singular.
SaddleSolution direct_solve(const SaddleSystem& system, const DirectOptions& options = {});

/// Relative residual of a candidate solution.
double saddle_residual(const SaddleSystem& system, const Eigen::VectorXd& flux,
                       const Eigen::VectorXd& pressure);

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients for a symmetric positive (semi)definite matrix with an
/// optional Jacobi preconditioner. Stops when every residual entry satisfies
/// |b - A x|_i <= rel_tol (|b| + |A| |x|)_i (componentwise backward error).
CgResult conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, double rel_tol,
                            int max_iter, bool jacobi = false);

}  // namespace decflow
