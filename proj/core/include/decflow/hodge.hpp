#pragma once

#include "decflow/complex.hpp"
#include "decflow/geometry.hpp"

#include <span>
#include <vector>

namespace decflow {

enum class HodgeDirection { primal_to_dual, dual_to_primal };

/// Diagonal discrete Hodge star (or its inverse) on degree-k cochains.
struct DiagonalOperator {
  int degree = 0;
  HodgeDirection direction = HodgeDirection::primal_to_dual;
  Eigen::VectorXd diag;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return diag.cwiseProduct(x); }
};

/// M_k: diag[i] = |dual(s_i)| / |s_i|.
DiagonalOperator hodge_matrix(const DualMeasures& measures, int k);

/// (-1)^{k(n-k)} M_k^{-1}. Throws HodgeError naming the first zero entry.
DiagonalOperator inverse_hodge_with_sign(const DiagonalOperator& forward, int n);

/// Faces whose two cofaces carry different permeability.
std::vector<int> interface_faces(const SimplicialComplex& complex, std::span<const double> kappa);

/// Permeability-weighted inverse Hodge star on (n-1)-cochains:
///
///   (|s| / |*s|) * (k_+ l_+ + k_- l_-) / |*s|
///
/// where l_+- are the portions of the dual edge inside each coface. Boundary
/// faces use the one-sided value k |s| / |*s|. Throws HodgeError for
/// nonpositive permeability, for faces where k jumps without both cofaces
/// containing their circumcenters, and for zero dual edges.
DiagonalOperator hetero_hodge_inverse(const SimplicialComplex& complex,
                                      const DualMeasures& measures,
                                      std::span<const double> kappa);

/// Reciprocal of hetero_hodge_inverse, evaluated without dividing by the dual
/// length so that zero dual edges (cocircular pairs) give a zero entry rather
/// than an error. With equal permeability on both sides the entry is exactly
/// |*s| / (k |s|).
DiagonalOperator hetero_hodge(const SimplicialComplex& complex, const DualMeasures& measures,
                              std::span<const double> kappa);

}  // namespace decflow
