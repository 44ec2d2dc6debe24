#pragma once

#include "decflow/complex.hpp"

#include <functional>
#include <vector>

namespace decflow {

/// Quadrature rule on the reference k-simplex in barycentric coordinates;
/// weights sum to 1 (multiply by the simplex volume).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<Eigen::Vector4d> barycentric;
  std::vector<double> weights;
};

/// Fixed rules: 4-point Gauss-Legendre on segments, the 6-point degree-4 rule
/// on triangles and the 11-point degree-4 rule on tetrahedra.
const QuadratureRule& simplex_rule(int dim);

/// Integral over the simplex whose vertices are the columns of `points`.
double integrate_over_simplex(const Eigen::MatrixXd& points,
                              const std::function<double(const Point&)>& fn);

}  // namespace decflow
