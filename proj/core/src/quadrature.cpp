#include "decflow/quadrature.hpp"

#include "decflow/error.hpp"
#include "decflow/geometry.hpp"

#include <cmath>
#include <string>
#include <tuple>

namespace decflow {

namespace {

QuadratureRule point_rule() {
  QuadratureRule r;
  r.dim = 0;
  r.degree = 99;
  r.barycentric.push_back({1.0, 0.0, 0.0, 0.0});
  r.weights.push_back(1.0);
  return r;
}

QuadratureRule segment_rule() {
  QuadratureRule r;
  r.dim = 1;
  r.degree = 7;
  const double x[2] = {0.3399810435848562648, 0.8611363115940525752};
  const double w[2] = {0.6521451548625461427, 0.3478548451374538574};
  for (int i = 0; i < 2; ++i) {
    for (double s : {-1.0, 1.0}) {
      const double t = 0.5 * (1.0 + s * x[i]);
      r.barycentric.push_back({1.0 - t, t, 0.0, 0.0});
      r.weights.push_back(0.5 * w[i]);
    }
  }
  return r;
}

QuadratureRule triangle_rule() {
  QuadratureRule r;
  r.dim = 2;
  r.degree = 4;
  const double a1 = 0.445948490915964886318329253883;
  const double b1 = 1.0 - 2.0 * a1;
  const double w1 = 0.223381589678011465944640202490;
  const double a2 = 0.091576213509770743459571463402;
  const double b2 = 1.0 - 2.0 * a2;
  const double w2 = 1.0 / 3.0 - w1;
  for (auto [a, b, w] : {std::tuple{a1, b1, w1}, std::tuple{a2, b2, w2}}) {
    r.barycentric.push_back({b, a, a, 0.0});
    r.barycentric.push_back({a, b, a, 0.0});
    r.barycentric.push_back({a, a, b, 0.0});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
  }
  return r;
}

QuadratureRule tetrahedron_rule() {
  QuadratureRule r;
  r.dim = 3;
  r.degree = 4;
  r.barycentric.push_back({0.25, 0.25, 0.25, 0.25});
  r.weights.push_back(-6.0 * 74.0 / 5625.0);
  const double a = 1.0 / 14.0;
  const double b = 11.0 / 14.0;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d p = Eigen::Vector4d::Constant(a);
    p[i] = b;
    r.barycentric.push_back(p);
    r.weights.push_back(6.0 * 343.0 / 45000.0);
  }
  const double c = 0.25 * (1.0 + std::sqrt(5.0 / 14.0));
  const double d = 0.25 * (1.0 - std::sqrt(5.0 / 14.0));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Eigen::Vector4d p = Eigen::Vector4d::Constant(d);
      p[i] = c;
      p[j] = c;
      r.barycentric.push_back(p);
      r.weights.push_back(6.0 * 56.0 / 2250.0);
    }
  return r;
}

}  // namespace

const QuadratureRule& simplex_rule(int dim) {
  static const QuadratureRule rules[4] = {point_rule(), segment_rule(), triangle_rule(),
                                          tetrahedron_rule()};
  if (dim < 0 || dim > 3) throw GeometryError("no quadrature rule for dimension " + std::to_string(dim));
  return rules[dim];
}

double integrate_over_simplex(const Eigen::MatrixXd& points,
                              const std::function<double(const Point&)>& fn) {
  const int k = static_cast<int>(points.cols()) - 1;
  const QuadratureRule& rule = simplex_rule(k);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Point x = points * rule.barycentric[q].head(k + 1);
    sum += rule.weights[q] * fn(x);
  }
  return sum * simplex_volume(points);
}

}  // namespace decflow
