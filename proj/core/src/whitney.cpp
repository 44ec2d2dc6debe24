#include "decflow/whitney.hpp"

#include "decflow/error.hpp"
#include "decflow/quadrature.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cmath>
#include <string>

namespace decflow {

namespace {

constexpr double kInsideTolerance = 1e-10;

struct CellFrame {
  Eigen::MatrixXd points;  // n x (n+1)
  Eigen::MatrixXd grad;    // n x (n+1), gradient of each barycentric coordinate
  double volume = 0.0;
};

CellFrame cell_frame(const SimplicialComplex& complex, int cell) {
  if (complex.embedding_dim() != complex.dim())
    throw GeometryError("Whitney interpolation requires a flat mesh");
  const int n = complex.dim();
  CellFrame f;
  f.points = complex.simplex_points(n, cell);
  const Eigen::MatrixXd t = f.points.rightCols(n).colwise() - f.points.col(0);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
  const Eigen::MatrixXd inv = lu.inverse();
  f.grad.resize(n, n + 1);
  f.grad.rightCols(n) = inv.transpose();
  f.grad.col(0) = -f.grad.rightCols(n).rowwise().sum();
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  f.volume = std::abs(lu.determinant()) / fact;
  return f;
}

Eigen::Vector3d cross(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return Eigen::Vector3d(a[0], a[1], a[2]).cross(Eigen::Vector3d(b[0], b[1], b[2]));
}

// Columns G_a with W(x) = sum_a mu_a(x) G_a for the Whitney interpolant of
// the cell's face values, as coordinate coefficients of the (n-1)-form.
Eigen::MatrixXd whitney_coefficients(const SimplicialComplex& complex, const CellFrame& frame,
                                     int cell, const Eigen::VectorXd& face_values) {
  const int n = complex.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n + 1);
  for (int l = 0; l <= n; ++l) {
    const double c = face_values[complex.cell_face(cell, l)];
    if (c == 0.0) continue;
    int loc[3];
    int m = 0;
    for (int v = 0; v <= n; ++v)
      if (v != l) loc[m++] = v;
    if (n == 2) {
      const int i = loc[0], j = loc[1];
      g.col(i) += c * frame.grad.col(j);
      g.col(j) -= c * frame.grad.col(i);
    } else {
      const int i = loc[0], j = loc[1], k = loc[2];
      g.col(i) += 2.0 * c * cross(frame.grad.col(j), frame.grad.col(k));
      g.col(j) += 2.0 * c * cross(frame.grad.col(k), frame.grad.col(i));
      g.col(k) += 2.0 * c * cross(frame.grad.col(i), frame.grad.col(j));
    }
  }
  return g;
}

void require_supported(const SimplicialComplex& complex) {
  if (complex.dim() != 2 && complex.dim() != 3)
    throw GeometryError("Whitney flux forms are implemented for n = 2 and n = 3");
}

// Integral over the cell of |sum_a mu_a G_a|^2, using
// int mu_a mu_b = |T| n! (1 + delta_ab) / (n+2)!.
double squared_norm(const Eigen::MatrixXd& g, double volume, int n) {
  const Eigen::MatrixXd gram = g.transpose() * g;
  const double off = volume / ((n + 1.0) * (n + 2.0));
  return off * (gram.sum() + gram.trace());
}

double interior_l2(const SimplicialComplex& complex, const Eigen::VectorXd& values) {
  Eigen::VectorXd masked = values;
  for (int f : complex.boundary_faces()) masked[f] = 0.0;
  double total = 0.0;
  for (int c = 0; c < complex.num_cells(); ++c) {
    const CellFrame frame = cell_frame(complex, c);
    total += squared_norm(whitney_coefficients(complex, frame, c, masked), frame.volume,
                          complex.dim());
  }
  return std::sqrt(total);
}

}  // namespace

FormValue whitney_flux_at_point(const SimplicialComplex& complex, const Eigen::VectorXd& flux,
                                int cell, const Point& x) {
  require_supported(complex);
  if (flux.size() != complex.num_faces())
    throw GeometryError("flux cochain has the wrong length");
  if (cell < 0 || cell >= complex.num_cells())
    throw GeometryError("cell index " + std::to_string(cell) + " out of range");
  const int n = complex.dim();
  const CellFrame frame = cell_frame(complex, cell);
  Eigen::VectorXd mu(n + 1);
  mu.tail(n) = frame.grad.rightCols(n).transpose() * (x - frame.points.col(0));
  mu[0] = 1.0 - mu.tail(n).sum();
  if (mu.minCoeff() < -kInsideTolerance)
    throw GeometryError("point lies outside cell " + std::to_string(cell));
  const Eigen::MatrixXd g = whitney_coefficients(complex, frame, cell, flux);
  FormValue out;
  out.degree = n - 1;
  out.coefficients = g * mu;
  return out;
}

Point velocity_from_flux_form(const FormValue& value, int n) {
  if ((n != 2 && n != 3) || value.degree != n - 1 || value.coefficients.size() != n)
    throw GeometryError("velocity needs an (n-1)-form with n in {2, 3}");
  Point v(n);
  if (n == 2) {
    v[0] = value.coefficients[1];
    v[1] = -value.coefficients[0];
  } else {
    v = value.coefficients;
  }
  return v;
}

Eigen::MatrixXd velocity_at_barycenters(const SimplicialComplex& complex,
                                        const Eigen::VectorXd& flux) {
  const int n = complex.dim();
  Eigen::MatrixXd out(complex.num_cells(), n);
  for (int c = 0; c < complex.num_cells(); ++c) {
    const Point bary = complex.simplex_points(n, c).rowwise().mean();
    out.row(c) = velocity_from_flux_form(whitney_flux_at_point(complex, flux, c, bary), n).transpose();
  }
  return out;
}

double flux_error_norm(const SimplicialComplex& complex, const Eigen::VectorXd& computed,
                       const Eigen::VectorXd& exact) {
  require_supported(complex);
  if (computed.size() != complex.num_faces() || exact.size() != complex.num_faces())
    throw GeometryError("flux cochain has the wrong length");
  const double err = interior_l2(complex, computed - exact);
  const double ref = interior_l2(complex, exact);
  return ref > 0.0 ? err / ref : err;
}

double flux_error_norm(const SimplicialComplex& complex, const Eigen::VectorXd& computed,
                       const VectorField& velocity) {
  return flux_error_norm(complex, computed, flux_cochain(complex, velocity));
}

double pressure_error_norm(const SimplicialComplex& complex, const DualMeasures& measures,
                           const Eigen::VectorXd& computed, const ScalarField& exact) {
  const int n = complex.dim();
  const int cells = complex.num_cells();
  if (computed.size() != cells) throw GeometryError("pressure cochain has the wrong length");
  Eigen::VectorXd w(cells), pex(cells);
  for (int c = 0; c < cells; ++c) {
    w[c] = measures.primal_volume[n][c];
    pex[c] = exact(measures.center_point[n][c]);
  }
  const double shift = w.dot(computed - pex) / w.sum();
  const Eigen::VectorXd diff = computed.array() - shift - pex.array();
  const double err = std::sqrt(w.dot(diff.cwiseProduct(diff)));
  const double ref = std::sqrt(w.dot(pex.cwiseProduct(pex)));
  return ref > 0.0 ? err / ref : err;
}

double pressure_cell_l2_error(const SimplicialComplex& complex, const Eigen::VectorXd& computed,
                              const ScalarField& exact) {
  const int n = complex.dim();
  const int cells = complex.num_cells();
  if (computed.size() != cells) throw GeometryError("pressure cochain has the wrong length");
  Eigen::VectorXd area(cells), mean(cells);
  for (int c = 0; c < cells; ++c) {
    const Eigen::MatrixXd pts = complex.simplex_points(n, c);
    area[c] = simplex_volume(pts);
    mean[c] = integrate_over_simplex(pts, exact) / area[c];
  }
  const double shift = area.dot(computed - mean) / area.sum();
  double err = 0.0, ref = 0.0;
  for (int c = 0; c < cells; ++c) {
    const Eigen::MatrixXd pts = complex.simplex_points(n, c);
    const double pc = computed[c] - shift;
    err += integrate_over_simplex(pts, [&](const Point& x) {
      const double d = pc - exact(x);
      return d * d;
    });
    ref += integrate_over_simplex(pts, [&](const Point& x) { return exact(x) * exact(x); });
  }
  return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
}

}  // namespace decflow
