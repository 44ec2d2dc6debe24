#include "decflow/geometry.hpp"

#include "decflow/error.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace decflow {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double max_edge(const Eigen::MatrixXd& pts) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    for (Eigen::Index j = i + 1; j < pts.cols(); ++j)
      best = std::max(best, (pts.col(i) - pts.col(j)).norm());
  return best;
}

Eigen::MatrixXd edge_vectors(const Eigen::MatrixXd& pts) {
  return pts.rightCols(pts.cols() - 1).colwise() - pts.col(0);
}

}  // namespace

double simplex_volume(const Eigen::MatrixXd& points) {
  const Eigen::Index k = points.cols() - 1;
  if (k <= 0) return 1.0;
  const Eigen::MatrixXd e = edge_vectors(points);
  // Avoid the Gram determinant: its square root turns rounding of order
  // eps |e|^(2k) into volume errors of order sqrt(eps) for thin simplices.
  if (e.rows() == e.cols()) return std::abs(e.determinant()) / factorial(static_cast<int>(k));
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(e);
  const double det = qr.matrixQR().diagonal().head(k).prod();
  return std::abs(det) / factorial(static_cast<int>(k));
}

Point circumcenter(const Eigen::MatrixXd& points) {
  const Eigen::Index k = points.cols() - 1;
  if (k == 0) return points.col(0);
  const Eigen::MatrixXd e = edge_vectors(points);
  const Eigen::MatrixXd gram = e.transpose() * e;
  const double h = max_edge(points);
  if (!(simplex_volume(points) >= 1e-12 * std::pow(h, static_cast<double>(k))))
    throw GeometryError("circumcenter of degenerate " + std::to_string(k) + "-simplex");
  // |c - p_i|^2 = |c - p_0|^2 for all i, with c = p_0 + E lambda.
  const Eigen::VectorXd rhs = 0.5 * gram.diagonal();
  const Eigen::VectorXd lambda = gram.partialPivLu().solve(rhs);
  return points.col(0) + e * lambda;
}

Eigen::VectorXd barycentric_coordinates(const Eigen::MatrixXd& points, const Point& x) {
  const Eigen::Index k = points.cols() - 1;
  Eigen::VectorXd out(k + 1);
  if (k == 0) {
    out(0) = 1.0;
    return out;
  }
  const Eigen::MatrixXd e = edge_vectors(points);
  const Eigen::VectorXd tail =
      (e.transpose() * e).partialPivLu().solve(e.transpose() * (x - points.col(0)));
  out.tail(k) = tail;
  out(0) = 1.0 - tail.sum();
  return out;
}

double face_length_scale(const SimplicialComplex& complex, int face) {
  double h = 0.0;
  for (int c : complex.cofaces(face))
    if (c >= 0) h = std::max(h, max_edge(complex.simplex_points(complex.dim(), c)));
  return h;
}

DualMeasures dual_measures(const SimplicialComplex& complex, DualCenter center) {
  const int n = complex.dim();
  const int big_n = complex.embedding_dim();
  DualMeasures m;
  m.center = center;

  for (int k = 0; k <= n; ++k) {
    const int count = complex.count(k);
    auto& centers = m.center_point[k];
    auto& primal = m.primal_volume[k];
    centers.resize(count);
    primal.resize(count);
    for (int i = 0; i < count; ++i) {
      const Eigen::MatrixXd pts = complex.simplex_points(k, i);
      primal[i] = simplex_volume(pts);
      if (center == DualCenter::circumcentric) {
        centers[i] = circumcenter(pts);
      } else {
        centers[i] = pts.rowwise().mean();
      }
    }
    m.dual_volume[k].assign(count, 0.0);
  }
  m.side_portion.assign(complex.num_faces(), {0.0, 0.0});

  // Walk every chain from a top simplex down to each of its faces, one vertex
  // removed at a time. `chain` holds the centers visited so far (top first).
  Eigen::MatrixXd chain_pts(big_n, n + 1);
  std::function<void(int, std::vector<int>&, int, int)> descend;
  descend = [&](int k, std::vector<int>& verts, int depth, int sign) {
    const int self = *complex.find(k, verts);
    const Eigen::MatrixXd pts = complex.simplex_points(k, self);
    Eigen::VectorXd bary;
    if (center == DualCenter::circumcentric) bary = barycentric_coordinates(pts, m.center_point[k][self]);
    for (int drop = 0; drop <= k && k >= 1; ++drop) {
      std::vector<int> sub;
      sub.reserve(k);
      for (int r = 0; r <= k; ++r)
        if (r != drop) sub.push_back(verts[r]);
      const int sub_index = *complex.find(k - 1, sub);
      int s = sign;
      if (center == DualCenter::circumcentric) {
        // The center of the larger simplex lies on the same side of the
        // smaller one as the dropped vertex iff its barycentric weight there is positive.
        const double w = bary(drop);
        s *= (w > 0.0) ? 1 : (w < 0.0 ? -1 : 0);
      }
      chain_pts.col(depth + 1) = m.center_point[k - 1][sub_index];
      Eigen::MatrixXd piece(big_n, depth + 2);
      for (int c = 0; c <= depth + 1; ++c) piece.col(c) = chain_pts.col(depth + 1 - c);
      const double vol = s == 0 ? 0.0 : s * simplex_volume(piece);
      m.dual_volume[k - 1][sub_index] += vol;
      descend(k - 1, sub, depth + 1, s);
    }
  };

  for (int cell = 0; cell < complex.num_cells(); ++cell) {
    const auto s = complex.simplex(n, cell);
    std::vector<int> verts(s.begin(), s.end());
    chain_pts.col(0) = m.center_point[n][cell];
    m.dual_volume[n][cell] = 1.0;
    descend(n, verts, 0, 1);
  }

  // Side portions of (n-1)-faces, snapped to zero below the local tolerance.
  for (int f = 0; f < complex.num_faces(); ++f) {
    const auto cf = complex.cofaces(f);
    const double h = face_length_scale(complex, f);
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      const int cell = cf[side];
      if (cell < 0) continue;
      double len = (m.center_point[n][cell] - m.center_point[n - 1][f]).norm();
      if (center == DualCenter::circumcentric) {
        int local = 0;
        while (complex.cell_face(cell, local) != f) ++local;
        const Eigen::VectorXd bary =
            barycentric_coordinates(complex.simplex_points(n, cell), m.center_point[n][cell]);
        if (bary(local) < 0.0) len = -len;
      }
      if (std::abs(len) < kDualTolerance * h) len = 0.0;
      m.side_portion[f][side] = len;
      total += len;
    }
    m.dual_volume[n - 1][f] = total;
  }
  return m;
}

DelaunayReport is_delaunay(const SimplicialComplex& complex, const DualMeasures& measures) {
  DelaunayReport report;
  const int n = complex.dim();
  for (int f = 0; f < complex.num_faces(); ++f) {
    if (complex.is_boundary_face(f)) continue;
    const double tol = kDualTolerance * face_length_scale(complex, f);
    const double d = measures.dual_volume[n - 1][f];
    if (d < -tol) {
      report.violating_faces.push_back(f);
    } else if (d <= tol) {
      report.borderline_faces.push_back(f);
    }
  }
  report.ok = report.violating_faces.empty();
  return report;
}

InterfaceReport is_well_centered_interface(const SimplicialComplex& complex,
                                           const DualMeasures& measures,
                                           std::span<const int> interface_faces) {
  InterfaceReport report;
  for (int f : interface_faces) {
    if (f < 0 || f >= complex.num_faces())
      throw MeshError("interface face index " + std::to_string(f) + " out of range");
    if (complex.is_boundary_face(f))
      throw MeshError("interface face " + std::to_string(f) + " lies on the boundary");
    const auto& p = measures.side_portion[f];
    if (!(p[0] > 0.0 && p[1] > 0.0)) report.failures.push_back({f, p});
  }
  report.ok = report.failures.empty();
  return report;
}

}  // namespace decflow
