#include "decflow/linalg.hpp"

#include "decflow/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace decflow {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Union-find over pressure unknowns carrying an additive offset:
// p_i = p_root(i) + offset_i, with an optional fixed value per root.
class OffsetUnionFind {
 public:
  explicit OffsetUnionFind(Eigen::Index size)
      : parent_(static_cast<std::size_t>(size)),
        offset_(static_cast<std::size_t>(size), 0.0),
        fixed_(static_cast<std::size_t>(size), false),
        value_(static_cast<std::size_t>(size), 0.0) {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index{0});
  }

  // Returns the root and the offset of i relative to it.
  std::pair<Eigen::Index, double> find(Eigen::Index i) {
    double off = 0.0;
    Eigen::Index r = i;
    while (parent_[idx(r)] != r) {
      off += offset_[idx(r)];
      r = parent_[idx(r)];
    }
    // path compression
    double acc = off;
    Eigen::Index x = i;
    while (parent_[idx(x)] != r) {
      const Eigen::Index next = parent_[idx(x)];
      const double step = offset_[idx(x)];
      parent_[idx(x)] = r;
      offset_[idx(x)] = acc;
      acc -= step;
      x = next;
    }
    return {r, off};
  }

  // Imposes p_a - p_b = delta. Returns the mismatch if a and b were already linked.
  double relate(Eigen::Index a, Eigen::Index b, double delta) {
    auto [ra, oa] = find(a);
    auto [rb, ob] = find(b);
    if (ra == rb) return (oa - ob) - delta;
    // p_ra + oa - p_rb - ob = delta  =>  p_ra = p_rb + (delta + ob - oa)
    const double shift = delta + ob - oa;
    parent_[idx(ra)] = rb;
    offset_[idx(ra)] = shift;
    if (fixed_[idx(ra)]) {
      const double implied = value_[idx(ra)] - shift;
      if (fixed_[idx(rb)]) return implied - value_[idx(rb)];
      fixed_[idx(rb)] = true;
      value_[idx(rb)] = implied;
    }
    return 0.0;
  }

  // Imposes p_a = value. Returns the mismatch with an earlier fixed value.
  double fix(Eigen::Index a, double value) {
    auto [r, o] = find(a);
    const double root_value = value - o;
    if (fixed_[idx(r)]) return root_value - value_[idx(r)];
    fixed_[idx(r)] = true;
    value_[idx(r)] = root_value;
    return 0.0;
  }

  bool is_fixed(Eigen::Index root) const { return fixed_[idx(root)]; }
  double fixed_value(Eigen::Index root) const { return value_[idx(root)]; }

 private:
  static std::size_t idx(Eigen::Index i) { return static_cast<std::size_t>(i); }
  std::vector<Eigen::Index> parent_;
  std::vector<double> offset_;
  std::vector<bool> fixed_;
  std::vector<double> value_;
};

double rhs_norm(const SaddleSystem& s) {
  return std::sqrt(s.rhs_top.squaredNorm() + s.rhs_bottom.squaredNorm());
}

}  // namespace

void SaddleSystem::validate() const {
  if (b.cols() != a_diag.size())
    throw SolverError("saddle system: B has " + std::to_string(b.cols()) + " columns but A has " +
                      std::to_string(a_diag.size()) + " entries");
  if (rhs_top.size() != a_diag.size() || rhs_bottom.size() != b.rows())
    throw SolverError("saddle system: right-hand side sizes do not match the blocks");
}

double saddle_residual(const SaddleSystem& system, const Eigen::VectorXd& flux,
                       const Eigen::VectorXd& pressure) {
  const Eigen::VectorXd top =
      system.a_diag.cwiseProduct(flux) + system.b.transpose() * pressure - system.rhs_top;
  const Eigen::VectorXd bottom = system.b * flux - system.rhs_bottom;
  const double r = std::sqrt(top.squaredNorm() + bottom.squaredNorm());
  const double scale = rhs_norm(system);
  return scale > 0.0 ? r / scale : r;
}

CgResult conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, double rel_tol,
                            int max_iter, bool jacobi) {
  CgResult out;
  const Eigen::Index n = b.size();
  out.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  SparseMatrix abs_a = a.cwiseAbs();
  const Eigen::VectorXd abs_b = b.cwiseAbs();
  // Componentwise backward error max_i |r_i| / (|b| + |A| |x|)_i: rounding in
  // A x limits each residual entry to about eps (|A| |x|)_i, and rows with
  // small entries must not hide behind a norm dominated by a few large rows.
  auto small_enough = [&](const Eigen::VectorXd& res) {
    const Eigen::VectorXd scale = abs_b + abs_a * out.x.cwiseAbs();
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(res[i]) > rel_tol * scale[i]) return false;
    return true;
  };

  Eigen::VectorXd inv_diag = Eigen::VectorXd::Ones(n);
  if (jacobi) {
    const Eigen::VectorXd d = a.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) inv_diag[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  Eigen::VectorXd ap(n);
  for (int it = 0; it < max_iter; ++it) {
    ap.noalias() = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      out.iterations = it;
      out.relative_residual = r.norm() / bnorm;
      out.converged = small_enough(r);
      return out;
    }
    const double alpha = rz / pap;
    out.x += alpha * p;
    r -= alpha * ap;
    out.iterations = it + 1;
    if (small_enough(r)) {
      // confirm against the true residual to avoid drift in the recurrence
      r = b - a * out.x;
      if (small_enough(r)) {
        out.relative_residual = r.norm() / bnorm;
        out.converged = true;
        return out;
      }
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  r = b - a * out.x;
  out.relative_residual = r.norm() / bnorm;
  out.converged = small_enough(r);
  return out;
}

SaddleSolution schur_solve(const SaddleSystem& system, const SchurOptions& options) {
  system.validate();
  const Eigen::Index m = system.num_flux();
  const Eigen::Index k = system.num_pressure();
  const ColMatrix bc = system.b;  // column access

  double a_scale = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) a_scale = std::max(a_scale, std::abs(system.a_diag[j]));
  std::vector<bool> zero(static_cast<std::size_t>(m), false);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double a = system.a_diag[j];
    if (std::abs(a) <= 1e-14 * a_scale) {
      zero[static_cast<std::size_t>(j)] = true;
    } else if (!(a < 0.0)) {
      throw SolverError("schur_solve: A entry " + std::to_string(j) +
                        " is positive; the Schur complement is not definite (non-Delaunay mesh?)");
    }
  }

  // Pressure relations imposed by zero-A rows.
  OffsetUnionFind uf(k);
  const double consistency_tol = 1e-10 * (1.0 + system.rhs_top.lpNorm<Eigen::Infinity>());
  int condensed = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!zero[static_cast<std::size_t>(j)]) continue;
    ++condensed;
    std::vector<std::pair<Eigen::Index, double>> entries;
    for (ColMatrix::InnerIterator it(bc, j); it; ++it)
      if (it.value() != 0.0) entries.emplace_back(it.row(), it.value());
    double mismatch = 0.0;
    if (entries.size() == 1) {
      mismatch = uf.fix(entries[0].first, system.rhs_top[j] / entries[0].second);
    } else if (entries.size() == 2 && entries[0].second == -entries[1].second) {
      mismatch = uf.relate(entries[0].first, entries[1].first,
                           system.rhs_top[j] / entries[0].second);
    } else {
      throw SolverError("schur_solve: flux unknown " + std::to_string(j) +
                        " has a zero A entry and an unsupported B column (" +
                        std::to_string(entries.size()) + " entries); the system is singular");
    }
    if (std::abs(mismatch) > consistency_tol)
      throw SolverError("schur_solve: inconsistent pressure constraints from zero A entries");
  }

  // Condensed pressure unknowns: one per group whose value is not fixed.
  std::vector<Eigen::Index> root(static_cast<std::size_t>(k));
  std::vector<double> offset(static_cast<std::size_t>(k));
  std::vector<Eigen::Index> group_of_root(static_cast<std::size_t>(k), -1);
  Eigen::Index groups = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    auto [r, o] = uf.find(i);
    root[static_cast<std::size_t>(i)] = r;
    offset[static_cast<std::size_t>(i)] = o;
    if (!uf.is_fixed(r) && group_of_root[static_cast<std::size_t>(r)] < 0)
      group_of_root[static_cast<std::size_t>(r)] = groups++;
  }
  auto group = [&](Eigen::Index i) { return group_of_root[static_cast<std::size_t>(root[static_cast<std::size_t>(i)])]; };
  auto known_part = [&](Eigen::Index i) {
    const auto r = root[static_cast<std::size_t>(i)];
    return offset[static_cast<std::size_t>(i)] + (uf.is_fixed(r) ? uf.fixed_value(r) : 0.0);
  };

  std::vector<Eigen::Index> kept;  // flux unknowns with nonzero A
  for (Eigen::Index j = 0; j < m; ++j)
    if (!zero[static_cast<std::size_t>(j)]) kept.push_back(j);
  const auto nk = static_cast<Eigen::Index>(kept.size());

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd top(nk);
  Eigen::VectorXd inv_a(nk);
  for (Eigen::Index c = 0; c < nk; ++c) {
    const Eigen::Index j = kept[static_cast<std::size_t>(c)];
    double rhs = system.rhs_top[j];
    for (ColMatrix::InnerIterator it(bc, j); it; ++it) {
      rhs -= it.value() * known_part(it.row());
      const Eigen::Index g = group(it.row());
      if (g >= 0) trips.emplace_back(g, c, it.value());
    }
    top[c] = rhs;
    inv_a[c] = 1.0 / system.a_diag[j];
  }
  SparseMatrix bg(groups, nk);
  bg.setFromTriplets(trips.begin(), trips.end());
  bg.prune(0.0);
  Eigen::VectorXd bottom = Eigen::VectorXd::Zero(groups);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index g = group(i);
    if (g >= 0) bottom[g] += system.rhs_bottom[i];
  }

  // Every connected set of condensed pressures must touch a column whose
  // entries do not cancel, otherwise a constant shift is a null vector.
  {
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(groups));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto rootg = [&](Eigen::Index x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      return x;
    };
    const ColMatrix bgc = bg;
    std::vector<bool> grounded(static_cast<std::size_t>(groups), false);
    std::vector<std::pair<Eigen::Index, bool>> col_info;
    for (Eigen::Index c = 0; c < nk; ++c) {
      Eigen::Index first = -1;
      double sum = 0.0;
      double mag = 0.0;
      for (ColMatrix::InnerIterator it(bgc, c); it; ++it) {
        if (first < 0) {
          first = it.row();
        } else {
          parent[static_cast<std::size_t>(rootg(it.row()))] = rootg(first);
        }
        sum += it.value();
        mag += std::abs(it.value());
      }
      if (first >= 0) col_info.emplace_back(first, std::abs(sum) > 1e-12 * mag);
    }
    for (const auto& [row, unbalanced] : col_info)
      if (unbalanced) grounded[static_cast<std::size_t>(rootg(row))] = true;
    for (Eigen::Index g = 0; g < groups; ++g)
      if (!grounded[static_cast<std::size_t>(rootg(g))])
        throw SolverError(
            "pressure nullspace: a set of pressure unknowns is determined only up to a constant "
            "(pin a pressure value)");
  }

  SaddleSolution out;
  out.stats.method = "schur";
  out.stats.condensed_fluxes = condensed;
  out.flux = Eigen::VectorXd::Zero(m);
  out.pressure = Eigen::VectorXd::Zero(k);
  if (m + k == 0) return out;

  // -S = B diag(-1/a) B^T is symmetric positive definite.
  Eigen::VectorXd pg = Eigen::VectorXd::Zero(groups);
  if (groups > 0) {
    const SparseMatrix weighted = bg * (-inv_a).asDiagonal();
    SparseMatrix neg_s = weighted * bg.transpose();
    neg_s.makeCompressed();
    const Eigen::VectorXd rhs = bottom - bg * inv_a.cwiseProduct(top);
    const int max_iter =
        options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * std::max<Eigen::Index>(groups, 1));
    const CgResult cg = conjugate_gradient(neg_s, rhs, options.rel_tol, max_iter, options.jacobi);
    out.stats.iterations = cg.iterations;
    if (!cg.converged)
      throw SolverError("schur_solve: conjugate gradients did not converge in " +
                        std::to_string(cg.iterations) + " iterations (relative residual " +
                        std::to_string(cg.relative_residual) + ")");
    pg = cg.x;
  }

  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index g = group(i);
    out.pressure[i] = known_part(i) + (g >= 0 ? pg[g] : 0.0);
  }
  const Eigen::VectorXd fk = inv_a.cwiseProduct(top - bg.transpose() * pg);
  for (Eigen::Index c = 0; c < nk; ++c) out.flux[kept[static_cast<std::size_t>(c)]] = fk[c];

  if (condensed > 0) {
    // Minimum-norm fluxes on zero-A faces closing the mass balance rows.
    std::vector<Eigen::Triplet<double>> zt;
    std::vector<Eigen::Index> zcols;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!zero[static_cast<std::size_t>(j)]) continue;
      const auto c = static_cast<Eigen::Index>(zcols.size());
      zcols.push_back(j);
      for (ColMatrix::InnerIterator it(bc, j); it; ++it) zt.emplace_back(it.row(), c, it.value());
    }
    SparseMatrix bz(k, static_cast<Eigen::Index>(zcols.size()));
    bz.setFromTriplets(zt.begin(), zt.end());
    Eigen::VectorXd residual = system.rhs_bottom - system.b * out.flux;
    // A free group is closed under the zero-A columns, so its rows of B_Z B_Z^T
    // are singular with the constant as null vector; remove the rounding-level
    // mean of the residual there so that CG sees a consistent system.
    std::vector<double> group_sum(static_cast<std::size_t>(groups), 0.0);
    std::vector<int> group_size(static_cast<std::size_t>(groups), 0);
    for (Eigen::Index i = 0; i < k; ++i)
      if (const Eigen::Index g = group(i); g >= 0) {
        group_sum[static_cast<std::size_t>(g)] += residual[i];
        ++group_size[static_cast<std::size_t>(g)];
      }
    for (Eigen::Index i = 0; i < k; ++i)
      if (const Eigen::Index g = group(i); g >= 0)
        residual[i] -= group_sum[static_cast<std::size_t>(g)] / group_size[static_cast<std::size_t>(g)];
    SparseMatrix lap = bz * bz.transpose();
    lap.makeCompressed();
    const CgResult cg = conjugate_gradient(lap, residual, 1e-13, static_cast<int>(10 * k + 10));
    if (!cg.converged && cg.relative_residual > 1e-8)
      throw SolverError("schur_solve: flux recovery on zero dual edges did not converge");
    const Eigen::VectorXd fz = bz.transpose() * cg.x;
    for (std::size_t c = 0; c < zcols.size(); ++c) out.flux[zcols[c]] = fz[static_cast<Eigen::Index>(c)];
    out.stats.iterations += cg.iterations;
  }

  out.stats.relative_residual = saddle_residual(system, out.flux, out.pressure);
  return out;
}

SaddleSolution direct_solve(const SaddleSystem& system, const DirectOptions& options) {
  system.validate();
  const Eigen::Index m = system.num_flux();
  const Eigen::Index k = system.num_pressure();
  const Eigen::Index dim = m + k;
  if (dim > options.dense_limit)
    throw SolverError("direct_solve: system dimension " + std::to_string(dim) +
                      " exceeds the dense limit " + std::to_string(options.dense_limit));
  SaddleSolution out;
  out.stats.method = "direct";
  if (dim == 0) return out;

  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
  full.topLeftCorner(m, m).diagonal() = system.a_diag;
  for (Eigen::Index i = 0; i < k; ++i)
    for (SparseMatrix::InnerIterator it(system.b, i); it; ++it) {
      full(m + i, it.col()) = it.value();
      full(it.col(), m + i) = it.value();
    }
  Eigen::VectorXd rhs(dim);
  rhs << system.rhs_top, system.rhs_bottom;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(full);
  // rcond() alone misses exactly zero pivots
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = pivots.minCoeff() <= 1e-14 * pivots.maxCoeff() ? 0.0 : lu.rcond();
  if (!(rcond > 1e-14))
    throw SolverError("direct_solve: matrix is singular (reciprocal condition estimate " +
                      std::to_string(rcond) + "); is a pressure pinned?");
  const Eigen::VectorXd x = lu.solve(rhs);
  out.flux = x.head(m);
  out.pressure = x.tail(k);
  out.stats.relative_residual = saddle_residual(system, out.flux, out.pressure);
  if (!(out.stats.relative_residual <= 1e-10))
    throw SolverError("direct_solve: residual " + std::to_string(out.stats.relative_residual) +
                      " above 1e-10; matrix is numerically singular");
  return out;
}

}  // namespace decflow
