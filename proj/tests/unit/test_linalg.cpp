#include "decflow/error.hpp"
#include "decflow/linalg.hpp"
#include "support.hpp"

using namespace decflow;
using doctest::Approx;

namespace {

SparseMatrix sparse(Eigen::Index rows, Eigen::Index cols, const std::vector<Eigen::Triplet<double>>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SaddleSystem scalar_system(double q) {
  SaddleSystem s;
  s.a_diag = Eigen::VectorXd::Constant(1, -1.0);
  s.b = sparse(1, 1, {{0, 0, 1.0}});
  s.rhs_top = Eigen::VectorXd::Zero(1);
  s.rhs_bottom = Eigen::VectorXd::Constant(1, q);
  return s;
}

SaddleSystem two_flux_system() {
  SaddleSystem s;
  s.a_diag = Eigen::Vector2d(-1.0, -1.0);
  s.b = sparse(1, 2, {{0, 0, 1.0}, {0, 1, -1.0}});
  s.rhs_top = Eigen::VectorXd::Zero(2);
  s.rhs_bottom = Eigen::VectorXd::Constant(1, 2.0);
  return s;
}

SaddleSystem patch_system(const MeshData& mesh) {
  const auto problem = test::flow_problem(mesh, test::unit_x(mesh.dim()));
  return eliminate_knowns(assemble_saddle_system(problem), problem.known_fluxes(), problem.pin()).system;
}

/// Random graph-Laplacian-like system: pressures on a path plus random chords,
/// one column touching a single row so no constant nullspace remains.
SaddleSystem random_system(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<Eigen::Triplet<double>> t;
  int col = 0;
  for (int i = 0; i + 1 < k; ++i, ++col) {
    t.emplace_back(i, col, 1.0);
    t.emplace_back(i + 1, col, -1.0);
  }
  for (int extra = 0; extra < k; ++extra) {
    const int i = pick(rng);
    const int j = pick(rng);
    if (i == j) continue;
    t.emplace_back(i, col, -1.0);
    t.emplace_back(j, col, 1.0);
    ++col;
  }
  t.emplace_back(pick(rng), col++, 1.0);
  SaddleSystem s;
  s.b = sparse(k, col, t);
  s.a_diag.resize(col);
  s.rhs_top.resize(col);
  for (int j = 0; j < col; ++j) {
    s.a_diag[j] = -u(rng);
    s.rhs_top[j] = u(rng) - 1.5;
  }
  s.rhs_bottom.resize(k);
  for (int i = 0; i < k; ++i) s.rhs_bottom[i] = u(rng) - 1.5;
  return s;
}

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
  return scale == 0.0 ? 0.0 : (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

TEST_CASE("scalar saddle system") {
  // -f + p = 0 and f = q give p = f = q
  for (const auto& sol : {schur_solve(scalar_system(3.0)), direct_solve(scalar_system(3.0))}) {
    CHECK(sol.flux[0] == Approx(3.0));
    CHECK(sol.pressure[0] == Approx(3.0));
  }
}

TEST_CASE("two fluxes and one pressure") {
  const auto s = two_flux_system();
  const auto a = schur_solve(s);
  const auto b = direct_solve(s);
  CHECK(a.pressure[0] == Approx(1.0));
  CHECK(a.flux[0] == Approx(1.0));
  CHECK(a.flux[1] == Approx(-1.0));
  CHECK(rel_diff(a.flux, b.flux) < 1e-9);
  CHECK(rel_diff(a.pressure, b.pressure) < 1e-9);
  CHECK(a.stats.method == "schur");
  CHECK(b.stats.method == "direct");
}

TEST_CASE("2x2 patch system: Schur matches direct") {
  // 16 edges minus 8 boundary edges; 8 cells minus the pin
  const auto s = patch_system(test::unit_square(2));
  CHECK(s.num_flux() == 8);
  CHECK(s.num_pressure() == 7);
  const auto a = schur_solve(s);
  const auto b = direct_solve(s);
  CHECK(rel_diff(a.flux, b.flux) < 1e-10);
  CHECK(rel_diff(a.pressure, b.pressure) < 1e-10);
  CHECK(a.stats.relative_residual < 1e-12);
  CHECK(saddle_residual(s, b.flux, b.pressure) < 1e-10);
}

TEST_CASE("zero right-hand side gives the zero solution") {
  auto s = two_flux_system();
  s.rhs_bottom.setZero();
  for (const auto& sol : {schur_solve(s), direct_solve(s)}) {
    CHECK(sol.flux.isZero());
    CHECK(sol.pressure.isZero());
  }
}

TEST_CASE("unpinned pressure is singular") {
  // every column of B sums to zero: constant pressure is a null vector
  SaddleSystem s;
  s.a_diag = Eigen::Vector3d(-1.0, -2.0, -1.0);
  s.b = sparse(2, 3, {{0, 0, 1.0}, {1, 0, -1.0}, {0, 1, -1.0}, {1, 1, 1.0}, {0, 2, 1.0}, {1, 2, -1.0}});
  s.rhs_top = Eigen::VectorXd::Zero(3);
  s.rhs_bottom = Eigen::Vector2d(1.0, -1.0);
  CHECK_THROWS_WITH_AS(schur_solve(s), doctest::Contains("pressure nullspace"), SolverError);
  CHECK_THROWS_AS(direct_solve(s), SolverError);
}

TEST_CASE("all fluxes known on a single triangle") {
  const auto mesh = test::single_triangle({0, 0}, {1, 0}, {0.5, 0.8});
  const auto problem = test::flow_problem(mesh, test::point({1.0, 0.5}));
  const auto full = assemble_saddle_system(problem);
  const auto unpinned = eliminate_knowns(full, problem.known_fluxes(), std::nullopt);
  CHECK(unpinned.system.num_flux() == 0);
  CHECK(unpinned.system.num_pressure() == 1);
  CHECK_THROWS_AS(schur_solve(unpinned.system), SolverError);
  CHECK_THROWS_AS(direct_solve(unpinned.system), SolverError);
  const auto pinned = eliminate_knowns(full, problem.known_fluxes(), PressurePin{0, 2.5});
  CHECK(pinned.system.dim() == 0);
  CHECK(schur_solve(pinned.system).flux.size() == 0);
}

TEST_CASE("Schur and direct agree on random systems up to the dense limit") {
  std::mt19937_64 rng(99);
  for (int k : {1, 2, 5, 17, 60, 250, 900}) {
    const auto s = random_system(k, rng);
    REQUIRE(s.dim() <= 4000);
    const auto a = schur_solve(s);
    const auto b = direct_solve(s);
    CHECK(rel_diff(a.flux, b.flux) < 1e-9);
    CHECK(rel_diff(a.pressure, b.pressure) < 1e-9);
    CHECK(saddle_residual(s, a.flux, a.pressure) < 1e-10);
  }
  int tested = 0;
  for (const auto& mesh : test::random_meshes(12, 5)) {
    const auto c = mesh.to_complex();
    if (!is_delaunay(c, dual_measures(c)).ok) continue;
    ++tested;
    const auto s = patch_system(mesh);
    if (s.dim() > 4000) continue;
    const auto a = schur_solve(s);
    const auto b = direct_solve(s);
    CHECK(rel_diff(a.pressure, b.pressure) < 1e-9);
    CHECK(rel_diff(a.flux, b.flux) < 1e-9);
  }
  CHECK(tested >= 4);
}

TEST_CASE("zero A entries are condensed") {
  // a zero dual edge between pressures 0 and 1 ties them together
  SaddleSystem s;
  s.a_diag = Eigen::Vector3d(-1.0, 0.0, -1.0);
  s.b = sparse(2, 3, {{0, 0, 1.0}, {0, 1, -1.0}, {1, 1, 1.0}, {1, 2, 1.0}});
  s.rhs_top = Eigen::VectorXd::Zero(3);
  s.rhs_bottom = Eigen::Vector2d(1.0, 1.0);
  const auto a = schur_solve(s);
  CHECK(a.stats.condensed_fluxes == 1);
  CHECK(a.pressure[0] == Approx(a.pressure[1]));
  CHECK(saddle_residual(s, a.flux, a.pressure) < 1e-12);
  const auto b = direct_solve(s);
  CHECK(rel_diff(a.flux, b.flux) < 1e-9);
  CHECK(rel_diff(a.pressure, b.pressure) < 1e-9);
}

TEST_CASE("solver errors") {
  auto s = two_flux_system();
  s.a_diag[1] = 1.0;
  CHECK_THROWS_AS(schur_solve(s), SolverError);
  auto bad = two_flux_system();
  bad.rhs_top = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bad.validate(), SolverError);
  CHECK_THROWS_AS(schur_solve(bad), SolverError);
  std::mt19937_64 rng(1);
  const auto big = random_system(40, rng);
  CHECK_THROWS_AS(direct_solve(big, DirectOptions{10}), SolverError);
  SchurOptions one;
  one.max_iter = 1;
  CHECK_THROWS_WITH_AS(schur_solve(big, one), doctest::Contains("did not converge"), SolverError);
}

TEST_CASE("conjugate gradients") {
  const SparseMatrix a = sparse(3, 3, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}, {2, 2, 2.0}});
  const Eigen::Vector3d b(1.0, 2.0, 4.0);
  for (bool jacobi : {false, true}) {
    const auto r = conjugate_gradient(a, b, 1e-14, 30, jacobi);
    CHECK(r.converged);
    CHECK(r.iterations <= 3);
    CHECK(r.x[0] == Approx(1.0 / 11.0));
    CHECK(r.x[1] == Approx(7.0 / 11.0));
    CHECK(r.x[2] == Approx(2.0));
  }
  const auto zero = conjugate_gradient(a, Eigen::Vector3d::Zero(), 1e-12, 10);
  CHECK(zero.converged);
  CHECK(zero.iterations == 0);
}

TEST_CASE("solves are deterministic") {
  const auto s = patch_system(test::unit_square(6, GridPattern::offset_columns, 0.2, 9));
  const auto a = schur_solve(s);
  const auto b = schur_solve(s);
  CHECK(a.stats.iterations == b.stats.iterations);
  CHECK((a.flux.array() == b.flux.array()).all());
  CHECK((a.pressure.array() == b.pressure.array()).all());
}
