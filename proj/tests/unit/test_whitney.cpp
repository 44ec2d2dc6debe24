#include "decflow/darcy.hpp"
#include "decflow/error.hpp"
#include "decflow/whitney.hpp"
#include "support.hpp"

using namespace decflow;
using doctest::Approx;
using test::point;

namespace {

FormValue form(std::initializer_list<double> xs) {
  FormValue f;
  f.degree = static_cast<int>(xs.size()) == 2 ? 1 : 2;
  f.coefficients = test::point(xs);
  return f;
}

Point random_point_in(const SimplicialComplex& c, int cell, std::mt19937_64& rng) {
  const int n = c.dim();
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = e(rng);
  w /= w.sum();
  return c.simplex_points(n, cell) * w;
}

/// |W(c)|^2 integrated with the edge-midpoint rule, exact for the quadratic integrand.
double midpoint_l2(const SimplicialComplex& c, const Eigen::VectorXd& cochain) {
  double sum = 0.0;
  for (int t = 0; t < c.num_cells(); ++t) {
    const Eigen::MatrixXd p = c.simplex_points(2, t);
    const double area = 0.5 * std::abs((p(0, 1) - p(0, 0)) * (p(1, 2) - p(1, 0)) - (p(0, 2) - p(0, 0)) * (p(1, 1) - p(1, 0)));
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
      const Point mid = 0.5 * (p.col(i) + p.col(j));
      sum += area / 3.0 * whitney_flux_at_point(c, cochain, t, mid).coefficients.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("Whitney forms reproduce face indicators") {
  for (const auto& mesh : test::random_meshes(6, 3)) {
    const auto c = mesh.to_complex();
    const int n = c.dim();
    const auto d = c.exterior_derivative_matrix(n - 1);
    for (int cell = 0; cell < std::min(c.num_cells(), 5); ++cell) {
      std::vector<int> faces;
      for (IntSparseMatrix::InnerIterator it(d, cell); it; ++it) faces.push_back(static_cast<int>(it.col()));
      REQUIRE(faces.size() == static_cast<std::size_t>(n + 1));
      for (int sigma : faces) {
        Eigen::VectorXd indicator = Eigen::VectorXd::Zero(c.num_faces());
        indicator[sigma] = 1.0;
        const VectorField v = [&](const Point& x) {
          return velocity_from_flux_form(whitney_flux_at_point(c, indicator, cell, x), n);
        };
        for (int tau : faces) CHECK(face_flux(c, tau, v) == Approx(tau == sigma ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("zero cochain interpolates to zero") {
  const auto c = test::unit_cube(2).to_complex();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(c.num_faces());
  std::mt19937_64 rng(2);
  for (int cell = 0; cell < c.num_cells(); ++cell) {
    const auto f = whitney_flux_at_point(c, zero, cell, random_point_in(c, cell, rng));
    CHECK(f.degree == 2);
    CHECK(f.coefficients.size() == 3);
    CHECK(f.coefficients.isZero());
  }
}

TEST_CASE("velocity of a flux form") {
  CHECK(velocity_from_flux_form(form({1.0, 0.0}), 2).isApprox(point({0.0, -1.0})));
  CHECK(velocity_from_flux_form(form({0.0, 1.0}), 2).isApprox(point({1.0, 0.0})));
  CHECK(velocity_from_flux_form(form({1.0, 0.0, 0.0}), 3).isApprox(point({1.0, 0.0, 0.0})));
  CHECK(velocity_from_flux_form(form({0.5, -2.0, 3.0}), 3).isApprox(point({0.5, -2.0, 3.0})));
  CHECK_THROWS_AS(velocity_from_flux_form(form({1.0, 0.0}), 3), GeometryError);
  CHECK_THROWS_AS(velocity_from_flux_form(form({1.0, 0.0, 0.0}), 2), GeometryError);
  FormValue zero_form{0, Eigen::VectorXd::Ones(1)};
  CHECK_THROWS_AS(velocity_from_flux_form(zero_form, 2), GeometryError);
}

TEST_CASE("patch solution on the 2x2 square is dy at every barycenter") {
  const auto problem = test::flow_problem(test::unit_square(2), test::unit_x(2));
  const auto sol = solve_darcy(problem);
  const auto& c = problem.complex();
  for (int cell = 0; cell < c.num_cells(); ++cell) {
    const Point g = c.simplex_points(2, cell).rowwise().mean();
    const auto f = whitney_flux_at_point(c, sol.flux.values, cell, g);
    CHECK(f.coefficients[0] == Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(f.coefficients[1] == Approx(1.0));
  }
  const Eigen::MatrixXd v = velocity_at_barycenters(c, sol.flux.values);
  CHECK(v.rows() == c.num_cells());
  CHECK((v.col(0).array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(v.col(1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant fields are reproduced everywhere") {
  std::mt19937_64 rng(5);
  for (const auto& mesh : test::random_meshes(9, 77)) {
    const auto c = mesh.to_complex();
    const int n = c.dim();
    Point v(n);
    for (int i = 0; i < n; ++i) v[i] = 0.7 * i - 0.4;
    const auto f = flux_cochain(c, [&](const Point&) { return v; });
    const Eigen::MatrixXd bary = velocity_at_barycenters(c, f);
    for (int cell = 0; cell < c.num_cells(); ++cell) {
      CHECK((bary.row(cell).transpose() - v).norm() < 1e-12);
      const Point x = random_point_in(c, cell, rng);
      CHECK((velocity_from_flux_form(whitney_flux_at_point(c, f, cell, x), n) - v).norm() < 1e-12);
    }
  }
}

TEST_CASE("points outside the cell are rejected") {
  const auto c = test::single_triangle({0, 0}, {1, 0}, {0, 1}).to_complex();
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(3);
  CHECK_NOTHROW(whitney_flux_at_point(c, f, 0, point({0.5, 0.5})));
  CHECK_THROWS_AS(whitney_flux_at_point(c, f, 0, point({0.6, 0.6})), GeometryError);
  CHECK_THROWS_AS(whitney_flux_at_point(c, f, 0, point({-0.01, 0.2})), GeometryError);
}

TEST_CASE("flux error norm") {
  const auto c = test::unit_square(6, GridPattern::offset_columns, 0.15, 3).to_complex();
  const auto exact = flux_cochain(c, [](const Point& x) { return point({1.0 + x[1], x[0]}); });
  CHECK(flux_error_norm(c, exact, exact) == 0.0);
  CHECK(flux_error_norm(c, Eigen::VectorXd::Zero(c.num_faces()), exact) == Approx(1.0));
  CHECK(flux_error_norm(c, exact, [](const Point& x) { return point({1.0 + x[1], x[0]}); }) < 1e-14);

  // boundary faces do not count
  Eigen::VectorXd boundary_only = exact;
  for (int b : c.boundary_faces()) boundary_only[b] += 0.3;
  CHECK(flux_error_norm(c, boundary_only, exact) == 0.0);

  // independent oracle: midpoint quadrature of the interpolated interior error
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.01);
  Eigen::VectorXd computed = exact;
  for (int f : c.interior_faces()) computed[f] += g(rng);
  Eigen::VectorXd err = computed - exact;
  Eigen::VectorXd ref = exact;
  for (int b : c.boundary_faces()) err[b] = ref[b] = 0.0;
  const double expect = midpoint_l2(c, err) / midpoint_l2(c, ref);
  CHECK(flux_error_norm(c, computed, exact) == Approx(expect).epsilon(1e-12));
  CHECK(flux_error_norm(c, computed, exact) > 0.0);
  CHECK_THROWS_AS(flux_error_norm(c, Eigen::VectorXd::Zero(3), exact), GeometryError);
}

TEST_CASE("pressure error norms") {
  const auto c = test::unit_square(5, GridPattern::offset_columns, 0.1, 2).to_complex();
  const auto m = dual_measures(c);
  const ScalarField p = [](const Point& x) { return 1.0 + x[0] * x[0] - 2.0 * x[1]; };
  Eigen::VectorXd at_cc(c.num_cells());
  for (int i = 0; i < c.num_cells(); ++i) at_cc[i] = p(m.circumcenter(2, i));
  CHECK(pressure_error_norm(c, m, at_cc, p) == Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(pressure_error_norm(c, m, (at_cc.array() + 4.0).matrix(), p) == Approx(0.0).scale(1.0).epsilon(1e-14));

  // oracle: a single cell off by d after the area-weighted gauge shift
  const double d = 0.01;
  Eigen::VectorXd bumped = at_cc;
  bumped[7] += d;
  double total = 0.0, ref = 0.0;
  for (int i = 0; i < c.num_cells(); ++i) {
    total += m.primal_volume[2][i];
    ref += m.primal_volume[2][i] * at_cc[i] * at_cc[i];
  }
  const double shift = m.primal_volume[2][7] * d / total;
  double err = 0.0;
  for (int i = 0; i < c.num_cells(); ++i) {
    const double e = (i == 7 ? d : 0.0) - shift;
    err += m.primal_volume[2][i] * e * e;
  }
  CHECK(pressure_error_norm(c, m, bumped, p) == Approx(std::sqrt(err / ref)).epsilon(1e-12));

  // constant exact field: every constant computed field aligns to zero error
  const ScalarField one = [](const Point&) { return 1.0; };
  CHECK(pressure_cell_l2_error(c, Eigen::VectorXd::Constant(c.num_cells(), 5.0), one) < 1e-14);
  // piecewise-constant approximation of a linear field converges at first order
  const ScalarField lin = [](const Point& x) { return x[0]; };
  auto cell_means = [&](const SimplicialComplex& k) {
    Eigen::VectorXd out(k.num_cells());
    for (int i = 0; i < k.num_cells(); ++i) out[i] = lin(k.simplex_points(2, i).rowwise().mean());
    return out;
  };
  const auto coarse = test::unit_square(8).to_complex();
  const auto fine = test::unit_square(16).to_complex();
  const double ec = pressure_cell_l2_error(coarse, cell_means(coarse), lin);
  const double ef = pressure_cell_l2_error(fine, cell_means(fine), lin);
  CHECK(ec / ef == Approx(2.0).epsilon(0.01));
  CHECK_THROWS_AS(pressure_error_norm(c, m, Eigen::VectorXd::Zero(2), p), GeometryError);
}
