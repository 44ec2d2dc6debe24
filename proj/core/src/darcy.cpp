#include "decflow/darcy.hpp"

#include "decflow/error.hpp"
#include "decflow/hodge.hpp"
#include "decflow/quadrature.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace decflow {

namespace {

void require_flat(const SimplicialComplex& complex) {
  if (complex.embedding_dim() != complex.dim())
    throw GeometryError("flux discretization requires a flat mesh (embedding dimension = n)");
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double face_flux(const SimplicialComplex& complex, int face, const VectorField& velocity) {
  require_flat(complex);
  const int n = complex.dim();
  const Eigen::MatrixXd pts = complex.simplex_points(n - 1, face);
  Eigen::MatrixXd frame(n, n);
  frame.rightCols(n - 1) = pts.rightCols(n - 1).colwise() - pts.col(0);
  const QuadratureRule& rule = simplex_rule(n - 1);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Point x = pts * rule.barycentric[q].head(n);
    frame.col(0) = velocity(x);
    sum += rule.weights[q] * frame.determinant();
  }
  return sum / factorial(n - 1);
}

Eigen::VectorXd flux_cochain(const SimplicialComplex& complex, const VectorField& velocity) {
  Eigen::VectorXd out(complex.num_faces());
  for (int f = 0; f < complex.num_faces(); ++f) out[f] = face_flux(complex, f, velocity);
  return out;
}

Eigen::VectorXd discretize_boundary_flux(const SimplicialComplex& complex,
                                         const VectorField& velocity) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(complex.num_faces());
  for (int f : complex.boundary_faces()) out[f] = face_flux(complex, f, velocity);
  return out;
}

Eigen::VectorXd discretize_boundary_flux(const SimplicialComplex& complex,
                                         std::span<const std::pair<int, double>> face_values) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(complex.num_faces());
  std::vector<bool> seen(complex.num_faces(), false);
  for (const auto& [f, value] : face_values) {
    if (f < 0 || f >= complex.num_faces())
      throw ProblemError("boundary flux face index " + std::to_string(f) + " out of range");
    if (!complex.is_boundary_face(f))
      throw ProblemError("face " + std::to_string(f) + " is not on the boundary");
    if (seen[f]) throw ProblemError("boundary flux given twice for face " + std::to_string(f));
    seen[f] = true;
    out[f] = value;
  }
  return out;
}

Eigen::VectorXd discretize_source(const SimplicialComplex& complex, const ScalarField& phi) {
  const int n = complex.dim();
  Eigen::VectorXd out(complex.num_cells());
  for (int c = 0; c < complex.num_cells(); ++c)
    out[c] = integrate_over_simplex(complex.simplex_points(n, c), phi);
  return out;
}

Eigen::VectorXd source_from_flux(const SimplicialComplex& complex, const Eigen::VectorXd& flux) {
  if (flux.size() != complex.num_faces())
    throw ProblemError("flux cochain has the wrong length");
  return complex.exterior_derivative_matrix(complex.dim() - 1).cast<double>() * flux;
}

DarcyProblem DarcyProblem::create(std::shared_ptr<const SimplicialComplex> complex,
                                  std::shared_ptr<const DualMeasures> measures, Data data) {
  if (!complex || !measures) throw ProblemError("problem needs a complex and its dual measures");
  const SimplicialComplex& k = *complex;
  if (!(data.mu > 0.0) || !std::isfinite(data.mu)) throw ProblemError("viscosity must be positive");
  if (static_cast<int>(data.kappa.size()) != k.num_cells())
    throw ProblemError("permeability needs one value per top simplex");
  for (double kap : data.kappa)
    if (!(kap > 0.0) || !std::isfinite(kap)) throw ProblemError("permeability must be positive");
  if (data.source.size() != k.num_cells())
    throw ProblemError("source cochain needs one value per top simplex");
  if (data.boundary_flux.size() != k.num_faces())
    throw ProblemError("boundary flux cochain needs one value per (n-1)-face");
  if (data.pin.cell < 0 || data.pin.cell >= k.num_cells())
    throw ProblemError("pinned cell " + std::to_string(data.pin.cell) + " out of range");
  if (static_cast<int>(measures->side_portion.size()) != k.num_faces())
    throw ProblemError("dual measures do not belong to this complex");
  if (k.num_components() != 1)
    throw ProblemError("domain has " + std::to_string(k.num_components()) +
                       " connected components; exactly one is supported");

  double inflow = 0.0;
  double scale = 0.0;
  for (int f : k.boundary_faces()) {
    const double v = k.incidence(k.cofaces(f)[0], f) * data.boundary_flux[f];
    inflow += v;
    scale += std::abs(v);
  }
  const double produced = data.source.sum();
  scale += data.source.cwiseAbs().sum();
  if (std::abs(produced - inflow) > kConsistencyTolerance * scale)
    throw ProblemError("inconsistent data: total source " + std::to_string(produced) +
                       " differs from net boundary outflow " + std::to_string(inflow));

  DarcyProblem p;
  p.complex_ = std::move(complex);
  p.measures_ = std::move(measures);
  p.data_ = std::move(data);
  return p;
}

std::vector<std::pair<int, double>> DarcyProblem::known_fluxes() const {
  std::vector<std::pair<int, double>> out;
  for (int f : complex_->boundary_faces()) out.emplace_back(f, data_.boundary_flux[f]);
  return out;
}

SaddleSystem assemble_saddle_system(const DarcyProblem& problem) {
  const SimplicialComplex& complex = problem.complex();
  const DiagonalOperator weighted = hetero_hodge(complex, problem.measures(), problem.kappa());
  SaddleSystem sys;
  sys.a_diag = -problem.mu() * weighted.diag;
  sys.b = complex.exterior_derivative_matrix(complex.dim() - 1).cast<double>();
  sys.rhs_top = Eigen::VectorXd::Zero(complex.num_faces());
  sys.rhs_bottom = problem.source();
  return sys;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ReducedSystem::expand(
    const Eigen::VectorXd& flux, const Eigen::VectorXd& pressure) const {
  Eigen::VectorXd f = known_flux;
  for (std::size_t i = 0; i < flux_unknowns.size(); ++i) f[flux_unknowns[i]] = flux[static_cast<Eigen::Index>(i)];
  Eigen::VectorXd p = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(pressure_unknowns.size()) + (pin ? 1 : 0));
  for (std::size_t i = 0; i < pressure_unknowns.size(); ++i)
    p[pressure_unknowns[i]] = pressure[static_cast<Eigen::Index>(i)];
  if (pin) p[pin->cell] = pin->value;
  return {f, p};
}

ReducedSystem eliminate_knowns(const SaddleSystem& system,
                               std::span<const std::pair<int, double>> known_fluxes,
                               std::optional<PressurePin> pin) {
  system.validate();
  const auto m = static_cast<int>(system.num_flux());
  const auto k = static_cast<int>(system.num_pressure());
  ReducedSystem out;
  out.pin = pin;
  out.known_flux = Eigen::VectorXd::Zero(m);
  std::vector<bool> known(m, false);
  for (const auto& [f, value] : known_fluxes) {
    if (f < 0 || f >= m) throw ProblemError("known flux index " + std::to_string(f) + " out of range");
    if (known[f]) throw ProblemError("known flux index " + std::to_string(f) + " given twice");
    known[f] = true;
    out.known_flux[f] = value;
  }
  if (pin && (pin->cell < 0 || pin->cell >= k))
    throw ProblemError("pinned pressure index " + std::to_string(pin->cell) + " out of range");

  std::vector<int> col_map(m, -1);
  for (int j = 0; j < m; ++j)
    if (!known[j]) {
      col_map[j] = static_cast<int>(out.flux_unknowns.size());
      out.flux_unknowns.push_back(j);
    }
  std::vector<int> row_map(k, -1);
  for (int i = 0; i < k; ++i)
    if (!pin || i != pin->cell) {
      row_map[i] = static_cast<int>(out.pressure_unknowns.size());
      out.pressure_unknowns.push_back(i);
    }

  const auto mr = static_cast<Eigen::Index>(out.flux_unknowns.size());
  const auto kr = static_cast<Eigen::Index>(out.pressure_unknowns.size());
  SaddleSystem& r = out.system;
  r.a_diag.resize(mr);
  r.rhs_top.resize(mr);
  for (Eigen::Index c = 0; c < mr; ++c) {
    r.a_diag[c] = system.a_diag[out.flux_unknowns[static_cast<std::size_t>(c)]];
    r.rhs_top[c] = system.rhs_top[out.flux_unknowns[static_cast<std::size_t>(c)]];
  }
  r.rhs_bottom.resize(kr);
  for (Eigen::Index c = 0; c < kr; ++c)
    r.rhs_bottom[c] = system.rhs_bottom[out.pressure_unknowns[static_cast<std::size_t>(c)]];

  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < k; ++i) {
    for (SparseMatrix::InnerIterator it(system.b, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      const int ri = row_map[i];
      const int cj = col_map[j];
      if (ri >= 0 && cj >= 0) {
        trips.emplace_back(ri, cj, it.value());
      } else if (ri >= 0) {
        // known flux column moves to the continuity right-hand side
        r.rhs_bottom[ri] -= it.value() * out.known_flux[j];
      } else if (cj >= 0) {
        // pinned pressure column moves to the Darcy right-hand side
        r.rhs_top[cj] -= it.value() * pin->value;
      }
    }
  }
  r.b.resize(kr, mr);
  r.b.setFromTriplets(trips.begin(), trips.end());
  r.b.makeCompressed();
  return out;
}

DarcySolution solve_darcy(const DarcyProblem& problem, const SolveOptions& options) {
  const SimplicialComplex& complex = problem.complex();
  const SaddleSystem full = assemble_saddle_system(problem);
  const auto known = problem.known_fluxes();
  const ReducedSystem reduced = eliminate_knowns(full, known, problem.pin());
  const SaddleSolution sol = options.solver == SolverChoice::direct
                                 ? direct_solve(reduced.system, options.direct)
                                 : schur_solve(reduced.system, options.schur);
  auto [f, p] = reduced.expand(sol.flux, sol.pressure);
  DarcySolution out;
  out.flux = {complex.dim() - 1, CochainKind::primal, std::move(f)};
  out.pressure = {0, CochainKind::dual, std::move(p)};
  out.stats = sol.stats;
  return out;
}

MassBalance mass_balance_residual(const DarcySolution& solution, const DarcyProblem& problem) {
  const SimplicialComplex& complex = problem.complex();
  solution.flux.check_against(complex);
  MassBalance mb;
  mb.residual = source_from_flux(complex, solution.flux.values) - problem.source();
  mb.max_abs = mb.residual.size() ? mb.residual.cwiseAbs().maxCoeff() : 0.0;
  mb.global_sum = mb.residual.sum();
  return mb;
}

double identity_form_residual(const DarcySolution& solution, const DarcyProblem& problem) {
  const SimplicialComplex& complex = problem.complex();
  const DiagonalOperator inv = hetero_hodge_inverse(complex, problem.measures(), problem.kappa());
  const Eigen::VectorXd grad = complex.exterior_derivative_matrix(complex.dim() - 1)
                                   .cast<double>()
                                   .transpose() *
                               solution.pressure.values;
  const Eigen::VectorXd& f = solution.flux.values;
  double worst = 0.0;
  for (int face : complex.interior_faces())
    worst = std::max(worst, std::abs(f[face] - inv.diag[face] * grad[face] / problem.mu()));
  const double scale = f.cwiseAbs().maxCoeff();
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace decflow
