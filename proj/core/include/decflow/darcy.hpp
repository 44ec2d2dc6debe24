#pragma once

#include "decflow/complex.hpp"
#include "decflow/geometry.hpp"
#include "decflow/linalg.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace decflow {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// Fixes the additive pressure constant: pressure of `cell` equals `value`.
struct PressurePin {
  int cell = 0;
  double value = 0.0;
};

/// Flux on a single face: integral over the face of the (n-1)-form i_v(vol),
/// i.e. the flux of v through the face counted positive in the direction
/// that makes (normal, face orientation) positively oriented. For a face
/// oriented as the boundary of a positively oriented cell this is the
/// outward flux.
double face_flux(const SimplicialComplex& complex, int face, const VectorField& velocity);

/// de Rham map of the flux form of `velocity` onto every (n-1)-face.
Eigen::VectorXd flux_cochain(const SimplicialComplex& complex, const VectorField& velocity);

/// Boundary flux cochain from a velocity field: values on boundary faces,
/// zero on interior faces.
Eigen::VectorXd discretize_boundary_flux(const SimplicialComplex& complex,
                                         const VectorField& velocity);

/// Boundary flux cochain from explicit per-face values (already in the face's
/// orientation). Throws ProblemError for interior, duplicate or out-of-range faces.
Eigen::VectorXd discretize_boundary_flux(const SimplicialComplex& complex,
                                         std::span<const std::pair<int, double>> face_values);

/// Source n-cochain: integral of phi over each top simplex (degree-4 quadrature),
/// signed positive for the mesh orientation.
Eigen::VectorXd discretize_source(const SimplicialComplex& complex, const ScalarField& phi);

/// Source n-cochain obtained by Stokes from a known flux cochain: D_{n-1} flux.
/// Use when the velocity field is known; the result is exactly consistent with
/// the boundary values of the same flux cochain.
Eigen::VectorXd source_from_flux(const SimplicialComplex& complex, const Eigen::VectorXd& flux);

/// Immutable Darcy problem on a fixed mesh.
class DarcyProblem {
 public:
  struct Data {
    double mu = 1.0;
    /// One positive permeability per top simplex.
    std::vector<double> kappa;
    /// n-cochain phi*omega.
    Eigen::VectorXd source;
    /// (n-1)-cochain psi*gamma; only the boundary entries are used.
    Eigen::VectorXd boundary_flux;
    PressurePin pin;
  };

  /// Validates and freezes the problem. Throws ProblemError for nonpositive
  /// viscosity or permeability, mismatched sizes, an invalid pin, a domain with
  /// more than one connected component, or data violating
  /// sum(source) = sum over boundary of (signed) boundary flux.
  static DarcyProblem create(std::shared_ptr<const SimplicialComplex> complex,
                             std::shared_ptr<const DualMeasures> measures, Data data);

  const SimplicialComplex& complex() const { return *complex_; }
  const DualMeasures& measures() const { return *measures_; }
  std::shared_ptr<const SimplicialComplex> complex_ptr() const { return complex_; }
  std::shared_ptr<const DualMeasures> measures_ptr() const { return measures_; }
  double mu() const { return data_.mu; }
  std::span<const double> kappa() const { return data_.kappa; }
  const Eigen::VectorXd& source() const { return data_.source; }
  const Eigen::VectorXd& boundary_flux() const { return data_.boundary_flux; }
  const PressurePin& pin() const { return data_.pin; }

  /// Known boundary values as (face, value) pairs.
  std::vector<std::pair<int, double>> known_fluxes() const;

 private:
  DarcyProblem() = default;
  std::shared_ptr<const SimplicialComplex> complex_;
  std::shared_ptr<const DualMeasures> measures_;
  Data data_;
};

/// Relative tolerance on the data consistency condition.
inline constexpr double kConsistencyTolerance = 1e-10;

/// Full system [-mu (M^k)_{n-1}, D^T; D, 0] [f; p] = [0; source] over every face and cell,
/// where (M^k)_{n-1} is the permeability-weighted Hodge star (hetero_hodge).
SaddleSystem assemble_saddle_system(const DarcyProblem& problem);

/// Reduced system after removing known fluxes and the pinned pressure, with
/// the bookkeeping needed to expand a reduced solution.
struct ReducedSystem {
  SaddleSystem system;
  std::vector<int> flux_unknowns;      // original face index per reduced flux
  std::vector<int> pressure_unknowns;  // original cell index per reduced pressure
  Eigen::VectorXd known_flux;          // full length; zero where unknown
  std::optional<PressurePin> pin;

  /// Reinserts eliminated values.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> expand(const Eigen::VectorXd& flux,
                                                     const Eigen::VectorXd& pressure) const;
};

/// Moves known columns to the right-hand side and deletes the matching rows and columns.
/// Throws ProblemError for duplicate or out-of-range indices.
ReducedSystem eliminate_knowns(const SaddleSystem& system,
                               std::span<const std::pair<int, double>> known_fluxes,
                               std::optional<PressurePin> pin);

enum class SolverChoice { schur, direct };

struct SolveOptions {
  SolverChoice solver = SolverChoice::schur;
  SchurOptions schur;
  DirectOptions direct;
};

struct DarcySolution {
  Cochain flux;      // primal (n-1)-cochain, boundary values included
  Cochain pressure;  // dual 0-cochain, one value per top simplex (at its circumcenter)
  SolveStats stats;
};

DarcySolution solve_darcy(const DarcyProblem& problem, const SolveOptions& options = {});

struct MassBalance {
  Eigen::VectorXd residual;  // D_{n-1} flux - source, per cell
  double max_abs = 0.0;
  double global_sum = 0.0;
};

MassBalance mass_balance_residual(const DarcySolution& solution, const DarcyProblem& problem);

/// Residual of the first block row of the identity-block form
///   f - (1/mu) (M^k_{n-1})^{-1} D^T p = 0
/// on interior faces, relative to max |f|. Equivalent to the symmetric form
/// whenever every interior dual edge is nonzero.
double identity_form_residual(const DarcySolution& solution, const DarcyProblem& problem);

}  // namespace decflow
