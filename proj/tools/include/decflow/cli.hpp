#pragma once

#include "decflow/darcy.hpp"
#include "decflow/error.hpp"
#include "decflow/geometry.hpp"
#include "decflow/meshio.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace decflow::cli {

/// Invalid or contradictory command-line settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Everything a subcommand needs; filled from flags and an optional key=value file.
struct RunConfig {
  std::string command;

  // mesh source: a generator spec or file basename in `mesh`, or explicit node/ele paths
  std::string mesh;
  std::string node_path;
  std::string ele_path;
  std::string pattern = "right";
  double perturb = 0.0;
  std::uint64_t seed = 1;

  // permeability: at most one of these
  std::optional<double> kappa;
  std::string kappa_split;    // "x=0.5:1,100"
  std::string kappa_layers;   // "1,10,1,10,1", equal layers along y from bottom to top
  std::string kappa_regions;  // "1=5,2=10", keyed by the .ele region attribute

  double mu = 1.0;
  std::optional<std::vector<double>> bc_velocity;
  std::string bc_file;
  std::string case_name = "constant-x";  // constant-x | coscos | layered | none
  std::string pin = "0:0";

  std::string solver = "schur";
  double tol = 1e-12;
  bool jacobi = false;
  bool barycentric = false;

  std::string out;      // generate: output basename
  std::string out_vtk;  // solve: VTK path
  std::string out_csv;  // solve: prefix for <prefix>.cells.csv and <prefix>.faces.csv

  double threshold = 0.0;  // patch-test pass threshold; 0 selects 1e-10 (2D) or 1e-9 (3D)
  int levels = 4;          // convergence: number of meshes
};

/// Defaults for a subcommand. Convergence starts from a jittered 10x10
/// offset mesh with the cos-cos case; the others from the constant-x case.
RunConfig defaults_for(const std::string& command);

/// Mesh described by the config: generated, or read from .node/.ele files.
MeshData load_mesh(const RunConfig& config);

/// Permeability as a function of position, from the config's κ settings.
/// Region maps have no spatial form and are handled by cell_permeability.
std::function<double(const Point&)> permeability_field(const RunConfig& config,
                                                       const SimplicialComplex& complex);

/// One permeability per cell, evaluated at cell barycenters (or by region label).
std::vector<double> cell_permeability(const RunConfig& config, const SimplicialComplex& complex,
                                      const MeshData& mesh);

/// A solved configuration plus what is known analytically about it.
struct Setup {
  MeshData mesh;
  std::shared_ptr<const SimplicialComplex> complex;
  std::shared_ptr<const DualMeasures> measures;
  std::optional<DarcyProblem> problem;
  std::optional<VectorField> exact_velocity;
  std::optional<ScalarField> exact_pressure;
  std::vector<double> kappa;
};

/// Builds the Darcy problem for a config on the given mesh.
Setup build_setup(const RunConfig& config, MeshData mesh,
                  DualCenter center = DualCenter::circumcentric);

SolveOptions solve_options(const RunConfig& config);

struct PatchReport {
  int dim = 0;
  int cells = 0;
  double pressure_error = 0.0;  // max |p - p_exact| / max |p_exact| at dual vertices, gauge-aligned
  double flux_error = 0.0;      // max over interior faces of |f - f_exact| / max |f_exact|
  double mass_balance = 0.0;    // max |D f - source|
  double threshold = 0.0;
  double seconds = 0.0;
  SolveStats stats;
  bool passed() const { return pressure_error < threshold && flux_error < threshold && mass_balance < threshold; }
};

PatchReport run_patch_test(const RunConfig& config, DualCenter center = DualCenter::circumcentric);

struct ConvergenceLevel {
  int cells = 0;
  double h = 0.0;
  double flux_error = 0.0;
  double pressure_error = 0.0;
  double pressure_cell_l2 = 0.0;
  int iterations = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  double flux_slope = 0.0;
  double pressure_slope = 0.0;
  double pressure_cell_l2_slope = 0.0;
  bool monotone = false;
  double seconds = 0.0;
  bool passed() const {
    return monotone && flux_slope >= 1.7 && flux_slope <= 2.1 && pressure_slope >= 0.85 &&
           pressure_slope <= 1.25;
  }
};

ConvergenceReport run_convergence(const RunConfig& config);

/// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

struct MeshReport {
  int dim = 0;
  int vertices = 0;
  int cells = 0;
  int faces = 0;
  DelaunayReport delaunay;
  std::optional<InterfaceReport> interface;
  int interface_faces = 0;
  double min_dual = 0.0;
  double max_dual = 0.0;
  double min_primal = 0.0;
  double max_primal = 0.0;
  bool passed() const { return delaunay.ok && (!interface || interface->ok); }
};

MeshReport run_check_mesh(const RunConfig& config);

struct FoilReport {
  PatchReport circumcentric;
  PatchReport barycentric;
  bool passed() const {
    return circumcentric.pressure_error < 1e-10 && barycentric.pressure_error > 1e-3 &&
           circumcentric.mass_balance < 1e-10 && barycentric.mass_balance < 1e-10;
  }
};

FoilReport run_barycenter_foil(const RunConfig& config);

struct SolveReport {
  int cells = 0;
  double mass_balance = 0.0;
  SolveStats stats;
  std::optional<double> pressure_error;  // area-weighted, when an exact pressure is known
  std::optional<double> flux_error;      // Whitney L2, when an exact velocity is known
  Eigen::VectorXd pressure;
  Eigen::VectorXd flux;
  Eigen::MatrixXd velocity;  // at barycenters
  std::shared_ptr<const SimplicialComplex> complex;
  std::shared_ptr<const DualMeasures> measures;
};

SolveReport run_solve(const RunConfig& config);

/// Subcommands: print a report and return the exit code (0 pass, 1 threshold failure).
int cmd_generate(const RunConfig& config, std::ostream& out);
int cmd_check_mesh(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_patch_test(const RunConfig& config, std::ostream& out);
int cmd_convergence(const RunConfig& config, std::ostream& out);
int cmd_barycenter_foil(const RunConfig& config, std::ostream& out);

/// Dispatches on config.command and maps errors to exit codes:
/// 2 for configuration, input and ill-posed-problem errors, 1 for solver failures.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace decflow::cli
