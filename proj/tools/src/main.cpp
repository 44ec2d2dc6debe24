#include "decflow/cli.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

using decflow::cli::RunConfig;

enum Group : unsigned {
  kMesh = 1u,
  kKappa = 2u,
  kPhysics = 4u,
  kSolver = 8u,
  kVtk = 16u,
  kGenerate = 32u,
  kThreshold = 64u,
  kLevels = 128u,
  kBarycentric = 256u,
};

struct Binding {
  CLI::Option* option;
  std::function<void(RunConfig&)> apply;
};

class Parser {
 public:
  // Option values land in `given_`; only options actually set (by flag or
  // config file) are copied over the subcommand's defaults.
  void add_options(CLI::App* sub, unsigned groups) {
    sub->add_option("--config", config_path_, "Read key=value settings from a file (flags win)")
        ->check(CLI::ExistingFile);
    if (groups & kMesh) {
      bind(sub->add_option("--mesh", given_.mesh,
                           "square:N | square:NX,NY | rect:X0,Y0,X1,Y1:NX,NY | cube:N | cube:NX,NY,NZ | "
                           "box:X0,Y0,Z0,X1,Y1,Z1:NX,NY,NZ | basename of a .node/.ele pair"),
           &RunConfig::mesh);
      bind(sub->add_option("--node", given_.node_path, "Triangle/tetgen .node file")->check(CLI::ExistingFile),
           &RunConfig::node_path);
      bind(sub->add_option("--ele", given_.ele_path, "Triangle/tetgen .ele file")->check(CLI::ExistingFile),
           &RunConfig::ele_path);
      bind(sub->add_option("--pattern", given_.pattern, "Generated triangle pattern")
               ->check(CLI::IsMember({"right", "offset", "offset-rows"})),
           &RunConfig::pattern);
      bind(sub->add_option("--perturb", given_.perturb,
                           "Interior vertex jitter as a fraction of the cell size (2D generators)")
               ->check(CLI::Range(0.0, 0.25)),
           &RunConfig::perturb);
      bind(sub->add_option("--seed", given_.seed, "Seed for the jitter"), &RunConfig::seed);
    }
    if (groups & kKappa) {
      bind(sub->add_option("--kappa", kappa_, "Uniform permeability"), [this](RunConfig& c) { c.kappa = kappa_; });
      bind(sub->add_option("--kappa-split", given_.kappa_split, "Two permeabilities split at a plane: x=<c>:k1,k2"),
           &RunConfig::kappa_split);
      bind(sub->add_option("--kappa-layers", given_.kappa_layers,
                           "Equal horizontal layers from bottom to top: k1,k2,..."),
           &RunConfig::kappa_layers);
      bind(sub->add_option("--kappa-regions", given_.kappa_regions,
                           "Permeability per .ele region attribute: r1=k1,r2=k2,..."),
           &RunConfig::kappa_regions);
    }
    if (groups & kPhysics) {
      bind(sub->add_option("--mu", given_.mu, "Viscosity"), &RunConfig::mu);
      bind(sub->add_option("--bc-velocity", bc_velocity_, "Constant boundary velocity, one value per axis")
               ->expected(2, 3)
               ->delimiter(','),
           [this](RunConfig& c) { c.bc_velocity = bc_velocity_; });
      bind(sub->add_option("--bc-file", given_.bc_file,
                           "Boundary fluxes, one face per line: vertex indices then the flux")
               ->check(CLI::ExistingFile),
           &RunConfig::bc_file);
      bind(sub->add_option("--case", given_.case_name, "Named analytic case")
               ->check(CLI::IsMember({"constant-x", "coscos", "layered", "none"})),
           &RunConfig::case_name);
      bind(sub->add_option("--pin", given_.pin, "Pressure pin: <cell>[:<value>]"), &RunConfig::pin);
    }
    if (groups & kSolver) {
      bind(sub->add_option("--solver", given_.solver, "Saddle-point solver")
               ->check(CLI::IsMember({"schur", "direct"})),
           &RunConfig::solver);
      bind(sub->add_option("--tol", given_.tol, "Relative CG tolerance"), &RunConfig::tol);
      bind(sub->add_flag("--jacobi", given_.jacobi, "Jacobi-preconditioned CG"), &RunConfig::jacobi);
    }
    if (groups & kBarycentric)
      bind(sub->add_flag("--barycentric", given_.barycentric, "Place dual vertices at barycenters"),
           &RunConfig::barycentric);
    if (groups & kVtk) {
      bind(sub->add_option("--out-vtk", given_.out_vtk, "Legacy VTK output path"), &RunConfig::out_vtk);
      bind(sub->add_option("--out-csv", given_.out_csv, "CSV prefix: <prefix>.cells.csv and <prefix>.faces.csv"),
           &RunConfig::out_csv);
    }
    if (groups & kGenerate)
      bind(sub->add_option("--out", given_.out, "Output basename for .node/.ele"), &RunConfig::out);
    if (groups & kThreshold)
      bind(sub->add_option("--threshold", given_.threshold, "Pass threshold (default 1e-10 in 2D, 1e-9 in 3D)"),
           &RunConfig::threshold);
    if (groups & kLevels)
      bind(sub->add_option("--levels", given_.levels, "Number of meshes in the refinement sequence")
               ->check(CLI::Range(2, 8)),
           &RunConfig::levels);
  }

  // Fills options not given on the command line from the key=value file.
  void apply_config_file(CLI::App* sub) const {
    if (config_path_.empty()) return;
    for (const auto& item : CLI::ConfigINI().from_file(config_path_)) {
      if (item.name == "++" || item.name == "--") continue;
      CLI::Option* option = nullptr;
      try {
        option = sub->get_option("--" + item.name);
      } catch (const CLI::OptionNotFound&) {
        throw CLI::ConfigError("unknown key '" + item.fullname() + "' in " + config_path_);
      }
      if (option->count() > 0) continue;
      std::vector<std::string> values = item.inputs;
      if (option->get_expected_min() == 0) {
        // flags: accept true/false style values
        if (values.size() != 1) throw CLI::ConfigError("flag '" + item.name + "' takes one value");
        const std::string& v = values.front();
        if (v == "true" || v == "1" || v == "on" || v == "yes") {
          values = {"true"};
        } else if (v == "false" || v == "0" || v == "off" || v == "no") {
          continue;
        } else {
          throw CLI::ConfigError("flag '" + item.name + "' expects true or false");
        }
      }
      option->add_result(values);
      option->run_callback();
    }
  }

  RunConfig resolve(const std::string& command) const {
    RunConfig c = decflow::cli::defaults_for(command);
    bool mesh_given = false;
    bool files_given = false;
    for (const auto& b : bindings_) {
      if (b.option->count() == 0) continue;
      b.apply(c);
      const std::string& name = b.option->get_name();
      if (name == "--mesh") mesh_given = true;
      if (name == "--node" || name == "--ele") files_given = true;
    }
    if (files_given && !mesh_given) c.mesh.clear();
    return c;
  }

 private:
  template <class T>
  void bind(CLI::Option* option, T RunConfig::*field) {
    bindings_.push_back({option, [this, field](RunConfig& c) { c.*field = given_.*field; }});
  }
  void bind(CLI::Option* option, std::function<void(RunConfig&)> apply) {
    bindings_.push_back({option, std::move(apply)});
  }

  RunConfig given_;
  std::string config_path_;
  double kappa_ = 1.0;
  std::vector<double> bc_velocity_;
  std::vector<Binding> bindings_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Darcy flow on simplicial meshes with discrete exterior calculus"};
  app.require_subcommand(1);
  Parser parser;

  struct Command {
    const char* name;
    const char* help;
    unsigned groups;
  };
  const unsigned physics = kMesh | kKappa | kPhysics | kSolver;
  const std::vector<Command> commands = {
      {"generate", "Write a structured mesh as .node/.ele", kMesh | kGenerate},
      {"check-mesh", "Report Delaunay status, interface well-centeredness and dual measures", kMesh | kKappa},
      {"solve", "Solve a Darcy problem and write VTK/CSV fields", physics | kVtk | kBarycentric},
      {"patch-test", "Constant velocity, linear pressure: check exact reproduction", physics | kThreshold},
      {"convergence", "Refinement study on the cos-cos manufactured solution", physics | kLevels},
      {"barycenter-foil", "Patch test with circumcentric and barycentric dual vertices", physics},
  };
  for (const auto& c : commands) parser.add_options(app.add_subcommand(c.name, c.help), c.groups);

  CLI::App* sub = nullptr;
  try {
    app.parse(argc, argv);
    sub = app.get_subcommands().front();
    parser.apply_config_file(sub);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = sub->get_name();
  return decflow::cli::run_command(parser.resolve(command), std::cout, std::cerr);
}
