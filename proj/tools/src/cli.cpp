#include "decflow/cli.hpp"

#include "decflow/hodge.hpp"
#include "decflow/whitney.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace decflow::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

int to_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(what + ": '" + text + "' is not an integer");
  return v;
}

std::vector<double> to_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item, what));
  return out;
}

struct GridSpec {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<int> divisions;
};

// square:N | square:NX,NY | rect:X0,Y0,X1,Y1:NX,NY | cube:N | cube:NX,NY,NZ | box:...:NX,NY,NZ
std::optional<GridSpec> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2) return std::nullopt;
  const std::string& kind = parts[0];
  if (kind != "square" && kind != "rect" && kind != "cube" && kind != "box") return std::nullopt;
  const int n = (kind == "square" || kind == "rect") ? 2 : 3;
  const bool unit = kind == "square" || kind == "cube";
  if (parts.size() != (unit ? 2u : 3u))
    throw ConfigError("mesh spec '" + text + "' has the wrong number of ':' sections");
  GridSpec g;
  g.lower = Eigen::VectorXd::Zero(n);
  g.upper = Eigen::VectorXd::Ones(n);
  if (!unit) {
    const auto corners = to_doubles(parts[1], "mesh box");
    if (static_cast<int>(corners.size()) != 2 * n)
      throw ConfigError("mesh spec '" + text + "' needs " + std::to_string(2 * n) + " box coordinates");
    for (int d = 0; d < n; ++d) {
      g.lower[d] = corners[static_cast<std::size_t>(d)];
      g.upper[d] = corners[static_cast<std::size_t>(n + d)];
    }
  }
  const auto div = split(parts.back(), ',');
  if (div.size() == 1) {
    g.divisions.assign(static_cast<std::size_t>(n), to_int(div[0], "mesh divisions"));
  } else if (static_cast<int>(div.size()) == n) {
    for (const auto& d : div) g.divisions.push_back(to_int(d, "mesh divisions"));
  } else {
    throw ConfigError("mesh spec '" + text + "' needs 1 or " + std::to_string(n) + " division counts");
  }
  for (int d : g.divisions)
    if (d < 1) throw ConfigError("mesh divisions must be at least 1");
  return g;
}

GridPattern parse_pattern(const std::string& text) {
  if (text == "right") return GridPattern::right;
  if (text == "offset") return GridPattern::offset_columns;
  if (text == "offset-rows") return GridPattern::offset_rows;
  throw ConfigError("unknown mesh pattern '" + text + "' (right, offset, offset-rows)");
}

struct Split {
  int axis = 0;
  double at = 0.0;
  double low = 1.0;
  double high = 1.0;
};

Split parse_split(const std::string& text) {
  // x=0.5:1,100
  const auto eq = text.find('=');
  const auto colon = text.find(':');
  if (eq != 1 || colon == std::string::npos || colon < eq)
    throw ConfigError("--kappa-split expects <axis>=<coordinate>:<k1>,<k2>, got '" + text + "'");
  Split s;
  const char axis = text[0];
  if (axis < 'x' || axis > 'z') throw ConfigError("--kappa-split axis must be x, y or z");
  s.axis = axis - 'x';
  s.at = to_double(text.substr(eq + 1, colon - eq - 1), "--kappa-split coordinate");
  const auto k = to_doubles(text.substr(colon + 1), "--kappa-split values");
  if (k.size() != 2) throw ConfigError("--kappa-split needs exactly two permeabilities");
  s.low = k[0];
  s.high = k[1];
  return s;
}

std::map<double, double> parse_regions(const std::string& text) {
  std::map<double, double> out;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--kappa-regions expects <region>=<k> pairs");
    out[to_double(item.substr(0, eq), "region label")] = to_double(item.substr(eq + 1), "region permeability");
  }
  return out;
}

void check_positive(const std::vector<double>& values, const std::string& what) {
  for (double v : values)
    if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

int kappa_sources(const RunConfig& c) {
  return (c.kappa ? 1 : 0) + (c.kappa_split.empty() ? 0 : 1) + (c.kappa_layers.empty() ? 0 : 1) +
         (c.kappa_regions.empty() ? 0 : 1);
}

bool uniform_kappa(const RunConfig& c) {
  return c.kappa_split.empty() && c.kappa_layers.empty() && c.kappa_regions.empty();
}

double uniform_value(const RunConfig& c) { return c.kappa.value_or(1.0); }

// Sign of the permutation that sorts `v`.
int sort_parity(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j)
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        sign = -sign;
      }
  return sign;
}

std::vector<std::pair<int, double>> read_bc_file(const std::string& path, const SimplicialComplex& complex) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open boundary flux file " + path);
  const int n = complex.dim();
  std::vector<std::pair<int, double>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = path + ":" + std::to_string(number) + ": ";
    if (static_cast<int>(tok.size()) != n + 1)
      throw ParseError(where + "expected " + std::to_string(n) + " vertex indices and a flux value");
    std::vector<int> verts;
    for (int k = 0; k < n; ++k) verts.push_back(to_int(tok[static_cast<std::size_t>(k)], where + "vertex"));
    const double value = to_double(tok.back(), where + "flux");
    const int sign = sort_parity(verts);
    const auto face = complex.find(n - 1, verts);
    if (!face) throw ParseError(where + "no such face in the mesh");
    out.emplace_back(*face, sign * value);
  }
  return out;
}

Point constant_vector(int n, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != n)
    throw ConfigError("--bc-velocity needs " + std::to_string(n) + " components");
  Point p(n);
  for (int d = 0; d < n; ++d) p[d] = v[static_cast<std::size_t>(d)];
  return p;
}

Point unit_x(int n) {
  Point p = Point::Zero(n);
  p[0] = 1.0;
  return p;
}

double max_edge_length(const SimplicialComplex& complex) {
  double h = 0.0;
  for (int e = 0; e < complex.count(1); ++e) h = std::max(h, simplex_volume(complex.simplex_points(1, e)));
  return h;
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(3) << v;
  return ss.str();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

RunConfig defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (command == "convergence") {
    c.mesh = "square:10";
    c.pattern = "offset";
    c.perturb = 0.1;
    c.seed = 7;
    c.case_name = "coscos";
  } else if (command == "barycenter-foil") {
    c.mesh = "square:2";
  }
  return c;
}

MeshData load_mesh(const RunConfig& config) {
  const bool has_mesh = !config.mesh.empty();
  const bool has_files = !config.node_path.empty() || !config.ele_path.empty();
  if (has_mesh == has_files) throw ConfigError("give exactly one mesh source: --mesh or --node/--ele");
  if (has_files) {
    if (config.node_path.empty() || config.ele_path.empty())
      throw ConfigError("--node and --ele must be given together");
    if (config.perturb > 0.0) throw ConfigError("--perturb applies to generated meshes only");
    return read_node_ele(config.node_path, config.ele_path);
  }
  if (auto grid = parse_grid(config.mesh)) {
    GridOptions opt;
    opt.pattern = parse_pattern(config.pattern);
    opt.perturb = config.perturb;
    opt.seed = config.seed;
    return generate_structured(grid->lower, grid->upper, grid->divisions, opt);
  }
  if (config.perturb > 0.0) throw ConfigError("--perturb applies to generated meshes only");
  return read_node_ele(config.mesh + ".node", config.mesh + ".ele");
}

std::function<double(const Point&)> permeability_field(const RunConfig& config,
                                                       const SimplicialComplex& complex) {
  if (kappa_sources(config) > 1)
    throw ConfigError("give at most one of --kappa, --kappa-split, --kappa-layers, --kappa-regions");
  if (!config.kappa_split.empty()) {
    const Split s = parse_split(config.kappa_split);
    check_positive({s.low, s.high}, "permeability");
    if (s.axis >= complex.embedding_dim()) throw ConfigError("--kappa-split axis exceeds the mesh dimension");
    return [s](const Point& x) { return x[s.axis] < s.at ? s.low : s.high; };
  }
  if (!config.kappa_layers.empty()) {
    const auto layers = to_doubles(config.kappa_layers, "--kappa-layers");
    check_positive(layers, "permeability");
    const double y0 = complex.vertices().col(1).minCoeff();
    const double y1 = complex.vertices().col(1).maxCoeff();
    return [layers, y0, y1](const Point& x) {
      const auto count = static_cast<double>(layers.size());
      const auto i = static_cast<long>(std::floor((x[1] - y0) / (y1 - y0) * count));
      return layers[static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(layers.size()) - 1))];
    };
  }
  if (!config.kappa_regions.empty())
    throw ConfigError("region permeabilities have no spatial form; the case needs a field");
  const double k = uniform_value(config);
  check_positive({k}, "permeability");
  return [k](const Point&) { return k; };
}

std::vector<double> cell_permeability(const RunConfig& config, const SimplicialComplex& complex,
                                      const MeshData& mesh) {
  const int n = complex.dim();
  std::vector<double> out(static_cast<std::size_t>(complex.num_cells()));
  if (!config.kappa_regions.empty()) {
    if (kappa_sources(config) > 1)
      throw ConfigError("give at most one of --kappa, --kappa-split, --kappa-layers, --kappa-regions");
    if (mesh.regions.size() != mesh.cells.size())
      throw ConfigError("--kappa-regions needs an .ele file with a region attribute");
    const auto map = parse_regions(config.kappa_regions);
    // complex cells are sorted tuples; match them back to the input elements
    for (std::size_t e = 0; e < mesh.cells.size(); ++e) {
      std::vector<int> t = mesh.cells[e];
      std::sort(t.begin(), t.end());
      const auto cell = complex.find(n, t);
      const auto it = map.find(mesh.regions[e]);
      if (it == map.end())
        throw ConfigError("no permeability given for region " + std::to_string(mesh.regions[e]));
      if (!(it->second > 0.0)) throw ConfigError("permeability must be positive");
      out[static_cast<std::size_t>(*cell)] = it->second;
    }
    return out;
  }
  const auto field = permeability_field(config, complex);
  for (int c = 0; c < complex.num_cells(); ++c) {
    const Point bary = complex.simplex_points(n, c).rowwise().mean();
    out[static_cast<std::size_t>(c)] = field(bary);
  }
  return out;
}

Setup build_setup(const RunConfig& config, MeshData mesh, DualCenter center) {
  if (!(config.mu > 0.0)) throw ConfigError("--mu must be positive");
  Setup s;
  s.mesh = std::move(mesh);
  s.complex = std::make_shared<const SimplicialComplex>(s.mesh.to_complex());
  s.measures = std::make_shared<const DualMeasures>(dual_measures(*s.complex, center));
  const SimplicialComplex& complex = *s.complex;
  const int n = complex.dim();
  const double mu = config.mu;
  s.kappa = cell_permeability(config, complex, s.mesh);

  Eigen::VectorXd source = Eigen::VectorXd::Zero(complex.num_cells());
  const std::string& name = config.case_name;
  if (name == "constant-x") {
    const Point v = config.bc_velocity ? constant_vector(n, *config.bc_velocity) : unit_x(n);
    s.exact_velocity = [v](const Point&) { return v; };
    if (uniform_kappa(config)) {
      const double k = uniform_value(config);
      s.exact_pressure = [v, k, mu](const Point& x) { return -(mu / k) * v.dot(x); };
    }
  } else if (name == "layered") {
    const auto field = permeability_field(config, complex);
    s.exact_velocity = [field, mu, n](const Point& x) {
      Point v = Point::Zero(n);
      v[0] = field(x) / mu;
      return v;
    };
    s.exact_pressure = [](const Point& x) { return -x[0]; };
  } else if (name == "coscos") {
    if (n != 2) throw ConfigError("the coscos case is two-dimensional");
    if (!uniform_kappa(config)) throw ConfigError("the coscos case needs a uniform permeability");
    const double scale = uniform_value(config) / mu;
    constexpr double pi = std::numbers::pi;
    s.exact_pressure = [](const Point& x) { return std::cos(pi * x[0]) * std::cos(pi * x[1]); };
    s.exact_velocity = [scale](const Point& x) {
      Point v(2);
      v << scale * pi * std::sin(pi * x[0]) * std::cos(pi * x[1]),
          scale * pi * std::cos(pi * x[0]) * std::sin(pi * x[1]);
      return v;
    };
    // Stokes-consistent source: the cell integral of div v, computed exactly
    // from the face fluxes so the compatibility condition holds to rounding.
    source = source_from_flux(complex, flux_cochain(complex, *s.exact_velocity));
  } else if (name != "none") {
    throw ConfigError("unknown case '" + name + "' (constant-x, coscos, layered, none)");
  }

  Eigen::VectorXd boundary;
  if (!config.bc_file.empty()) {
    const auto pairs = read_bc_file(config.bc_file, complex);
    boundary = discretize_boundary_flux(complex, pairs);
  } else if (config.bc_velocity) {
    const Point v = constant_vector(n, *config.bc_velocity);
    boundary = discretize_boundary_flux(complex, [v](const Point&) { return v; });
  } else if (s.exact_velocity) {
    boundary = discretize_boundary_flux(complex, *s.exact_velocity);
  } else {
    throw ConfigError("no boundary condition: give --bc-velocity, --bc-file or a named --case");
  }

  DarcyProblem::Data data;
  data.mu = mu;
  data.kappa = s.kappa;
  data.source = source;
  data.boundary_flux = boundary;
  const auto pin = split(config.pin, ':');
  if (pin.empty() || pin.size() > 2) throw ConfigError("--pin expects <cell>[:<value>]");
  data.pin.cell = to_int(pin[0], "--pin cell");
  data.pin.value = pin.size() == 2 ? to_double(pin[1], "--pin value") : 0.0;
  s.problem = DarcyProblem::create(s.complex, s.measures, std::move(data));
  return s;
}

SolveOptions solve_options(const RunConfig& config) {
  SolveOptions o;
  if (config.solver == "schur") {
    o.solver = SolverChoice::schur;
  } else if (config.solver == "direct") {
    o.solver = SolverChoice::direct;
  } else {
    throw ConfigError("unknown solver '" + config.solver + "' (schur, direct)");
  }
  if (!(config.tol > 0.0) || config.tol >= 1.0) throw ConfigError("--tol must lie in (0, 1)");
  o.schur.rel_tol = config.tol;
  o.schur.jacobi = config.jacobi;
  return o;
}

PatchReport run_patch_test(const RunConfig& config, DualCenter center) {
  const auto start = Clock::now();
  Setup s = build_setup(config, load_mesh(config), center);
  if (!s.exact_pressure || !s.exact_velocity)
    throw ConfigError("the patch test needs a case with a known affine solution");
  const DarcySolution sol = solve_darcy(*s.problem, solve_options(config));
  const SimplicialComplex& complex = *s.complex;
  const int n = complex.dim();

  PatchReport r;
  r.dim = n;
  r.cells = complex.num_cells();
  r.stats = sol.stats;
  r.threshold = config.threshold > 0.0 ? config.threshold : (n == 3 ? 1e-9 : 1e-10);

  Eigen::VectorXd exact(complex.num_cells());
  Eigen::VectorXd area(complex.num_cells());
  for (int c = 0; c < complex.num_cells(); ++c) {
    exact[c] = (*s.exact_pressure)(s.measures->center_point[static_cast<std::size_t>(n)][static_cast<std::size_t>(c)]);
    area[c] = s.measures->primal_volume[static_cast<std::size_t>(n)][static_cast<std::size_t>(c)];
  }
  const double shift = area.dot(sol.pressure.values - exact) / area.sum();
  const double scale = exact.cwiseAbs().maxCoeff();
  const double worst = (sol.pressure.values.array() - shift - exact.array()).abs().maxCoeff();
  r.pressure_error = scale > 0.0 ? worst / scale : worst;

  const Eigen::VectorXd fex = flux_cochain(complex, *s.exact_velocity);
  const double fscale = fex.cwiseAbs().maxCoeff();
  double fworst = 0.0;
  for (int f : complex.interior_faces()) fworst = std::max(fworst, std::abs(sol.flux.values[f] - fex[f]));
  r.flux_error = fscale > 0.0 ? fworst / fscale : fworst;
  r.mass_balance = mass_balance_residual(sol, *s.problem).max_abs;
  r.seconds = seconds_since(start);
  return r;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const auto n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport run_convergence(const RunConfig& config) {
  const auto start = Clock::now();
  if (config.levels < 2) throw ConfigError("--levels must be at least 2");
  MeshData mesh = load_mesh(config);
  if (mesh.dim() != 2) throw ConfigError("convergence studies are two-dimensional");
  ConvergenceReport r;
  std::vector<double> hs, fe, pe, pl;
  for (int level = 0; level < config.levels; ++level) {
    if (level > 0) mesh = refine_4to1(mesh);
    Setup s = build_setup(config, mesh);
    if (!s.exact_pressure || !s.exact_velocity)
      throw ConfigError("convergence needs a case with a known solution (coscos)");
    const DarcySolution sol = solve_darcy(*s.problem, solve_options(config));
    ConvergenceLevel l;
    l.cells = s.complex->num_cells();
    l.h = max_edge_length(*s.complex);
    l.flux_error = flux_error_norm(*s.complex, sol.flux.values, *s.exact_velocity);
    l.pressure_error = pressure_error_norm(*s.complex, *s.measures, sol.pressure.values, *s.exact_pressure);
    l.pressure_cell_l2 = pressure_cell_l2_error(*s.complex, sol.pressure.values, *s.exact_pressure);
    l.iterations = sol.stats.iterations;
    r.levels.push_back(l);
    hs.push_back(l.h);
    fe.push_back(l.flux_error);
    pe.push_back(l.pressure_error);
    pl.push_back(l.pressure_cell_l2);
  }
  r.flux_slope = loglog_slope(hs, fe);
  r.pressure_slope = loglog_slope(hs, pe);
  r.pressure_cell_l2_slope = loglog_slope(hs, pl);
  r.monotone = true;
  for (std::size_t i = 1; i < r.levels.size(); ++i)
    if (!(fe[i] < fe[i - 1]) || !(pe[i] < pe[i - 1])) r.monotone = false;
  r.seconds = seconds_since(start);
  return r;
}

MeshReport run_check_mesh(const RunConfig& config) {
  const MeshData mesh = load_mesh(config);
  const SimplicialComplex complex = mesh.to_complex();
  const DualMeasures measures = dual_measures(complex);
  const int n = complex.dim();
  MeshReport r;
  r.dim = n;
  r.vertices = complex.num_vertices();
  r.cells = complex.num_cells();
  r.faces = complex.num_faces();
  r.delaunay = is_delaunay(complex, measures);
  const auto& dual = measures.dual_volume[static_cast<std::size_t>(n - 1)];
  const auto& primal = measures.primal_volume[static_cast<std::size_t>(n - 1)];
  r.min_dual = INFINITY;
  r.max_dual = -INFINITY;
  for (int f : complex.interior_faces()) {
    r.min_dual = std::min(r.min_dual, dual[static_cast<std::size_t>(f)]);
    r.max_dual = std::max(r.max_dual, dual[static_cast<std::size_t>(f)]);
  }
  r.min_primal = *std::min_element(primal.begin(), primal.end());
  r.max_primal = *std::max_element(primal.begin(), primal.end());
  if (kappa_sources(config) > 0 && !(config.kappa && kappa_sources(config) == 1)) {
    const auto kappa = cell_permeability(config, complex, mesh);
    const auto faces = interface_faces(complex, kappa);
    r.interface_faces = static_cast<int>(faces.size());
    r.interface = is_well_centered_interface(complex, measures, faces);
  }
  return r;
}

FoilReport run_barycenter_foil(const RunConfig& config) {
  FoilReport r;
  r.circumcentric = run_patch_test(config, DualCenter::circumcentric);
  r.barycentric = run_patch_test(config, DualCenter::barycentric);
  return r;
}

SolveReport run_solve(const RunConfig& config) {
  Setup s = build_setup(config, load_mesh(config),
                        config.barycentric ? DualCenter::barycentric : DualCenter::circumcentric);
  const DarcySolution sol = solve_darcy(*s.problem, solve_options(config));
  SolveReport r;
  r.complex = s.complex;
  r.measures = s.measures;
  r.cells = s.complex->num_cells();
  r.stats = sol.stats;
  r.mass_balance = mass_balance_residual(sol, *s.problem).max_abs;
  r.pressure = sol.pressure.values;
  r.flux = sol.flux.values;
  r.velocity = velocity_at_barycenters(*s.complex, sol.flux.values);
  if (s.exact_pressure)
    r.pressure_error = pressure_error_norm(*s.complex, *s.measures, sol.pressure.values, *s.exact_pressure);
  if (s.exact_velocity && s.complex->dim() >= 2)
    r.flux_error = flux_error_norm(*s.complex, sol.flux.values, *s.exact_velocity);

  if (!config.out_vtk.empty()) {
    VtkFields fields;
    Eigen::VectorXd kappa(r.cells);
    for (int c = 0; c < r.cells; ++c) kappa[c] = s.kappa[static_cast<std::size_t>(c)];
    fields.cell_scalars = {{"pressure", r.pressure}, {"permeability", kappa}};
    fields.cell_vectors = {{"velocity", r.velocity}};
    write_vtk(config.out_vtk, *s.complex, fields);
  }
  if (!config.out_csv.empty()) {
    write_cells_csv(config.out_csv + ".cells.csv", *s.complex, *s.measures, r.pressure, r.velocity);
    write_faces_csv(config.out_csv + ".faces.csv", *s.complex, r.flux);
  }
  return r;
}

int cmd_generate(const RunConfig& config, std::ostream& out) {
  if (config.out.empty()) throw ConfigError("generate needs --out <basename>");
  const MeshData mesh = load_mesh(config);
  const SimplicialComplex complex = mesh.to_complex();
  write_node_ele(config.out, mesh);
  out << "wrote " << config.out << ".node and " << config.out << ".ele: " << complex.num_vertices()
      << " vertices, " << complex.num_cells() << " cells\n";
  return 0;
}

int cmd_check_mesh(const RunConfig& config, std::ostream& out) {
  const MeshReport r = run_check_mesh(config);
  out << "mesh: dim " << r.dim << ", " << r.vertices << " vertices, " << r.cells << " cells, " << r.faces
      << " faces\n";
  out << "delaunay: " << (r.delaunay.ok ? "yes" : "no") << " (" << r.delaunay.violating_faces.size()
      << " violating, " << r.delaunay.borderline_faces.size() << " with zero dual)\n";
  for (int f : r.delaunay.violating_faces) out << "  violating face " << f << "\n";
  out << "interior dual measure: min " << sci(r.min_dual) << ", max " << sci(r.max_dual) << "\n";
  out << "face measure: min " << sci(r.min_primal) << ", max " << sci(r.max_primal) << "\n";
  if (r.interface) {
    out << "interface: " << r.interface_faces << " faces, " << (r.interface->ok ? "well-centered" : "NOT well-centered")
        << "\n";
    for (const auto& e : r.interface->failures)
      out << "  face " << e.face << " side portions " << sci(e.portion[0]) << ", " << sci(e.portion[1]) << "\n";
  }
  out << verdict(r.passed()) << "\n";
  return r.passed() ? 0 : 1;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const SolveReport r = run_solve(config);
  out << "cells: " << r.cells << "\n";
  out << "solver: " << r.stats.method << ", " << r.stats.iterations << " iterations, relative residual "
      << sci(r.stats.relative_residual) << "\n";
  out << "mass balance max residual: " << sci(r.mass_balance) << "\n";
  if (r.pressure_error) out << "pressure error (area-weighted, relative): " << sci(*r.pressure_error) << "\n";
  if (r.flux_error) out << "flux error (Whitney L2, relative): " << sci(*r.flux_error) << "\n";
  if (!config.out_vtk.empty()) out << "wrote " << config.out_vtk << "\n";
  if (!config.out_csv.empty())
    out << "wrote " << config.out_csv << ".cells.csv and " << config.out_csv << ".faces.csv\n";
  return 0;
}

int cmd_patch_test(const RunConfig& config, std::ostream& out) {
  const PatchReport r = run_patch_test(config);
  out << "patch test: dim " << r.dim << ", " << r.cells << " cells\n";
  out << "pressure error (max relative): " << sci(r.pressure_error) << "\n";
  out << "interior flux error (max relative): " << sci(r.flux_error) << "\n";
  out << "mass balance max residual: " << sci(r.mass_balance) << "\n";
  out << "threshold: " << sci(r.threshold) << ", time " << fixed(r.seconds) << " s\n";
  out << verdict(r.passed()) << "\n";
  return r.passed() ? 0 : 1;
}

int cmd_convergence(const RunConfig& config, std::ostream& out) {
  const ConvergenceReport r = run_convergence(config);
  out << std::setw(8) << "cells" << std::setw(12) << "h" << std::setw(12) << "flux" << std::setw(12)
      << "pressure" << std::setw(12) << "p cell L2" << "\n";
  for (const auto& l : r.levels)
    out << std::setw(8) << l.cells << std::setw(12) << sci(l.h) << std::setw(12) << sci(l.flux_error)
        << std::setw(12) << sci(l.pressure_error) << std::setw(12) << sci(l.pressure_cell_l2) << "\n";
  out << "flux slope: " << fixed(r.flux_slope) << " (expected 1.7 to 2.1)\n";
  out << "pressure slope: " << fixed(r.pressure_slope) << " (expected 0.85 to 1.25)\n";
  out << "pressure cell-L2 slope: " << fixed(r.pressure_cell_l2_slope) << " (diagnostic)\n";
  out << "errors decrease monotonically: " << (r.monotone ? "yes" : "no") << "\n";
  out << "time " << fixed(r.seconds) << " s\n";
  out << verdict(r.passed()) << "\n";
  return r.passed() ? 0 : 1;
}

int cmd_barycenter_foil(const RunConfig& config, std::ostream& out) {
  if (config.barycentric) throw ConfigError("barycenter-foil runs both dual placements itself");
  const FoilReport r = run_barycenter_foil(config);
  out << "circumcentric pressure error: " << sci(r.circumcentric.pressure_error) << ", mass balance "
      << sci(r.circumcentric.mass_balance) << "\n";
  out << "barycentric pressure error:   " << sci(r.barycentric.pressure_error) << ", mass balance "
      << sci(r.barycentric.mass_balance) << "\n";
  out << verdict(r.passed()) << "\n";
  return r.passed() ? 0 : 1;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::string& c = config.command;
    if (c == "generate") return cmd_generate(config, out);
    if (c == "check-mesh") return cmd_check_mesh(config, out);
    if (c == "solve") return cmd_solve(config, out);
    if (c == "patch-test") return cmd_patch_test(config, out);
    if (c == "convergence") return cmd_convergence(config, out);
    if (c == "barycenter-foil") return cmd_barycenter_foil(config, out);
    throw ConfigError("unknown command '" + c + "'");
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace decflow::cli
