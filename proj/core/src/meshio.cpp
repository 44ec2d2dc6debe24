#include "decflow/meshio.hpp"

#include "decflow/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace decflow {

namespace {

namespace fs = std::filesystem;

struct Record {
  int line = 0;
  std::vector<std::string> tokens;
};

std::vector<Record> read_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Record> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    Record r{number, {}};
    for (std::string tok; ss >> tok;) r.tokens.push_back(tok);
    if (!r.tokens.empty()) out.push_back(std::move(r));
  }
  return out;
}

std::string where(const fs::path& path, const Record& r) {
  return path.filename().string() + ":" + std::to_string(r.line) + ": ";
}

long parse_int(const fs::path& path, const Record& r, const std::string& tok) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno != 0)
    throw ParseError(where(path, r) + "expected an integer, got '" + tok + "'");
  return v;
}

double parse_double(const fs::path& path, const Record& r, const std::string& tok) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno != 0 || !std::isfinite(v))
    throw ParseError(where(path, r) + "expected a number, got '" + tok + "'");
  return v;
}

// Checks the running record index against the base fixed by the first record.
void check_index(const fs::path& path, const Record& r, long index, long& base, long position) {
  if (position == 0) {
    if (index != 0 && index != 1)
      throw ParseError(where(path, r) + "first index must be 0 or 1, got " + std::to_string(index));
    base = index;
  }
  if (index != base + position)
    throw ParseError(where(path, r) + "index " + std::to_string(index) + " breaks the " +
                     std::to_string(base) + "-based numbering (mixed or non-contiguous indexing)");
}

double signed_volume(const Eigen::MatrixXd& vertices, const std::vector<int>& cell) {
  const auto n = static_cast<Eigen::Index>(cell.size()) - 1;
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    t.col(i) = (vertices.row(cell[static_cast<std::size_t>(i + 1)]) - vertices.row(cell[0])).transpose();
  return t.determinant();
}

void orient_positive(MeshData& mesh) {
  for (auto& cell : mesh.cells)
    if (signed_volume(mesh.vertices, cell) < 0.0) std::swap(cell[0], cell[1]);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Vertex order of a top simplex that agrees with the mesh orientation.
std::vector<int> oriented_cell(const SimplicialComplex& complex, int cell) {
  const auto s = complex.simplex(complex.dim(), cell);
  std::vector<int> v(s.begin(), s.end());
  if (complex.orientation(cell) < 0) std::swap(v[0], v[1]);
  return v;
}

void check_field_name(const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
    throw MeshError("VTK field name must be a nonempty word: '" + name + "'");
}

MeshData grid_right_2d(const Eigen::VectorXd& lo, const Eigen::VectorXd& h, int nx, int ny) {
  MeshData m;
  m.vertices.resize((nx + 1) * (ny + 1), 2);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices.row(id(i, j)) << lo[0] + i * h[0], lo[1] + j * h[1];
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

// Odd columns carry the midpoints of the even-column spacing plus the two
// boundary points; neighbouring columns are zipped together by height.
MeshData grid_offset_columns(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             const Eigen::VectorXd& h, int nx, int ny) {
  MeshData m;
  std::vector<std::vector<int>> column(static_cast<std::size_t>(nx + 1));
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i <= nx; ++i) {
    const double x = lo[0] + i * h[0];
    std::vector<double> ys;
    if (i % 2 == 0) {
      for (int j = 0; j <= ny; ++j) ys.push_back(lo[1] + j * h[1]);
    } else {
      ys.push_back(lo[1]);
      for (int j = 0; j < ny; ++j) ys.push_back(lo[1] + (j + 0.5) * h[1]);
      ys.push_back(hi[1]);
    }
    for (double y : ys) {
      column[static_cast<std::size_t>(i)].push_back(static_cast<int>(pts.size()));
      pts.push_back({x, y});
    }
  }
  m.vertices.resize(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t v = 0; v < pts.size(); ++v)
    m.vertices.row(static_cast<Eigen::Index>(v)) << pts[v][0], pts[v][1];
  for (int i = 0; i < nx; ++i) {
    const auto& left = column[static_cast<std::size_t>(i)];
    const auto& right = column[static_cast<std::size_t>(i + 1)];
    std::size_t a = 0, b = 0;
    while (a + 1 < left.size() || b + 1 < right.size()) {
      const bool can_left = a + 1 < left.size();
      const bool can_right = b + 1 < right.size();
      const double yl = can_left ? pts[static_cast<std::size_t>(left[a + 1])][1] : INFINITY;
      const double yr = can_right ? pts[static_cast<std::size_t>(right[b + 1])][1] : INFINITY;
      const double cl = pts[static_cast<std::size_t>(left[a])][1];
      const double cr = pts[static_cast<std::size_t>(right[b])][1];
      if (yl < yr || (yl == yr && cl < cr)) {
        m.cells.push_back({left[a], right[b], left[a + 1]});
        ++a;
      } else {
        m.cells.push_back({left[a], right[b], right[b + 1]});
        ++b;
      }
    }
  }
  return m;
}

MeshData grid_kuhn_3d(const Eigen::VectorXd& lo, const Eigen::VectorXd& h, int nx, int ny, int nz) {
  MeshData m;
  m.vertices.resize((nx + 1) * (ny + 1) * (nz + 1), 3);
  auto id = [nx, ny](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.vertices.row(id(i, j, k)) << lo[0] + i * h[0], lo[1] + j * h[1], lo[2] + k * h[2];
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> at{i, j, k};
          std::vector<int> tet{id(at[0], at[1], at[2])};
          for (int axis : p) {
            ++at[static_cast<std::size_t>(axis)];
            tet.push_back(id(at[0], at[1], at[2]));
          }
          m.cells.push_back(std::move(tet));
        }
  return m;
}

double angle_at(const Eigen::MatrixXd& v, int apex, int a, int b) {
  const Eigen::Vector2d u = (v.row(a) - v.row(apex)).transpose();
  const Eigen::Vector2d w = (v.row(b) - v.row(apex)).transpose();
  return std::atan2(std::abs(u.x() * w.y() - u.y() * w.x()), u.dot(w));
}

}  // namespace

MeshData read_node_ele(const fs::path& node_path, const fs::path& ele_path) {
  const auto nodes = read_records(node_path);
  if (nodes.empty()) throw ParseError(node_path.filename().string() + ": missing header");
  const Record& nh = nodes[0];
  if (nh.tokens.size() > 4) throw ParseError(where(node_path, nh) + "malformed header");
  const long nv = parse_int(node_path, nh, nh.tokens[0]);
  const long dim = nh.tokens.size() > 1 ? parse_int(node_path, nh, nh.tokens[1]) : -1;
  const long nattr = nh.tokens.size() > 2 ? parse_int(node_path, nh, nh.tokens[2]) : 0;
  const long nmark = nh.tokens.size() > 3 ? parse_int(node_path, nh, nh.tokens[3]) : 0;
  if (nv < 1 || (dim != 2 && dim != 3) || nattr < 0 || nmark < 0 || nmark > 1)
    throw ParseError(where(node_path, nh) + "malformed header");
  if (static_cast<long>(nodes.size()) - 1 != nv)
    throw ParseError(node_path.filename().string() + ": header declares " + std::to_string(nv) +
                     " vertices, found " + std::to_string(nodes.size() - 1));

  MeshData mesh;
  mesh.vertices.resize(nv, dim);
  long node_base = 0;
  for (long i = 0; i < nv; ++i) {
    const Record& r = nodes[static_cast<std::size_t>(i + 1)];
    if (static_cast<long>(r.tokens.size()) != 1 + dim + nattr + nmark)
      throw ParseError(where(node_path, r) + "expected " + std::to_string(1 + dim + nattr + nmark) +
                       " fields");
    check_index(node_path, r, parse_int(node_path, r, r.tokens[0]), node_base, i);
    for (long d = 0; d < dim; ++d)
      mesh.vertices(i, d) = parse_double(node_path, r, r.tokens[static_cast<std::size_t>(1 + d)]);
  }

  const auto eles = read_records(ele_path);
  if (eles.empty()) throw ParseError(ele_path.filename().string() + ": missing header");
  const Record& eh = eles[0];
  if (eh.tokens.size() < 2 || eh.tokens.size() > 3) throw ParseError(where(ele_path, eh) + "malformed header");
  const long ne = parse_int(ele_path, eh, eh.tokens[0]);
  const long per = parse_int(ele_path, eh, eh.tokens[1]);
  const long eattr = eh.tokens.size() > 2 ? parse_int(ele_path, eh, eh.tokens[2]) : 0;
  if (ne < 1 || eattr < 0) throw ParseError(where(ele_path, eh) + "malformed header");
  if (per != dim + 1)
    throw ParseError(where(ele_path, eh) + std::to_string(per) + " vertices per element do not match dimension " +
                     std::to_string(dim));
  if (static_cast<long>(eles.size()) - 1 != ne)
    throw ParseError(ele_path.filename().string() + ": header declares " + std::to_string(ne) +
                     " elements, found " + std::to_string(eles.size() - 1));
  long ele_base = 0;
  for (long e = 0; e < ne; ++e) {
    const Record& r = eles[static_cast<std::size_t>(e + 1)];
    if (static_cast<long>(r.tokens.size()) != 1 + per + eattr)
      throw ParseError(where(ele_path, r) + "expected " + std::to_string(1 + per + eattr) + " fields");
    check_index(ele_path, r, parse_int(ele_path, r, r.tokens[0]), ele_base, e);
    std::vector<int> cell;
    for (long k = 0; k < per; ++k) {
      const long v = parse_int(ele_path, r, r.tokens[static_cast<std::size_t>(1 + k)]) - node_base;
      if (v < 0 || v >= nv)
        throw ParseError(where(ele_path, r) + "vertex index " + r.tokens[static_cast<std::size_t>(1 + k)] +
                         " out of range");
      cell.push_back(static_cast<int>(v));
    }
    mesh.cells.push_back(std::move(cell));
    if (eattr > 0) mesh.regions.push_back(parse_double(ele_path, r, r.tokens[static_cast<std::size_t>(1 + per)]));
  }
  return mesh;
}

void write_node_ele(const fs::path& base, const MeshData& mesh) {
  const int dim = mesh.dim();
  std::string node = std::to_string(mesh.vertices.rows()) + " " + std::to_string(dim) + " 0 0\n";
  for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
    node += std::to_string(v);
    for (int d = 0; d < dim; ++d) node += " " + fmt17(mesh.vertices(v, d));
    node += "\n";
  }
  const bool regions = !mesh.regions.empty();
  if (regions && mesh.regions.size() != mesh.cells.size())
    throw MeshError("region attributes do not match the element count");
  std::string ele = std::to_string(mesh.cells.size()) + " " + std::to_string(dim + 1) + " " +
                    (regions ? "1" : "0") + "\n";
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    ele += std::to_string(c);
    for (int v : mesh.cells[c]) ele += " " + std::to_string(v);
    if (regions) ele += " " + fmt17(mesh.regions[c]);
    ele += "\n";
  }
  write_file_atomic(fs::path(base.string() + ".node"), node);
  write_file_atomic(fs::path(base.string() + ".ele"), ele);
}

MeshData generate_structured(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const std::vector<int>& divisions, const GridOptions& options) {
  const int n = static_cast<int>(divisions.size());
  if (n != 2 && n != 3) throw MeshError("structured meshes are 2D or 3D");
  if (lower.size() != n || upper.size() != n) throw MeshError("box corners do not match the dimension");
  for (int d = 0; d < n; ++d) {
    if (divisions[static_cast<std::size_t>(d)] < 1) throw MeshError("divisions must be at least 1");
    if (!(upper[d] > lower[d])) throw MeshError("box must have positive extent on every axis");
  }
  if (!(options.perturb >= 0.0) || options.perturb >= 0.25)
    throw MeshError("perturbation must lie in [0, 0.25)");
  if (n == 3 && (options.pattern != GridPattern::right || options.perturb > 0.0))
    throw MeshError("3D meshes support only the unperturbed Kuhn split");

  Eigen::VectorXd h(n);
  for (int d = 0; d < n; ++d) h[d] = (upper[d] - lower[d]) / divisions[static_cast<std::size_t>(d)];

  MeshData mesh;
  if (n == 3) {
    mesh = grid_kuhn_3d(lower, h, divisions[0], divisions[1], divisions[2]);
  } else if (options.pattern == GridPattern::right) {
    mesh = grid_right_2d(lower, h, divisions[0], divisions[1]);
  } else if (options.pattern == GridPattern::offset_columns) {
    mesh = grid_offset_columns(lower, upper, h, divisions[0], divisions[1]);
  } else {
    const Eigen::Vector2d lo(lower[1], lower[0]), hi(upper[1], upper[0]), hs(h[1], h[0]);
    mesh = grid_offset_columns(lo, hi, hs, divisions[1], divisions[0]);
    mesh.vertices.col(0).swap(mesh.vertices.col(1));
  }

  if (options.perturb > 0.0) {
    const double eps = 1e-12 * h.maxCoeff();
    auto on_boundary = [&](Eigen::Index v) {
      for (int d = 0; d < n; ++d)
        if (std::abs(mesh.vertices(v, d) - lower[d]) < eps || std::abs(mesh.vertices(v, d) - upper[d]) < eps)
          return true;
      return false;
    };
    std::vector<bool> fixed(static_cast<std::size_t>(mesh.vertices.rows()), false);
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) fixed[static_cast<std::size_t>(v)] = on_boundary(v);
    std::vector<std::vector<int>> incident(static_cast<std::size_t>(mesh.vertices.rows()));
    for (std::size_t c = 0; c < mesh.cells.size(); ++c)
      for (int v : mesh.cells[c]) incident[static_cast<std::size_t>(v)].push_back(static_cast<int>(c));
    // Offset meshes only accept moves that keep every incident triangle
    // non-obtuse, so uniform refinement of the result stays Delaunay.
    const bool keep_non_obtuse = options.pattern != GridPattern::right;
    auto non_obtuse = [&](int v) {
      for (int c : incident[static_cast<std::size_t>(v)]) {
        const auto& t = mesh.cells[static_cast<std::size_t>(c)];
        for (int l = 0; l < 3; ++l)
          if (angle_at(mesh.vertices, t[static_cast<std::size_t>(l)], t[static_cast<std::size_t>((l + 1) % 3)],
                       t[static_cast<std::size_t>((l + 2) % 3)]) > std::numbers::pi / 2 + 1e-12)
            return false;
      }
      return true;
    };
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
      const double dx = unit(rng), dy = unit(rng);
      if (fixed[static_cast<std::size_t>(v)]) continue;
      const Eigen::RowVector2d old = mesh.vertices.row(v);
      for (double scale = 1.0; scale > 0.1; scale *= 0.5) {
        mesh.vertices(v, 0) = old[0] + scale * options.perturb * h[0] * dx;
        mesh.vertices(v, 1) = old[1] + scale * options.perturb * h[1] * dy;
        if (!keep_non_obtuse || non_obtuse(static_cast<int>(v))) break;
        mesh.vertices.row(v) = old;
      }
    }
  }
  orient_positive(mesh);
  if (options.perturb > 0.0 && options.pattern == GridPattern::right) make_delaunay(mesh);
  return mesh;
}

int make_delaunay(MeshData& mesh) {
  if (mesh.dim() != 2) throw MeshError("edge flips are implemented for triangles only");
  constexpr double kAngleTolerance = 1e-12;
  int flips = 0;
  const int limit = 100 * static_cast<int>(mesh.cells.size()) + 100;
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<int, int>, std::vector<int>> edge_cells;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c)
      for (int l = 0; l < 3; ++l) {
        int a = mesh.cells[c][static_cast<std::size_t>(l)];
        int b = mesh.cells[c][static_cast<std::size_t>((l + 1) % 3)];
        if (a > b) std::swap(a, b);
        edge_cells[{a, b}].push_back(static_cast<int>(c));
      }
    for (const auto& [edge, cells] : edge_cells) {
      if (cells.size() != 2) continue;
      auto opposite = [&](int c) {
        for (int v : mesh.cells[static_cast<std::size_t>(c)])
          if (v != edge.first && v != edge.second) return v;
        return -1;
      };
      const int c0 = cells[0], c1 = cells[1];
      const int p = opposite(c0), q = opposite(c1);
      const double sum = angle_at(mesh.vertices, p, edge.first, edge.second) +
                         angle_at(mesh.vertices, q, edge.first, edge.second);
      if (sum <= std::numbers::pi + kAngleTolerance) continue;
      mesh.cells[static_cast<std::size_t>(c0)] = {p, edge.first, q};
      mesh.cells[static_cast<std::size_t>(c1)] = {q, edge.second, p};
      for (int c : {c0, c1}) {
        auto& cell = mesh.cells[static_cast<std::size_t>(c)];
        if (signed_volume(mesh.vertices, cell) < 0.0) std::swap(cell[0], cell[1]);
      }
      ++flips;
      changed = true;
      break;
    }
    if (flips > limit) throw MeshError("edge flipping did not terminate");
  }
  return flips;
}

MeshData refine_4to1(const MeshData& mesh) {
  if (mesh.dim() != 2) throw MeshError("4-to-1 refinement needs a triangle mesh");
  for (const auto& cell : mesh.cells)
    if (cell.size() != 3) throw MeshError("4-to-1 refinement needs a triangle mesh");
  std::map<std::pair<int, int>, int> midpoint;
  std::vector<Eigen::RowVector2d> added;
  const auto nv = static_cast<int>(mesh.vertices.rows());
  auto mid = [&](int a, int b) {
    const std::pair<int, int> key = std::minmax(a, b);
    auto [it, inserted] = midpoint.try_emplace(key, nv + static_cast<int>(added.size()));
    if (inserted) added.push_back(0.5 * (mesh.vertices.row(a) + mesh.vertices.row(b)));
    return it->second;
  };
  MeshData out;
  out.cells.reserve(mesh.cells.size() * 4);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const int a = mesh.cells[c][0], b = mesh.cells[c][1], d = mesh.cells[c][2];
    const int ab = mid(a, b), bd = mid(b, d), da = mid(d, a);
    out.cells.push_back({a, ab, da});
    out.cells.push_back({ab, b, bd});
    out.cells.push_back({da, bd, d});
    out.cells.push_back({ab, bd, da});
    if (!mesh.regions.empty())
      for (int k = 0; k < 4; ++k) out.regions.push_back(mesh.regions[c]);
  }
  out.vertices.resize(nv + static_cast<Eigen::Index>(added.size()), 2);
  out.vertices.topRows(nv) = mesh.vertices;
  for (std::size_t i = 0; i < added.size(); ++i) out.vertices.row(nv + static_cast<Eigen::Index>(i)) = added[i];
  return out;
}

SimplicialComplex refine_4to1(const SimplicialComplex& complex) {
  if (complex.dim() != 2 || complex.embedding_dim() != 2)
    throw MeshError("4-to-1 refinement needs a planar triangle mesh");
  MeshData mesh;
  mesh.vertices = complex.vertices();
  for (int c = 0; c < complex.num_cells(); ++c) mesh.cells.push_back(oriented_cell(complex, c));
  return refine_4to1(mesh).to_complex();
}

void write_vtk(const fs::path& path, const SimplicialComplex& complex, const VtkFields& fields) {
  const int n = complex.dim();
  const int cells = complex.num_cells();
  std::string s = "# vtk DataFile Version 3.0\ndecflow\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  s += "POINTS " + std::to_string(complex.num_vertices()) + " double\n";
  for (int v = 0; v < complex.num_vertices(); ++v) {
    const Point p = complex.vertex(v);
    for (int d = 0; d < 3; ++d) s += (d ? " " : "") + fmt17(d < p.size() ? p[d] : 0.0);
    s += "\n";
  }
  s += "CELLS " + std::to_string(cells) + " " + std::to_string(cells * (n + 2)) + "\n";
  for (int c = 0; c < cells; ++c) {
    s += std::to_string(n + 1);
    for (int v : oriented_cell(complex, c)) s += " " + std::to_string(v);
    s += "\n";
  }
  const int type = n == 3 ? 10 : n == 2 ? 5 : 3;
  s += "CELL_TYPES " + std::to_string(cells) + "\n";
  for (int c = 0; c < cells; ++c) s += std::to_string(type) + "\n";

  if (!fields.cell_scalars.empty() || !fields.cell_vectors.empty()) {
    s += "CELL_DATA " + std::to_string(cells) + "\n";
    for (const auto& [name, values] : fields.cell_scalars) {
      check_field_name(name);
      if (values.size() != cells) throw MeshError("cell field '" + name + "' has the wrong length");
      s += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
      for (int c = 0; c < cells; ++c) s += fmt17(values[c]) + "\n";
    }
    for (const auto& [name, values] : fields.cell_vectors) {
      check_field_name(name);
      if (values.rows() != cells || values.cols() < 1 || values.cols() > 3)
        throw MeshError("cell vector field '" + name + "' has the wrong shape");
      s += "VECTORS " + name + " double\n";
      for (int c = 0; c < cells; ++c) {
        for (int d = 0; d < 3; ++d) s += (d ? " " : "") + fmt17(d < values.cols() ? values(c, d) : 0.0);
        s += "\n";
      }
    }
  }
  if (!fields.point_scalars.empty()) {
    s += "POINT_DATA " + std::to_string(complex.num_vertices()) + "\n";
    for (const auto& [name, values] : fields.point_scalars) {
      check_field_name(name);
      if (values.size() != complex.num_vertices())
        throw MeshError("point field '" + name + "' has the wrong length");
      s += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index v = 0; v < values.size(); ++v) s += fmt17(values[v]) + "\n";
    }
  }
  write_file_atomic(path, s);
}

void write_cells_csv(const fs::path& path, const SimplicialComplex& complex,
                     const DualMeasures& measures, const Eigen::VectorXd& pressure,
                     const Eigen::MatrixXd& velocity) {
  const int n = complex.dim();
  const int N = complex.embedding_dim();
  const int cells = complex.num_cells();
  if (pressure.size() != cells || velocity.rows() != cells)
    throw MeshError("cell fields do not match the mesh");
  static const char* axis[3] = {"x", "y", "z"};
  std::string s = "cell";
  for (int d = 0; d < N; ++d) s += std::string(",c") + axis[d];
  s += ",pressure";
  for (Eigen::Index d = 0; d < velocity.cols(); ++d) s += std::string(",v") + axis[d];
  s += "\n";
  for (int c = 0; c < cells; ++c) {
    s += std::to_string(c);
    const Point& p = measures.center_point[static_cast<std::size_t>(n)][static_cast<std::size_t>(c)];
    for (int d = 0; d < N; ++d) s += "," + fmt17(p[d]);
    s += "," + fmt17(pressure[c]);
    for (Eigen::Index d = 0; d < velocity.cols(); ++d) s += "," + fmt17(velocity(c, d));
    s += "\n";
  }
  write_file_atomic(path, s);
}

void write_faces_csv(const fs::path& path, const SimplicialComplex& complex,
                     const Eigen::VectorXd& flux) {
  const int n = complex.dim();
  if (flux.size() != complex.num_faces()) throw MeshError("flux cochain does not match the mesh");
  std::string s = "face";
  for (int k = 0; k < n; ++k) s += ",v" + std::to_string(k);
  s += ",boundary,flux\n";
  for (int f = 0; f < complex.num_faces(); ++f) {
    s += std::to_string(f);
    for (int v : complex.simplex(n - 1, f)) s += "," + std::to_string(v);
    s += complex.is_boundary_face(f) ? ",1," : ",0,";
    s += fmt17(flux[f]) + "\n";
  }
  write_file_atomic(path, s);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

}  // namespace decflow
