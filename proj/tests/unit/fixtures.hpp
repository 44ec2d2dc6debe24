#pragma once

#include "decflow/complex.hpp"
#include "decflow/darcy.hpp"
#include "decflow/meshio.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace decflow::test {

inline std::string data_path(const std::string& name) { return std::string(DECFLOW_TEST_DATA) + "/" + name; }

inline MeshData load_fixture(const std::string& base) {
  return read_node_ele(data_path(base + ".node"), data_path(base + ".ele"));
}

inline MeshData unit_square(int k, GridPattern pattern = GridPattern::right, double perturb = 0.0,
                            std::uint64_t seed = 1) {
  GridOptions opt;
  opt.pattern = pattern;
  opt.perturb = perturb;
  opt.seed = seed;
  return generate_structured(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), {k, k}, opt);
}

inline MeshData unit_cube(int k) {
  return generate_structured(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1), {k, k, k});
}

inline MeshData single_triangle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  MeshData m;
  m.vertices.resize(3, 2);
  m.vertices.row(0) = a.transpose();
  m.vertices.row(1) = b.transpose();
  m.vertices.row(2) = c.transpose();
  m.cells = {{0, 1, 2}};
  return m;
}

/// Two equilateral triangles of side 1 sharing the edge between vertices 1 and 2.
inline MeshData equilateral_pair() {
  MeshData m;
  const double h = std::sqrt(3.0) / 2.0;
  m.vertices.resize(4, 2);
  m.vertices << 0.0, 0.0, 1.0, 0.0, 0.5, h, 1.5, h;
  m.cells = {{0, 1, 2}, {1, 3, 2}};
  return m;
}

/// Relabels vertices by a random permutation and shuffles cell vertex order.
inline MeshData scramble(const MeshData& mesh, std::mt19937_64& rng) {
  const auto nv = static_cast<int>(mesh.vertices.rows());
  std::vector<int> perm(static_cast<std::size_t>(nv));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  MeshData out;
  out.vertices.resize(nv, mesh.vertices.cols());
  for (int v = 0; v < nv; ++v) out.vertices.row(perm[static_cast<std::size_t>(v)]) = mesh.vertices.row(v);
  for (auto cell : mesh.cells) {
    for (int& v : cell) v = perm[static_cast<std::size_t>(v)];
    std::shuffle(cell.begin(), cell.end(), rng);
    out.cells.push_back(cell);
  }
  out.regions = mesh.regions;
  return out;
}

/// Small randomized meshes: jittered squares and cubes of random size, scrambled labels.
inline std::vector<MeshData> random_meshes(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MeshData> out;
  for (int i = 0; i < count; ++i) {
    MeshData m;
    if (i % 3 == 2) {
      m = unit_cube(1 + static_cast<int>(rng() % 3));
      std::uniform_real_distribution<double> jitter(-0.08, 0.08);
      for (int v = 0; v < m.vertices.rows(); ++v)
        for (int d = 0; d < 3; ++d) m.vertices(v, d) += jitter(rng) / 3.0;
    } else {
      const int k = 2 + static_cast<int>(rng() % 5);
      const auto pattern = i % 2 == 0 ? GridPattern::right : GridPattern::offset_columns;
      m = unit_square(k, pattern, 0.2, rng());
    }
    out.push_back(scramble(m, rng));
  }
  return out;
}

/// Rotation by `angle` about an axis plus a translation, applied to every vertex.
inline MeshData rigid_motion(const MeshData& mesh, double angle, const Eigen::Vector3d& shift) {
  MeshData out = mesh;
  const int n = mesh.dim();
  Eigen::MatrixXd r;
  if (n == 2) {
    r.resize(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  } else {
    const Eigen::Vector3d axis = Eigen::Vector3d(1, 2, 3).normalized();
    const Eigen::Matrix3d k{{0, -axis.z(), axis.y()}, {axis.z(), 0, -axis.x()}, {-axis.y(), axis.x(), 0}};
    r = Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1 - std::cos(angle)) * k * k;
  }
  for (int v = 0; v < mesh.vertices.rows(); ++v)
    out.vertices.row(v) = (r * mesh.vertices.row(v).transpose() + shift.head(n)).transpose();
  return out;
}

inline Point point(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

inline Point unit_x(int n) {
  Point p = Point::Zero(n);
  p[0] = 1.0;
  return p;
}

/// Constant-velocity problem with no source, pinned at cell 0 to zero.
inline DarcyProblem flow_problem(const MeshData& mesh, const Point& velocity, std::vector<double> kappa = {},
                                 double mu = 1.0) {
  auto c = std::make_shared<const SimplicialComplex>(mesh.to_complex());
  auto m = std::make_shared<const DualMeasures>(dual_measures(*c));
  DarcyProblem::Data data;
  data.mu = mu;
  data.kappa = kappa.empty() ? std::vector<double>(static_cast<std::size_t>(c->num_cells()), 1.0) : std::move(kappa);
  data.source = Eigen::VectorXd::Zero(c->num_cells());
  data.boundary_flux = discretize_boundary_flux(*c, [velocity](const Point&) { return velocity; });
  return DarcyProblem::create(c, m, std::move(data));
}

}  // namespace decflow::test
