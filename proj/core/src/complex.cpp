#include "decflow/complex.hpp"

#include "decflow/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace decflow {

namespace {

using Tuple = std::array<int, 4>;

bool tuple_less(std::span<const int> a, std::span<const int> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string tuple_string(std::span<const int> t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + "]";
}

// Unsigned k-volume of the simplex spanned by the columns of `pts`.
double gram_volume(const Eigen::MatrixXd& pts) {
  const Eigen::Index k = pts.cols() - 1;
  if (k == 0) return 1.0;
  Eigen::MatrixXd e = pts.rightCols(k).colwise() - pts.col(0);
  const double det = (e.transpose() * e).determinant();
  double fact = 1.0;
  for (Eigen::Index i = 2; i <= k; ++i) fact *= static_cast<double>(i);
  return std::sqrt(std::max(det, 0.0)) / fact;
}

double longest_edge(const Eigen::MatrixXd& pts) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    for (Eigen::Index j = i + 1; j < pts.cols(); ++j)
      best = std::max(best, (pts.col(i) - pts.col(j)).norm());
  return best;
}

}  // namespace

SimplicialComplex SimplicialComplex::build(Eigen::MatrixXd vertices,
                                           const std::vector<std::vector<int>>& top_simplices) {
  return build(std::move(vertices), top_simplices, {});
}

SimplicialComplex SimplicialComplex::build(Eigen::MatrixXd vertices,
                                           const std::vector<std::vector<int>>& top_simplices,
                                           std::vector<int> orientation) {
  if (top_simplices.empty()) throw MeshError("complex has no top simplices");
  const int n = static_cast<int>(top_simplices.front().size()) - 1;
  if (n < 1 || n > 3) throw MeshError("top simplices must have 2, 3 or 4 vertices");
  const int num_vertices = static_cast<int>(vertices.rows());
  const int big_n = static_cast<int>(vertices.cols());
  if (big_n < n || big_n > 3)
    throw MeshError("embedding dimension " + std::to_string(big_n) +
                    " incompatible with simplex dimension " + std::to_string(n));

  SimplicialComplex c;
  c.n_ = n;
  c.vertices_ = std::move(vertices);

  // Sorted top tuples; remember the input position for orientation lookup.
  struct Top {
    Tuple v{-1, -1, -1, -1};
    std::size_t input = 0;
  };
  std::vector<Top> tops(top_simplices.size());
  for (std::size_t j = 0; j < top_simplices.size(); ++j) {
    const auto& s = top_simplices[j];
    if (static_cast<int>(s.size()) != n + 1)
      throw MeshError("simplex " + std::to_string(j) + " has " + std::to_string(s.size()) +
                      " vertices; every top simplex must have " + std::to_string(n + 1) +
                      " (lower-dimensional simplices must be faces of some top simplex)");
    for (int v : s)
      if (v < 0 || v >= num_vertices)
        throw MeshError("simplex " + std::to_string(j) + " references vertex " +
                        std::to_string(v) + " out of range");
    std::copy(s.begin(), s.end(), tops[j].v.begin());
    std::sort(tops[j].v.begin(), tops[j].v.begin() + n + 1);
    for (int i = 0; i < n; ++i)
      if (tops[j].v[i] == tops[j].v[i + 1])
        throw MeshError("simplex " + std::to_string(j) + " repeats a vertex");
    tops[j].input = j;
  }
  auto top_view = [n](const Top& t) { return std::span<const int>(t.v.data(), n + 1); };
  std::sort(tops.begin(), tops.end(),
            [&](const Top& a, const Top& b) { return tuple_less(top_view(a), top_view(b)); });
  for (std::size_t j = 1; j < tops.size(); ++j)
    if (std::ranges::equal(top_view(tops[j - 1]), top_view(tops[j])))
      throw MeshError("duplicate top simplex " + tuple_string(top_view(tops[j])));

  // Enumerate faces of every dimension as sorted, deduplicated tuples.
  for (int k = 0; k <= n; ++k) {
    std::vector<Tuple> all;
    for (const auto& t : tops) {
      // subsets of size k+1 of t.v[0..n], generated in lexicographic order
      std::vector<int> pick(static_cast<std::size_t>(k + 1));
      std::iota(pick.begin(), pick.end(), 0);
      while (true) {
        Tuple f{-1, -1, -1, -1};
        for (int i = 0; i <= k; ++i) f[static_cast<std::size_t>(i)] = t.v[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
        all.push_back(f);
        int i = k;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int r = i + 1; r <= k; ++r) pick[static_cast<std::size_t>(r)] = pick[static_cast<std::size_t>(r - 1)] + 1;
      }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    auto& flat = c.simplices_[static_cast<std::size_t>(k)];
    flat.reserve(all.size() * static_cast<std::size_t>(k + 1));
    for (const auto& f : all) flat.insert(flat.end(), f.begin(), f.begin() + k + 1);
  }
  if (c.count(0) != num_vertices) {
    for (int v = 0; v < num_vertices; ++v) {
      const int probe[1] = {v};
      if (!c.find(0, probe))
        throw MeshError("vertex " + std::to_string(v) + " is not a face of any top simplex");
    }
  }

  // Orientation of each sorted top tuple.
  const int num_cells = static_cast<int>(tops.size());
  c.orientation_.assign(static_cast<std::size_t>(num_cells), 1);
  const bool supplied = !orientation.empty();
  if (supplied && orientation.size() != tops.size())
    throw MeshError("orientation vector has wrong length");
  if (!supplied && big_n != n)
    throw MeshError("orientation must be supplied when the embedding dimension exceeds n");
  for (int j = 0; j < num_cells; ++j) {
    const Eigen::MatrixXd pts = c.simplex_points(n, j);
    const double h = longest_edge(pts);
    const double vol = gram_volume(pts);
    if (!(vol >= 1e-12 * std::pow(h, n)))
      throw MeshError("degenerate simplex " + tuple_string(c.simplex(n, j)));
    if (supplied) {
      // Supplied signs refer to the input vertex order; convert to the sorted tuple.
      const auto& in = top_simplices[tops[static_cast<std::size_t>(j)].input];
      std::vector<int> perm(in.begin(), in.end());
      int parity = 1;
      for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
          if (perm[a] > perm[b]) parity = -parity;
      const int s = orientation[tops[static_cast<std::size_t>(j)].input];
      if (s != 1 && s != -1) throw MeshError("orientation entries must be +1 or -1");
      c.orientation_[static_cast<std::size_t>(j)] = s * parity;
    } else {
      Eigen::MatrixXd e = pts.rightCols(n).colwise() - pts.col(0);
      c.orientation_[static_cast<std::size_t>(j)] = e.determinant() > 0.0 ? 1 : -1;
    }
  }

  // Cell -> faces (face opposite local vertex i) and face -> cofaces.
  const int num_faces = c.count(n - 1);
  c.cell_faces_.resize(static_cast<std::size_t>(num_cells * (n + 1)));
  c.cofaces_.assign(static_cast<std::size_t>(2 * num_faces), -1);
  std::vector<int> face_buf(static_cast<std::size_t>(n));
  for (int j = 0; j < num_cells; ++j) {
    const auto cell = c.simplex(n, j);
    for (int i = 0; i <= n; ++i) {
      std::size_t w = 0;
      for (int r = 0; r <= n; ++r)
        if (r != i) face_buf[w++] = cell[static_cast<std::size_t>(r)];
      const int f = *c.find(n - 1, face_buf);
      c.cell_faces_[static_cast<std::size_t>(j * (n + 1) + i)] = f;
      auto& slot0 = c.cofaces_[static_cast<std::size_t>(2 * f)];
      auto& slot1 = c.cofaces_[static_cast<std::size_t>(2 * f + 1)];
      if (slot0 < 0) {
        slot0 = j;
      } else if (slot1 < 0) {
        slot1 = j;
      } else {
        throw MeshError("non-manifold face " + tuple_string(c.simplex(n - 1, f)) +
                        " has more than two cofaces");
      }
    }
  }

  // Consistent orientation: interior faces receive opposite induced signs.
  for (int f = 0; f < num_faces; ++f) {
    const auto cf = c.cofaces(f);
    if (cf[1] < 0) continue;
    if (c.incidence(cf[0], f) + c.incidence(cf[1], f) != 0)
      throw MeshError("inconsistent orientation across face " + tuple_string(c.simplex(n - 1, f)) +
                      " (unorientable or folded mesh)");
  }
  return c;
}

int SimplicialComplex::count(int k) const {
  if (k < 0 || k > n_) throw MeshError("simplex dimension " + std::to_string(k) + " out of range");
  return static_cast<int>(simplices_[static_cast<std::size_t>(k)].size()) / (k + 1);
}

std::span<const int> SimplicialComplex::simplex(int k, int i) const {
  const auto& flat = simplices_[static_cast<std::size_t>(k)];
  return {flat.data() + static_cast<std::size_t>(i * (k + 1)), static_cast<std::size_t>(k + 1)};
}

std::optional<int> SimplicialComplex::find(int k, std::span<const int> sorted_vertices) const {
  if (k < 0 || k > n_ || static_cast<int>(sorted_vertices.size()) != k + 1) return std::nullopt;
  int lo = 0;
  int hi = count(k);
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (tuple_less(simplex(k, mid), sorted_vertices)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < count(k) && std::ranges::equal(simplex(k, lo), sorted_vertices)) return lo;
  return std::nullopt;
}

Eigen::MatrixXd SimplicialComplex::simplex_points(int k, int i) const {
  const auto s = simplex(k, i);
  Eigen::MatrixXd pts(vertices_.cols(), k + 1);
  for (int r = 0; r <= k; ++r) pts.col(r) = vertices_.row(s[static_cast<std::size_t>(r)]).transpose();
  return pts;
}

int SimplicialComplex::incidence(int cell, int face) const {
  for (int i = 0; i <= n_; ++i)
    if (cell_face(cell, i) == face) return cell_face_sign(cell, i);
  return 0;
}

IntSparseMatrix SimplicialComplex::boundary_matrix(int k) const {
  if (k < 1 || k > n_)
    throw MeshError("boundary_matrix: k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(n_) + "]");
  std::vector<Eigen::Triplet<int>> trips;
  const int cols = count(k);
  trips.reserve(static_cast<std::size_t>(cols * (k + 1)));
  std::vector<int> buf(static_cast<std::size_t>(k));
  for (int j = 0; j < cols; ++j) {
    const auto s = simplex(k, j);
    for (int i = 0; i <= k; ++i) {
      int row = 0;
      int sign = (i % 2 == 0) ? 1 : -1;
      if (k == n_) {
        row = cell_face(j, i);
        sign *= orientation(j);
      } else {
        std::size_t w = 0;
        for (int r = 0; r <= k; ++r)
          if (r != i) buf[w++] = s[static_cast<std::size_t>(r)];
        row = *find(k - 1, buf);
      }
      trips.emplace_back(row, j, sign);
    }
  }
  IntSparseMatrix m(count(k - 1), cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

IntSparseMatrix SimplicialComplex::exterior_derivative_matrix(int k) const {
  if (k < 0 || k > n_ - 1)
    throw MeshError("exterior_derivative_matrix: k=" + std::to_string(k) + " outside [0, " +
                    std::to_string(n_ - 1) + "]");
  IntSparseMatrix d = boundary_matrix(k + 1).transpose();
  d.makeCompressed();
  return d;
}

IntSparseMatrix SimplicialComplex::dual_derivative_matrix_d0() const {
  IntSparseMatrix d = exterior_derivative_matrix(n_ - 1).transpose();
  if (n_ % 2 == 1) d = -d;
  d.makeCompressed();
  return d;
}

std::vector<int> SimplicialComplex::boundary_faces() const {
  std::vector<int> out;
  for (int f = 0; f < num_faces(); ++f)
    if (is_boundary_face(f)) out.push_back(f);
  return out;
}

std::vector<int> SimplicialComplex::interior_faces() const {
  std::vector<int> out;
  for (int f = 0; f < num_faces(); ++f)
    if (!is_boundary_face(f)) out.push_back(f);
  return out;
}

int SimplicialComplex::num_components() const {
  std::vector<int> parent(static_cast<std::size_t>(num_cells()));
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = num_cells();
  for (int f = 0; f < num_faces(); ++f) {
    const auto cf = cofaces(f);
    if (cf[1] < 0) continue;
    const int a = root(cf[0]);
    const int b = root(cf[1]);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components;
}

Cochain Cochain::zeros(const SimplicialComplex& complex, int degree, CochainKind kind) {
  const int k = kind == CochainKind::primal ? degree : complex.dim() - degree;
  return {degree, kind, Eigen::VectorXd::Zero(complex.count(k))};
}

void Cochain::check_against(const SimplicialComplex& complex) const {
  const int k = kind == CochainKind::primal ? degree : complex.dim() - degree;
  if (k < 0 || k > complex.dim() || values.size() != complex.count(k))
    throw MeshError("cochain of degree " + std::to_string(degree) + " has " +
                    std::to_string(values.size()) + " values, complex expects " +
                    (k < 0 || k > complex.dim() ? std::string("a valid degree")
                                                : std::to_string(complex.count(k))));
}

double evaluate(const Cochain& cochain, const Chain& chain) {
  if (cochain.degree != chain.degree || cochain.values.size() != chain.coefficients.size())
    throw MeshError("cochain and chain do not match in degree or length");
  return cochain.values.dot(chain.coefficients.cast<double>());
}

}  // namespace decflow
