#include "decflow/hodge.hpp"

#include "decflow/error.hpp"

#include <string>

namespace decflow {

namespace {

void check_kappa(const SimplicialComplex& complex, std::span<const double> kappa) {
  if (static_cast<int>(kappa.size()) != complex.num_cells())
    throw HodgeError("permeability vector has " + std::to_string(kappa.size()) +
                     " entries, expected one per top simplex (" +
                     std::to_string(complex.num_cells()) + ")");
  for (std::size_t j = 0; j < kappa.size(); ++j)
    if (!(kappa[j] > 0.0))
      throw HodgeError("permeability must be positive (cell " + std::to_string(j) + ")");
}

void check_interface(const DualMeasures& measures, int face, double k0, double k1) {
  if (k0 == k1) return;
  const auto& p = measures.side_portion[face];
  if (!(p[0] > 0.0 && p[1] > 0.0))
    throw HodgeError("permeability jumps across face " + std::to_string(face) +
                     " but an adjacent simplex does not contain its circumcenter (portions " +
                     std::to_string(p[0]) + ", " + std::to_string(p[1]) + ")");
}

}  // namespace

DiagonalOperator hodge_matrix(const DualMeasures& measures, int k) {
  const auto& dual = measures.dual_volume.at(k);
  const auto& primal = measures.primal_volume.at(k);
  DiagonalOperator op{k, HodgeDirection::primal_to_dual, Eigen::VectorXd(dual.size())};
  for (std::size_t i = 0; i < dual.size(); ++i) op.diag[i] = dual[i] / primal[i];
  return op;
}

DiagonalOperator inverse_hodge_with_sign(const DiagonalOperator& forward, int n) {
  const int k = forward.degree;
  const double sign = ((k * (n - k)) % 2 == 0) ? 1.0 : -1.0;
  DiagonalOperator op{k, HodgeDirection::dual_to_primal, Eigen::VectorXd(forward.diag.size())};
  for (Eigen::Index i = 0; i < forward.diag.size(); ++i) {
    if (forward.diag[i] == 0.0)
      throw HodgeError("Hodge star entry for " + std::to_string(k) + "-simplex " +
                       std::to_string(i) + " is zero (cocircular or degenerate dual); cannot invert");
    op.diag[i] = sign / forward.diag[i];
  }
  return op;
}

std::vector<int> interface_faces(const SimplicialComplex& complex, std::span<const double> kappa) {
  std::vector<int> out;
  for (int f = 0; f < complex.num_faces(); ++f) {
    const auto cf = complex.cofaces(f);
    if (cf[1] >= 0 && kappa[cf[0]] != kappa[cf[1]]) out.push_back(f);
  }
  return out;
}

DiagonalOperator hetero_hodge_inverse(const SimplicialComplex& complex,
                                      const DualMeasures& measures,
                                      std::span<const double> kappa) {
  check_kappa(complex, kappa);
  const int n = complex.dim();
  const auto& dual = measures.dual_volume[n - 1];
  const auto& primal = measures.primal_volume[n - 1];
  DiagonalOperator op{n - 1, HodgeDirection::dual_to_primal,
                      Eigen::VectorXd(complex.num_faces())};
  for (int f = 0; f < complex.num_faces(); ++f) {
    const auto cf = complex.cofaces(f);
    const double d = dual[f];
    if (d == 0.0)
      throw HodgeError("dual edge of face " + std::to_string(f) +
                       " has zero length; inverse Hodge star undefined");
    if (cf[1] < 0) {
      op.diag[f] = kappa[cf[0]] * primal[f] / d;
      continue;
    }
    check_interface(measures, f, kappa[cf[0]], kappa[cf[1]]);
    const auto& p = measures.side_portion[f];
    const double weighted = kappa[cf[0]] * p[0] + kappa[cf[1]] * p[1];
    op.diag[f] = (primal[f] / d) * (weighted / d);
  }
  return op;
}

DiagonalOperator hetero_hodge(const SimplicialComplex& complex, const DualMeasures& measures,
                              std::span<const double> kappa) {
  check_kappa(complex, kappa);
  const int n = complex.dim();
  const auto& dual = measures.dual_volume[n - 1];
  const auto& primal = measures.primal_volume[n - 1];
  DiagonalOperator op{n - 1, HodgeDirection::primal_to_dual,
                      Eigen::VectorXd(complex.num_faces())};
  for (int f = 0; f < complex.num_faces(); ++f) {
    const auto cf = complex.cofaces(f);
    const double d = dual[f];
    if (cf[1] < 0 || kappa[cf[0]] == kappa[cf[1]]) {
      op.diag[f] = d / (kappa[cf[0]] * primal[f]);
      continue;
    }
    check_interface(measures, f, kappa[cf[0]], kappa[cf[1]]);
    const auto& p = measures.side_portion[f];
    const double weighted = kappa[cf[0]] * p[0] + kappa[cf[1]] * p[1];
    op.diag[f] = (d / primal[f]) * (d / weighted);
  }
  return op;
}

}  // namespace decflow
