#pragma once

#include "decflow/complex.hpp"
#include "decflow/darcy.hpp"
#include "decflow/geometry.hpp"

namespace decflow {

/// Value of a differential form at a point, in the coordinate basis:
/// n=2, degree 1: (a, b) for a dx + b dy;
/// n=3, degree 2: (a, b, c) for a dy^dz + b dz^dx + c dx^dy.
struct FormValue {
  int degree = 0;
  Eigen::VectorXd coefficients;
};

/// Whitney interpolation of an (n-1)-cochain, evaluated at `x` inside `cell`.
/// Throws GeometryError when `x` lies outside the cell by more than 1e-10 in
/// barycentric coordinates, or when the mesh is not flat.
FormValue whitney_flux_at_point(const SimplicialComplex& complex, const Eigen::VectorXd& flux,
                                int cell, const Point& x);

/// Velocity vector of a flux form: (a, b) -> (b, -a) in 2D, identity in 3D.
/// Throws GeometryError unless the form has degree n-1 with n in {2, 3}.
Point velocity_from_flux_form(const FormValue& value, int n);

/// Reconstructed velocity at every cell barycenter, one row per cell.
Eigen::MatrixXd velocity_at_barycenters(const SimplicialComplex& complex,
                                        const Eigen::VectorXd& flux);

/// Relative flux error: the L2 norm over the domain of the Whitney
/// interpolant of (computed - exact) restricted to interior faces, divided by
/// the same norm of the exact cochain. Boundary faces contribute zero.
/// Cell integrals are exact.
double flux_error_norm(const SimplicialComplex& complex, const Eigen::VectorXd& computed,
                       const Eigen::VectorXd& exact);

/// Same, with the exact cochain obtained by quadrature of `velocity` over each face.
double flux_error_norm(const SimplicialComplex& complex, const Eigen::VectorXd& computed,
                       const VectorField& velocity);

/// Area-weighted relative L2 pressure error at the dual vertices of the
/// measures (circumcenters normally). The computed pressure is first shifted
/// by the weighted mean difference so that the additive constant drops out.
double pressure_error_norm(const SimplicialComplex& complex, const DualMeasures& measures,
                           const Eigen::VectorXd& computed, const ScalarField& exact);

/// Relative L2 distance between the piecewise-constant pressure and the exact
/// field over the whole domain, after the same gauge alignment:
/// sqrt(sum_j int_{T_j} (p_j - p(x))^2) / sqrt(int p^2), by degree-4 quadrature.
double pressure_cell_l2_error(const SimplicialComplex& complex, const Eigen::VectorXd& computed,
                              const ScalarField& exact);

}  // namespace decflow
