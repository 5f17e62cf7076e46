#ifndef WAVEDUCT_WEBSTER_HPP
#define WAVEDUCT_WEBSTER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>

#include "waveduct/geometry.hpp"
#include "waveduct/node.hpp"
#include "waveduct/stepper.hpp"

namespace waveduct {

/* Horn model semi-discretization: P1 elements on the axial grid, the
 * Dirichlet node at s=1 eliminated from both fields, exact two-point Gauss
 * quadrature of linearly interpolated coefficient fields. State is
 * (psi, pi) with pi = rho psi_t; the stored energy
 *
 *   E = 1/2 ( rho psi^T K_A psi + 1/rho pi^T M_w pi )
 *
 * is the quadratic form of the exported node's X. The control end enters
 * through the variational flux psi'(0) = (pi_0/rho - 2 sqrt(c0/(rho A0)) u) / c0,
 * which splits into the absorption coefficient absorb0 = A0/c0 acting on
 * pi_0 and the load b_in0 = 2 sqrt(rho A0/c0) carrying u. */
struct WebsterSystem {
    TubeGeometry geom; // n_samples = n_elems + 1
    PhysicalConstants consts;
    int n_elems = 0;

    Eigen::SparseMatrix<double> K_A; // int A psi' phi'
    Eigen::SparseMatrix<double> M_w; // int (A/c(s)^2) psi phi
    Eigen::SparseMatrix<double> D_w; // int W_str psi phi

    double c0 = 0.0;    // c sigma(0)
    double area0 = 0.0; // A(0)
    double absorb0 = 0.0;
    double b_in0 = 0.0;

    int n() const { return n_elems; } // unknowns per field
};

struct WebsterState {
    Eigen::VectorXd psi;
    Eigen::VectorXd pi;
};

// Requires geom.n_samples == n_elems + 1 and n_elems >= 2.
WebsterSystem assemble_webster(const TubeGeometry& geom, const PhysicalConstants& consts,
                               int n_elems);

double webster_energy(const WebsterSystem& sys, const WebsterState& state);

// Boundary flux psi'(0) implied by the scattering input relation.
double webster_flux(const WebsterSystem& sys, const WebsterState& state, double u);

// y = u - sqrt(A0/(rho c0)) pi_0.
double webster_output(const WebsterSystem& sys, const WebsterState& state, double u);

/* Exported boundary node. The solution space appends one boundary-flux
 * unknown lambda = psi'(0) after (psi, pi); the channels read
 *   G z = 1/2 sqrt(A0/(rho c0)) (-rho c0 lambda + pi_0)
 *   K z = 1/2 sqrt(A0/(rho c0)) (-rho c0 lambda - pi_0)
 * and |Gz|^2 - |Kz|^2 = -A0 lambda pi_0 = 2 <z, L z>_X exactly. The
 * dissipation block (alpha > 0) contributes the defect
 * (2 pi alpha / rho) pi^T D_w pi. */
DiscreteNode webster_node(const WebsterSystem& sys);

// Dissipation block alpha H for add_dissipation experiments; the pi rows
// hold -2 pi alpha M_w^{-1} D_w.
Eigen::MatrixXd webster_dissipation(const WebsterSystem& sys, double alpha);

// Stepper adapter; z = [psi; pi], single scalar input channel.
std::unique_ptr<LinearSystemHandle> webster_handle(const WebsterSystem& sys);

Eigen::VectorXd pack_state(const WebsterState& state);
WebsterState unpack_state(const WebsterSystem& sys, const Eigen::VectorXd& z);

/* Sharp constant of the one-dimensional Poincare inequality on functions
 * vanishing at s=1: largest generalized eigenvalue of (M0, K0) over the
 * unit-weight P1 pair. Bounded by 1/2 for every mesh and converging to
 * 4/pi^2 from below. */
double poincare_ratio(int n_elems);

} // namespace waveduct

#endif
