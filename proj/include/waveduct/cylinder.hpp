#ifndef WAVEDUCT_CYLINDER_HPP
#define WAVEDUCT_CYLINDER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <vector>

#include "waveduct/geometry.hpp"
#include "waveduct/stepper.hpp"

namespace waveduct {

/* Axisymmetric wave equation on the unit-length cylinder of radius R0,
 * finite differences on a staggered grid: axial nodes s_i = i ds
 * (i = 0..ns-1; the Dirichlet plane s=1 is eliminated), radial cell
 * centres r_j = (j+1/2) dr with dr = R0/nr, so no node sits on the axis.
 *
 * Fields phi, p = rho phi_t are stored flattened with index i*nr + j.
 *
 * Dual-cell weights W_ij = 2 pi r_j dr ds sigma_i (sigma_0 = 1/2 boundary
 * half cell, else 1) make the discrete Green identity exact:
 *
 *   sum W (Lap_h phi) v + Q(phi, v)
 *     = -sum_j 2 pi r_j dr flux_s0_j v_0j + sum_i 2 pi R0 sigma_i ds flux_wall_i v_i,wall
 *
 * for every v with the Dirichlet plane eliminated, where Q is the discrete
 * Dirichlet form built from the same face differences. The energy
 * E = 1/2 (rho Q(phi,phi) + 1/(rho c^2) p^T W p) then obeys an exact
 * per-step ledger under the midpoint rule. */
struct CylinderSystem {
    PhysicalConstants consts;
    double radius = 0.01; // R0
    int ns = 0;
    int nr = 0;
    double ds = 0.0;
    double dr = 0.0;

    Eigen::VectorXd phi; // ns*nr, current state
    Eigen::VectorXd p;

    Eigen::VectorXd g_damp;       // interior damping g(s,r) <= 0, ns*nr (empty = none)
    double wall_alpha = 0.0;      // Robin wall coefficient
    bool wall_input_open = false; // feed the wall channel instead of grounding it

    std::vector<double> input_profile; // radial profile of the end input, size nr

    int n_cells() const { return ns * nr; }
    int idx(int i, int j) const { return i * nr + j; }
    double r_center(int j) const { return (j + 0.5) * dr; }
    double axial_weight(int i) const { return (i == 0 ? 0.5 : 1.0) * ds; }
    double cell_weight(int i, int j) const { return 2.0 * M_PI * r_center(j) * dr * axial_weight(i); }
    double area0() const { return M_PI * radius * radius; }
};

// ns >= 4, nr >= 2, R0 > 0; fields start at zero, uniform input profile.
CylinderSystem build_cylinder(const PhysicalConstants& consts, double R0, int ns, int nr);

// Sets interior damping; rejects any positive sample.
void set_interior_damping(CylinderSystem& sys, const Eigen::VectorXd& g);
void set_interior_damping(CylinderSystem& sys, double g_uniform);

// Area-weighted cross-section average of a flattened field, one value per
// axial node: sum_j field(i,j) 2 pi r_j dr / (pi R0^2). Weights sum to 1
// exactly.
std::vector<double> cross_section_average(const CylinderSystem& sys,
                                          const Eigen::VectorXd& field);

double cylinder_energy(const CylinderSystem& sys);

// Wall-trace dissipation (alpha/rho) sum_i sigma_i ds 2 pi R0 p(i,nr-1)^2.
double cylinder_wall_power(const CylinderSystem& sys);

// Interior dissipation -(1/(rho c^2)) sum W g p^2 >= 0.
double cylinder_interior_power(const CylinderSystem& sys);

/* Variational pieces, exposed for the exact Green identity checks.
 * laplacian_with_fluxes applies the cylindrical Laplacian stencil with
 * prescribed boundary-face data: flux_s0_j = phi_s(0, r_j) and
 * flux_wall_i = phi_r(s_i, R0). gradient_pairing is the Dirichlet form
 * Q(phi, v); volume_pairing is sum W a b. */
Eigen::VectorXd laplacian_with_fluxes(const CylinderSystem& sys, const Eigen::VectorXd& phi,
                                      const Eigen::VectorXd& flux_s0,
                                      const Eigen::VectorXd& flux_wall);
double gradient_pairing(const CylinderSystem& sys, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b);
double volume_pairing(const CylinderSystem& sys, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b);

/* Stepper adapter; z = [phi; p]. Input channel 0 drives the control end
 * through its radial profile; when wall_input_open is set, channel 1
 * drives the wall uniformly and the ledger's wall power becomes the net
 * wall outflow P_out,wall - P_in,wall. */
std::unique_ptr<LinearSystemHandle> cylinder_handle(CylinderSystem& sys);

struct CylinderRunResult {
    SimulationResult sim;
    // cross-section averages at recorded steps: row per record, ns columns
    std::vector<double> record_times;
    std::vector<std::vector<double>> phibar_records;
};

// Runs the midpoint scheme, updating sys.phi / sys.p in place.
CylinderRunResult run_cylinder(CylinderSystem& sys, const Signal& end_input,
                               const Signal& wall_input, const SimulationOptions& opt);

} // namespace waveduct

#endif
