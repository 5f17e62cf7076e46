#ifndef WAVEDUCT_NODE_HPP
#define WAVEDUCT_NODE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace waveduct {

/* Finite-dimensional energy-structured system with boundary channels:
 *
 *   u = G z,   x' = (L + H) z,   y = K z,
 *
 * where z lives in the solution space R^(state_dim + aux_dim) and the energy
 * state x = z[0:state_dim] carries the squared norm E(x) = x^T X x.
 * The aux tail holds boundary-flux unknowns that the energy norm does not
 * see (for aux_dim = 0 the node is the plain square form). L, G, K, H act
 * on the full solution vector; L and H map into the state space.
 *
 * The Green-Lagrange defect of a state is
 *
 *   d(z) = |G z|^2 - |K z|^2 - 2 x^T X (L + H) z,
 *
 * which vanishes identically for a conservative node, and is >= 0 for a
 * passive one. */
struct DiscreteNode {
    int state_dim = 0;
    int aux_dim = 0;
    Eigen::MatrixXd X; // state_dim x state_dim, symmetric positive definite
    Eigen::MatrixXd L; // state_dim x solution_dim
    Eigen::MatrixXd G; // m_u x solution_dim, full row rank
    Eigen::MatrixXd K; // m_y x solution_dim
    Eigen::MatrixXd H; // state_dim x solution_dim, empty when absent
    std::vector<std::string> channel_labels;

    int solution_dim() const { return state_dim + aux_dim; }
    bool has_dissipation() const { return H.size() != 0; }
};

// Throws std::invalid_argument naming the violated invariant: shape
// mismatches, asymmetric X, or X not positive definite (checked by a
// symmetric factorization).
void check_node(const DiscreteNode& node);

// Energy of the state part, x^T X x.
double node_energy(const DiscreteNode& node, const Eigen::VectorXd& z);

// Green-Lagrange defect d(z); z has solution_dim entries.
double gl_defect(const DiscreteNode& node, const Eigen::VectorXd& z);

enum class Verdict { Conservative, Passive, NotPassive };

const char* verdict_name(Verdict v);

struct DefectSample {
    double defect = 0.0;
    double scale = 0.0; // |x|_X^2 + |G z|^2 for the sampled state
};

struct DefectReport {
    std::vector<DefectSample> samples;
    double min_defect = 0.0;
    double max_identity_residual = 0.0; // max |defect| / scale
    Verdict verdict = Verdict::Conservative;
};

// Evaluates the defect on n_samples seeded standard-normal states.
// Verdict: conservative if |d| <= tol*scale on every sample, passive if
// d >= -tol*scale on every sample, otherwise not passive.
DefectReport passivity_check(const DiscreteNode& node, int n_samples,
                             std::uint64_t seed, double tol);

// CSV rows "sample,defect,scale" under a #schema=1 header.
std::string defect_report_csv(const DefectReport& report);

/* Time-flow inversion (G and K swap, the interior operator flips sign).
 * AdjointStyle negates L alone and carries H unchanged, matching the
 * adjoint system of a dissipative node. PureReversal flips the whole
 * interior operator, returning L_new = -(L+H) with no H block; the defect
 * of the result is the exact negative of the original's. */
enum class ReversalMode { AdjointStyle, PureReversal };

DiscreteNode timeflow_inverse(const DiscreteNode& node,
                              ReversalMode mode = ReversalMode::AdjointStyle);

// Adds a dissipation block after verifying x^T X H z <= tol*scale on
// n_check seeded samples; H accumulates with any existing block. Throws
// std::invalid_argument when the sampled form has a positive part.
DiscreteNode add_dissipation(const DiscreteNode& node, const Eigen::MatrixXd& H,
                             int n_check, std::uint64_t seed, double tol);

enum class ChannelSide { Input, Output };

struct KernelReport {
    int n_samples = 0;
    double max_violation = 0.0; // most positive left-hand side over samples
    bool ok = false;
};

// Projects seeded samples onto ker(G) (Input) or ker(K) (Output) and checks
// generator dissipativity there: 2 <z,(L+H)z>_X + |K z|^2 <= tol*scale on
// ker G, and 2 <z,(-L+H)z>_X + |G z|^2 <= tol*scale on ker K. Requires the
// projected channel block to have full row rank.
KernelReport dissipativity_on_kernel(const DiscreteNode& node, ChannelSide kernel_of,
                                     int n_samples, std::uint64_t seed, double tol);

/* Stationary problem: find z with (L+H) z = w and G z = 0. The stacked
 * system is square exactly when aux_dim equals the number of input rows
 * (the boundary-flux unknowns balance the channel constraints); it is
 * solved by LU with one step of iterative refinement. Throws
 * std::runtime_error when the constrained system is singular. */
Eigen::VectorXd solve_stationary(const DiscreteNode& node, const Eigen::VectorXd& w);

} // namespace waveduct

#endif
