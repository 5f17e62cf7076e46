#ifndef WAVEDUCT_STEPPER_HPP
#define WAVEDUCT_STEPPER_HPP

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "waveduct/signals.hpp"

namespace waveduct {

struct PowerSplit {
    double p_in = 0.0;
    double p_out = 0.0;
    double p_wall = 0.0;
    double p_interior = 0.0;
    double net() const { return p_in - p_out - p_wall - p_interior; }
};

/* Adapter a model hands to the stepper: the semi-discrete dynamics
 * z' = F z + B u together with its energy form and the power readouts the
 * ledger balances. The implicit midpoint step
 *
 *   (I - dt/2 F) z_{n+1} = (I + dt/2 F) z_n + dt B u_mid
 *
 * is owned by the model so it can exploit its block structure; the
 * factorization is prepared once per signed dt and reused. Because the
 * energy is a quadratic form, E_{n+1} - E_n = dt * 2 <z_mid, F z_mid + B u_mid>_X
 * holds exactly, and ledger_powers must decompose that bracket:
 * 2 <z, F z + B u>_X = p_in - p_out - p_wall - p_interior for every (z, u). */
class LinearSystemHandle {
public:
    virtual ~LinearSystemHandle() = default;

    virtual int dim() const = 0;
    virtual int n_inputs() const { return 1; }

    // Prepares (and caches) the implicit solve for the signed step dt.
    virtual void factor(double dt) = 0;

    // One midpoint step from z with endpoint inputs u0 = u(t), u1 = u(t+dt).
    virtual Eigen::VectorXd midpoint_step(const Eigen::VectorXd& z,
                                          const Eigen::VectorXd& u0,
                                          const Eigen::VectorXd& u1,
                                          double dt) const = 0;

    virtual double energy(const Eigen::VectorXd& z) const = 0;

    // Scalar observation paired with the first input channel.
    virtual double output(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const = 0;

    virtual PowerSplit ledger_powers(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const = 0;

    // |G z - u| style measure for flagging incompatible initial data.
    virtual double input_mismatch(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const = 0;
};

struct LedgerRow {
    int step = 0;
    double t_mid = 0.0;
    double e_before = 0.0;
    double e_after = 0.0;
    PowerSplit powers;
    // (e_after - e_before) - dt * powers.net()
    double residual = 0.0;
};

struct SimulationOptions {
    double dt = 1e-4;
    int n_steps = 0;
    double t0 = 0.0;
    int record_stride = 1; // snapshot callback cadence
    double rtol = 1e-10;   // per-step ledger residual, relative
};

struct SimulationResult {
    std::vector<double> t;          // endpoint times, n_steps+1
    std::vector<double> u;          // first input channel at endpoints
    std::vector<double> y_endpoint; // observation at endpoints
    std::vector<double> y_midpoint; // observation at step midpoints, n_steps
    std::vector<double> energy;     // at endpoints
    std::vector<LedgerRow> ledger;  // n_steps rows
    double max_rel_residual = 0.0;  // max |residual| / per-step scale
    double cumulative_drift = 0.0;  // |E_N - E_0 - dt sum powers.net()|
    bool input_compatible = true;   // initial state matched u(t0)
    double input_mismatch = 0.0;
    Eigen::VectorXd final_state;
};

using SnapshotFn = std::function<void(int step, double t, const Eigen::VectorXd& z)>;

// Runs n_steps midpoint steps from z0 driven by one signal per input
// channel, assembling the exact per-step energy ledger.
SimulationResult run_simulation(LinearSystemHandle& sys, const Eigen::VectorXd& z0,
                                const std::vector<Signal>& inputs,
                                const SimulationOptions& opt,
                                const SnapshotFn& snapshot = nullptr);

// Single midpoint step helper (factors on demand).
Eigen::VectorXd midpoint_step(LinearSystemHandle& sys, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& u0, const Eigen::VectorXd& u1,
                              double dt);

} // namespace waveduct

#endif
