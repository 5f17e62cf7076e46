#include "waveduct/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace waveduct {

namespace {

Eigen::VectorXd eval_inputs(const std::vector<Signal>& inputs, double t) {
    Eigen::VectorXd u(static_cast<int>(inputs.size()));
    for (std::size_t i = 0; i < inputs.size(); ++i) u[static_cast<int>(i)] = inputs[i](t);
    return u;
}

} // namespace

SimulationResult run_simulation(LinearSystemHandle& sys, const Eigen::VectorXd& z0,
                                const std::vector<Signal>& inputs, const SimulationOptions& opt,
                                const SnapshotFn& snapshot) {
    if (static_cast<int>(inputs.size()) != sys.n_inputs())
        throw std::invalid_argument("run_simulation: one signal per input channel required");
    if (z0.size() != sys.dim())
        throw std::invalid_argument("run_simulation: initial state has the wrong dimension");
    if (opt.n_steps < 0) throw std::invalid_argument("run_simulation: n_steps must be >= 0");
    if (opt.dt == 0.0) throw std::invalid_argument("run_simulation: dt must be nonzero");

    const int n = opt.n_steps;
    SimulationResult res;
    res.t.reserve(n + 1);
    res.u.reserve(n + 1);
    res.y_endpoint.reserve(n + 1);
    res.y_midpoint.reserve(n);
    res.energy.reserve(n + 1);
    res.ledger.reserve(n);

    sys.factor(opt.dt);

    Eigen::VectorXd z = z0;
    Eigen::VectorXd u0 = eval_inputs(inputs, opt.t0);
    res.input_mismatch = sys.input_mismatch(z, u0);
    res.input_compatible = res.input_mismatch <= 1e-9 * (1.0 + u0.norm());

    double e = sys.energy(z);
    double net_sum = 0.0;
    res.t.push_back(opt.t0);
    res.u.push_back(u0.size() ? u0[0] : 0.0);
    res.y_endpoint.push_back(sys.output(z, u0));
    res.energy.push_back(e);
    if (snapshot) snapshot(0, opt.t0, z);

    for (int k = 0; k < n; ++k) {
        double t_b = opt.t0 + (k + 1) * opt.dt;
        Eigen::VectorXd u1 = eval_inputs(inputs, t_b);
        Eigen::VectorXd z1 = sys.midpoint_step(z, u0, u1, opt.dt);

        Eigen::VectorXd z_mid = 0.5 * (z + z1);
        Eigen::VectorXd u_mid = 0.5 * (u0 + u1);
        double e1 = sys.energy(z1);

        LedgerRow row;
        row.step = k;
        row.t_mid = opt.t0 + (k + 0.5) * opt.dt;
        row.e_before = e;
        row.e_after = e1;
        row.powers = sys.ledger_powers(z_mid, u_mid);
        row.residual = (e1 - e) - opt.dt * row.powers.net();
        res.ledger.push_back(row);
        net_sum += row.powers.net();

        double scale = std::max({row.e_before, row.e_after,
                                 std::abs(opt.dt) * std::abs(row.powers.p_in)});
        double rel = scale > 0.0 ? std::abs(row.residual) / scale
                                 : (row.residual == 0.0 ? 0.0 : INFINITY);
        res.max_rel_residual = std::max(res.max_rel_residual, rel);

        res.y_midpoint.push_back(sys.output(z_mid, u_mid));
        z.swap(z1);
        e = e1;
        u0.swap(u1);
        res.t.push_back(t_b);
        res.u.push_back(u0.size() ? u0[0] : 0.0);
        res.y_endpoint.push_back(sys.output(z, u0));
        res.energy.push_back(e);
        int step = k + 1;
        if (snapshot && (step % opt.record_stride == 0 || step == n)) snapshot(step, t_b, z);
    }

    res.cumulative_drift =
        std::abs(res.energy.back() - res.energy.front() - opt.dt * net_sum);
    res.final_state = z;
    return res;
}

Eigen::VectorXd midpoint_step(LinearSystemHandle& sys, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& u0, const Eigen::VectorXd& u1, double dt) {
    sys.factor(dt);
    return sys.midpoint_step(z, u0, u1, dt);
}

} // namespace waveduct
