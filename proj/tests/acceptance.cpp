// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Tolerances are pinned here and nowhere else.
#include "waveduct/cylinder.hpp"
#include "waveduct/compare.hpp"
#include "waveduct/config.hpp"
#include "waveduct/node.hpp"
#include "waveduct/rng.hpp"
#include "waveduct/webster.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace waveduct;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int failures = 0;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

void report(int id, const std::string& label, bool pass, const std::string& measured,
            double elapsed, double limit) {
    bool in_time = elapsed < limit;
    if (!(pass && in_time)) ++failures;
    std::printf("%s  %2d  %-24s %s  [%.1f s / limit %.0f s]\n",
                pass && in_time ? "PASS" : "FAIL", id, label.c_str(), measured.c_str(),
                elapsed, limit);
    std::fflush(stdout);
}

struct NamedGeometry {
    std::string name;
    ProfileSpec spec;
};

std::vector<NamedGeometry> test_geometries() {
    NamedGeometry straight{"constant", {}};
    straight.spec.kind = ProfileKind::Constant;
    straight.spec.r0 = straight.spec.r1 = 0.01;

    NamedGeometry cone{"cone", {}};
    cone.spec.kind = ProfileKind::Cone;
    cone.spec.r0 = 0.01;
    cone.spec.r1 = 0.02;

    NamedGeometry curved{"curved", {}};
    curved.spec.kind = ProfileKind::Constant;
    curved.spec.r0 = curved.spec.r1 = 0.01;
    curved.spec.kappa = 50.0;

    return {straight, cone, curved};
}

WebsterSystem make_webster(const ProfileSpec& spec, double alpha, int n_elems,
                           double c = 343.0, double rho = 1.2) {
    TubeGeometry geom = build_profile(spec, n_elems + 1);
    PhysicalConstants consts;
    consts.c = c;
    consts.rho = rho;
    consts.alpha = alpha;
    return assemble_webster(geom, consts, n_elems);
}

// Independent check of pi^T D_w pi: composite trapezoid of the piecewise
// integrand W_str(s) * pi_h(s)^2 on a fine sub-grid, no matrices involved.
double damping_form_quadrature(const WebsterSystem& sys, const VectorXd& pi, int m) {
    const TubeGeometry& g = sys.geom;
    int n = sys.n();
    double total = 0.0;
    for (int e = 0; e < n; ++e) {
        double h = g.s[e + 1] - g.s[e];
        double w0 = g.wall_stretch[e], w1 = g.wall_stretch[e + 1];
        double p0 = pi[e], p1 = (e + 1 < n) ? pi[e + 1] : 0.0;
        double acc = 0.0;
        for (int k = 0; k <= m; ++k) {
            double x = static_cast<double>(k) / m;
            double w = w0 * (1.0 - x) + w1 * x;
            double p = p0 * (1.0 - x) + p1 * x;
            double f = w * p * p;
            acc += (k == 0 || k == m) ? 0.5 * f : f;
        }
        total += acc * h / m;
    }
    return total;
}

void criterion_1() {
    double t0 = now_seconds();
    const double tol = 1e-10;
    double worst = 0.0;
    for (const NamedGeometry& g : test_geometries()) {
        WebsterSystem sys = make_webster(g.spec, 0.0, 200);
        DiscreteNode node = webster_node(sys);
        NormalSampler rng(42);
        for (int k = 0; k < 100; ++k) {
            VectorXd z = rng.vector(node.solution_dim());
            double scale = node_energy(node, z) + (node.G * z).squaredNorm();
            worst = std::max(worst, std::abs(gl_defect(node, z)) / scale);
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |defect|/scale = %.2e (tol %.0e)", worst, tol);
    report(1, "gl-identity", worst <= tol, buf, now_seconds() - t0, 5.0);
}

void criterion_2() {
    double t0 = now_seconds();
    const double tol = 1e-10;
    double min_defect = 1e300, worst_rel = 0.0, worst_quad = 0.0;
    for (const NamedGeometry& g : test_geometries()) {
        for (double alpha : {0.1, 1.0}) {
            WebsterSystem sys = make_webster(g.spec, alpha, 200);
            DiscreteNode node = webster_node(sys);
            NormalSampler rng(42);
            for (int k = 0; k < 100; ++k) {
                VectorXd z = rng.vector(node.solution_dim());
                VectorXd pi = z.segment(sys.n(), sys.n());
                double d = gl_defect(node, z);
                double form = (2.0 * M_PI * alpha / sys.consts.rho) * pi.dot(sys.D_w * pi);
                min_defect = std::min(min_defect, d);
                worst_rel = std::max(worst_rel, std::abs(d - form) / form);
                if (k < 3) {
                    double quad = (2.0 * M_PI * alpha / sys.consts.rho) *
                                  damping_form_quadrature(sys, pi, 100000);
                    worst_quad = std::max(worst_quad, std::abs(d - quad) / form);
                }
            }
        }
    }
    bool pass = min_defect >= 0.0 && worst_rel <= tol && worst_quad <= tol;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "min defect = %.2e, |d-form|/form = %.2e, |d-quadrature|/form = %.2e",
                  min_defect, worst_rel, worst_quad);
    report(2, "passivity-defect", pass, buf, now_seconds() - t0, 30.0);
}

void criterion_3() {
    double t0 = now_seconds();
    const double step_tol = 1e-10, cum_tol = 1e-8;
    double worst_step = 0.0, worst_cum = 0.0;
    for (double alpha : {0.0, 1.0}) {
        WebsterSystem sys = make_webster(test_geometries()[0].spec, alpha, 200);
        auto handle = webster_handle(sys);
        SimulationOptions opt;
        opt.dt = 1e-4;
        opt.n_steps = 20000;
        Signal u = gaussian_pulse(1.0, 0.05, 0.01);
        SimulationResult res =
            run_simulation(*handle, VectorXd::Zero(handle->dim()), {u}, opt);
        double emax = 0.0;
        for (double e : res.energy) emax = std::max(emax, e);
        worst_step = std::max(worst_step, res.max_rel_residual);
        worst_cum = std::max(worst_cum, res.cumulative_drift / emax);
    }
    bool pass = worst_step <= step_tol && worst_cum <= cum_tol;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max step residual = %.2e (tol %.0e), cum drift = %.2e (tol %.0e)",
                  worst_step, step_tol, worst_cum, cum_tol);
    report(3, "energy-ledger", pass, buf, now_seconds() - t0, 10.0);
}

double echo_error(int n_elems, double dt) {
    WebsterSystem sys = make_webster(test_geometries()[0].spec, 0.0, n_elems, 1.0, 1.0);
    auto handle = webster_handle(sys);
    SimulationOptions opt;
    opt.dt = dt;
    opt.n_steps = static_cast<int>(std::lround(2.5 / dt));
    Signal u = gaussian_pulse(1.0, 0.1, 0.02);
    SimulationResult res = run_simulation(*handle, VectorXd::Zero(handle->dim()), {u}, opt);
    double err = 0.0;
    for (size_t k = 0; k < res.t.size(); ++k)
        err = std::max(err, std::abs(res.y_endpoint[k] - u(res.t[k] - 2.0)));
    return err;
}

void criterion_4() {
    double t0 = now_seconds();
    double e_coarse = echo_error(250, 2e-3);
    double e_mid = echo_error(500, 1e-3);
    double e_fine = echo_error(1000, 5e-4);
    // least-squares slope of log2(err) against refinement level
    double s1 = std::log2(e_coarse / e_mid);
    double s2 = std::log2(e_mid / e_fine);
    double slope = 0.5 * (s1 + s2);
    bool pass = e_fine <= 1e-3 && slope >= 1.8;
    char buf[160];
    std::snprintf(buf, sizeof buf, "err(250,500,1000) = %.2e/%.2e/%.2e, slope = %.2f",
                  e_coarse, e_mid, e_fine, slope);
    report(4, "dalembert-echo", pass, buf, now_seconds() - t0, 60.0);
}

void criterion_5() {
    double t0 = now_seconds();
    const double limit = 4.0 / (M_PI * M_PI);
    bool bounded = true;
    for (int n : {2, 4, 8, 16, 32, 64, 128, 200})
        bounded = bounded && poincare_ratio(n) <= 0.5;
    double r64 = poincare_ratio(64);
    double rel = std::abs(r64 - limit) / limit;
    bool pass = bounded && rel <= 0.01;
    char buf[128];
    std::snprintf(buf, sizeof buf, "ratio(64) = %.6f vs 4/pi^2 = %.6f (rel %.2e)", r64,
                  limit, rel);
    report(5, "poincare-bound", pass, buf, now_seconds() - t0, 10.0);
}

void criterion_6() {
    double t0 = now_seconds();
    PhysicalConstants pc;
    CylinderSystem sys = build_cylinder(pc, 0.01, 300, 24);
    NormalSampler rng(42);
    sys.phi = rng.vector(sys.n_cells()) * 1e-3;
    sys.p = rng.vector(sys.n_cells());

    auto handle = cylinder_handle(sys);
    VectorXd z0(handle->dim());
    z0 << sys.phi, sys.p;
    double e0 = handle->energy(z0);

    SimulationOptions opt;
    opt.dt = 1e-4;
    opt.n_steps = 5000;
    SimulationResult res = run_simulation(*handle, z0, {zero_signal()}, opt);

    // u = 0 still radiates through the scattering end; conservativity means
    // the balance closes as an equality at every step, so the checked
    // quantity is E_n - E_0 - sum dt(P_in - P_out - ...) = sum residual_k.
    double drift = 0.0, acc = 0.0;
    for (const LedgerRow& row : res.ledger) {
        acc += row.residual;
        drift = std::max(drift, std::abs(acc));
    }
    double raw = std::abs(res.energy.back() - e0);
    bool pass = drift <= 1e-9 * e0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max balance drift = %.2e (tol %.1e), radiated |E_N-E_0| = %.2e",
                  drift / e0, 1e-9, raw / e0);
    report(6, "cylinder-conservative", pass, buf, now_seconds() - t0, 60.0);
}

void criterion_7() {
    double t0 = now_seconds();
    const double tol = 1e-9;
    PhysicalConstants pc;

    CylinderSystem grounded = build_cylinder(pc, 0.01, 300, 24);
    grounded.wall_alpha = 0.3;
    auto hg = cylinder_handle(grounded);
    SimulationOptions opt;
    opt.dt = 1e-4;
    opt.n_steps = 2000;
    Signal u = gaussian_pulse(1.0, 0.02, 0.004);
    SimulationResult rg =
        run_simulation(*hg, VectorXd::Zero(hg->dim()), {u}, opt);
    double wall_min = 1e300;
    for (const LedgerRow& row : rg.ledger) wall_min = std::min(wall_min, row.powers.p_wall);

    CylinderSystem open = build_cylinder(pc, 0.01, 300, 24);
    open.wall_alpha = 0.3;
    open.wall_input_open = true;
    auto ho = cylinder_handle(open);
    Signal u_wall = sine_burst(0.3, 500.0, 0.0, opt.dt * opt.n_steps);
    SimulationResult ro =
        run_simulation(*ho, VectorXd::Zero(ho->dim()), {u, u_wall}, opt);

    bool pass = rg.max_rel_residual <= tol && wall_min >= 0.0 &&
                ro.max_rel_residual <= tol;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "grounded residual = %.2e, min P_wall = %.2e, open residual = %.2e",
                  rg.max_rel_residual, wall_min, ro.max_rel_residual);
    report(7, "majoration-ledger", pass, buf, now_seconds() - t0, 120.0);
}

void criterion_8() {
    double t0 = now_seconds();
    PhysicalConstants pc;
    CylinderSystem sys = build_cylinder(pc, 0.01, 300, 24);
    set_interior_damping(sys, -5.0);
    NormalSampler rng(42);
    sys.phi = rng.vector(sys.n_cells()) * 1e-3;
    sys.p = rng.vector(sys.n_cells());

    auto handle = cylinder_handle(sys);
    VectorXd z0(handle->dim());
    z0 << sys.phi, sys.p;

    SimulationOptions opt;
    opt.dt = 1e-4;
    opt.n_steps = 2000;
    SimulationResult res = run_simulation(*handle, z0, {zero_signal()}, opt);

    bool decreasing = true;
    for (size_t k = 1; k < res.energy.size(); ++k)
        decreasing = decreasing && res.energy[k] < res.energy[k - 1];
    double int_min = 1e300;
    for (const LedgerRow& row : res.ledger)
        int_min = std::min(int_min, row.powers.p_interior);

    bool pass = decreasing && int_min >= 0.0 && res.max_rel_residual <= 1e-9;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "E monotone = %s, min P_interior = %.2e, residual = %.2e",
                  decreasing ? "yes" : "no", int_min, res.max_rel_residual);
    report(8, "interior-damping", pass, buf, now_seconds() - t0, 120.0);
}

void criterion_9() {
    double t0 = now_seconds();
    CompareOptions opt; // R0 = 0.01, c = 343, ns = 300, nr = 24
    double cutoff = 1.8412 * opt.physics.c / (2.0 * M_PI * opt.radius);
    double width = 5e-4; // spectral std 1/(2 pi width) ~ 318 Hz << 0.2*cutoff
    Signal input = gaussian_pulse(1.0, 2.5e-3, width);
    CompareResult res = compare_averages(opt, input);
    bool pass = res.max_rel_err <= 0.02;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max rel L2(t) error = %.4f (tol 0.02), band %.0f Hz vs cutoff %.0f Hz",
                  res.max_rel_err, 1.0 / (2.0 * M_PI * width), cutoff);
    report(9, "averaging-consistency", pass, buf, now_seconds() - t0, 120.0);
}

void criterion_10() {
    double t0 = now_seconds();

    WebsterSystem cons = make_webster(test_geometries()[1].spec, 0.0, 100);
    DiscreteNode inv = timeflow_inverse(webster_node(cons));
    DefectReport rep = passivity_check(inv, 100, 42, 1e-10);
    bool inverse_conservative = rep.verdict == Verdict::Conservative;

    WebsterSystem damped = make_webster(test_geometries()[1].spec, 1.0, 100);
    DiscreteNode rev = timeflow_inverse(webster_node(damped), ReversalMode::PureReversal);
    DefectReport rrep = passivity_check(rev, 100, 42, 1e-10);
    bool inverse_not_passive = rrep.verdict == Verdict::NotPassive && rrep.min_defect < 0.0;

    // return error in the energy norm: the midpoint map is an isometry of
    // ||.||_X, so roundoff stays relative there, while the Euclidean norm
    // swings by the stiffness spread of K_A for rough initial data
    WebsterSystem rev_sys = make_webster(test_geometries()[1].spec, 0.0, 100, 1.0, 1.0);
    auto handle = webster_handle(rev_sys);
    NormalSampler rng(7);
    VectorXd z0 = rng.vector(handle->dim());
    VectorXd z = z0;
    VectorXd u = VectorXd::Zero(1);
    double dt = 1e-3;
    for (int k = 0; k < 500; ++k) z = midpoint_step(*handle, z, u, u, dt);
    for (int k = 0; k < 500; ++k) z = midpoint_step(*handle, z, u, u, -dt);
    double ret = std::sqrt(handle->energy(z - z0) / handle->energy(z0));

    bool pass = inverse_conservative && inverse_not_passive && ret <= 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "inverse conservative = %s, reversed min defect = %.2e, return = %.2e",
                  inverse_conservative ? "yes" : "no", rrep.min_defect, ret);
    report(10, "timeflow-inversion", pass, buf, now_seconds() - t0, 30.0);
}

void criterion_11() {
    double t0 = now_seconds();
    const double tol = 1e-10;
    double worst = 0.0;
    for (const NamedGeometry& g : test_geometries()) {
        for (double alpha : {0.0, 0.5, 1.0}) {
            WebsterSystem sys = make_webster(g.spec, alpha, 120);
            DiscreteNode node = webster_node(sys);
            NormalSampler rng(42);
            VectorXd w = rng.vector(node.state_dim);
            VectorXd z = solve_stationary(node, w);
            MatrixXd op = node.L;
            if (node.has_dissipation()) op += node.H;
            double res = ((op * z - w).norm() + (node.G * z).norm()) /
                         ((op.norm() + node.G.norm()) * z.norm() + w.norm());
            worst = std::max(worst, res);
        }
    }

    // straight tube closed form: pi = rho w1, lambda = w1/c, psi = w1(s-1)/c
    WebsterSystem sys = make_webster(test_geometries()[0].spec, 0.0, 120);
    DiscreteNode node = webster_node(sys);
    double w1 = 0.8;
    VectorXd w = VectorXd::Zero(node.state_dim);
    w.head(sys.n()).setConstant(w1);
    VectorXd z = solve_stationary(node, w);
    double closed = 0.0;
    for (int i = 0; i < sys.n(); ++i) {
        double s = sys.geom.s[i];
        closed = std::max(closed, std::abs(z[i] - w1 * (s - 1.0) / sys.c0));
        closed = std::max(closed, std::abs(z[sys.n() + i] - sys.consts.rho * w1));
    }
    closed = std::max(closed, std::abs(z[node.state_dim] - w1 / sys.c0));

    bool pass = worst <= tol && closed <= 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof buf, "max residual = %.2e (tol %.0e), closed-form gap = %.2e",
                  worst, tol, closed);
    report(11, "stationary-solve", pass, buf, now_seconds() - t0, 30.0);
}

} // namespace

int main() {
    std::printf("acceptance: energy-structure checks, pinned tolerances\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (failures == 0) {
        std::printf("all 11 criteria passed\n");
        return 0;
    }
    std::printf("%d %s failed\n", failures, failures == 1 ? "criterion" : "criteria");
    return 1;
}
