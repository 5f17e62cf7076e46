#include "waveduct/verify.hpp"
#include "waveduct/rng.hpp"
#include "waveduct/webster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace waveduct {

namespace {

std::string describe_verdict(const DefectReport& rep) {
    std::ostringstream os;
    os << "verdict " << verdict_name(rep.verdict) << ", min defect " << rep.min_defect;
    return os.str();
}

} // namespace

std::vector<CheckResult> verify_webster_node(const TubeGeometry& geom,
                                             const PhysicalConstants& consts, int n_elems,
                                             const VerifyOptions& opts) {
    std::vector<CheckResult> results;
    WebsterSystem sys = assemble_webster(geom, consts, n_elems);
    DiscreteNode node = webster_node(sys);
    if (opts.corrupt_interior) node.L *= 1.01;
    check_node(node);
    const bool damped = consts.alpha > 0.0;
    const int dim = node.solution_dim();

    // Sampled Green-Lagrange identity: zero defect when alpha = 0, defect
    // equal to the damping quadratic form otherwise.
    {
        CheckResult r;
        r.name = "gl-identity";
        NormalSampler rng(opts.seed);
        double worst = 0.0;
        for (int k = 0; k < opts.n_samples; ++k) {
            Eigen::VectorXd z = rng.vector(dim);
            Eigen::VectorXd pi = z.segment(sys.n(), sys.n());
            double expected =
                damped ? 2.0 * M_PI * consts.alpha / consts.rho * pi.dot(sys.D_w * pi) : 0.0;
            double scale = node_energy(node, z) + (node.G * z).squaredNorm();
            double gap = std::abs(gl_defect(node, z) - expected) / (scale > 0.0 ? scale : 1.0);
            worst = std::max(worst, gap);
        }
        r.measure = worst;
        r.pass = worst <= opts.tol_identity;
        std::ostringstream os;
        os << "max |defect - " << (damped ? "damping form" : "0") << "| / scale over "
           << opts.n_samples << " samples";
        r.detail = os.str();
        results.push_back(r);
    }

    // Sampled sign of the defect.
    {
        CheckResult r;
        r.name = "passivity";
        DefectReport rep = passivity_check(node, opts.n_samples, opts.seed, opts.tol_passivity);
        r.measure = rep.min_defect;
        r.pass = damped ? rep.verdict == Verdict::Passive : rep.verdict == Verdict::Conservative;
        r.detail = describe_verdict(rep);
        results.push_back(r);
    }

    // Adjoint-style inversion keeps the dissipation block, so the inverse
    // stays passive (conservative when alpha = 0).
    {
        CheckResult r;
        r.name = "timeflow-adjoint";
        DiscreteNode inv = timeflow_inverse(node, ReversalMode::AdjointStyle);
        DefectReport rep = passivity_check(inv, opts.n_samples, opts.seed, opts.tol_passivity);
        r.measure = rep.min_defect;
        r.pass = damped ? rep.verdict == Verdict::Passive : rep.verdict == Verdict::Conservative;
        r.detail = describe_verdict(rep);
        results.push_back(r);
    }

    // Pure reversal negates the defect: conservative nodes stay
    // conservative, damped ones must lose passivity.
    {
        CheckResult r;
        r.name = "timeflow-reversal";
        DiscreteNode rev = timeflow_inverse(node, ReversalMode::PureReversal);
        DefectReport rep = passivity_check(rev, opts.n_samples, opts.seed, opts.tol_passivity);
        r.measure = rep.min_defect;
        r.pass = damped ? rep.verdict == Verdict::NotPassive && rep.min_defect < 0.0
                        : rep.verdict == Verdict::Conservative;
        r.detail = describe_verdict(rep);
        results.push_back(r);
    }

    // Generator dissipativity on the channel kernels.
    {
        CheckResult r;
        r.name = "kernel-input";
        KernelReport rep = dissipativity_on_kernel(node, ChannelSide::Input, opts.n_samples,
                                                   opts.seed, opts.tol_identity);
        r.measure = rep.max_violation;
        r.pass = rep.ok;
        r.detail = "max lhs on ker G";
        results.push_back(r);
    }
    {
        CheckResult r;
        r.name = "kernel-output";
        KernelReport rep = dissipativity_on_kernel(node, ChannelSide::Output, opts.n_samples,
                                                   opts.seed, opts.tol_identity);
        r.measure = rep.max_violation;
        r.pass = rep.ok;
        r.detail = "max lhs on ker K";
        results.push_back(r);
    }

    // Stationary solve residuals on seeded loads.
    {
        CheckResult r;
        r.name = "stationary";
        NormalSampler rng(opts.seed + 1);
        double worst = 0.0;
        const int n_solves = std::max(1, std::min(opts.n_samples, 10));
        Eigen::MatrixXd lh = node.L;
        if (node.has_dissipation()) lh += node.H;
        for (int k = 0; k < n_solves; ++k) {
            Eigen::VectorXd w = rng.vector(node.state_dim);
            Eigen::VectorXd z = solve_stationary(node, w);
            double residual = ((lh * z - w).norm() + (node.G * z).norm()) /
                              ((lh.norm() + node.G.norm()) * z.norm() + w.norm());
            worst = std::max(worst, residual);
        }
        r.measure = worst;
        r.pass = worst <= opts.tol_identity;
        r.detail = "max stationary residual";
        results.push_back(r);
    }

    // Discrete Poincare ratio stays under 1/2.
    {
        CheckResult r;
        r.name = "poincare";
        r.measure = poincare_ratio(n_elems);
        r.pass = r.measure <= 0.5;
        r.detail = "largest generalized eigenvalue of (M0, K0)";
        results.push_back(r);
    }

    // Added dissipation can only raise the defect.
    {
        CheckResult r;
        r.name = "dissipation-monotone";
        Eigen::MatrixXd extra = webster_dissipation(sys, 0.5);
        DiscreteNode more = add_dissipation(node, extra, opts.n_samples, opts.seed,
                                            opts.tol_passivity);
        NormalSampler rng(opts.seed + 2);
        double worst_drop = 0.0;
        for (int k = 0; k < opts.n_samples; ++k) {
            Eigen::VectorXd z = rng.vector(dim);
            double scale = node_energy(node, z) + (node.G * z).squaredNorm();
            double drop = gl_defect(node, z) - gl_defect(more, z);
            worst_drop = std::max(worst_drop, drop / (scale > 0.0 ? scale : 1.0));
        }
        r.measure = worst_drop;
        r.pass = worst_drop <= opts.tol_passivity;
        r.detail = "max normalized defect decrease after adding dissipation";
        results.push_back(r);
    }

    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace waveduct
