#include "waveduct/node.hpp"
#include "waveduct/csv.hpp"
#include "waveduct/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace waveduct {

namespace {

Eigen::VectorXd interior_rate(const DiscreteNode& node, const Eigen::VectorXd& z) {
    Eigen::VectorXd rate = node.L * z;
    if (node.has_dissipation()) rate += node.H * z;
    return rate;
}

} // namespace

void check_node(const DiscreteNode& node) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("check_node: " + what); };
    const int n = node.state_dim;
    const int m = node.solution_dim();
    if (n < 1 || node.aux_dim < 0) fail("state_dim must be >= 1 and aux_dim >= 0");
    if (node.X.rows() != n || node.X.cols() != n)
        fail("X must be state_dim x state_dim");
    if (node.L.rows() != n || node.L.cols() != m)
        fail("L must be state_dim x solution_dim");
    if (node.G.rows() < 1 || node.G.cols() != m)
        fail("G must have solution_dim columns and at least one row");
    if (node.K.rows() < 1 || node.K.cols() != m)
        fail("K must have solution_dim columns and at least one row");
    if (node.has_dissipation() && (node.H.rows() != n || node.H.cols() != m))
        fail("H must be state_dim x solution_dim when present");
    double asym = (node.X - node.X.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + node.X.cwiseAbs().maxCoeff())) fail("X is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(node.X);
    if (llt.info() != Eigen::Success) fail("X is not positive definite");
}

double node_energy(const DiscreteNode& node, const Eigen::VectorXd& z) {
    Eigen::VectorXd x = z.head(node.state_dim);
    return x.dot(node.X * x);
}

double gl_defect(const DiscreteNode& node, const Eigen::VectorXd& z) {
    Eigen::VectorXd x = z.head(node.state_dim);
    double flux_in = (node.G * z).squaredNorm();
    double flux_out = (node.K * z).squaredNorm();
    return flux_in - flux_out - 2.0 * x.dot(node.X * interior_rate(node, z));
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Conservative: return "conservative";
        case Verdict::Passive: return "passive";
        case Verdict::NotPassive: return "not-passive";
    }
    return "not-passive";
}

DefectReport passivity_check(const DiscreteNode& node, int n_samples, std::uint64_t seed,
                             double tol) {
    DefectReport report;
    report.samples.reserve(static_cast<std::size_t>(std::max(n_samples, 0)));
    NormalSampler rng(seed);
    bool all_tight = true;
    bool all_nonneg = true;
    report.min_defect = 0.0;
    report.max_identity_residual = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd z = rng.vector(node.solution_dim());
        DefectSample sample;
        sample.defect = gl_defect(node, z);
        sample.scale = node_energy(node, z) + (node.G * z).squaredNorm();
        report.samples.push_back(sample);
        double floor = sample.scale > 0.0 ? sample.scale : 1.0;
        double residual = std::abs(sample.defect) / floor;
        report.max_identity_residual = std::max(report.max_identity_residual, residual);
        if (k == 0 || sample.defect < report.min_defect) report.min_defect = sample.defect;
        if (residual > tol) all_tight = false;
        if (sample.defect < -tol * floor) all_nonneg = false;
    }
    report.verdict = all_tight   ? Verdict::Conservative
                     : all_nonneg ? Verdict::Passive
                                  : Verdict::NotPassive;
    return report;
}

std::string defect_report_csv(const DefectReport& report) {
    CsvWriter w({"sample", "defect", "scale"});
    for (std::size_t k = 0; k < report.samples.size(); ++k)
        w.append({static_cast<double>(k), report.samples[k].defect, report.samples[k].scale});
    return w.str();
}

DiscreteNode timeflow_inverse(const DiscreteNode& node, ReversalMode mode) {
    DiscreteNode inv = node;
    inv.G = node.K;
    inv.K = node.G;
    if (mode == ReversalMode::AdjointStyle) {
        inv.L = -node.L;
    } else {
        inv.L = -node.L;
        if (node.has_dissipation()) inv.L -= node.H;
        inv.H = Eigen::MatrixXd();
    }
    return inv;
}

DiscreteNode add_dissipation(const DiscreteNode& node, const Eigen::MatrixXd& H, int n_check,
                             std::uint64_t seed, double tol) {
    if (H.rows() != node.state_dim || H.cols() != node.solution_dim())
        throw std::invalid_argument("add_dissipation: H must be state_dim x solution_dim");
    NormalSampler rng(seed);
    for (int k = 0; k < n_check; ++k) {
        Eigen::VectorXd z = rng.vector(node.solution_dim());
        Eigen::VectorXd x = z.head(node.state_dim);
        double form = x.dot(node.X * (H * z));
        double scale = node_energy(node, z) + (node.G * z).squaredNorm();
        if (form > tol * (scale > 0.0 ? scale : 1.0)) {
            std::ostringstream os;
            os << "add_dissipation: sampled form has a positive part (" << form
               << " on sample " << k << ")";
            throw std::invalid_argument(os.str());
        }
    }
    DiscreteNode out = node;
    out.H = node.has_dissipation() ? Eigen::MatrixXd(node.H + H) : H;
    return out;
}

KernelReport dissipativity_on_kernel(const DiscreteNode& node, ChannelSide kernel_of,
                                     int n_samples, std::uint64_t seed, double tol) {
    const Eigen::MatrixXd& C = kernel_of == ChannelSide::Input ? node.G : node.K;
    Eigen::MatrixXd gram = C * C.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("dissipativity_on_kernel: channel block is row-rank deficient");

    KernelReport report;
    report.n_samples = n_samples;
    report.ok = true;
    NormalSampler rng(seed);
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd z = rng.vector(node.solution_dim());
        Eigen::VectorXd zp = z - C.transpose() * llt.solve(C * z);
        Eigen::VectorXd x = zp.head(node.state_dim);
        Eigen::VectorXd rate = node.L * zp;
        if (kernel_of == ChannelSide::Output) rate = -rate;
        if (node.has_dissipation()) rate += node.H * zp;
        double closing = kernel_of == ChannelSide::Input ? (node.K * zp).squaredNorm()
                                                         : (node.G * zp).squaredNorm();
        double lhs = 2.0 * x.dot(node.X * rate) + closing;
        double scale =
            node_energy(node, zp) + (node.G * zp).squaredNorm() + (node.K * zp).squaredNorm();
        if (k == 0 || lhs > report.max_violation) report.max_violation = lhs;
        if (lhs > tol * (scale > 0.0 ? scale : 1.0)) report.ok = false;
    }
    return report;
}

Eigen::VectorXd solve_stationary(const DiscreteNode& node, const Eigen::VectorXd& w) {
    if (w.size() != node.state_dim)
        throw std::invalid_argument("solve_stationary: w must have state_dim entries");
    const int m_u = static_cast<int>(node.G.rows());
    if (node.aux_dim != m_u)
        throw std::invalid_argument(
            "solve_stationary: stacked system is square only when aux_dim matches the input rows");
    const int dim = node.solution_dim();
    Eigen::MatrixXd A(dim, dim);
    A.topRows(node.state_dim) = node.L;
    if (node.has_dissipation()) A.topRows(node.state_dim) += node.H;
    A.bottomRows(m_u) = node.G;
    Eigen::VectorXd rhs(dim);
    rhs.head(node.state_dim) = w;
    rhs.tail(m_u).setZero();

    // Row equilibration: the state rows carry the stiff 1/mass scale while
    // the channel rows sit near the trace scale, so balance them before
    // factoring to keep the backward error row-wise.
    Eigen::VectorXd row_scale(dim);
    for (int i = 0; i < dim; ++i) {
        double m = A.row(i).cwiseAbs().maxCoeff();
        row_scale[i] = m > 0.0 ? 1.0 / m : 1.0;
    }
    Eigen::MatrixXd As = row_scale.asDiagonal() * A;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
    if (!lu.isInvertible())
        throw std::runtime_error("solve_stationary: constrained system is singular");
    Eigen::VectorXd z = lu.solve(row_scale.cwiseProduct(rhs));
    z += lu.solve(row_scale.cwiseProduct(rhs - A * z));
    return z;
}

} // namespace waveduct
