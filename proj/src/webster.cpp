#include "waveduct/webster.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace waveduct {

namespace {

using Triplet = Eigen::Triplet<double>;

// Element matrix of int w(s) phi_a phi_b with w linear on the element:
//   h * [w0/4 + w1/12, (w0+w1)/12; (w0+w1)/12, w0/12 + w1/4].
void add_weighted_mass(std::vector<Triplet>& out, int e, int n, double h, double w0, double w1) {
    double d00 = h * (w0 / 4.0 + w1 / 12.0);
    double d01 = h * (w0 + w1) / 12.0;
    double d11 = h * (w0 / 12.0 + w1 / 4.0);
    out.emplace_back(e, e, d00);
    if (e + 1 < n) {
        out.emplace_back(e, e + 1, d01);
        out.emplace_back(e + 1, e, d01);
        out.emplace_back(e + 1, e + 1, d11);
    }
}

Eigen::SparseMatrix<double> weighted_mass(const TubeGeometry& g, const std::vector<double>& w,
                                          int n) {
    std::vector<Triplet> trip;
    trip.reserve(4 * static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e)
        add_weighted_mass(trip, e, n, g.s[e + 1] - g.s[e], w[e], w[e + 1]);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

double quad_form(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& v) {
    return v.dot(m * v);
}

class WebsterHandle final : public LinearSystemHandle {
public:
    explicit WebsterHandle(const WebsterSystem& sys) : sys_(sys) {
        const int n = sys_.n();
        std::vector<Triplet> trip;
        trip.emplace_back(0, 0, sys_.absorb0);
        C_damped_ = sys_.D_w * (2.0 * std::numbers::pi * sys_.consts.alpha);
        Eigen::SparseMatrix<double> end(n, n);
        end.setFromTriplets(trip.begin(), trip.end());
        C_damped_ += end;
        trace_coef_ = std::sqrt(sys_.area0 / (sys_.consts.rho * sys_.c0));
    }

    int dim() const override { return 2 * sys_.n(); }

    void factor(double dt) override {
        if (have_factor_ && dt == dt_) return;
        Eigen::SparseMatrix<double> a = sys_.M_w + (dt / 2.0) * C_damped_ +
                                        (dt * dt / 4.0) * sys_.K_A;
        rhs_mat_ = sys_.M_w - (dt / 2.0) * C_damped_ - (dt * dt / 4.0) * sys_.K_A;
        lu_.compute(a);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("webster_handle: implicit step matrix is singular");
        dt_ = dt;
        have_factor_ = true;
    }

    Eigen::VectorXd midpoint_step(const Eigen::VectorXd& z, const Eigen::VectorXd& u0,
                                  const Eigen::VectorXd& u1, double dt) const override {
        if (!have_factor_ || dt != dt_)
            throw std::logic_error("webster_handle: factor(dt) must precede midpoint_step");
        const int n = sys_.n();
        double u_mid = 0.5 * (u0[0] + u1[0]);
        Eigen::VectorXd psi = z.head(n);
        Eigen::VectorXd pi = z.tail(n);
        Eigen::VectorXd rhs = rhs_mat_ * pi - dt * sys_.consts.rho * (sys_.K_A * psi);
        rhs[0] += dt * sys_.b_in0 * u_mid;
        Eigen::VectorXd pi_next = lu_.solve(rhs);
        Eigen::VectorXd out(2 * n);
        out.head(n) = psi + (dt / (2.0 * sys_.consts.rho)) * (pi + pi_next);
        out.tail(n) = pi_next;
        return out;
    }

    double energy(const Eigen::VectorXd& z) const override {
        const int n = sys_.n();
        Eigen::VectorXd psi = z.head(n);
        Eigen::VectorXd pi = z.tail(n);
        return 0.5 * (sys_.consts.rho * quad_form(sys_.K_A, psi) +
                      quad_form(sys_.M_w, pi) / sys_.consts.rho);
    }

    double output(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const override {
        return u[0] - trace_coef_ * z[sys_.n()];
    }

    PowerSplit ledger_powers(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const override {
        const int n = sys_.n();
        Eigen::VectorXd pi = z.tail(n);
        PowerSplit p;
        p.p_in = u[0] * u[0];
        double y = output(z, u);
        p.p_out = y * y;
        p.p_wall = 2.0 * std::numbers::pi * sys_.consts.alpha / sys_.consts.rho *
                   quad_form(sys_.D_w, pi);
        return p;
    }

    double input_mismatch(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const override {
        return std::abs(u[0] - trace_coef_ * z[sys_.n()]);
    }

private:
    WebsterSystem sys_;
    Eigen::SparseMatrix<double> C_damped_; // absorb0 e0 e0^T + 2 pi alpha D_w
    Eigen::SparseMatrix<double> rhs_mat_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    double trace_coef_ = 0.0;
    double dt_ = 0.0;
    bool have_factor_ = false;
};

} // namespace

WebsterSystem assemble_webster(const TubeGeometry& geom, const PhysicalConstants& consts,
                               int n_elems) {
    if (n_elems < 2) throw std::invalid_argument("assemble_webster: n_elems must be >= 2");
    if (geom.n_samples() != n_elems + 1)
        throw std::invalid_argument("assemble_webster: geometry must carry n_elems + 1 samples");
    GeometryDiagnostic diag = validate_geometry(geom);
    if (!diag.ok) throw std::invalid_argument("assemble_webster: " + diag.message);

    WebsterSystem sys;
    sys.geom = geom;
    sys.consts = consts;
    sys.n_elems = n_elems;
    const int n = n_elems;

    std::vector<Triplet> ka;
    ka.reserve(4 * static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) {
        double h = geom.s[e + 1] - geom.s[e];
        double k = 0.5 * (geom.area[e] + geom.area[e + 1]) / h;
        ka.emplace_back(e, e, k);
        if (e + 1 < n) {
            ka.emplace_back(e, e + 1, -k);
            ka.emplace_back(e + 1, e, -k);
            ka.emplace_back(e + 1, e + 1, k);
        }
    }
    sys.K_A.resize(n, n);
    sys.K_A.setFromTriplets(ka.begin(), ka.end());

    std::vector<double> w_mass(geom.n_samples());
    for (int i = 0; i < geom.n_samples(); ++i) {
        double ci = geom.wave_speed(consts, i);
        w_mass[static_cast<std::size_t>(i)] = geom.area[i] / (ci * ci);
    }
    sys.M_w = weighted_mass(geom, w_mass, n);
    sys.D_w = weighted_mass(geom, geom.wall_stretch, n);

    sys.c0 = geom.wave_speed(consts, 0);
    sys.area0 = geom.area[0];
    sys.absorb0 = sys.area0 / sys.c0;
    sys.b_in0 = 2.0 * std::sqrt(consts.rho * sys.area0 / sys.c0);
    return sys;
}

double webster_energy(const WebsterSystem& sys, const WebsterState& state) {
    return 0.5 * (sys.consts.rho * quad_form(sys.K_A, state.psi) +
                  quad_form(sys.M_w, state.pi) / sys.consts.rho);
}

double webster_flux(const WebsterSystem& sys, const WebsterState& state, double u) {
    double a = 2.0 * std::sqrt(sys.c0 / (sys.consts.rho * sys.area0));
    return (state.pi[0] / sys.consts.rho - a * u) / sys.c0;
}

double webster_output(const WebsterSystem& sys, const WebsterState& state, double u) {
    return u - std::sqrt(sys.area0 / (sys.consts.rho * sys.c0)) * state.pi[0];
}

DiscreteNode webster_node(const WebsterSystem& sys) {
    const int n = sys.n();
    const double rho = sys.consts.rho;
    DiscreteNode node;
    node.state_dim = 2 * n;
    node.aux_dim = 1;
    node.channel_labels = {"end-in", "end-out"};

    node.X = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    node.X.topLeftCorner(n, n) = 0.5 * rho * Eigen::MatrixXd(sys.K_A);
    node.X.bottomRightCorner(n, n) = Eigen::MatrixXd(sys.M_w) / (2.0 * rho);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass(sys.M_w);
    Eigen::MatrixXd rate_pi(n, n + 1);
    rate_pi.leftCols(n) = -rho * Eigen::MatrixXd(sys.K_A);
    rate_pi.col(n).setZero();
    rate_pi(0, n) = -rho * sys.area0;
    rate_pi = mass.solve(rate_pi);

    node.L = Eigen::MatrixXd::Zero(2 * n, 2 * n + 1);
    node.L.block(0, n, n, n) = Eigen::MatrixXd::Identity(n, n) / rho;
    node.L.block(n, 0, n, n) = rate_pi.leftCols(n);
    node.L.block(n, 2 * n, n, 1) = rate_pi.col(n);

    double coef = 0.5 * std::sqrt(sys.area0 / (rho * sys.c0));
    node.G = Eigen::MatrixXd::Zero(1, 2 * n + 1);
    node.G(0, n) = coef;
    node.G(0, 2 * n) = -coef * rho * sys.c0;
    node.K = Eigen::MatrixXd::Zero(1, 2 * n + 1);
    node.K(0, n) = -coef;
    node.K(0, 2 * n) = -coef * rho * sys.c0;

    if (sys.consts.alpha > 0.0) node.H = webster_dissipation(sys, sys.consts.alpha);
    return node;
}

Eigen::MatrixXd webster_dissipation(const WebsterSystem& sys, double alpha) {
    const int n = sys.n();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass(sys.M_w);
    Eigen::MatrixXd block = mass.solve(Eigen::MatrixXd(sys.D_w));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n + 1);
    h.block(n, n, n, n) = -2.0 * std::numbers::pi * alpha * block;
    return h;
}

std::unique_ptr<LinearSystemHandle> webster_handle(const WebsterSystem& sys) {
    return std::make_unique<WebsterHandle>(sys);
}

Eigen::VectorXd pack_state(const WebsterState& state) {
    Eigen::VectorXd z(state.psi.size() + state.pi.size());
    z.head(state.psi.size()) = state.psi;
    z.tail(state.pi.size()) = state.pi;
    return z;
}

WebsterState unpack_state(const WebsterSystem& sys, const Eigen::VectorXd& z) {
    const int n = sys.n();
    WebsterState st;
    st.psi = z.head(n);
    st.pi = z.segment(n, n);
    return st;
}

double poincare_ratio(int n_elems) {
    if (n_elems < 1) throw std::invalid_argument("poincare_ratio: n_elems must be >= 1");
    const int n = n_elems;
    const double h = 1.0 / n;
    Eigen::MatrixXd k0 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < n; ++e) {
        k0(e, e) += 1.0 / h;
        m0(e, e) += h / 3.0;
        if (e + 1 < n) {
            k0(e, e + 1) -= 1.0 / h;
            k0(e + 1, e) -= 1.0 / h;
            k0(e + 1, e + 1) += 1.0 / h;
            m0(e, e + 1) += h / 6.0;
            m0(e + 1, e) += h / 6.0;
            m0(e + 1, e + 1) += h / 3.0;
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(m0, k0, Eigen::EigenvaluesOnly);
    return ges.eigenvalues().maxCoeff();
}

} // namespace waveduct
