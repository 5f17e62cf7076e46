#include "waveduct/cylinder.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace waveduct {

namespace {

using Triplet = Eigen::Triplet<double>;

double ring_weight(const CylinderSystem& sys, int j) {
    return 2.0 * M_PI * sys.r_center(j) * sys.dr;
}

double wall_weight(const CylinderSystem& sys, int i) {
    return 2.0 * M_PI * sys.radius * sys.axial_weight(i);
}

/* Dirichlet form matrix: v^T S a = Q(a, v), assembled from the same face
 * differences as laplacian_with_fluxes so the Green identity carries over
 * to the dynamics exactly. */
Eigen::SparseMatrix<double> dirichlet_form_matrix(const CylinderSystem& sys) {
    const int ns = sys.ns;
    const int nr = sys.nr;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(8 * ns * nr));

    for (int j = 0; j < nr; ++j) {
        double k = ring_weight(sys, j) / sys.ds;
        for (int i = 0; i + 1 < ns; ++i) {
            int a = sys.idx(i, j);
            int b = sys.idx(i + 1, j);
            trip.emplace_back(a, a, k);
            trip.emplace_back(b, b, k);
            trip.emplace_back(a, b, -k);
            trip.emplace_back(b, a, -k);
        }
        int last = sys.idx(ns - 1, j);
        trip.emplace_back(last, last, k); // face against the eliminated s=1 plane
    }
    for (int i = 0; i < ns; ++i) {
        double wt = sys.axial_weight(i);
        for (int f = 1; f < nr; ++f) {
            double k = wt * 2.0 * M_PI * (f * sys.dr) / sys.dr;
            int a = sys.idx(i, f - 1);
            int b = sys.idx(i, f);
            trip.emplace_back(a, a, k);
            trip.emplace_back(b, b, k);
            trip.emplace_back(a, b, -k);
            trip.emplace_back(b, a, -k);
        }
    }
    Eigen::SparseMatrix<double> s(sys.n_cells(), sys.n_cells());
    s.setFromTriplets(trip.begin(), trip.end());
    return s;
}

class CylinderHandle final : public LinearSystemHandle {
public:
    explicit CylinderHandle(CylinderSystem& sys) : sys_(&sys) {
        const int n = sys.n_cells();
        const double c = sys.consts.c;
        const double rho = sys.consts.rho;
        shat_ = dirichlet_form_matrix(sys);

        weights_.resize(n);
        for (int i = 0; i < sys.ns; ++i)
            for (int j = 0; j < sys.nr; ++j)
                weights_[sys.idx(i, j)] = sys.cell_weight(i, j);

        c_tot_ = Eigen::VectorXd::Zero(n);
        b_end_ = Eigen::VectorXd::Zero(n);
        b_wall_ = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < sys.nr; ++j) {
            double wj = ring_weight(sys, j);
            c_tot_[sys.idx(0, j)] += c * wj;
            b_end_[sys.idx(0, j)] = 2.0 * std::sqrt(rho * c * c * c / sys.area0()) * wj *
                                    sys.input_profile[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < sys.ns; ++i) {
            double wt = wall_weight(sys, i);
            c_tot_[sys.idx(i, sys.nr - 1)] += sys.wall_alpha * c * c * wt;
            if (sys.wall_input_open)
                b_wall_[sys.idx(i, sys.nr - 1)] =
                    rho * c * c * wt * 2.0 * std::sqrt(sys.wall_alpha / rho);
        }
        if (sys.g_damp.size())
            c_tot_ -= weights_.cwiseProduct(sys.g_damp);

        trace_coef_ = std::sqrt(sys.area0() / (rho * c));
    }

    int dim() const override { return 2 * sys_->n_cells(); }
    int n_inputs() const override { return sys_->wall_input_open ? 2 : 1; }

    void factor(double dt) override {
        if (have_factor_ && dt == dt_) return;
        const double c2 = sys_->consts.c * sys_->consts.c;
        Eigen::SparseMatrix<double> a = (dt * dt * c2 / 4.0) * shat_;
        Eigen::SparseMatrix<double> diag(sys_->n_cells(), sys_->n_cells());
        std::vector<Triplet> trip;
        trip.reserve(static_cast<std::size_t>(sys_->n_cells()));
        for (int k = 0; k < sys_->n_cells(); ++k)
            trip.emplace_back(k, k, weights_[k] + (dt / 2.0) * c_tot_[k]);
        diag.setFromTriplets(trip.begin(), trip.end());
        a += diag;
        rhs_mat_ = -((dt * dt * c2 / 4.0) * shat_);
        std::vector<Triplet> trip_b;
        trip_b.reserve(static_cast<std::size_t>(sys_->n_cells()));
        for (int k = 0; k < sys_->n_cells(); ++k)
            trip_b.emplace_back(k, k, weights_[k] - (dt / 2.0) * c_tot_[k]);
        Eigen::SparseMatrix<double> diag_b(sys_->n_cells(), sys_->n_cells());
        diag_b.setFromTriplets(trip_b.begin(), trip_b.end());
        rhs_mat_ += diag_b;
        lu_.compute(a);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("cylinder_handle: implicit step matrix is singular");
        dt_ = dt;
        have_factor_ = true;
    }

    Eigen::VectorXd midpoint_step(const Eigen::VectorXd& z, const Eigen::VectorXd& u0,
                                  const Eigen::VectorXd& u1, double dt) const override {
        if (!have_factor_ || dt != dt_)
            throw std::logic_error("cylinder_handle: factor(dt) must precede midpoint_step");
        const int n = sys_->n_cells();
        const double rho = sys_->consts.rho;
        const double c2 = sys_->consts.c * sys_->consts.c;
        Eigen::VectorXd phi = z.head(n);
        Eigen::VectorXd p = z.tail(n);
        Eigen::VectorXd u_mid = 0.5 * (u0 + u1);
        Eigen::VectorXd rhs = rhs_mat_ * p - dt * rho * c2 * (shat_ * phi);
        rhs += dt * u_mid[0] * b_end_;
        if (u_mid.size() > 1) rhs += dt * u_mid[1] * b_wall_;
        Eigen::VectorXd p_next = lu_.solve(rhs);
        Eigen::VectorXd out(2 * n);
        out.head(n) = phi + (dt / (2.0 * rho)) * (p + p_next);
        out.tail(n) = p_next;
        return out;
    }

    double energy(const Eigen::VectorXd& z) const override {
        const int n = sys_->n_cells();
        Eigen::VectorXd phi = z.head(n);
        Eigen::VectorXd p = z.tail(n);
        const double rho = sys_->consts.rho;
        const double c2 = sys_->consts.c * sys_->consts.c;
        return 0.5 * (rho * phi.dot(shat_ * phi) +
                      weights_.cwiseProduct(p).dot(p) / (rho * c2));
    }

    double output(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const override {
        return u[0] - trace_coef_ * end_average(z);
    }

    PowerSplit ledger_powers(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const override {
        const int n = sys_->n_cells();
        const double rho = sys_->consts.rho;
        const double c = sys_->consts.c;
        const double alpha = sys_->wall_alpha;
        PowerSplit split;

        double a_in = 2.0 * std::sqrt(c / (rho * sys_->area0()));
        for (int j = 0; j < sys_->nr; ++j) {
            double wj = ring_weight(*sys_, j);
            double q = z[n + sys_->idx(0, j)];
            double prof = sys_->input_profile[static_cast<std::size_t>(j)];
            double fs = (q / rho - a_in * u[0] * prof) / c;
            double coef = 0.5 * std::sqrt(wj / (rho * c));
            double u_chan = coef * (q - rho * c * fs);
            double y_chan = coef * (-q - rho * c * fs);
            split.p_in += u_chan * u_chan;
            split.p_out += y_chan * y_chan;
        }

        if (alpha > 0.0 || sys_->wall_input_open) {
            double u_wall = u.size() > 1 ? u[1] : 0.0;
            double root = std::sqrt(alpha / rho);
            for (int i = 0; i < sys_->ns; ++i) {
                double wt = wall_weight(*sys_, i);
                double pw = z[n + sys_->idx(i, sys_->nr - 1)];
                if (sys_->wall_input_open) {
                    double y_tilde = u_wall - root * pw;
                    split.p_wall += wt * (y_tilde * y_tilde - u_wall * u_wall);
                } else {
                    split.p_wall += (alpha / rho) * wt * pw * pw;
                }
            }
        }

        if (sys_->g_damp.size()) {
            const double c2 = c * c;
            for (int k = 0; k < n; ++k) {
                double pk = z[n + k];
                split.p_interior -= weights_[k] * sys_->g_damp[k] * pk * pk / (rho * c2);
            }
        }
        return split;
    }

    double input_mismatch(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const override {
        return std::abs(u[0] - trace_coef_ * end_average(z));
    }

private:
    // area-averaged pressure over the control cross-section
    double end_average(const Eigen::VectorXd& z) const {
        const int n = sys_->n_cells();
        double acc = 0.0;
        for (int j = 0; j < sys_->nr; ++j)
            acc += z[n + sys_->idx(0, j)] * ring_weight(*sys_, j);
        return acc / sys_->area0();
    }

    CylinderSystem* sys_;
    Eigen::SparseMatrix<double> shat_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd c_tot_; // diagonal damping: end trace + wall trace - W g
    Eigen::VectorXd b_end_;
    Eigen::VectorXd b_wall_;
    Eigen::SparseMatrix<double> rhs_mat_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    double trace_coef_ = 0.0;
    double dt_ = 0.0;
    bool have_factor_ = false;
};

} // namespace

CylinderSystem build_cylinder(const PhysicalConstants& consts, double R0, int ns, int nr) {
    if (ns < 4) throw std::invalid_argument("build_cylinder: ns must be >= 4");
    if (nr < 2) throw std::invalid_argument("build_cylinder: nr must be >= 2");
    if (!(R0 > 0.0)) throw std::invalid_argument("build_cylinder: R0 must be positive");
    CylinderSystem sys;
    sys.consts = consts;
    sys.radius = R0;
    sys.ns = ns;
    sys.nr = nr;
    sys.ds = 1.0 / ns;
    sys.dr = R0 / nr;
    sys.phi = Eigen::VectorXd::Zero(sys.n_cells());
    sys.p = Eigen::VectorXd::Zero(sys.n_cells());
    sys.input_profile.assign(static_cast<std::size_t>(nr), 1.0);
    return sys;
}

void set_interior_damping(CylinderSystem& sys, const Eigen::VectorXd& g) {
    if (g.size() != sys.n_cells())
        throw std::invalid_argument("set_interior_damping: g must have ns*nr entries");
    for (int k = 0; k < g.size(); ++k)
        if (g[k] > 0.0)
            throw std::invalid_argument("set_interior_damping: g must be nonpositive");
    sys.g_damp = g;
}

void set_interior_damping(CylinderSystem& sys, double g_uniform) {
    set_interior_damping(sys, Eigen::VectorXd::Constant(sys.n_cells(), g_uniform));
}

std::vector<double> cross_section_average(const CylinderSystem& sys,
                                          const Eigen::VectorXd& field) {
    if (field.size() != sys.n_cells())
        throw std::invalid_argument("cross_section_average: field must have ns*nr entries");
    std::vector<double> avg(static_cast<std::size_t>(sys.ns), 0.0);
    for (int i = 0; i < sys.ns; ++i) {
        double acc = 0.0;
        for (int j = 0; j < sys.nr; ++j) acc += field[sys.idx(i, j)] * ring_weight(sys, j);
        avg[static_cast<std::size_t>(i)] = acc / sys.area0();
    }
    return avg;
}

double cylinder_energy(const CylinderSystem& sys) {
    const double rho = sys.consts.rho;
    const double c2 = sys.consts.c * sys.consts.c;
    double kinetic = 0.0;
    for (int i = 0; i < sys.ns; ++i)
        for (int j = 0; j < sys.nr; ++j) {
            double pk = sys.p[sys.idx(i, j)];
            kinetic += sys.cell_weight(i, j) * pk * pk;
        }
    return 0.5 * (rho * gradient_pairing(sys, sys.phi, sys.phi) + kinetic / (rho * c2));
}

double cylinder_wall_power(const CylinderSystem& sys) {
    double acc = 0.0;
    for (int i = 0; i < sys.ns; ++i) {
        double pw = sys.p[sys.idx(i, sys.nr - 1)];
        acc += wall_weight(sys, i) * pw * pw;
    }
    return sys.wall_alpha / sys.consts.rho * acc;
}

double cylinder_interior_power(const CylinderSystem& sys) {
    if (!sys.g_damp.size()) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < sys.ns; ++i)
        for (int j = 0; j < sys.nr; ++j) {
            int k = sys.idx(i, j);
            acc -= sys.cell_weight(i, j) * sys.g_damp[k] * sys.p[k] * sys.p[k];
        }
    return acc / (sys.consts.rho * sys.consts.c * sys.consts.c);
}

Eigen::VectorXd laplacian_with_fluxes(const CylinderSystem& sys, const Eigen::VectorXd& phi,
                                      const Eigen::VectorXd& flux_s0,
                                      const Eigen::VectorXd& flux_wall) {
    if (phi.size() != sys.n_cells() || flux_s0.size() != sys.nr || flux_wall.size() != sys.ns)
        throw std::invalid_argument("laplacian_with_fluxes: size mismatch");
    Eigen::VectorXd out(sys.n_cells());
    for (int i = 0; i < sys.ns; ++i) {
        for (int j = 0; j < sys.nr; ++j) {
            double here = phi[sys.idx(i, j)];
            double d_plus = i + 1 < sys.ns ? (phi[sys.idx(i + 1, j)] - here) / sys.ds
                                           : (0.0 - here) / sys.ds;
            double d_minus = i > 0 ? (here - phi[sys.idx(i - 1, j)]) / sys.ds : flux_s0[j];
            double axial = (d_plus - d_minus) / sys.axial_weight(i);

            double r_out = (j + 1) * sys.dr;
            double d_out = j + 1 < sys.nr ? (phi[sys.idx(i, j + 1)] - here) / sys.dr
                                          : flux_wall[i];
            double radial = r_out * d_out;
            if (j > 0) {
                double r_in = j * sys.dr;
                radial -= r_in * (here - phi[sys.idx(i, j - 1)]) / sys.dr;
            }
            radial /= sys.r_center(j) * sys.dr;
            out[sys.idx(i, j)] = axial + radial;
        }
    }
    return out;
}

double gradient_pairing(const CylinderSystem& sys, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) {
    if (a.size() != sys.n_cells() || b.size() != sys.n_cells())
        throw std::invalid_argument("gradient_pairing: size mismatch");
    double q = 0.0;
    for (int j = 0; j < sys.nr; ++j) {
        double ring = ring_weight(sys, j);
        for (int i = 0; i + 1 < sys.ns; ++i) {
            double da = (a[sys.idx(i + 1, j)] - a[sys.idx(i, j)]) / sys.ds;
            double db = (b[sys.idx(i + 1, j)] - b[sys.idx(i, j)]) / sys.ds;
            q += ring * sys.ds * da * db;
        }
        double da = -a[sys.idx(sys.ns - 1, j)] / sys.ds;
        double db = -b[sys.idx(sys.ns - 1, j)] / sys.ds;
        q += ring * sys.ds * da * db;
    }
    for (int i = 0; i < sys.ns; ++i) {
        double wt = sys.axial_weight(i);
        for (int f = 1; f < sys.nr; ++f) {
            double da = (a[sys.idx(i, f)] - a[sys.idx(i, f - 1)]) / sys.dr;
            double db = (b[sys.idx(i, f)] - b[sys.idx(i, f - 1)]) / sys.dr;
            q += wt * 2.0 * M_PI * (f * sys.dr) * sys.dr * da * db;
        }
    }
    return q;
}

double volume_pairing(const CylinderSystem& sys, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
    if (a.size() != sys.n_cells() || b.size() != sys.n_cells())
        throw std::invalid_argument("volume_pairing: size mismatch");
    double acc = 0.0;
    for (int i = 0; i < sys.ns; ++i)
        for (int j = 0; j < sys.nr; ++j) {
            int k = sys.idx(i, j);
            acc += sys.cell_weight(i, j) * a[k] * b[k];
        }
    return acc;
}

std::unique_ptr<LinearSystemHandle> cylinder_handle(CylinderSystem& sys) {
    return std::make_unique<CylinderHandle>(sys);
}

CylinderRunResult run_cylinder(CylinderSystem& sys, const Signal& end_input,
                               const Signal& wall_input, const SimulationOptions& opt) {
    std::unique_ptr<LinearSystemHandle> handle = cylinder_handle(sys);
    const int n = sys.n_cells();
    Eigen::VectorXd z0(2 * n);
    z0.head(n) = sys.phi;
    z0.tail(n) = sys.p;
    std::vector<Signal> inputs;
    inputs.push_back(end_input);
    if (sys.wall_input_open) inputs.push_back(wall_input);

    CylinderRunResult result;
    SnapshotFn snap = [&](int, double t, const Eigen::VectorXd& z) {
        result.record_times.push_back(t);
        result.phibar_records.push_back(cross_section_average(sys, z.head(n)));
    };
    result.sim = run_simulation(*handle, z0, inputs, opt, snap);
    sys.phi = result.sim.final_state.head(n);
    sys.p = result.sim.final_state.tail(n);
    return result;
}

} // namespace waveduct
