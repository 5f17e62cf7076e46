#include "waveduct/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "waveduct/csv.hpp"
#include "waveduct/cylinder.hpp"
#include "waveduct/webster.hpp"

namespace waveduct {

CompareResult compare_averages(const CompareOptions& opt, const Signal& input) {
    if (!(opt.radius > 0.0))
        throw std::invalid_argument("compare_averages: radius must be positive");
    if (!(opt.dt > 0.0) || !(opt.t_final > 0.0))
        throw std::invalid_argument("compare_averages: dt and t_final must be positive");

    const int ns = opt.ns;
    const int n_steps = static_cast<int>(std::lround(opt.t_final / opt.dt));

    SimulationOptions sim_opt;
    sim_opt.dt = opt.dt;
    sim_opt.n_steps = n_steps;
    sim_opt.record_stride = opt.record_stride;

    // cylinder twin, wall admittance matching the horn's damping coefficient
    CylinderSystem cyl = build_cylinder(opt.physics, opt.radius, ns, opt.nr);
    cyl.wall_alpha = opt.physics.alpha;
    CylinderRunResult cyl_run = run_cylinder(cyl, input, zero_signal(), sim_opt);

    // horn twin on the same axial nodes s_i = i/ns (Dirichlet node dropped)
    ProfileSpec spec;
    spec.kind = ProfileKind::Constant;
    spec.r0 = opt.radius;
    spec.r1 = opt.radius;
    TubeGeometry geom = build_profile(spec, ns + 1);
    WebsterSystem horn = assemble_webster(geom, opt.physics, ns);
    auto handle = webster_handle(horn);

    CompareResult res;
    res.s.resize(ns);
    for (int i = 0; i < ns; ++i) res.s[i] = static_cast<double>(i) / ns;

    auto grab_psi = [&](int, double t, const Eigen::VectorXd& z) {
        res.t.push_back(t);
        std::vector<double> psi(ns);
        for (int i = 0; i < ns; ++i) psi[i] = z[i];
        res.psi.push_back(std::move(psi));
    };
    run_simulation(*handle, Eigen::VectorXd::Zero(handle->dim()), {input}, sim_opt,
                   grab_psi);

    res.phibar = cyl_run.phibar_records;
    if (res.phibar.size() != res.psi.size())
        throw std::logic_error("compare_averages: record count mismatch");

    res.rel_err_per_s.assign(ns, 0.0);
    std::vector<double> err(ns, 0.0), ref(ns, 0.0);
    for (std::size_t rec = 0; rec < res.psi.size(); ++rec) {
        for (int i = 0; i < ns; ++i) {
            double d = res.phibar[rec][i] - res.psi[rec][i];
            err[i] += d * d;
            ref[i] += res.psi[rec][i] * res.psi[rec][i];
        }
    }
    for (int i = 0; i < ns; ++i) res.ref_norm = std::max(res.ref_norm, std::sqrt(ref[i]));
    double denom = res.ref_norm > 0.0 ? res.ref_norm : 1.0;
    for (int i = 0; i < ns; ++i) {
        res.rel_err_per_s[i] = std::sqrt(err[i]) / denom;
        res.max_rel_err = std::max(res.max_rel_err, res.rel_err_per_s[i]);
    }
    return res;
}

std::string compare_csv(const CompareResult& res) {
    CsvWriter w({"s", "t", "phibar_wave", "psi_webster", "abs_err"});
    for (std::size_t rec = 0; rec < res.t.size(); ++rec) {
        for (std::size_t i = 0; i < res.s.size(); ++i) {
            double d = std::abs(res.phibar[rec][i] - res.psi[rec][i]);
            w.append({res.s[i], res.t[rec], res.phibar[rec][i], res.psi[rec][i], d});
        }
    }
    return w.str();
}

} // namespace waveduct
