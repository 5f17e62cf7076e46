#ifndef WAVEDUCT_COMPARE_HPP
#define WAVEDUCT_COMPARE_HPP

#include <string>
#include <vector>

#include "waveduct/config.hpp"
#include "waveduct/geometry.hpp"
#include "waveduct/signals.hpp"

namespace waveduct {

/* Cross-model check on a constant-radius tube: the cylinder run's
 * cross-section averages against the horn model's field on the shared
 * axial grid and time stride. Per-axial-sample errors are L2 in time,
 * normalized by the largest per-sample L2 norm of the horn reference (a
 * per-sample quotient degenerates near the Dirichlet plane). */
struct CompareOptions {
    double radius = 0.01;
    PhysicalConstants physics;
    int ns = 300;
    int nr = 24;
    double dt = 5e-6;
    double t_final = 0.015;
    int record_stride = 10;
};

struct CompareResult {
    std::vector<double> s;          // shared axial samples, size ns
    std::vector<double> t;          // recorded times
    std::vector<std::vector<double>> phibar; // [record][axial]
    std::vector<std::vector<double>> psi;    // [record][axial]
    std::vector<double> rel_err_per_s;       // size ns
    double max_rel_err = 0.0;
    double ref_norm = 0.0; // max over s of the reference L2-in-time norm
};

CompareResult compare_averages(const CompareOptions& opt, const Signal& input);

// Long-format rows s,t,phibar_wave,psi_webster,abs_err.
std::string compare_csv(const CompareResult& res);

} // namespace waveduct

#endif
