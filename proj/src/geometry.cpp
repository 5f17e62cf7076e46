#include "waveduct/geometry.hpp"
#include "waveduct/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace waveduct {

namespace {

// Clamped linear interpolation of (xs, ys) at x; xs strictly increasing.
double interp1(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs.begin());
    double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

void fill_tabulated(TubeGeometry& g, const ProfileSpec& spec, int n) {
    CsvTable table = read_csv(spec.table_path);
    const std::vector<double>& s_tab = table.column("s");
    const std::vector<double>& r_tab = table.column("R");
    const std::vector<double>& k_tab = table.column("kappa");
    if (s_tab.size() < 2)
        throw std::runtime_error(spec.table_path + ": need at least two rows");
    for (std::size_t k = 1; k < s_tab.size(); ++k)
        if (!(s_tab[k] > s_tab[k - 1]))
            throw std::runtime_error(spec.table_path + ": column s must be strictly increasing");

    for (int i = 0; i < n; ++i) {
        g.radius[i] = interp1(s_tab, r_tab, g.s[i]);
        g.curvature[i] = interp1(s_tab, k_tab, g.s[i]);
    }
    if (table.has_column("Rp")) {
        const std::vector<double>& rp_tab = table.column("Rp");
        for (int i = 0; i < n; ++i) g.radius_slope[i] = interp1(s_tab, rp_tab, g.s[i]);
    } else {
        double h = g.s[1] - g.s[0];
        g.radius_slope[0] = (g.radius[1] - g.radius[0]) / h;
        for (int i = 1; i + 1 < n; ++i)
            g.radius_slope[i] = (g.radius[i + 1] - g.radius[i - 1]) / (2.0 * h);
        g.radius_slope[n - 1] = (g.radius[n - 1] - g.radius[n - 2]) / h;
    }
}

} // namespace

TubeGeometry build_profile(const ProfileSpec& spec, int n_samples) {
    if (n_samples < 3) throw std::invalid_argument("build_profile: n_samples must be >= 3");
    const int n = n_samples;
    TubeGeometry g;
    g.s.resize(n);
    g.radius.resize(n);
    g.radius_slope.resize(n);
    g.curvature.assign(n, spec.kappa);
    for (int i = 0; i < n; ++i) g.s[i] = static_cast<double>(i) / (n - 1);

    const double two_pi = 2.0 * std::numbers::pi;
    switch (spec.kind) {
        case ProfileKind::Constant:
            for (int i = 0; i < n; ++i) {
                g.radius[i] = spec.r0;
                g.radius_slope[i] = 0.0;
            }
            break;
        case ProfileKind::Cone:
            for (int i = 0; i < n; ++i) {
                g.radius[i] = spec.r0 + (spec.r1 - spec.r0) * g.s[i];
                g.radius_slope[i] = spec.r1 - spec.r0;
            }
            break;
        case ProfileKind::ExponentialHorn: {
            double m = std::log(spec.r1 / spec.r0);
            for (int i = 0; i < n; ++i) {
                g.radius[i] = spec.r0 * std::exp(m * g.s[i]);
                g.radius_slope[i] = m * g.radius[i];
            }
            break;
        }
        case ProfileKind::CosineBump:
            for (int i = 0; i < n; ++i) {
                g.radius[i] = spec.r0 + (spec.r1 - spec.r0) * 0.5 * (1.0 - std::cos(two_pi * g.s[i]));
                g.radius_slope[i] = (spec.r1 - spec.r0) * std::numbers::pi * std::sin(two_pi * g.s[i]);
            }
            break;
        case ProfileKind::Tabulated:
            fill_tabulated(g, spec, n);
            break;
    }
    derived_fields(g);
    return g;
}

void derived_fields(TubeGeometry& g) {
    const int n = g.n_samples();
    g.area.resize(n);
    g.eta.resize(n);
    g.sigma.resize(n);
    g.wall_stretch.resize(n);
    for (int i = 0; i < n; ++i) {
        double r = g.radius[i];
        double e = r * g.curvature[i];
        g.area[i] = std::numbers::pi * r * r;
        g.eta[i] = e;
        g.sigma[i] = 1.0 / std::sqrt(1.0 + 0.25 * e * e);
        double rp = g.radius_slope[i];
        g.wall_stretch[i] = r * std::sqrt(rp * rp + (e - 1.0) * (e - 1.0));
    }
}

GeometryDiagnostic validate_geometry(const TubeGeometry& g) {
    auto fail = [](const std::string& msg) {
        GeometryDiagnostic d;
        d.ok = false;
        d.message = msg;
        return d;
    };
    auto at = [](const char* what, int i) {
        std::ostringstream os;
        os << what << " at sample " << i;
        return os.str();
    };

    const int n = g.n_samples();
    if (n < 3) return fail("grid: need at least 3 samples");
    const std::size_t ns = g.s.size();
    if (g.radius.size() != ns || g.radius_slope.size() != ns || g.curvature.size() != ns ||
        g.area.size() != ns || g.eta.size() != ns || g.sigma.size() != ns ||
        g.wall_stretch.size() != ns)
        return fail("grid: field arrays differ in length");
    if (g.s.front() != 0.0 || g.s.back() != 1.0) return fail("grid: s must span [0,1]");
    for (int i = 1; i < n; ++i)
        if (!(g.s[i] > g.s[i - 1])) return fail(at("grid: samples not increasing", i));

    for (int i = 0; i < n; ++i) {
        double r = g.radius[i];
        if (!(r > 0.0)) return fail(at("radius: must be positive", i));
        double a_ref = std::numbers::pi * r * r;
        if (std::abs(g.area[i] - a_ref) > 1e-12 * std::max(1.0, a_ref))
            return fail(at("area: inconsistent with pi R^2", i));
        double e_ref = r * g.curvature[i];
        if (std::abs(g.eta[i] - e_ref) > 1e-12 * std::max(1.0, std::abs(e_ref)))
            return fail(at("eta: inconsistent with R kappa", i));
        if (!(g.eta[i] < 1.0)) return fail(at("eta: must stay below 1", i));
        double sg_ref = 1.0 / std::sqrt(1.0 + 0.25 * g.eta[i] * g.eta[i]);
        if (std::abs(g.sigma[i] - sg_ref) > 1e-12)
            return fail(at("sigma: inconsistent with (1 + eta^2/4)^(-1/2)", i));
        double rp = g.radius_slope[i];
        double w_ref = r * std::sqrt(rp * rp + (g.eta[i] - 1.0) * (g.eta[i] - 1.0));
        if (std::abs(g.wall_stretch[i] - w_ref) > 1e-12 * std::max(1.0, w_ref))
            return fail(at("w_str: inconsistent with R sqrt(R'^2 + (eta-1)^2)", i));
    }
    return GeometryDiagnostic{};
}

std::string geometry_csv(const TubeGeometry& g) {
    CsvWriter w({"s", "R", "Rp", "kappa", "A", "eta", "sigma", "w_str"});
    for (int i = 0; i < g.n_samples(); ++i)
        w.append({g.s[i], g.radius[i], g.radius_slope[i], g.curvature[i], g.area[i], g.eta[i],
                  g.sigma[i], g.wall_stretch[i]});
    return w.str();
}

} // namespace waveduct
