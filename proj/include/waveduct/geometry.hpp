#ifndef WAVEDUCT_GEOMETRY_HPP
#define WAVEDUCT_GEOMETRY_HPP

#include <string>
#include <vector>

namespace waveduct {

struct PhysicalConstants {
    double c = 343.0;   // sound speed in the medium
    double rho = 1.2;   // density
    double alpha = 0.0; // boundary dissipation coefficient, >= 0
};

/* Sampled description of an acoustic tube of unit length. All arrays share
 * one uniform axial grid on [0,1]. The derived fields keep the invariants
 * area = pi R^2, eta = R kappa < 1, sigma = (1 + eta^2/4)^(-1/2), and
 * wall_stretch = R sqrt(R'^2 + (eta-1)^2) >= 0. */
struct TubeGeometry {
    std::vector<double> s;            // axial samples, uniform on [0,1]
    std::vector<double> radius;       // R(s) > 0
    std::vector<double> radius_slope; // R'(s)
    std::vector<double> curvature;    // centreline curvature kappa(s)
    std::vector<double> area;         // A = pi R^2
    std::vector<double> eta;          // R kappa
    std::vector<double> sigma;        // (1 + eta^2/4)^(-1/2)
    std::vector<double> wall_stretch; // R sqrt(R'^2 + (eta-1)^2)

    int n_samples() const { return static_cast<int>(s.size()); }
    // sound speed profile c(s) = c * sigma(s)
    double wave_speed(const PhysicalConstants& pc, int i) const { return pc.c * sigma[i]; }
};

enum class ProfileKind { Constant, Cone, ExponentialHorn, CosineBump, Tabulated };

struct ProfileSpec {
    ProfileKind kind = ProfileKind::Constant;
    double r0 = 0.01;       // entry radius
    double r1 = 0.01;       // exit radius (cone, horn) or bump peak radius (cosine)
    double kappa = 0.0;     // uniform centreline curvature
    std::string table_path; // CSV source for the tabulated kind
};

// Samples a named profile on a uniform n_samples grid (n_samples >= 3) and
// fills the derived fields. Analytic kinds carry exact radius slopes; the
// tabulated kind reads columns s,R,kappa with an optional Rp column and
// falls back to central differences (one-sided at the endpoints).
TubeGeometry build_profile(const ProfileSpec& spec, int n_samples);

// Recomputes area/eta/sigma/wall_stretch from radius, radius_slope and
// curvature. Pure in the base fields; no validation.
void derived_fields(TubeGeometry& g);

struct GeometryDiagnostic {
    bool ok = true;
    std::string message; // names the first violated invariant and sample index
};

GeometryDiagnostic validate_geometry(const TubeGeometry& g);

// Writes the sampled geometry as CSV (columns s,R,Rp,kappa,A,eta,sigma,w_str).
std::string geometry_csv(const TubeGeometry& g);

} // namespace waveduct

#endif
