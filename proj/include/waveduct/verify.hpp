#ifndef WAVEDUCT_VERIFY_HPP
#define WAVEDUCT_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "waveduct/geometry.hpp"
#include "waveduct/node.hpp"

namespace waveduct {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measure = 0.0; // worst observed value for the check
    std::string detail;
};

struct VerifyOptions {
    int n_samples = 100;
    std::uint64_t seed = 42;
    double tol_identity = 1e-10;
    double tol_passivity = 1e-10;
    // Fault injection for exercising the failure path: scales L by 1.01
    // after assembly so the identity check must trip.
    bool corrupt_interior = false;
};

/* Battery over the assembled horn node: Green-Lagrange sampling, time-flow
 * inversion (both conventions), kernel dissipativity on ker G and ker K,
 * stationary solve residuals, the Poincare ratio bound, and defect
 * monotonicity under added dissipation. */
std::vector<CheckResult> verify_webster_node(const TubeGeometry& geom,
                                             const PhysicalConstants& consts,
                                             int n_elems, const VerifyOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace waveduct

#endif
