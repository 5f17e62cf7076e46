#ifndef WAVEDUCT_RNG_HPP
#define WAVEDUCT_RNG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace waveduct {

/* Seeded standard-normal draws via Box-Muller on top of mt19937_64.
 * std::normal_distribution is implementation-defined, so the transform is
 * spelled out to keep sampled verdicts reproducible. */
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform_open();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = (*this)();
        return v;
    }

private:
    // uniform on (0,1]; excludes 0 so the log stays finite
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace waveduct

#endif
