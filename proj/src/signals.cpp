#include "waveduct/signals.hpp"
#include "waveduct/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waveduct {

Signal gaussian_pulse(double amplitude, double center, double width) {
    return [=](double t) {
        double u = (t - center) / width;
        return amplitude * std::exp(-0.5 * u * u);
    };
}

Signal sine_burst(double amplitude, double frequency, double start, double duration) {
    const double two_pi = 2.0 * std::numbers::pi;
    return [=](double t) {
        if (t < start || t > start + duration) return 0.0;
        double tau = t - start;
        double window = 0.5 * (1.0 - std::cos(two_pi * tau / duration));
        return amplitude * window * std::sin(two_pi * frequency * tau);
    };
}

Signal tabulated_signal(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size())
        throw std::invalid_argument("tabulated_signal: t and v differ in length");
    if (t.size() < 2) throw std::invalid_argument("tabulated_signal: need at least two samples");
    for (std::size_t k = 1; k < t.size(); ++k)
        if (!(t[k] > t[k - 1]))
            throw std::invalid_argument("tabulated_signal: t must be strictly increasing");
    return [t = std::move(t), v = std::move(v)](double x) {
        if (x <= t.front()) return v.front();
        if (x >= t.back()) return v.back();
        auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t k = static_cast<std::size_t>(it - t.begin());
        double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
        return v[k - 1] + w * (v[k] - v[k - 1]);
    };
}

Signal tabulated_signal_from_file(const std::string& path) {
    CsvTable table = read_csv(path);
    if (table.columns.size() < 2)
        throw std::runtime_error(path + ": need two columns (t,v)");
    return tabulated_signal(table.data[0], table.data[1]);
}

Signal zero_signal() {
    return [](double) { return 0.0; };
}

} // namespace waveduct
