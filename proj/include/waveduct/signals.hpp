#ifndef WAVEDUCT_SIGNALS_HPP
#define WAVEDUCT_SIGNALS_HPP

#include <functional>
#include <string>
#include <vector>

namespace waveduct {

using Signal = std::function<double(double)>;

// amplitude * exp(-(t-center)^2 / (2 width^2)); peaks at t = center.
Signal gaussian_pulse(double amplitude, double center, double width);

// Sine at the given frequency under a raised-cosine window supported on
// [start, start+duration]; starts and ends at zero with zero slope.
Signal sine_burst(double amplitude, double frequency, double start, double duration);

// Piecewise-linear interpolation of (t, v) samples, clamped to the edge
// values outside the sampled range. Throws on unsorted t or size mismatch.
Signal tabulated_signal(std::vector<double> t, std::vector<double> v);

// Reads a two-column CSV (t,v) and builds the tabulated signal.
Signal tabulated_signal_from_file(const std::string& path);

Signal zero_signal();

} // namespace waveduct

#endif
