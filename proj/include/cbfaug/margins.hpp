#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cbfaug/frequency_response.hpp"

namespace cbfaug {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Scalar loop as a function of frequency in rad/s.
using ScalarLoop = std::function<Complex(double)>;

struct ClassicalMargins {
  double gm_db = kInf;  // infinite when no phase crossover lies in the grid
  std::optional<double> pm_deg;  // empty when |L| never crosses 0 dB
  double phase_crossover = 0.0;  // rad/s, valid when gm_db is finite
  double gain_crossover = 0.0;   // rad/s, valid when pm_deg is set
};

/// PM = 180 + phase at the first 0 dB crossing, wrapped into (-180, 180].
/// GM = -|L| (dB) at the first crossing of the negative real axis.
/// Crossings are bracketed on the grid and refined by bisection on the
/// continuous loop to 1e-6 relative frequency.
ClassicalMargins classical_margins(const ScalarLoop& loop, const FrequencyGrid& grid);

/// Grid-only variant (linear interpolation inside the bracket); skipped
/// points break brackets.
ClassicalMargins classical_margins(const std::vector<double>& omega, const std::vector<Complex>& value);

/// Loop seen at input `channel` with every other channel closed:
///   L_ii - L_io (I + L_oo)^{-1} L_oi.
Complex loop_at_a_time(const ComplexMatrix& L, int channel);

struct DiskMargins {
  double alpha = kInf;     // smallest return-difference singular value
  double omega = 0.0;      // where the minimum occurs, rad/s
  double gm_low_db = -kInf;
  double gm_high_db = kInf;
  double pm_deg = 180.0;
  std::vector<std::string> warnings;
};

/// alpha = min over the grid of min(sigma_min(I + L), sigma_min(I + L^{-1}));
/// guaranteed gain range [1/(1 + alpha), 1/(1 - alpha)] and PM = 2 asin(alpha / 2).
DiskMargins disk_margins(const FrequencyResponse& response);

/// Converts a disk size to guaranteed margins, clamping at the alpha >= 1 and
/// alpha >= 2 limits.
DiskMargins disk_from_alpha(double alpha, double omega);

double to_db(double magnitude);
double phase_deg(Complex z);

}  // namespace cbfaug
