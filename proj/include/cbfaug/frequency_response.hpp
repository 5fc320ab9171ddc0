#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbfaug/augmentation.hpp"
#include "cbfaug/observer.hpp"

namespace cbfaug {

/// Strictly increasing, logarithmically spaced frequencies in rad/s.
struct FrequencyGrid {
  std::vector<double> omega;

  std::size_t size() const { return omega.size(); }
  double lo() const { return omega.front(); }
  double hi() const { return omega.back(); }

  /// Throws InputError unless n >= 2 and 0 < lo < hi.
  static FrequencyGrid logspace(std::size_t n, double lo, double hi);
  static FrequencyGrid standard() { return logspace(2000, 1e-3, 1e4); }
};

/// s coincides with a pole of the open-loop plant or of the controller.
class PoleAtGridError : public Error {
 public:
  using Error::Error;
};

/// Loop at the plant-input breakpoint for a fixed switching mask,
///
///   L_u(s) = K_t (sI - A_c)^{-1} L P(s),   K_t = K + K_cbf,
///   A_c = A - B K_t - L C + L D K_t,        P(s) = C_p (sI - A_p)^{-1} B_p + D_p,
///
/// where (A, B, C, D) is the controller's model and (A_p, B_p, C_p, D_p) is
/// the plant actually in the loop (the model itself, or the model with
/// unmodeled actuator dynamics).
struct LoopModel {
  Matrix K_total;
  Matrix A_c;
  Matrix L;
  Plant truth;
  std::vector<Complex> poles;  // of A_c and A_p, for the grid check

  int channels() const { return static_cast<int>(K_total.rows()); }
};

/// design may be empty only when delta has no active entry.
LoopModel loop_model(const Plant& model, const GainSet& gains, const AugmentationDesign* design,
                     const SwitchingMask& delta, const Plant& truth);

/// Throws PoleAtGridError when s lies within 1e-10 (relative) of a pole.
ComplexMatrix loop_gain_at(const LoopModel& loop, Complex s);

/// Convenience form without unmodeled dynamics.
ComplexMatrix loop_gain_at(Complex s, const SwitchingMask& delta, const Plant& plant, const GainSet& gains,
                           const AugmentationDesign* design);

struct FrequencyResponse {
  std::vector<double> omega;
  std::vector<ComplexMatrix> value;  // empty matrix at skipped points
  std::vector<bool> valid;
  std::vector<std::string> warnings;

  std::size_t size() const { return omega.size(); }
};

/// One point at a time, in order.
FrequencyResponse frequency_response_serial(const LoopModel& loop, const FrequencyGrid& grid);

/// Same result as the serial version, grid points split across OpenMP threads.
FrequencyResponse frequency_response(const LoopModel& loop, const FrequencyGrid& grid);

}  // namespace cbfaug
