#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "cbfaug/types.hpp"

namespace cbfaug {

namespace disturbance {

struct None {};

struct Step {
  double t0 = 0.0;
  double amplitude = 0.0;
};

/// amplitude/2 * (1 - cos(2 pi (t - t0) / duration)) on [t0, t0 + duration].
struct OneMinusCos {
  double t0 = 0.0;
  double duration = 1.0;
  double amplitude = 0.0;
};

/// Approximately Gaussian white noise from a 64-bit LCG, low-pass filtered
/// by a first-order filter with corner `bandwidth` (rad/s), scaled to the
/// stationary `rms`, then linearly interpolated between samples.
struct FilteredNoise {
  std::uint64_t seed = 1;
  double bandwidth = 1.0;
  double rms = 0.0;
};

/// Two-column table (time_s, value), linearly interpolated and held
/// constant outside its time range.
struct Table {
  std::filesystem::path path;
  std::vector<double> time;
  std::vector<double> value;
};

}  // namespace disturbance

using DisturbanceProfile = std::variant<disturbance::None, disturbance::Step, disturbance::OneMinusCos,
                                        disturbance::FilteredNoise, disturbance::Table>;

/// Parses a header-led two-column CSV. Throws InputError on a missing
/// header, malformed rows, or non-increasing time.
disturbance::Table load_disturbance_csv(const std::filesystem::path& path);

/// Deterministic 64-bit LCG (Knuth MMIX constants):
///   state = state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
/// uniform() takes the top 53 bits; normal() is the Irwin-Hall sum of 12
/// uniforms minus 6.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
};

/// Disturbance signal d(t) of a scenario, sampled with the scenario step so
/// noise profiles are reproducible.
class DisturbanceSignal {
 public:
  DisturbanceSignal() = default;
  DisturbanceSignal(std::vector<DisturbanceProfile> profiles, double dt, double t_final);

  int size() const { return static_cast<int>(profiles_.size()); }
  Vector operator()(double t) const;

 private:
  double evaluate(std::size_t k, double t) const;

  std::vector<DisturbanceProfile> profiles_;
  std::vector<std::vector<double>> noise_;  // per-profile samples for FilteredNoise
  double dt_ = 1.0;
};

std::string describe(const DisturbanceProfile& profile);

}  // namespace cbfaug
