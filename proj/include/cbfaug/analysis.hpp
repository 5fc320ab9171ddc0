#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbfaug/actuator.hpp"
#include "cbfaug/margins.hpp"

namespace cbfaug {

/// Margins of the input-breakpoint loop for one switching mask.
struct MarginReport {
  SwitchingMask delta;
  bool actuator = false;
  std::vector<ClassicalMargins> channel;  // loop-at-a-time, one per input
  DiskMargins disk;
  std::vector<std::string> warnings;
};

struct MarginProblem {
  Plant model;
  GainSet gains;
  std::optional<AugmentationDesign> design;
  std::optional<ActuatorModel> actuator;  // in the loop, unknown to the controller
  FrequencyGrid grid = FrequencyGrid::standard();
};

MarginReport margin_report(const MarginProblem& problem, const SwitchingMask& delta, bool with_actuator_dynamics);

/// Reports for every mask, each without and (if configured) with the actuator.
std::vector<MarginReport> margin_table(const MarginProblem& problem, const std::vector<SwitchingMask>& deltas);

/// Barrier roots for the sweep: every root of output i placed at -alpha[i].
ConstraintSpec with_uniform_rates(const ConstraintSpec& spec, const std::vector<int>& relative_degree,
                                  const std::vector<double>& alpha);

struct SweepPoint {
  std::vector<double> alpha;  // one rate per limited output
  bool valid = false;
  std::string reason;  // why the point is invalid
  std::vector<MarginReport> reports;
};

/// Rebuilds the design at every alpha point and tabulates margins for the
/// given masks. Points with a singular H_pi are marked invalid. Results keep
/// the order of `points`; the OpenMP version splits points across threads.
std::vector<SweepPoint> sweep(const MarginProblem& base, const ConstraintSpec& spec,
                              const std::vector<std::vector<double>>& points,
                              const std::vector<SwitchingMask>& deltas);
std::vector<SweepPoint> sweep_serial(const MarginProblem& base, const ConstraintSpec& spec,
                                     const std::vector<std::vector<double>>& points,
                                     const std::vector<SwitchingMask>& deltas);

}  // namespace cbfaug
