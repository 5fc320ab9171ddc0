#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbfaug/actuator.hpp"
#include "cbfaug/augmentation.hpp"
#include "cbfaug/disturbance.hpp"
#include "cbfaug/observer.hpp"

namespace cbfaug {

/// Piecewise-constant command: value applies from time t until the next step.
struct CommandStep {
  double t = 0.0;
  Vector value;
};

struct Scenario {
  Plant plant;  // model used by the controller and observer
  GainSet gains;
  ConstraintSpec spec;
  std::optional<AugmentationDesign> design;  // required when augmentation is enabled

  /// Exogenous baseline input u_exo = command_map * y_cmd(t); zero columns
  /// when the plant has no command channel.
  Matrix command_map;
  std::vector<CommandStep> command;

  Vector x0;
  Vector xhat0;
  double t_final = 20.0;
  double dt = 1e-3;
  std::vector<DisturbanceProfile> disturbance;  // one per B_dist column, or empty
  bool augmentation_enabled = true;
  /// Controller sees the true state (x_hat tracks x exactly).
  bool state_feedback = false;
  std::optional<ActuatorModel> actuator;  // unmodeled by the controller

  /// Throws InputError on inconsistent dimensions or step settings.
  void validate() const;
  Vector command_at(double t) const;
};

/// Uniformly sampled closed-loop response; row k of every matrix is the
/// sample at time[k] = k * dt.
struct Trajectory {
  std::vector<double> time;
  Matrix x;       // true plant state (including actuator states)
  Matrix x_hat;
  Matrix u_bl;    // baseline input including the exogenous command term
  Matrix pi;
  Matrix u;
  Matrix y_lim;   // C_lim x of the true plant
  Matrix delta;   // 0/1 per limited output
  Matrix dH_min;
  Matrix dH_max;
  double step = 0.0;
  std::vector<std::string> warnings;

  std::size_t samples() const { return time.size(); }
};

/// Fixed-step RK4 on the stacked (x, x_hat) system. The augmentation is
/// re-evaluated at every stage. Throws NumericalBlowUp with the failing time.
Trajectory simulate(const Scenario& sc);

struct OutputViolation {
  double max_violation = 0.0;  // output units
  double first_time = 0.0;
  double last_time = 0.0;
  double duration = 0.0;
  std::size_t samples = 0;

  bool any() const { return samples > 0; }
};

struct ViolationReport {
  std::vector<OutputViolation> outputs;

  bool any() const;
  double max_violation() const;
};

/// Samples with time >= t_from whose limited output leaves [y_min - tol, y_max + tol].
ViolationReport violation_report(const Trajectory& tr, const ConstraintSpec& spec, double t_from = 0.0,
                                 double tol = 0.0);

}  // namespace cbfaug
