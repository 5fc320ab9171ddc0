#pragma once

#include <vector>

#include "cbfaug/lti.hpp"

namespace cbfaug {

/// Second-order actuator  dd(delta)/dt^2 = -2 zeta omega_n d(delta)/dt + omega_n^2 (u_cmd - delta).
struct ActuatorModel {
  double omega_n = 70.0;
  double zeta = 0.7;
  std::vector<int> channels;  // input channels routed through the actuator
};

/// Plant whose listed input channels drive a second-order actuator instead of
/// acting directly. Two states (delta, d(delta)/dt) are appended per channel;
/// the actuator position takes the channel's former B and D columns. The
/// limited-output map is padded with zeros.
Plant with_actuator(const Plant& plant, const ActuatorModel& actuator);

}  // namespace cbfaug
