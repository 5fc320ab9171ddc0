#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cbfaug/analysis.hpp"
#include "cbfaug/pi_servo.hpp"
#include "cbfaug/simulation.hpp"

namespace cbfaug {

/// Parse failure carrying the source position ("file:line:col: message").
class ScenarioError : public InputError {
 public:
  using InputError::InputError;
};

/// Either a given gain or the weights of an LQR design.
struct GainSource {
  Matrix given;
  Matrix Q;
  Matrix R;
  bool lqr = false;

  bool present() const { return lqr || given.size() > 0; }
};

struct SweepSpec {
  double from = 0.5;
  double to = 5.0;
  double step = 0.25;
  bool tied = true;  // same rate for every output; otherwise the Cartesian grid
};

/// Scenario file contents with every quantity already in SI units.
struct ScenarioDocument {
  std::string name;

  std::optional<Plant> plant;
  std::optional<PhysicalPlant> servo;
  Matrix K_I;
  Matrix K_P;

  Vector u_min;  // servo form only
  Vector u_max;
  Vector y_min;
  Vector y_max;
  std::vector<std::vector<double>> lambdas;

  GainSource baseline;  // plant form only; the servo gains come from K_I, K_P
  GainSource observer;

  bool has_sim = false;
  double t_final = 20.0;
  double dt = 1e-3;
  Vector x0;
  Vector xhat0;
  std::vector<CommandStep> command;
  std::vector<DisturbanceProfile> disturbance;
  bool augmentation = true;
  bool state_feedback = false;
  bool actuator_in_sim = false;

  std::optional<ActuatorModel> actuator;

  std::size_t grid_points = 2000;
  double grid_lo = 1e-3;
  double grid_hi = 1e4;
  std::vector<std::string> deltas;  // bit strings; empty means every mask
  std::optional<SweepSpec> sweep;
};

/// Scenario ready for the library entry points.
struct LoadedScenario {
  ScenarioDocument doc;
  std::optional<ExtendedSystem> extended;
  Plant plant;
  ConstraintSpec spec;
  GainSet gains;
  std::optional<AugmentationDesign> design;
  std::string design_error;  // set when the design could not be built
  Scenario sim;              // valid when doc.has_sim
  MarginProblem margins;
  std::uint64_t hash = 0;    // FNV-1a of the canonical text

  std::vector<SwitchingMask> deltas() const;
  std::vector<std::vector<double>> sweep_points() const;
};

ScenarioDocument parse_scenario_text(const std::string& text, const std::string& origin = "<string>",
                                     const std::filesystem::path& base_dir = {});
ScenarioDocument read_scenario_document(const std::filesystem::path& path);

/// Canonical text: fixed key order, SI units, 17 significant digits.
std::string serialize(const ScenarioDocument& doc);

/// Builds plant, gains and design. Throws InputError on inconsistent data;
/// design failures are kept in design_error.
LoadedScenario assemble(ScenarioDocument doc);
LoadedScenario load_scenario(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

}  // namespace cbfaug
