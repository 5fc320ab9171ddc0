#pragma once

#include "cbfaug/cbf_design.hpp"

namespace cbfaug {

/// Physical plant for PI servo tracking:
///   dx_p/dt = A_p x_p + B_p u + B_dist d
///   y       = C_p x_p + D_p u
///   y_reg   = C_reg x_p + D_reg u      (one regulated output per input)
///   z_lim   = C_lim x_p
struct PhysicalPlant {
  Matrix A_p;
  Matrix B_p;
  Matrix C_p;
  Matrix D_p;
  Matrix C_reg;
  Matrix D_reg;
  Matrix C_lim;
  Matrix B_dist;

  int states() const { return static_cast<int>(A_p.rows()); }
  int inputs() const { return static_cast<int>(B_p.cols()); }

  /// Fills empty D_p / D_reg / B_dist with zeros and checks dimensions.
  void validate_and_complete();
};

/// Integrator-augmented plant with state x = [e_yI; x_p] and input stacked
/// as [v; w] (anti-windup channel first, then the physical channel).
struct ExtendedSystem {
  Plant plant;
  Matrix K_ext;  // [[0, 0], [K_I, K_P]]
  ConstraintSpec spec;
  int tracked = 0;  // number of regulated outputs / physical inputs

  /// Input channels that drive the physical actuators.
  std::vector<int> physical_channels() const;
  /// Exogenous input map: u_exo = command_map() * y_cmd.
  Matrix command_map() const;
};

struct BoxLimits {
  Vector min;
  Vector max;
};

/// Assembles the extended system
///   A = [[0, C_reg], [0, A_p]],  B = [[I, D_reg], [0, B_p]],
///   C = [[I, 0], [0, C_p]],      D = [[0, 0], [0, D_p]],
///   C_lim = [[-K_I, -K_P], [0, C_p_lim]]
/// with limits stacked as [u; z_lim]. Throws InputError on dimension
/// mismatch or non-square tracking.
ExtendedSystem extend_system(PhysicalPlant pp, const Matrix& K_I, const Matrix& K_P, const BoxLimits& u_limits,
                             const BoxLimits& z_limits, std::vector<std::vector<double>> lambdas);

/// Stacked exogenous input [-y_cmd; 0] entering the integrator channel only.
Vector command_injection(const ExtendedSystem& ext, const Vector& y_cmd);

}  // namespace cbfaug
