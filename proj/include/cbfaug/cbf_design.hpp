#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbfaug/lti.hpp"

namespace cbfaug {

/// Box limits on the limited outputs plus the real, negative roots of each
/// output's barrier polynomial phi_i(s) = prod_j (s - lambda_ij).
struct ConstraintSpec {
  Vector y_min;
  Vector y_max;
  std::vector<std::vector<double>> lambdas;

  int size() const { return static_cast<int>(y_min.size()); }

  /// Throws InputError unless y_min < y_max component-wise and every lambda
  /// is finite and strictly negative.
  void validate() const;

  /// Slowest barrier rate of output i, min_j(-lambda_ij).
  double slowest_rate(int i) const;
};

/// Sensitivity matrices of the modified constraints
///
///   Y_lim = H_x x + H_pi u,   alpha_pi y_min <= Y_lim <= alpha_pi y_max.
struct AugmentationDesign {
  std::vector<int> relative_degree;
  Matrix H_x;
  Matrix H_pi;
  Matrix H_pi_inv;
  Vector alpha;  // diagonal of alpha_pi
  double h_pi_condition = 0.0;

  int size() const { return static_cast<int>(alpha.size()); }
  Matrix alpha_matrix() const { return alpha.asDiagonal(); }
};

inline constexpr double kDefaultRelativeDegreeTol = 1e-9;
inline constexpr double kMaxHpiCondition = 1e12;

/// Vector relative degree of the limited outputs. Row i's degree is the
/// smallest k <= n whose Markov parameter (C_lim)_i A^{k-1} B is nonzero
/// relative to ||(C_lim)_i|| ||A||^{k-1} ||B||.
/// Throws DesignError naming the output when no such k exists.
std::vector<int> relative_degrees(const Plant& plant, double tol_zero = kDefaultRelativeDegreeTol);

/// Throws DesignError when H_pi is singular (condition number above 1e12)
/// and InputError when the lambda counts do not match the relative degrees.
AugmentationDesign build_design(const Plant& plant, const ConstraintSpec& spec);

/// Row (C_lim)_i prod_j (A - lambda_ij I).
RowVector barrier_state_row(const Plant& plant, int i, const std::vector<double>& lambdas);

/// Coefficients c_0..c_r (ascending powers) of prod_j (s - lambda_j).
std::vector<double> barrier_polynomial(const std::vector<double>& lambdas);

struct CbfAbilityReport {
  bool h_pi_nonsingular = false;
  std::optional<EigenReport> constrained_eigs;  // of A - B H_pi^{-1} H_x
  bool cbf_able = false;
  std::vector<std::string> warnings;
};

/// Never throws on design failures; they are captured as warnings.
CbfAbilityReport check_cbf_able(const Plant& plant, const ConstraintSpec& spec,
                                double tol_hurwitz = kDefaultHurwitzTol);

/// Per output i: slowest_rate(i) < |max Re eig(A - LC)|.
/// Throws ParameterRuleError if the observer spectrum is not Hurwitz.
std::vector<bool> check_parameter_rule(const ConstraintSpec& spec, const EigenReport& observer_eigs);

}  // namespace cbfaug
