#pragma once

#include <vector>

#include "cbfaug/cbf_design.hpp"

namespace cbfaug {

/// Envelope constant k with
///   |c_lim (A + alpha* I) e^{(A - LC) t} e0| <= k ||e0|| e^{lambda_max t},
/// estimated as 1.1 times the supremum of ||c_lim (A + alpha* I) e^{(A-LC)t}|| e^{-lambda_max t}
/// over t = 0 and `points` log-spaced times up to 10 / |lambda_max|.
/// Throws ParameterRuleError when A - LC is not Hurwitz.
double envelope_constant(const Plant& plant, const Matrix& L, const RowVector& c_lim_row, double alpha_star,
                         int points = 400);

/// Time after which h(x(t)) <= 0 is guaranteed:
///   t = max(0, ln(-|lambda_max + alpha*| h0 / (k ||e0||)) / (lambda_max + alpha*)).
/// Zero estimation error gives 0; h0 = 0 with nonzero error gives +inf.
/// Throws ParameterRuleError unless lambda_max + alpha* < 0, and InputError
/// for h0 > 0 or negative norms.
double invariance_time(double h_min_0, double e0_norm, double alpha_star, double lambda_max, double k);

struct ConstraintBound {
  int output = 0;
  double alpha_star = 0.0;
  double lambda_max = 0.0;
  double k = 0.0;
  double e0_norm = 0.0;
  double h_min_0 = 0.0;  // y_min - y_lim(0)
  double h_max_0 = 0.0;  // y_lim(0) - y_max
  bool rule_holds = false;
  double t_bound = 0.0;  // +inf when no finite bound exists
};

/// Per-output envelope constant and invariance time for initial state x0 and
/// estimate xhat0. Outputs violating the parameter rule, or starting outside
/// their limits, get rule_holds / t_bound reported rather than throwing.
std::vector<ConstraintBound> invariance_bounds(const Plant& plant, const Matrix& L, const ConstraintSpec& spec,
                                               const Vector& x0, const Vector& xhat0);

}  // namespace cbfaug
