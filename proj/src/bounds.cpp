#include "cbfaug/bounds.hpp"

#include <cmath>
#include <limits>

namespace cbfaug {

double envelope_constant(const Plant& plant, const Matrix& L, const RowVector& c_lim_row, double alpha_star,
                         int points) {
  const Matrix M = plant.A - L * plant.C;
  const auto eig = eigen_report(M);
  if (!eig.hurwitz) throw ParameterRuleError("envelope_constant: A - LC is not Hurwitz");
  const double lambda_max = eig.max_real_part;
  const int n = plant.states();
  const RowVector weight = c_lim_row * (plant.A + alpha_star * Matrix::Identity(n, n));

  const double t_end = 10.0 / std::abs(lambda_max);
  const double t_start = 1e-4 * t_end;
  double sup = weight.norm();  // t = 0
  for (int i = 0; i < points; ++i) {
    const double t = t_start * std::pow(t_end / t_start, static_cast<double>(i) / (points - 1));
    const double g = (weight * expm(M * t)).norm() * std::exp(-lambda_max * t);
    sup = std::max(sup, g);
  }
  return 1.1 * sup;
}

double invariance_time(double h_min_0, double e0_norm, double alpha_star, double lambda_max, double k) {
  const double rate = lambda_max + alpha_star;
  if (!(rate < 0.0)) {
    throw ParameterRuleError("invariance_time: lambda_max + alpha* must be negative (barrier slower than observer)");
  }
  if (h_min_0 > 0.0) throw InputError("invariance_time: initial state violates the constraint (h > 0)");
  if (e0_norm < 0.0 || k < 0.0) throw InputError("invariance_time: norms must be non-negative");
  if (e0_norm == 0.0 || k == 0.0) return 0.0;
  const double arg = -(std::abs(rate) / (k * e0_norm)) * h_min_0;
  if (arg <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, std::log(arg) / rate);
}

std::vector<ConstraintBound> invariance_bounds(const Plant& plant, const Matrix& L, const ConstraintSpec& spec,
                                               const Vector& x0, const Vector& xhat0) {
  const auto eig = eigen_report(plant.A - L * plant.C);
  const double e0 = (x0 - xhat0).norm();
  const Vector y0 = plant.C_lim * x0;
  std::vector<ConstraintBound> bounds;
  for (int i = 0; i < spec.size(); ++i) {
    ConstraintBound b;
    b.output = i;
    b.alpha_star = spec.slowest_rate(i);
    b.lambda_max = eig.max_real_part;
    b.e0_norm = e0;
    b.h_min_0 = spec.y_min(i) - y0(i);
    b.h_max_0 = y0(i) - spec.y_max(i);
    b.rule_holds = eig.hurwitz && b.lambda_max + b.alpha_star < 0.0;
    b.t_bound = std::numeric_limits<double>::infinity();
    if (eig.hurwitz) b.k = envelope_constant(plant, L, plant.C_lim.row(i), b.alpha_star);
    if (b.rule_holds && b.h_min_0 <= 0.0 && b.h_max_0 <= 0.0) {
      b.t_bound = std::max(invariance_time(b.h_min_0, e0, b.alpha_star, b.lambda_max, b.k),
                           invariance_time(b.h_max_0, e0, b.alpha_star, b.lambda_max, b.k));
    }
    bounds.push_back(b);
  }
  return bounds;
}

}  // namespace cbfaug
