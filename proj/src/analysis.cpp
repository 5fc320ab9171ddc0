#include "cbfaug/analysis.hpp"

#include <algorithm>

namespace cbfaug {

Plant with_actuator(const Plant& plant, const ActuatorModel& act) {
  if (!(act.omega_n > 0.0) || !(act.zeta > 0.0)) throw InputError("actuator needs omega_n > 0 and zeta > 0");
  const int n = plant.states();
  const int m = plant.inputs();
  const int p = plant.outputs();
  const int na = 2 * static_cast<int>(act.channels.size());
  for (int ch : act.channels) {
    if (ch < 0 || ch >= m) throw InputError("actuator channel out of range");
    if (std::count(act.channels.begin(), act.channels.end(), ch) > 1) throw InputError("duplicate actuator channel");
  }
  const double w2 = act.omega_n * act.omega_n;

  Plant out;
  out.A = Matrix::Zero(n + na, n + na);
  out.B = Matrix::Zero(n + na, m);
  out.C = Matrix::Zero(p, n + na);
  out.D = plant.D;
  out.A.topLeftCorner(n, n) = plant.A;
  out.B.topRows(n) = plant.B;
  out.C.leftCols(n) = plant.C;
  for (std::size_t a = 0; a < act.channels.size(); ++a) {
    const int ch = act.channels[a];
    const int pos = n + 2 * static_cast<int>(a);
    out.A.block(0, pos, n, 1) = plant.B.col(ch);
    out.B.block(0, ch, n, 1).setZero();
    out.A(pos, pos + 1) = 1.0;
    out.A(pos + 1, pos) = -w2;
    out.A(pos + 1, pos + 1) = -2.0 * act.zeta * act.omega_n;
    out.B(pos + 1, ch) = w2;
    out.C.col(pos) = plant.D.col(ch);
    out.D.col(ch).setZero();
  }
  out.C_lim = Matrix::Zero(plant.limited_outputs(), n + na);
  out.C_lim.leftCols(n) = plant.C_lim;
  out.B_dist = Matrix::Zero(n + na, plant.disturbances());
  out.B_dist.topRows(n) = plant.B_dist;
  out.validate();
  return out;
}

MarginReport margin_report(const MarginProblem& problem, const SwitchingMask& delta, bool with_actuator_dynamics) {
  const Plant truth = with_actuator_dynamics && problem.actuator ? with_actuator(problem.model, *problem.actuator)
                                                                 : problem.model;
  const AugmentationDesign* design = problem.design ? &*problem.design : nullptr;
  const LoopModel loop = loop_model(problem.model, problem.gains, design, delta, truth);

  MarginReport report;
  report.delta = delta;
  report.actuator = with_actuator_dynamics && problem.actuator.has_value();
  const FrequencyResponse response = frequency_response(loop, problem.grid);
  report.warnings = response.warnings;
  for (int ch = 0; ch < loop.channels(); ++ch) {
    const ScalarLoop scalar = [&loop, ch](double w) { return loop_at_a_time(loop_gain_at(loop, Complex(0.0, w)), ch); };
    report.channel.push_back(classical_margins(scalar, problem.grid));
  }
  report.disk = disk_margins(response);
  for (const auto& w : report.disk.warnings) report.warnings.push_back(w);
  return report;
}

std::vector<MarginReport> margin_table(const MarginProblem& problem, const std::vector<SwitchingMask>& deltas) {
  std::vector<MarginReport> rows;
  for (const auto& delta : deltas) {
    rows.push_back(margin_report(problem, delta, false));
    if (problem.actuator) rows.push_back(margin_report(problem, delta, true));
  }
  return rows;
}

ConstraintSpec with_uniform_rates(const ConstraintSpec& spec, const std::vector<int>& relative_degree,
                                  const std::vector<double>& alpha) {
  if (static_cast<int>(alpha.size()) != spec.size() || relative_degree.size() != alpha.size()) {
    throw InputError("sweep point needs one rate per limited output");
  }
  ConstraintSpec out = spec;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] > 0.0)) throw InputError("sweep rates must be positive");
    out.lambdas[i].assign(static_cast<std::size_t>(relative_degree[i]), -alpha[i]);
  }
  return out;
}

namespace {

SweepPoint evaluate_point(const MarginProblem& base, const ConstraintSpec& spec, const std::vector<int>& degrees,
                          const std::vector<double>& alpha, const std::vector<SwitchingMask>& deltas) {
  SweepPoint point;
  point.alpha = alpha;
  try {
    MarginProblem problem = base;
    problem.design = build_design(base.model, with_uniform_rates(spec, degrees, alpha));
    point.reports = margin_table(problem, deltas);
    point.valid = true;
  } catch (const DesignError& e) {
    point.reason = e.what();
  }
  return point;
}

}  // namespace

std::vector<SweepPoint> sweep_serial(const MarginProblem& base, const ConstraintSpec& spec,
                                     const std::vector<std::vector<double>>& points,
                                     const std::vector<SwitchingMask>& deltas) {
  const auto degrees = relative_degrees(base.model);
  std::vector<SweepPoint> out;
  out.reserve(points.size());
  for (const auto& alpha : points) out.push_back(evaluate_point(base, spec, degrees, alpha, deltas));
  return out;
}

std::vector<SweepPoint> sweep(const MarginProblem& base, const ConstraintSpec& spec,
                              const std::vector<std::vector<double>>& points,
                              const std::vector<SwitchingMask>& deltas) {
  const auto degrees = relative_degrees(base.model);
  for (const auto& alpha : points) with_uniform_rates(spec, degrees, alpha);  // input errors surface here
  std::vector<SweepPoint> out(points.size());
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) out[k] = evaluate_point(base, spec, degrees, points[k], deltas);
  return out;
}

}  // namespace cbfaug
