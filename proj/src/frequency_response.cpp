#include "cbfaug/frequency_response.hpp"

#include <cmath>

namespace cbfaug {

FrequencyGrid FrequencyGrid::logspace(std::size_t n, double lo, double hi) {
  if (n < 2) throw InputError("frequency grid needs at least 2 points");
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw InputError("frequency grid needs 0 < lo < hi");
  FrequencyGrid grid;
  grid.omega.resize(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t k = 0; k < n; ++k) {
    grid.omega[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  grid.omega.front() = lo;
  grid.omega.back() = hi;
  return grid;
}

LoopModel loop_model(const Plant& model, const GainSet& gains, const AugmentationDesign* design,
                     const SwitchingMask& delta, const Plant& truth) {
  if (truth.inputs() != model.inputs() || truth.outputs() != model.outputs()) {
    throw InputError("loop_model: plant in the loop does not match the controller model");
  }
  LoopModel loop;
  loop.K_total = gains.K;
  if (delta.any()) {
    if (!design) throw InputError("loop_model: active constraints need a design");
    loop.K_total += cbf_feedback_gain(delta, gains.K, *design);
  }
  loop.A_c = model.A - model.B * loop.K_total - gains.L * model.C + gains.L * model.D * loop.K_total;
  loop.L = gains.L;
  loop.truth = truth;
  for (const auto& p : eigen_report(loop.A_c).eigenvalues) loop.poles.push_back(p);
  for (const auto& p : eigen_report(truth.A).eigenvalues) loop.poles.push_back(p);
  return loop;
}

ComplexMatrix loop_gain_at(const LoopModel& loop, Complex s) {
  for (const auto& p : loop.poles) {
    if (std::abs(s - p) <= 1e-10 * std::max(1.0, std::abs(s))) {
      throw PoleAtGridError("loop gain has a pole at s = " + std::to_string(s.real()) + " + " +
                            std::to_string(s.imag()) + "i");
    }
  }
  ComplexMatrix sp = -loop.truth.A.cast<Complex>();
  sp.diagonal().array() += s;
  const ComplexMatrix P = loop.truth.C.cast<Complex>() * sp.partialPivLu().solve(loop.truth.B.cast<Complex>()) +
                          loop.truth.D.cast<Complex>();
  ComplexMatrix sc = -loop.A_c.cast<Complex>();
  sc.diagonal().array() += s;
  const ComplexMatrix X = sc.partialPivLu().solve(loop.L.cast<Complex>() * P);
  return loop.K_total.cast<Complex>() * X;
}

ComplexMatrix loop_gain_at(Complex s, const SwitchingMask& delta, const Plant& plant, const GainSet& gains,
                           const AugmentationDesign* design) {
  return loop_gain_at(loop_model(plant, gains, design, delta, plant), s);
}

namespace {

FrequencyResponse allocate(const FrequencyGrid& grid) {
  FrequencyResponse r;
  r.omega = grid.omega;
  r.value.resize(grid.size());
  r.valid.assign(grid.size(), false);
  return r;
}

void collect_warnings(FrequencyResponse& r) {
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!r.valid[k]) r.warnings.push_back("skipped pole at omega = " + std::to_string(r.omega[k]) + " rad/s");
  }
}

}  // namespace

FrequencyResponse frequency_response_serial(const LoopModel& loop, const FrequencyGrid& grid) {
  FrequencyResponse r = allocate(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    try {
      r.value[k] = loop_gain_at(loop, Complex(0.0, grid.omega[k]));
      r.valid[k] = true;
    } catch (const PoleAtGridError&) {
    }
  }
  collect_warnings(r);
  return r;
}

FrequencyResponse frequency_response(const LoopModel& loop, const FrequencyGrid& grid) {
  FrequencyResponse r = allocate(grid);
  const auto n = static_cast<long>(grid.size());
  // std::vector<bool> is not safe for concurrent writes.
  std::vector<char> ok(grid.size(), 0);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) {
    try {
      r.value[k] = loop_gain_at(loop, Complex(0.0, grid.omega[k]));
      ok[k] = 1;
    } catch (const PoleAtGridError&) {
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) r.valid[k] = ok[k] != 0;
  collect_warnings(r);
  return r;
}

}  // namespace cbfaug
