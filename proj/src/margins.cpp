#include "cbfaug/margins.hpp"

#include <cmath>
#include <numbers>

namespace cbfaug {

double to_db(double magnitude) { return 20.0 * std::log10(magnitude); }

double phase_deg(Complex z) { return std::arg(z) * 180.0 / std::numbers::pi; }

namespace {

double wrap_pm(double phase) {
  double pm = std::fmod(180.0 + phase, 360.0);
  if (pm <= -180.0) pm += 360.0;
  if (pm > 180.0) pm -= 360.0;
  return pm;
}

// g(omega) changes sign between a and b; returns the refined root.
template <typename G>
double bisect(G&& g, double a, double b) {
  double ga = g(a);
  for (int it = 0; it < 200 && (b - a) > 1e-6 * b; ++it) {
    const double mid = std::sqrt(a * b);
    const double gm = g(mid);
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return std::sqrt(a * b);
}

bool gain_bracket(Complex a, Complex b) { return (std::abs(a) >= 1.0) != (std::abs(b) >= 1.0); }

bool phase_bracket(Complex a, Complex b) {
  return (a.imag() >= 0.0) != (b.imag() >= 0.0) && (a.real() < 0.0 || b.real() < 0.0);
}

}  // namespace

ClassicalMargins classical_margins(const ScalarLoop& loop, const FrequencyGrid& grid) {
  ClassicalMargins m;
  std::vector<Complex> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = loop(grid.omega[k]);

  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (gain_bracket(v[k], v[k + 1])) {
      const double w = bisect([&](double x) { return std::abs(loop(x)) - 1.0; }, grid.omega[k], grid.omega[k + 1]);
      m.gain_crossover = w;
      m.pm_deg = wrap_pm(phase_deg(loop(w)));
      break;
    }
  }
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (phase_bracket(v[k], v[k + 1])) {
      const double w = bisect([&](double x) { return loop(x).imag(); }, grid.omega[k], grid.omega[k + 1]);
      const Complex z = loop(w);
      if (z.real() >= 0.0) continue;  // crossed the positive real axis
      m.phase_crossover = w;
      m.gm_db = -to_db(std::abs(z));
      break;
    }
  }
  return m;
}

ClassicalMargins classical_margins(const std::vector<double>& omega, const std::vector<Complex>& value) {
  if (omega.size() != value.size()) throw InputError("classical_margins: size mismatch");
  ClassicalMargins m;
  for (std::size_t k = 0; k + 1 < omega.size(); ++k) {
    const double a = std::abs(value[k]);
    const double b = std::abs(value[k + 1]);
    if (gain_bracket(value[k], value[k + 1])) {
      const double t = (a - 1.0) / (a - b);
      m.gain_crossover = omega[k] + t * (omega[k + 1] - omega[k]);
      const Complex z = value[k] + t * (value[k + 1] - value[k]);
      m.pm_deg = wrap_pm(phase_deg(z));
      break;
    }
  }
  for (std::size_t k = 0; k + 1 < omega.size(); ++k) {
    if (phase_bracket(value[k], value[k + 1])) {
      const double t = value[k].imag() / (value[k].imag() - value[k + 1].imag());
      const double re = value[k].real() + t * (value[k + 1].real() - value[k].real());
      if (re >= 0.0) continue;
      m.phase_crossover = omega[k] + t * (omega[k + 1] - omega[k]);
      m.gm_db = -to_db(std::abs(re));
      break;
    }
  }
  return m;
}

Complex loop_at_a_time(const ComplexMatrix& L, int channel) {
  const auto m = L.rows();
  if (L.cols() != m || channel < 0 || channel >= m) throw InputError("loop_at_a_time: bad channel");
  if (m == 1) return L(0, 0);
  std::vector<Eigen::Index> others;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j != channel) others.push_back(j);
  }
  const auto r = static_cast<Eigen::Index>(others.size());
  ComplexMatrix Loo(r, r);
  ComplexVector Lio(r);
  ComplexVector Loi(r);
  for (Eigen::Index a = 0; a < r; ++a) {
    Lio(a) = L(channel, others[a]);
    Loi(a) = L(others[a], channel);
    for (Eigen::Index b = 0; b < r; ++b) Loo(a, b) = L(others[a], others[b]);
  }
  Loo.diagonal().array() += 1.0;
  return L(channel, channel) - (Lio.transpose() * Loo.partialPivLu().solve(Loi))(0);
}

DiskMargins disk_from_alpha(double alpha, double omega) {
  DiskMargins d;
  d.alpha = alpha;
  d.omega = omega;
  d.gm_low_db = to_db(1.0 / (1.0 + alpha));
  d.gm_high_db = alpha < 1.0 ? to_db(1.0 / (1.0 - alpha)) : kInf;
  d.pm_deg = alpha < 2.0 ? 2.0 * std::asin(alpha / 2.0) * 180.0 / std::numbers::pi : 180.0;
  return d;
}

DiskMargins disk_margins(const FrequencyResponse& response) {
  double alpha = kInf;
  double where = 0.0;
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < response.size(); ++k) {
    if (!response.valid[k]) continue;
    const ComplexMatrix& L = response.value[k];
    const auto m = L.rows();
    ComplexMatrix S = L;
    S.diagonal().array() += 1.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(S);
    double a = svd.singularValues()(m - 1);
    const auto lu = L.fullPivLu();
    if (lu.isInvertible()) {
      ComplexMatrix T = lu.inverse();
      T.diagonal().array() += 1.0;
      Eigen::JacobiSVD<ComplexMatrix> svd_inv(T);
      a = std::min(a, svd_inv.singularValues()(m - 1));
    } else {
      warnings.push_back("singular loop at omega = " + std::to_string(response.omega[k]) +
                         " rad/s; inverse branch skipped");
    }
    if (a < alpha) {
      alpha = a;
      where = response.omega[k];
    }
  }
  DiskMargins d = disk_from_alpha(alpha, where);
  d.warnings = std::move(warnings);
  return d;
}

}  // namespace cbfaug
