#include "cbfaug/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbfaug {

SwitchingMask SwitchingMask::from_bits(const std::string& bits) {
  std::vector<bool> active;
  active.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw InputError("switching mask must be a string of 0/1, got '" + bits + "'");
    active.push_back(c == '1');
  }
  if (active.empty()) throw InputError("empty switching mask");
  return SwitchingMask(std::move(active));
}

std::vector<SwitchingMask> SwitchingMask::enumerate(int m) {
  std::vector<SwitchingMask> masks;
  const unsigned count = 1u << m;
  for (unsigned code = 0; code < count; ++code) {
    std::vector<bool> active(m);
    for (int i = 0; i < m; ++i) active[i] = (code >> i) & 1u;
    masks.emplace_back(std::move(active));
  }
  return masks;
}

bool SwitchingMask::any() const { return std::find(active_.begin(), active_.end(), true) != active_.end(); }

std::string SwitchingMask::bits() const {
  std::string s;
  for (bool a : active_) s.push_back(a ? '1' : '0');
  return s;
}

Matrix SwitchingMask::matrix() const {
  Matrix d = Matrix::Zero(size(), size());
  for (int i = 0; i < size(); ++i) d(i, i) = active_[i] ? 1.0 : 0.0;
  return d;
}

SlackPair slack(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                const ConstraintSpec& spec) {
  const Vector y = design.H_x * x_hat + design.H_pi * u_bl;
  return SlackPair{-y + design.alpha.cwiseProduct(spec.y_min), y - design.alpha.cwiseProduct(spec.y_max)};
}

Vector pi_from_slack(const SlackPair& s, const AugmentationDesign& design) {
  return design.H_pi_inv * (s.dH_min.cwiseMax(0.0) - s.dH_max.cwiseMax(0.0));
}

Vector pi_from_estimate(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                        const ConstraintSpec& spec) {
  return pi_from_slack(slack(x_hat, u_bl, design, spec), design);
}

SwitchingMask switching_delta(const SlackPair& s) {
  std::vector<bool> active(s.dH_min.size());
  for (Eigen::Index i = 0; i < s.dH_min.size(); ++i) active[i] = s.dH_min(i) > 0.0 || s.dH_max(i) > 0.0;
  return SwitchingMask(std::move(active));
}

SwitchingMask switching_delta(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                              const ConstraintSpec& spec) {
  return switching_delta(slack(x_hat, u_bl, design, spec));
}

Matrix cbf_feedback_gain(const SwitchingMask& delta, const Matrix& K, const AugmentationDesign& design) {
  return design.H_pi_inv * delta.matrix() * (design.H_x - design.H_pi * K);
}

PwaForm pwa_form(const Vector& x_hat, const Matrix& K, const AugmentationDesign& design,
                 const ConstraintSpec& spec) {
  const Vector u_bl = -K * x_hat;
  const SlackPair s = slack(x_hat, u_bl, design, spec);
  PwaForm form;
  form.delta = switching_delta(s);
  form.K_cbf = cbf_feedback_gain(form.delta, K, design);
  form.F = design.H_pi_inv * form.delta.matrix() * design.alpha_matrix();
  form.y_cmd_sel = Vector::Zero(design.size());
  for (int i = 0; i < design.size(); ++i) {
    if (s.dH_min(i) > 0.0) {
      form.y_cmd_sel(i) = spec.y_min(i);
    } else if (s.dH_max(i) > 0.0) {
      form.y_cmd_sel(i) = spec.y_max(i);
    }
  }
  return form;
}

Vector qp_oracle(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                 const ConstraintSpec& spec) {
  const int m = design.size();
  if (m > 3) throw InputError("qp_oracle: active-set enumeration supports at most 3 outputs");
  const SlackPair s = slack(x_hat, u_bl, design, spec);

  // Inequalities g_j' pi + h_j <= 0, j < m are the min sides, j >= m the max sides.
  Matrix G(2 * m, m);
  G << -design.H_pi, design.H_pi;
  Vector h(2 * m);
  h << s.dH_min, s.dH_max;
  const Matrix R = design.H_pi.transpose() * design.H_pi;
  const auto R_lu = R.fullPivLu();
  const double feas_tol = 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff());

  Vector best = Vector::Zero(m);
  double best_cost = std::numeric_limits<double>::infinity();
  int best_size = std::numeric_limits<int>::max();
  const unsigned subsets = 1u << (2 * m);
  for (unsigned set = 0; set < subsets; ++set) {
    std::vector<int> idx;
    for (int j = 0; j < 2 * m; ++j) {
      if ((set >> j) & 1u) idx.push_back(j);
    }
    const int k = static_cast<int>(idx.size());
    Vector pi = Vector::Zero(m);
    Vector mu;
    if (k > 0) {
      if (k > m) continue;
      Matrix Ga(k, m);
      Vector ha(k);
      for (int r = 0; r < k; ++r) {
        Ga.row(r) = G.row(idx[r]);
        ha(r) = h(idx[r]);
      }
      // Stationarity 2 R pi + Ga' mu = 0 with Ga pi = -ha.
      const Matrix RinvGt = R_lu.solve(Ga.transpose());
      const Matrix S = Ga * RinvGt;
      const auto S_lu = S.fullPivLu();
      if (!S_lu.isInvertible()) continue;
      mu = 2.0 * S_lu.solve(ha);
      if ((mu.array() < -1e-12).any()) continue;
      pi = -0.5 * RinvGt * mu;
    }
    if (((G * pi + h).array() > feas_tol).any()) continue;
    const double cost = pi.dot(R * pi);
    const bool better = cost < best_cost - 1e-14 * std::max(1.0, best_cost) ||
                        (cost <= best_cost + 1e-14 * std::max(1.0, best_cost) && k < best_size);
    if (better) {
      best = pi;
      best_cost = cost;
      best_size = k;
    }
  }
  if (!std::isfinite(best_cost)) throw Error("qp_oracle: no feasible KKT point (limits must satisfy y_min < y_max)");
  return best;
}

}  // namespace cbfaug
