#pragma once

#include <string>
#include <vector>

#include "cbfaug/cbf_design.hpp"

namespace cbfaug {

/// Slack of the modified constraints before augmentation:
///   dH_min = -H_x x - H_pi u_bl + alpha_pi y_min
///   dH_max =  H_x x + H_pi u_bl - alpha_pi y_max
/// A positive entry means the baseline input alone violates that side.
struct SlackPair {
  Vector dH_min;
  Vector dH_max;
};

/// Diagonal binary switching matrix; entry i is set while constraint i is
/// active.
class SwitchingMask {
 public:
  SwitchingMask() = default;
  explicit SwitchingMask(std::vector<bool> active) : active_(std::move(active)) {}

  static SwitchingMask none(int m) { return SwitchingMask(std::vector<bool>(m, false)); }
  static SwitchingMask all(int m) { return SwitchingMask(std::vector<bool>(m, true)); }
  /// "10" means output 0 active, output 1 inactive. Throws InputError on
  /// characters other than '0'/'1'.
  static SwitchingMask from_bits(const std::string& bits);
  /// Every mask of size m, in the order 00..0, 10..0, 01..0, ..., 11..1.
  static std::vector<SwitchingMask> enumerate(int m);

  int size() const { return static_cast<int>(active_.size()); }
  bool operator[](int i) const { return active_.at(i); }
  bool any() const;
  std::string bits() const;
  Matrix matrix() const;

  bool operator==(const SwitchingMask&) const = default;

 private:
  std::vector<bool> active_;
};

/// Piecewise-affine form of the augmented input,
///   u_bl + pi = -(K + K_cbf) x_hat + F y_cmd_sel.
struct PwaForm {
  SwitchingMask delta;
  Matrix K_cbf;
  Matrix F;
  Vector y_cmd_sel;
};

SlackPair slack(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                const ConstraintSpec& spec);

/// Min-norm augmentation pi = H_pi^{-1}(max(0, dH_min) - max(0, dH_max)).
Vector pi_from_estimate(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                        const ConstraintSpec& spec);

/// Same as pi_from_estimate, from an already evaluated slack pair.
Vector pi_from_slack(const SlackPair& s, const AugmentationDesign& design);

/// delta_i = 1 iff dH_min_i > 0 or dH_max_i > 0 (zero slack is inactive).
SwitchingMask switching_delta(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                              const ConstraintSpec& spec);
SwitchingMask switching_delta(const SlackPair& s);

/// K_cbf = H_pi^{-1} delta (H_x - H_pi K), F = H_pi^{-1} delta alpha_pi, for a
/// fixed switching mask.
Matrix cbf_feedback_gain(const SwitchingMask& delta, const Matrix& K, const AugmentationDesign& design);

/// PWA form at x_hat for the baseline u_bl = -K x_hat.
PwaForm pwa_form(const Vector& x_hat, const Matrix& K, const AugmentationDesign& design,
                 const ConstraintSpec& spec);

/// Brute-force solution of
///   min pi' H_pi' H_pi pi  s.t.  -H_pi pi + dH_min <= 0,  H_pi pi + dH_max <= 0
/// by enumerating every active set of the 2m inequalities and keeping the
/// feasible KKT point of least cost (ties go to the smaller active set).
/// Intended for m <= 3.
Vector qp_oracle(const Vector& x_hat, const Vector& u_bl, const AugmentationDesign& design,
                 const ConstraintSpec& spec);

}  // namespace cbfaug
