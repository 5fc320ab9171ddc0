#include "cbfaug/cbf_design.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace cbfaug {

void ConstraintSpec::validate() const {
  if (y_min.size() == 0) throw InputError("constraint spec has no outputs");
  if (y_max.size() != y_min.size()) throw InputError("y_min and y_max differ in length");
  if (lambdas.size() != static_cast<std::size_t>(y_min.size())) {
    throw InputError("constraint spec needs one lambda list per limited output");
  }
  for (Eigen::Index i = 0; i < y_min.size(); ++i) {
    if (!std::isfinite(y_min(i)) || !std::isfinite(y_max(i)) || !(y_min(i) < y_max(i))) {
      std::ostringstream os;
      os << "limits of output " << i << " must satisfy y_min < y_max";
      throw InputError(os.str());
    }
    if (lambdas[i].empty()) throw InputError("output " + std::to_string(i) + " has no barrier eigenvalues");
    for (double l : lambdas[i]) {
      if (!std::isfinite(l) || !(l < 0.0)) {
        throw InputError("barrier eigenvalues must be real and negative (output " + std::to_string(i) + ")");
      }
    }
  }
}

double ConstraintSpec::slowest_rate(int i) const {
  double rate = std::numeric_limits<double>::infinity();
  for (double l : lambdas.at(i)) rate = std::min(rate, -l);
  return rate;
}

std::vector<int> relative_degrees(const Plant& plant, double tol_zero) {
  plant.validate();
  if (plant.limited_outputs() != plant.inputs()) {
    throw DesignError("augmentation needs as many limited outputs as inputs");
  }
  const int n = plant.states();
  const double norm_a = plant.A.norm();
  const double norm_b = plant.B.norm();

  std::vector<int> degrees(plant.limited_outputs());
  for (int i = 0; i < plant.limited_outputs(); ++i) {
    const double norm_c = plant.C_lim.row(i).norm();
    RowVector c_ak = plant.C_lim.row(i);  // (C_lim)_i A^{k-1}
    int found = 0;
    for (int k = 1; k <= n; ++k) {
      const double markov = (c_ak * plant.B).norm();
      const double scale = norm_c * std::pow(norm_a, k - 1) * norm_b;
      if (markov > tol_zero * scale && markov > 0.0) {
        found = k;
        break;
      }
      c_ak = c_ak * plant.A;
    }
    if (found == 0) {
      throw DesignError("ill-defined relative degree for limited output " + std::to_string(i));
    }
    degrees[i] = found;
  }
  return degrees;
}

std::vector<double> barrier_polynomial(const std::vector<double>& lambdas) {
  std::vector<double> coeffs{1.0};
  for (double l : lambdas) {
    std::vector<double> next(coeffs.size() + 1, 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      next[j + 1] += coeffs[j];
      next[j] -= l * coeffs[j];
    }
    coeffs = std::move(next);
  }
  return coeffs;
}

RowVector barrier_state_row(const Plant& plant, int i, const std::vector<double>& lambdas) {
  const int n = plant.states();
  RowVector row = plant.C_lim.row(i);
  for (double l : lambdas) row = row * (plant.A - l * Matrix::Identity(n, n));
  return row;
}

AugmentationDesign build_design(const Plant& plant, const ConstraintSpec& spec) {
  spec.validate();
  if (spec.size() != plant.limited_outputs()) {
    throw InputError("constraint spec size does not match the limited outputs");
  }
  AugmentationDesign design;
  design.relative_degree = relative_degrees(plant);

  const int m = plant.inputs();
  const int n = plant.states();
  design.H_x.resize(m, n);
  design.H_pi.resize(m, m);
  design.alpha.resize(m);
  for (int i = 0; i < m; ++i) {
    const int r = design.relative_degree[i];
    if (static_cast<int>(spec.lambdas[i].size()) != r) {
      std::ostringstream os;
      os << "output " << i << " has relative degree " << r << " but " << spec.lambdas[i].size()
         << " barrier eigenvalues";
      throw InputError(os.str());
    }
    design.H_x.row(i) = barrier_state_row(plant, i, spec.lambdas[i]);
    RowVector c_ak = plant.C_lim.row(i);
    for (int k = 1; k < r; ++k) c_ak = c_ak * plant.A;
    design.H_pi.row(i) = c_ak * plant.B;
    double c0 = 1.0;
    for (double l : spec.lambdas[i]) c0 *= -l;
    design.alpha(i) = c0;
  }

  Eigen::JacobiSVD<Matrix> svd(design.H_pi);
  const auto& s = svd.singularValues();
  design.h_pi_condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                                : std::numeric_limits<double>::infinity();
  if (!(design.h_pi_condition <= kMaxHpiCondition)) {
    std::ostringstream os;
    os << "H_pi singular (condition number " << design.h_pi_condition << ")";
    throw DesignError(os.str());
  }
  design.H_pi_inv = design.H_pi.fullPivLu().inverse();
  const Matrix check = design.H_pi * design.H_pi_inv - Matrix::Identity(m, m);
  if (check.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, design.H_pi.norm()) * design.h_pi_condition) {
    throw DesignError("H_pi inverse failed its residual check");
  }
  return design;
}

CbfAbilityReport check_cbf_able(const Plant& plant, const ConstraintSpec& spec, double tol_hurwitz) {
  CbfAbilityReport report;
  AugmentationDesign design;
  try {
    design = build_design(plant, spec);
  } catch (const Error& e) {
    report.warnings.emplace_back(e.what());
    return report;
  }
  report.h_pi_nonsingular = true;
  const Matrix constrained = plant.A - plant.B * design.H_pi_inv * design.H_x;
  report.constrained_eigs = eigen_report(constrained, tol_hurwitz);
  switch (report.constrained_eigs->stability) {
    case Stability::hurwitz:
      break;
    case Stability::marginal:
      report.warnings.emplace_back(
          "marginal mode: A - B H_pi^-1 H_x has an eigenvalue on the imaginary axis");
      break;
    case Stability::unstable:
      report.warnings.emplace_back("unstable mode: A - B H_pi^-1 H_x has an eigenvalue in the right half plane");
      break;
  }
  report.cbf_able = report.h_pi_nonsingular && report.constrained_eigs->hurwitz;
  return report;
}

std::vector<bool> check_parameter_rule(const ConstraintSpec& spec, const EigenReport& observer_eigs) {
  if (!observer_eigs.hurwitz) {
    throw ParameterRuleError("observer error dynamics A - LC are not Hurwitz");
  }
  const double bound = std::abs(observer_eigs.max_real_part);
  std::vector<bool> ok(spec.lambdas.size());
  for (std::size_t i = 0; i < spec.lambdas.size(); ++i) {
    ok[i] = spec.slowest_rate(static_cast<int>(i)) < bound;
  }
  return ok;
}

}  // namespace cbfaug
