#include "cbfaug/simulation.hpp"

#include <cmath>

namespace cbfaug {

void Scenario::validate() const {
  plant.validate();
  const auto n = plant.states();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("sim.dt must be positive");
  if (!(t_final >= dt) || !std::isfinite(t_final)) throw InputError("sim.t_final must be at least dt");
  if (x0.size() != n) throw InputError("sim.x0 must have " + std::to_string(n) + " entries");
  if (xhat0.size() != n) throw InputError("sim.xhat0 must have " + std::to_string(n) + " entries");
  if (gains.K.rows() != plant.inputs() || gains.K.cols() != n) throw InputError("gain K does not match the plant");
  if (gains.L.rows() != n || gains.L.cols() != plant.outputs()) throw InputError("gain L does not match the plant");
  if (command_map.rows() != plant.inputs()) throw InputError("command map must have one row per input");
  for (const auto& step : command) {
    if (step.value.size() != command_map.cols()) throw InputError("command value has the wrong dimension");
  }
  if (!disturbance.empty() && static_cast<int>(disturbance.size()) != plant.disturbances()) {
    throw InputError("need one disturbance profile per B_dist column");
  }
  if (augmentation_enabled && !design) throw InputError("augmentation enabled without a design");
  if (spec.size() != plant.limited_outputs()) throw InputError("limits do not match the limited outputs");
}

Vector Scenario::command_at(double t) const {
  Vector value = Vector::Zero(command_map.cols());
  for (const auto& step : command) {
    if (t >= step.t) value = step.value;
  }
  return value;
}

bool ViolationReport::any() const {
  for (const auto& o : outputs) {
    if (o.any()) return true;
  }
  return false;
}

double ViolationReport::max_violation() const {
  double worst = 0.0;
  for (const auto& o : outputs) worst = std::max(worst, o.max_violation);
  return worst;
}

namespace {

struct ControlSignals {
  Vector u_bl;
  Vector pi;
  Vector u;
  SlackPair slack;
};

class ClosedLoop {
 public:
  explicit ClosedLoop(const Scenario& sc)
      : sc_(sc),
        truth_(sc.actuator ? with_actuator(sc.plant, *sc.actuator) : sc.plant),
        dist_(sc.disturbance, sc.dt, sc.t_final),
        n_(sc.plant.states()),
        nt_(truth_.states()) {}

  int truth_states() const { return nt_; }
  int model_states() const { return n_; }
  const Plant& truth() const { return truth_; }

  Vector controller_state(const Vector& z) const {
    return sc_.state_feedback ? Vector(z.head(n_)) : Vector(z.tail(n_));
  }

  ControlSignals control(double t, const Vector& x_ctrl) const {
    ControlSignals c;
    c.u_bl = -sc_.gains.K * x_ctrl + sc_.command_map * sc_.command_at(t);
    if (sc_.design) {
      c.slack = slack(x_ctrl, c.u_bl, *sc_.design, sc_.spec);
    }
    if (sc_.augmentation_enabled) {
      c.pi = pi_from_slack(c.slack, *sc_.design);
    } else {
      c.pi = Vector::Zero(c.u_bl.size());
    }
    c.u = c.u_bl + c.pi;
    return c;
  }

  Vector derivative(double t, const Vector& z) const {
    const Vector x = z.head(nt_);
    const Vector x_ctrl = controller_state(z);
    const ControlSignals c = control(t, x_ctrl);
    Vector dz(nt_ + n_);
    dz.head(nt_) = truth_.A * x + truth_.B * c.u;
    if (truth_.disturbances() > 0 && dist_.size() > 0) dz.head(nt_) += truth_.B_dist * dist_(t);
    if (sc_.state_feedback) {
      dz.tail(n_) = dz.head(n_);
    } else {
      const Vector y = truth_.C * x + truth_.D * c.u;
      dz.tail(n_) = observer_rhs(z.tail(n_), c.u, y, sc_.plant, sc_.gains.L);
    }
    return dz;
  }

 private:
  const Scenario& sc_;
  Plant truth_;
  DisturbanceSignal dist_;
  int n_;
  int nt_;
};

}  // namespace

Trajectory simulate(const Scenario& sc) {
  sc.validate();
  ClosedLoop loop(sc);
  const int n = loop.model_states();
  const int nt = loop.truth_states();
  const int m = sc.plant.inputs();
  const int ml = sc.plant.limited_outputs();
  const auto steps = static_cast<std::size_t>(std::floor(sc.t_final / sc.dt + 1e-9));
  const auto count = steps + 1;

  Trajectory tr;
  tr.step = sc.dt;
  tr.warnings = sc.gains.warnings;
  tr.time.resize(count);
  tr.x.resize(count, nt);
  tr.x_hat.resize(count, n);
  tr.u_bl.resize(count, m);
  tr.pi.resize(count, m);
  tr.u.resize(count, m);
  tr.y_lim.resize(count, ml);
  tr.delta = Matrix::Zero(count, ml);
  tr.dH_min = Matrix::Zero(count, ml);
  tr.dH_max = Matrix::Zero(count, ml);

  Vector z(nt + n);
  z.setZero();
  z.head(n) = sc.x0;
  z.tail(n) = sc.state_feedback ? sc.x0 : sc.xhat0;

  auto record = [&](std::size_t k, double t) {
    const Vector x = z.head(nt);
    const Vector x_ctrl = loop.controller_state(z);
    const ControlSignals c = loop.control(t, x_ctrl);
    tr.time[k] = t;
    tr.x.row(k) = x.transpose();
    tr.x_hat.row(k) = (sc.state_feedback ? Vector(x.head(n)) : Vector(z.tail(n))).transpose();
    tr.u_bl.row(k) = c.u_bl.transpose();
    tr.pi.row(k) = c.pi.transpose();
    tr.u.row(k) = c.u.transpose();
    tr.y_lim.row(k) = (loop.truth().C_lim * x).transpose();
    if (sc.design) {
      tr.dH_min.row(k) = c.slack.dH_min.transpose();
      tr.dH_max.row(k) = c.slack.dH_max.transpose();
      if (sc.augmentation_enabled) {
        const SwitchingMask delta = switching_delta(c.slack);
        for (int i = 0; i < ml; ++i) tr.delta(k, i) = delta[i] ? 1.0 : 0.0;
      }
    }
  };

  auto f = [&loop](double t, const Vector& state) { return loop.derivative(t, state); };
  record(0, 0.0);
  for (std::size_t k = 1; k < count; ++k) {
    const double t = static_cast<double>(k - 1) * sc.dt;
    z = rk4_step(f, z, t, sc.dt);
    record(k, static_cast<double>(k) * sc.dt);
  }
  return tr;
}

ViolationReport violation_report(const Trajectory& tr, const ConstraintSpec& spec, double t_from, double tol) {
  ViolationReport report;
  report.outputs.resize(spec.size());
  for (int i = 0; i < spec.size(); ++i) {
    auto& out = report.outputs[i];
    for (std::size_t k = 0; k < tr.samples(); ++k) {
      if (tr.time[k] < t_from) continue;
      const double y = tr.y_lim(static_cast<Eigen::Index>(k), i);
      const double v = std::max(spec.y_min(i) - y, y - spec.y_max(i));
      if (v > tol) {
        if (out.samples == 0) out.first_time = tr.time[k];
        out.last_time = tr.time[k];
        out.max_violation = std::max(out.max_violation, v);
        ++out.samples;
      }
    }
    out.duration = static_cast<double>(out.samples) * tr.step;
  }
  return report;
}

}  // namespace cbfaug
