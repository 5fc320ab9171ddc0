#include "cbfaug/pi_servo.hpp"

#include <string>

namespace cbfaug {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw InputError("pi_servo: " + what);
}

}  // namespace

void PhysicalPlant::validate_and_complete() {
  const auto n = A_p.rows();
  const auto m = B_p.cols();
  check(n > 0 && A_p.cols() == n, "A_p must be square and non-empty");
  check(B_p.rows() == n && m > 0, "B_p must have n_p rows and at least one column");
  check(C_p.cols() == n && C_p.rows() > 0, "C_p must have n_p columns");
  if (D_p.size() == 0) D_p = Matrix::Zero(C_p.rows(), m);
  check(D_p.rows() == C_p.rows() && D_p.cols() == m, "D_p must be n_y x m");
  check(C_reg.rows() == m && C_reg.cols() == n, "C_reg must be m x n_p (one regulated output per input)");
  if (D_reg.size() == 0) D_reg = Matrix::Zero(m, m);
  check(D_reg.rows() == m && D_reg.cols() == m, "D_reg must be m x m");
  check(C_lim.cols() == n && C_lim.rows() == m, "C_lim must be m x n_p (square limited-output map)");
  if (B_dist.size() == 0) B_dist = Matrix::Zero(n, 0);
  check(B_dist.rows() == n, "B_dist must have n_p rows");
  for (const Matrix* M : {&A_p, &B_p, &C_p, &D_p, &C_reg, &D_reg, &C_lim, &B_dist}) {
    check(M->allFinite(), "non-finite matrix entry");
  }
}

std::vector<int> ExtendedSystem::physical_channels() const {
  std::vector<int> channels;
  for (int i = 0; i < tracked; ++i) channels.push_back(tracked + i);
  return channels;
}

Matrix ExtendedSystem::command_map() const {
  Matrix map = Matrix::Zero(plant.inputs(), tracked);
  map.topRows(tracked) = -Matrix::Identity(tracked, tracked);
  return map;
}

ExtendedSystem extend_system(PhysicalPlant pp, const Matrix& K_I, const Matrix& K_P, const BoxLimits& u_limits,
                             const BoxLimits& z_limits, std::vector<std::vector<double>> lambdas) {
  pp.validate_and_complete();
  const int np = pp.states();
  const int m = pp.inputs();
  const int ny = static_cast<int>(pp.C_p.rows());
  const int nd = static_cast<int>(pp.B_dist.cols());
  check(K_I.rows() == m && K_I.cols() == m, "K_I must be m x m");
  check(K_P.rows() == m && K_P.cols() == np, "K_P must be m x n_p");
  check(u_limits.min.size() == m && u_limits.max.size() == m, "input limits must have m entries");
  check(z_limits.min.size() == m && z_limits.max.size() == m, "output limits must have m entries");

  const int n = np + m;
  Matrix A = Matrix::Zero(n, n);
  A.block(0, m, m, np) = pp.C_reg;
  A.block(m, m, np, np) = pp.A_p;

  Matrix B = Matrix::Zero(n, 2 * m);
  B.block(0, 0, m, m) = Matrix::Identity(m, m);
  B.block(0, m, m, m) = pp.D_reg;
  B.block(m, m, np, m) = pp.B_p;

  Matrix C = Matrix::Zero(m + ny, n);
  C.block(0, 0, m, m) = Matrix::Identity(m, m);
  C.block(m, m, ny, np) = pp.C_p;

  Matrix D = Matrix::Zero(m + ny, 2 * m);
  D.block(m, m, ny, m) = pp.D_p;

  Matrix C_lim = Matrix::Zero(2 * m, n);
  C_lim.block(0, 0, m, m) = -K_I;
  C_lim.block(0, m, m, np) = -K_P;
  C_lim.block(m, m, m, np) = pp.C_lim;

  Matrix B_dist = Matrix::Zero(n, nd);
  B_dist.bottomRows(np) = pp.B_dist;

  ExtendedSystem ext;
  ext.plant = Plant::make(std::move(A), std::move(B), std::move(C), std::move(D), std::move(C_lim),
                          std::move(B_dist));
  ext.K_ext = Matrix::Zero(2 * m, n);
  ext.K_ext.block(m, 0, m, m) = K_I;
  ext.K_ext.block(m, m, m, np) = K_P;
  ext.spec.y_min.resize(2 * m);
  ext.spec.y_max.resize(2 * m);
  ext.spec.y_min << u_limits.min, z_limits.min;
  ext.spec.y_max << u_limits.max, z_limits.max;
  ext.spec.lambdas = std::move(lambdas);
  ext.spec.validate();
  check(ext.spec.size() == 2 * m, "need one barrier eigenvalue list per limited output");
  ext.tracked = m;
  return ext;
}

Vector command_injection(const ExtendedSystem& ext, const Vector& y_cmd) {
  if (y_cmd.size() != ext.tracked) throw InputError("command must have one entry per regulated output");
  return ext.command_map() * y_cmd;
}

}  // namespace cbfaug
