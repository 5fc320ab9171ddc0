#include "cbfaug/observer.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cbfaug {

namespace {

bool is_symmetric(const Matrix& M) {
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff());
}

Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

bool stabilizes(const Matrix& A, const Matrix& B, const Matrix& K) {
  return eigen_report(A - B * K).hurwitz;
}

// Bass: with beta above the spectral abscissa, W solving
// (A + beta I) W + W (A + beta I)' = 2 B B' yields a stabilizing K = B' W^{-1}.
std::optional<Matrix> bass_gain(const Matrix& A, const Matrix& B) {
  const auto n = A.rows();
  const double beta = std::max(1.0, eigen_report(A).max_real_part + 1.0 + A.norm());
  const Matrix shifted = A + beta * Matrix::Identity(n, n);
  const Matrix W = symmetrize(solve_lyapunov(shifted, -2.0 * B * B.transpose()));
  Eigen::LLT<Matrix> llt(W);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix K = llt.solve(B).transpose();
  if (!K.allFinite() || !stabilizes(A, B, K)) return std::nullopt;
  return K;
}

// Stable invariant subspace of the Hamiltonian [[A, -S], [-Q, -A']].
std::optional<Matrix> hamiltonian_solution(const AreProblem& p) {
  const auto n = p.A.rows();
  const Matrix S = p.B * p.R.llt().solve(p.B.transpose());
  Matrix H(2 * n, 2 * n);
  H << p.A, -S, -p.Q, -p.A.transpose();
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(H.cast<Complex>());
  if (solver.info() != Eigen::Success) return std::nullopt;
  ComplexMatrix X(2 * n, n);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < 2 * n && col < n; ++k) {
    if (solver.eigenvalues()(k).real() < 0.0) X.col(col++) = solver.eigenvectors().col(k);
  }
  if (col != n) return std::nullopt;
  const ComplexMatrix X1 = X.topRows(n);
  const ComplexMatrix X2 = X.bottomRows(n);
  const auto lu = X1.fullPivLu();
  if (!lu.isInvertible()) return std::nullopt;
  const ComplexMatrix P = X2 * lu.inverse();
  const Matrix real_p = symmetrize(P.real());
  if (!real_p.allFinite()) return std::nullopt;
  return real_p;
}

double residual_scale(const AreProblem& p, const Matrix& P) {
  const Matrix S = p.B * p.R.llt().solve(p.B.transpose());
  return p.Q.norm() + 2.0 * p.A.norm() * P.norm() + (P * S * P).norm();
}

}  // namespace

GainSet make_gain_set(const Plant& plant, Matrix K, Matrix L, GainProvenance provenance) {
  plant.validate();
  if (K.rows() != plant.inputs() || K.cols() != plant.states()) {
    throw InputError("baseline gain K must be " + std::to_string(plant.inputs()) + "x" +
                     std::to_string(plant.states()));
  }
  if (L.rows() != plant.states() || L.cols() != plant.outputs()) {
    throw InputError("observer gain L must be " + std::to_string(plant.states()) + "x" +
                     std::to_string(plant.outputs()));
  }
  if (!K.allFinite() || !L.allFinite()) throw InputError("gain matrices have non-finite entries");
  GainSet gains{std::move(K), std::move(L), provenance, {}};
  const auto obs = eigen_report(plant.A - gains.L * plant.C);
  if (!obs.hurwitz) gains.warnings.push_back("observer error dynamics A - LC are " + to_string(obs.stability));
  return gains;
}

void AreProblem::validate() const {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
      R.cols() != B.cols()) {
    throw InputError("ARE problem matrices have inconsistent dimensions");
  }
  if (!A.allFinite() || !B.allFinite() || !Q.allFinite() || !R.allFinite()) {
    throw InputError("ARE problem has non-finite entries");
  }
  if (!is_symmetric(Q)) throw InputError("ARE weight Q must be symmetric");
  if (!is_symmetric(R)) throw InputError("ARE weight R must be symmetric");
  if (Eigen::LLT<Matrix>(R).info() != Eigen::Success) throw InputError("ARE weight R must be positive definite");
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
  const auto n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) throw InputError("solve_lyapunov: dimension mismatch");
  // A = U T U^H, then T Y + Y T^H + F = 0 with Y = U^H X U, F = U^H Q U,
  // solved column by column from the last.
  Eigen::ComplexSchur<ComplexMatrix> schur(A.cast<Complex>());
  const ComplexMatrix& T = schur.matrixT();
  const ComplexMatrix& U = schur.matrixU();
  const ComplexMatrix F = U.adjoint() * Q.cast<Complex>() * U;
  ComplexMatrix Y = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    ComplexVector rhs = -F.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= Y.col(k) * std::conj(T(j, k));
    ComplexMatrix M = T;
    M.diagonal().array() += std::conj(T(j, j));
    Y.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (U * Y * U.adjoint()).real();
}

Matrix care_residual(const AreProblem& p, const Matrix& P) {
  return p.A.transpose() * P + P * p.A - P * p.B * p.R.llt().solve(p.B.transpose() * P) + p.Q;
}

Matrix care_solve(const AreProblem& p, const CareOptions& options) {
  p.validate();
  const auto n = p.A.rows();
  const Matrix R_inv_Bt = p.R.llt().solve(p.B.transpose());

  Matrix K;
  if (eigen_report(p.A).hurwitz) {
    K = Matrix::Zero(p.B.cols(), n);
  } else if (auto bass = bass_gain(p.A, p.B)) {
    K = *bass;
  } else if (auto ham = hamiltonian_solution(p)) {
    K = R_inv_Bt * *ham;
    if (!stabilizes(p.A, p.B, K)) throw ConvergenceError("care_solve: no stabilizing initial gain found");
  } else {
    throw ConvergenceError("care_solve: no stabilizing initial gain found");
  }

  Matrix P = Matrix::Zero(n, n);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Matrix Ak = p.A - p.B * K;
    const Matrix next = symmetrize(solve_lyapunov(Ak.transpose(), p.Q + K.transpose() * p.R * K));
    if (!next.allFinite()) throw ConvergenceError("care_solve: Newton-Kleinman iterate became non-finite");
    const double step = (next - P).norm();
    P = next;
    K = R_inv_Bt * P;
    if (step <= 1e-15 * std::max(1.0, P.norm())) break;
  }

  const double residual = care_residual(p, P).norm();
  if (!(residual <= options.tol * std::max(1.0, residual_scale(p, P)))) {
    std::ostringstream os;
    os << "care_solve: residual " << residual << " above tolerance after " << options.max_iterations
       << " iterations";
    throw ConvergenceError(os.str());
  }
  if (!stabilizes(p.A, p.B, K)) throw ConvergenceError("care_solve: solution is not stabilizing");
  return P;
}

Matrix lqr_gain(const AreProblem& p) {
  const Matrix P = care_solve(p);
  return p.R.llt().solve(p.B.transpose() * P);
}

Matrix observer_gain(const Matrix& A, const Matrix& C, const Matrix& Q_o, const Matrix& R_o) {
  return lqr_gain(AreProblem{A.transpose(), C.transpose(), Q_o, R_o}).transpose();
}

Vector observer_rhs(const Vector& x_hat, const Vector& u, const Vector& y, const Plant& plant,
                    const Matrix& L) {
  const Vector y_hat = plant.C * x_hat + plant.D * u;
  return plant.A * x_hat + plant.B * u + L * (y - y_hat);
}

Matrix baseline_closed_loop(const Plant& plant, const GainSet& gains) {
  const auto n = plant.states();
  Matrix M(2 * n, 2 * n);
  const Matrix BK = plant.B * gains.K;
  M << plant.A - BK, BK, Matrix::Zero(n, n), plant.A - gains.L * plant.C;
  return M;
}

ConstrainedClosedLoop constrained_closed_loop(const Plant& plant, const AugmentationDesign& design,
                                              const GainSet& gains) {
  const auto n = plant.states();
  const Matrix BHinv = plant.B * design.H_pi_inv;
  const Matrix BHx = BHinv * design.H_x;
  ConstrainedClosedLoop cl;
  cl.A_cl.resize(2 * n, 2 * n);
  cl.A_cl << plant.A - BHx, BHx, Matrix::Zero(n, n), plant.A - gains.L * plant.C;
  cl.B_ylim.resize(2 * n, design.size());
  cl.B_ylim << BHinv, Matrix::Zero(n, design.size());
  return cl;
}

}  // namespace cbfaug
