#pragma once

#include <string>
#include <vector>

#include "cbfaug/cbf_design.hpp"

namespace cbfaug {

enum class GainProvenance { given, lqr_designed };

/// Baseline state-feedback gain K (u_bl = -K x_hat) and Luenberger gain L.
struct GainSet {
  Matrix K;
  Matrix L;
  GainProvenance provenance = GainProvenance::given;
  std::vector<std::string> warnings;
};

/// Validates dimensions against the plant and records a warning when
/// A - LC is marginal or unstable.
GainSet make_gain_set(const Plant& plant, Matrix K, Matrix L, GainProvenance provenance);

/// Data of A'P + PA - P B R^{-1} B' P + Q = 0.
struct AreProblem {
  Matrix A;
  Matrix B;
  Matrix Q;
  Matrix R;

  /// Throws InputError unless Q = Q', R = R' and R is positive definite.
  void validate() const;
};

struct CareOptions {
  double tol = 1e-12;
  int max_iterations = 100;
};

/// Stabilizing solution of the continuous algebraic Riccati equation.
///
/// Newton-Kleinman iteration from an initial stabilizing gain (Bass's
/// shifted-Gramian construction); when that gain cannot be formed, the
/// stable invariant subspace of the Hamiltonian provides the starting point.
/// Throws ConvergenceError if the residual does not reach
/// tol * max(1, ||Q||).
Matrix care_solve(const AreProblem& p, const CareOptions& options = {});

/// Residual A'P + PA - P B R^{-1} B' P + Q.
Matrix care_residual(const AreProblem& p, const Matrix& P);

/// Solution X of A X + X A' + Q = 0 (complex Schur, Bartels-Stewart).
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

/// K = R^{-1} B' P.
Matrix lqr_gain(const AreProblem& p);

/// L from the dual problem on (A', C'): L = (R_o^{-1} C P_o)'.
Matrix observer_gain(const Matrix& A, const Matrix& C, const Matrix& Q_o, const Matrix& R_o);

/// d(x_hat)/dt = A x_hat + B u + L (y - C x_hat - D u).
Vector observer_rhs(const Vector& x_hat, const Vector& u, const Vector& y, const Plant& plant,
                    const Matrix& L);

/// [[A - BK, BK], [0, A - LC]] acting on (x_hat, e_est).
Matrix baseline_closed_loop(const Plant& plant, const GainSet& gains);

/// Closed loop with the augmentation written through the bounded signal
/// Y_hat_lim = H_x x_hat + H_pi u:
///   d/dt [x; e] = A_cl [x; e] + B_ylim Y_hat_lim.
struct ConstrainedClosedLoop {
  Matrix A_cl;    // [[A - B H_pi^{-1} H_x, B H_pi^{-1} H_x], [0, A - LC]]
  Matrix B_ylim;  // [B H_pi^{-1}; 0]
};

ConstrainedClosedLoop constrained_closed_loop(const Plant& plant, const AugmentationDesign& design,
                                              const GainSet& gains);

}  // namespace cbfaug
