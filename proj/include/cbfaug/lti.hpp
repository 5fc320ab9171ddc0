#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cbfaug/types.hpp"

namespace cbfaug {

/// Continuous-time LTI plant
///
///   dx/dt = A x + B u + B_dist d
///   y     = C x + D u
///   y_lim = C_lim x
///
/// B_dist may have zero columns when the plant has no disturbance input.
struct Plant {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  Matrix C_lim;
  Matrix B_dist;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
  int limited_outputs() const { return static_cast<int>(C_lim.rows()); }
  int disturbances() const { return static_cast<int>(B_dist.cols()); }

  /// Throws InputError when dimensions disagree or an entry is non-finite.
  void validate() const;

  /// Builds and validates a plant. An empty D becomes zeros(n_y, m) and an
  /// empty B_dist becomes an n x 0 matrix.
  static Plant make(Matrix A, Matrix B, Matrix C, Matrix D, Matrix C_lim,
                    Matrix B_dist = Matrix());
};

enum class Stability { hurwitz, marginal, unstable };

struct EigenReport {
  std::vector<Complex> eigenvalues;
  double max_real_part = 0.0;
  bool hurwitz = false;
  Stability stability = Stability::unstable;
};

inline constexpr double kDefaultHurwitzTol = 1e-9;
inline constexpr double kDefaultRankTol = 1e-10;

/// Eigenvalues (with multiplicity) of a real square matrix, sorted by
/// ascending real part then imaginary part. Eigenvalues whose real part lies
/// within tol_hurwitz of zero make the report marginal rather than Hurwitz.
EigenReport eigen_report(const Matrix& M, double tol_hurwitz = kDefaultHurwitzTol);

std::string to_string(Stability s);

struct PbhResult {
  bool stabilizable = false;
  bool observable = false;
};

/// Popov-Belevitch-Hautus rank tests on (A, B) and (A, C).
PbhResult pbh_check(const Plant& plant, double tol_rank = kDefaultRankTol);

/// Numerical rank of a complex matrix: singular values below
/// tol_rank * sigma_max count as zero.
int numerical_rank(const ComplexMatrix& M, double tol_rank = kDefaultRankTol);

bool all_finite(const Matrix& M);

/// Matrix exponential e^{M}.
Matrix expm(const Matrix& M);

/// One classical fourth-order Runge-Kutta step of dx/dt = f(t, x).
/// Throws NumericalBlowUp (carrying t) when any stage derivative or the
/// result is non-finite.
template <typename F>
Vector rk4_step(F&& f, const Vector& x, double t, double h) {
  if (!(h > 0.0)) throw InputError("rk4_step: step size must be positive");
  auto checked = [t](const Vector& v) -> const Vector& {
    if (!v.allFinite()) throw NumericalBlowUp("non-finite RK4 stage", t);
    return v;
  };
  const Vector k1 = checked(f(t, x));
  const Vector k2 = checked(f(t + 0.5 * h, Vector(x + 0.5 * h * k1)));
  const Vector k3 = checked(f(t + 0.5 * h, Vector(x + 0.5 * h * k2)));
  const Vector k4 = checked(f(t + h, Vector(x + h * k3)));
  Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericalBlowUp("non-finite state", t + h);
  return next;
}

}  // namespace cbfaug
