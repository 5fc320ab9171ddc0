// Independent reference computations used only by the tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cbfaug/types.hpp"

namespace oracle {

using cbfaug::Complex;
using cbfaug::ComplexMatrix;
using cbfaug::Matrix;

// Scaling and squaring with a diagonal [6/6] Pade approximant.
inline Matrix expm_pade(const Matrix& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const Matrix X = A / std::pow(2.0, s);
  const int q = 6;
  double c = 1.0;
  const auto n = A.rows();
  Matrix N = Matrix::Identity(n, n);
  Matrix D = Matrix::Identity(n, n);
  Matrix P = Matrix::Identity(n, n);
  for (int k = 1; k <= q; ++k) {
    c = c * (q - k + 1) / (k * (2.0 * q - k + 1));
    P = X * P;
    N += c * P;
    D += ((k % 2) ? -c : c) * P;
  }
  Matrix E = D.partialPivLu().solve(N);
  for (int k = 0; k < s; ++k) E = E * E;
  return E;
}

// Characteristic polynomial coefficients (monic, descending) and the
// adjugate polynomial of sI - A via Faddeev-LeVerrier:
//   (sI - A)^{-1} = sum_k s^{n-1-k} M_k / det(sI - A).
struct Resolvent {
  std::vector<double> c;   // c[0] = 1, det(sI - A) = sum c_k s^{n-k}
  std::vector<Matrix> M;   // M[0] = I
};

inline Resolvent leverrier(const Matrix& A) {
  const auto n = A.rows();
  Resolvent r;
  r.c.push_back(1.0);
  Matrix M = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    r.M.push_back(M);
    const Matrix AM = A * M;
    const double ck = -AM.trace() / static_cast<double>(k);
    r.c.push_back(ck);
    M = AM + ck * Matrix::Identity(n, n);
  }
  return r;
}

// C (sI - A)^{-1} B + D from the rational form.
inline ComplexMatrix transfer_function(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                       Complex s) {
  const auto r = leverrier(A);
  const auto n = A.rows();
  // Horner in s for both polynomials.
  Complex den = 0.0;
  for (Eigen::Index k = 0; k <= n; ++k) den = den * s + r.c[k];
  ComplexMatrix num = ComplexMatrix::Zero(C.rows(), B.cols());
  for (Eigen::Index k = 0; k < n; ++k) num = num * s + (C * r.M[k] * B).cast<Complex>();
  return num / den + D.cast<Complex>();
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = nd(rng);
  return M;
}

}  // namespace oracle
