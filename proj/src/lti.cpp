#include "cbfaug/lti.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace cbfaug {

namespace {

void require_dims(const char* name, const Matrix& M, Eigen::Index rows, Eigen::Index cols) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << "plant matrix " << name << " is " << M.rows() << "x" << M.cols() << ", expected "
       << rows << "x" << cols;
    throw InputError(os.str());
  }
  if (!all_finite(M)) throw InputError(std::string("plant matrix ") + name + " has non-finite entries");
}

}  // namespace

bool all_finite(const Matrix& M) { return M.allFinite(); }

void Plant::validate() const {
  const auto n = A.rows();
  if (n == 0) throw InputError("plant has no states");
  require_dims("A", A, n, n);
  if (B.cols() == 0) throw InputError("plant has no inputs");
  require_dims("B", B, n, B.cols());
  if (C.rows() == 0) throw InputError("plant has no measured outputs");
  require_dims("C", C, C.rows(), n);
  require_dims("D", D, C.rows(), B.cols());
  if (C_lim.rows() == 0) throw InputError("plant has no limited outputs");
  require_dims("C_lim", C_lim, C_lim.rows(), n);
  require_dims("B_dist", B_dist, n, B_dist.cols());
}

Plant Plant::make(Matrix A, Matrix B, Matrix C, Matrix D, Matrix C_lim, Matrix B_dist) {
  Plant p;
  p.A = std::move(A);
  p.B = std::move(B);
  p.C = std::move(C);
  p.D = D.size() == 0 ? Matrix::Zero(p.C.rows(), p.B.cols()) : std::move(D);
  p.C_lim = std::move(C_lim);
  p.B_dist = B_dist.size() == 0 ? Matrix::Zero(p.A.rows(), 0) : std::move(B_dist);
  p.validate();
  return p;
}

EigenReport eigen_report(const Matrix& M, double tol_hurwitz) {
  if (M.rows() != M.cols()) throw InputError("eigen_report: matrix is not square");
  if (!M.allFinite()) throw InputError("eigen_report: matrix has non-finite entries");

  EigenReport report;
  if (M.rows() == 0) {
    report.max_real_part = -std::numeric_limits<double>::infinity();
    report.hurwitz = true;
    report.stability = Stability::hurwitz;
    return report;
  }

  Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigen_report: QR iteration failed");
  const auto& ev = solver.eigenvalues();
  report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  report.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& l : report.eigenvalues) report.max_real_part = std::max(report.max_real_part, l.real());

  if (report.max_real_part < -tol_hurwitz) {
    report.stability = Stability::hurwitz;
  } else if (report.max_real_part <= tol_hurwitz) {
    report.stability = Stability::marginal;
  } else {
    report.stability = Stability::unstable;
  }
  report.hurwitz = report.stability == Stability::hurwitz;
  return report;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::hurwitz: return "hurwitz";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
  }
  return "unknown";
}

int numerical_rank(const ComplexMatrix& M, double tol_rank) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol_rank * s(0)) ++rank;
  }
  return rank;
}

PbhResult pbh_check(const Plant& plant, double tol_rank) {
  plant.validate();
  const int n = plant.states();
  const auto eig = eigen_report(plant.A);
  const ComplexMatrix A = plant.A.cast<Complex>();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);

  PbhResult result{true, true};
  for (const auto& lambda : eig.eigenvalues) {
    const ComplexMatrix shifted = lambda * I - A;
    if (lambda.real() >= -kDefaultHurwitzTol) {
      ComplexMatrix ctrb(n, n + plant.inputs());
      ctrb << shifted, plant.B.cast<Complex>();
      if (numerical_rank(ctrb, tol_rank) < n) result.stabilizable = false;
    }
    // rank [lambda I - A; C] equals rank [lambda I - A^T, C^T].
    ComplexMatrix obsv(n + plant.outputs(), n);
    obsv << shifted, plant.C.cast<Complex>();
    if (numerical_rank(obsv, tol_rank) < n) result.observable = false;
  }
  return result;
}

Matrix expm(const Matrix& M) {
  if (M.rows() != M.cols()) throw InputError("expm: matrix is not square");
  return M.exp();
}

}  // namespace cbfaug
