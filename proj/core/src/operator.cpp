#include "clh/operator.hpp"

#include "clh/errors.hpp"

namespace clh {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::OverflowDim: return "OverflowDim";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::BadEigenvalue: return "BadEigenvalue";
    case ErrorKind::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorKind::SiteNotInSupport: return "SiteNotInSupport";
    case ErrorKind::NumericalDegeneracy: return "NumericalDegeneracy";
    case ErrorKind::BothTrivial: return "BothTrivial";
    case ErrorKind::NotSingleOverlap: return "NotSingleOverlap";
    case ErrorKind::InvalidCertificate: return "InvalidCertificate";
    case ErrorKind::InvalidStep: return "InvalidStep";
    case ErrorKind::IllegalPattern: return "IllegalPattern";
    case ErrorKind::MissingWitness: return "MissingWitness";
    case ErrorKind::RankTooHigh: return "RankTooHigh";
    case ErrorKind::DegreeViolation: return "DegreeViolation";
    case ErrorKind::NotFactorized: return "NotFactorized";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::SeparableSitePresent: return "SeparableSitePresent";
    case ErrorKind::IrregularPair: return "IrregularPair";
    case ErrorKind::NonPowerOfTwoBlock: return "NonPowerOfTwoBlock";
    case ErrorKind::NonCommutingWords: return "NonCommutingWords";
    case ErrorKind::BadEigenvalueSign: return "BadEigenvalueSign";
    case ErrorKind::Budget: return "Budget";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

void Tolerance::validate() const {
  if (!(eps_rank > 0 && eps_rank <= eps_eq && eps_eq < 1e-3)) {
    fail(ErrorKind::ValidationError,
         "tolerance must satisfy 0 < eps_rank <= eps_eq < 1e-3");
  }
}

Operator::Operator(Matrix m, std::vector<int> qudit_support)
    : mat_(std::move(m)), support_(std::move(qudit_support)) {
  if (mat_.rows() != mat_.cols()) {
    fail(ErrorKind::BadShape, "operator matrix must be square");
  }
}

Operator Operator::identity(Eigen::Index dim, std::vector<int> support) {
  Operator op(Matrix::Identity(dim, dim), std::move(support));
  op.hermitian_ = true;
  op.projection_ = true;
  return op;
}

Operator Operator::zero(Eigen::Index dim, std::vector<int> support) {
  Operator op(Matrix::Zero(dim, dim), std::move(support));
  op.hermitian_ = true;
  op.projection_ = true;
  return op;
}

void Operator::mark_hermitian(double tol) {
  if (hermiticity_defect(mat_) > tol) {
    fail(ErrorKind::NotHermitian, "matrix fails elementwise Hermiticity check");
  }
  hermitian_ = true;
}

void Operator::mark_projection(double tol) {
  mark_hermitian(tol);
  Matrix defect = mat_ * mat_ - mat_;
  if (defect.norm() > tol * std::max(1.0, mat_.norm())) {
    fail(ErrorKind::NotProjection, "matrix fails M^2 = M check");
  }
  projection_ = true;
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool approx_equal(const Matrix& a, const Matrix& b, double eps) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  double scale = std::max({1.0, a.norm(), b.norm()});
  return (a - b).norm() <= eps * scale;
}

bool approx_zero(const Matrix& a, double eps) {
  return a.norm() <= eps;
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).norm();
}

}  // namespace clh
