#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace clh {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Hard cap on any matrix dimension handled by the workbench. Dense only.
inline constexpr std::int64_t kDimCap = 1 << 20;

// Numerical policy shared by an instance and everything derived from it.
// All randomized choices (central elements, generators) derive from `seed`.
struct Tolerance {
  double eps_eq = 1e-8;    // relative Frobenius tolerance for operator equality
  double eps_rank = 1e-9;  // singular-value / eigenvalue cutoff for rank decisions
  std::uint64_t seed = 1;

  void validate() const;
};

// Dense complex square matrix with optional Hermitian/projection flags and
// the ordered list of qudit ids it acts on (empty for abstract matrices).
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m, std::vector<int> qudit_support = {});

  static Operator identity(Eigen::Index dim, std::vector<int> support = {});
  static Operator zero(Eigen::Index dim, std::vector<int> support = {});

  const Matrix& mat() const { return mat_; }
  Matrix& mat() { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

  const std::vector<int>& qudit_support() const { return support_; }
  void set_qudit_support(std::vector<int> s) { support_ = std::move(s); }

  bool hermitian_flag() const { return hermitian_; }
  bool projection_flag() const { return projection_; }

  // Flag setters verify the numerical invariant and throw on violation.
  void mark_hermitian(double tol);
  void mark_projection(double tol);

  double frobenius_norm() const { return mat_.norm(); }

 private:
  Matrix mat_;
  std::vector<int> support_;
  bool hermitian_ = false;
  bool projection_ = false;
};

// max |a(i,j) - conj(a(j,i))|
double hermiticity_defect(const Matrix& m);

// Relative Frobenius distance <= eps * max(1, ||a||_F, ||b||_F).
bool approx_equal(const Matrix& a, const Matrix& b, double eps);
bool approx_zero(const Matrix& a, double eps);

double commutator_norm(const Matrix& a, const Matrix& b);

}  // namespace clh
