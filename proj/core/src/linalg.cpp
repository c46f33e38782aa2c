#include "clh/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "clh/errors.hpp"

namespace clh {

namespace {

// Fix the global phase of each column: the first entry of largest magnitude
// becomes real positive. Entries below `negligible` never win the scan.
void phase_fix_columns(Matrix& v, double negligible = 1e-14) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index best = 0;
    double best_mag = 0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      double mag = std::abs(v(r, c));
      if (mag > best_mag + negligible) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag > negligible) {
      Complex ph = v(best, c) / best_mag;
      v.col(c) /= ph;
    }
  }
}

}  // namespace

Matrix gram_schmidt(const Matrix& columns, double cut) {
  Matrix out(columns.rows(), columns.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Vector v = columns.col(c);
    // Two re-orthogonalization passes keep the basis orthonormal to machine
    // precision even for nearly dependent inputs.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) {
        v -= out.col(k).dot(v) * out.col(k);
      }
    }
    double n = v.norm();
    if (n > cut) {
      out.col(kept++) = v / n;
    }
  }
  out.conservativeResize(Eigen::NoChange, kept);
  return out;
}

EigenDecomposition hermitian_eig(const Matrix& m, const Tolerance& tol) {
  if (hermiticity_defect(m) > tol.eps_eq * std::max(1.0, m.norm())) {
    fail(ErrorKind::NotHermitian, "hermitian_eig input fails Hermiticity check");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::Internal, "eigensolver failed to converge");
  }
  RealVector vals = solver.eigenvalues();
  Matrix vecs = solver.eigenvectors();

  // Re-base each degenerate cluster deterministically from the standard basis.
  double scale = std::max(1.0, m.norm());
  double gap = std::max(tol.eps_rank * scale, 1e-12 * scale);
  Eigen::Index n = vals.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && vals(stop) - vals(stop - 1) <= gap) ++stop;
    if (stop - start > 1) {
      Matrix basis = vecs.middleCols(start, stop - start);
      Matrix proj = basis * basis.adjoint();
      // Project e_0, e_1, ... into the eigenspace and orthonormalize.
      Matrix candidates = proj;  // column j is proj * e_j
      Matrix rebased = gram_schmidt(candidates, 1e-6);
      if (rebased.cols() != stop - start) {
        // Fall back to the solver basis if the standard basis is too skewed.
        rebased = gram_schmidt(basis, 1e-8);
      }
      if (rebased.cols() == stop - start) {
        vecs.middleCols(start, stop - start) = rebased;
      }
    }
    start = stop;
  }
  phase_fix_columns(vecs);
  return {std::move(vals), std::move(vecs)};
}

EigenDecomposition hermitian_eig(const Operator& m, const Tolerance& tol) {
  if (!m.hermitian_flag()) {
    fail(ErrorKind::NotHermitian, "operator is not flagged hermitian");
  }
  return hermitian_eig(m.mat(), tol);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  std::int64_t dim = std::int64_t(a.dim()) * std::int64_t(b.dim());
  if (dim > kDimCap) {
    fail(ErrorKind::OverflowDim, "tensor product exceeds the dense dimension cap");
  }
  std::vector<int> support = a.qudit_support();
  support.insert(support.end(), b.qudit_support().begin(), b.qudit_support().end());
  return Operator(kron(a.mat(), b.mat()), std::move(support));
}

Operator partial_trace(const Operator& m, const std::set<int>& keep,
                       const std::vector<Eigen::Index>& dims) {
  const auto& support = m.qudit_support();
  if (dims.size() != support.size()) {
    fail(ErrorKind::BadShape, "partial_trace dims must align with qudit support");
  }
  Eigen::Index total = 1;
  for (auto d : dims) total *= d;
  if (total != m.dim()) {
    fail(ErrorKind::BadShape, "partial_trace dims product does not match matrix dim");
  }

  std::vector<int> kept_legs, traced_legs;
  for (size_t k = 0; k < support.size(); ++k) {
    (keep.count(support[k]) ? kept_legs : traced_legs).push_back(int(k));
  }
  Eigen::Index kd = 1;
  for (int k : kept_legs) kd *= dims[k];

  size_t n = support.size();
  std::vector<Eigen::Index> digits_r(n), digits_c(n);
  auto decompose = [&](Eigen::Index idx, std::vector<Eigen::Index>& digits) {
    for (size_t k = n; k-- > 0;) {
      digits[k] = idx % dims[k];
      idx /= dims[k];
    }
  };
  auto kept_index = [&](const std::vector<Eigen::Index>& digits) {
    Eigen::Index idx = 0;
    for (int k : kept_legs) idx = idx * dims[k] + digits[k];
    return idx;
  };

  Matrix out = Matrix::Zero(kd, kd);
  for (Eigen::Index r = 0; r < m.dim(); ++r) {
    decompose(r, digits_r);
    for (Eigen::Index c = 0; c < m.dim(); ++c) {
      decompose(c, digits_c);
      bool diagonal_on_traced = true;
      for (int k : traced_legs) {
        if (digits_r[k] != digits_c[k]) {
          diagonal_on_traced = false;
          break;
        }
      }
      if (diagonal_on_traced) {
        out(kept_index(digits_r), kept_index(digits_c)) += m.mat()(r, c);
      }
    }
  }

  std::vector<int> out_support;
  for (int k : kept_legs) out_support.push_back(support[k]);
  return Operator(std::move(out), std::move(out_support));
}

Matrix kernel_projector(const Matrix& m, const Tolerance& tol) {
  Tolerance t = tol;
  EigenDecomposition eig = hermitian_eig(m, t);
  double scale = eig.eigenvalues.size() == 0
                     ? 0.0
                     : std::max(std::abs(eig.eigenvalues(0)),
                                std::abs(eig.eigenvalues(eig.eigenvalues.size() - 1)));
  double cut = tol.eps_rank * scale;
  if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) < -cut) {
    fail(ErrorKind::NotPSD, "kernel_projector input has a negative eigenvalue");
  }
  Matrix proj = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (std::abs(eig.eigenvalues(k)) <= cut) {
      proj += eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
    }
  }
  return proj;
}

Operator kernel_projector(const Operator& m, const Tolerance& tol) {
  if (!m.hermitian_flag()) {
    fail(ErrorKind::NotHermitian, "kernel_projector input is not flagged hermitian");
  }
  Operator out(kernel_projector(m.mat(), tol), m.qudit_support());
  out.mark_projection(std::max(tol.eps_eq, 1e-10) * std::max(1.0, m.frobenius_norm()));
  return out;
}

Matrix eigenspace_projector(const Matrix& m, double lambda, double match_tol,
                            const Tolerance& tol, bool* matched) {
  EigenDecomposition eig = hermitian_eig(m, tol);
  Matrix proj = Matrix::Zero(m.rows(), m.cols());
  bool hit = false;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (std::abs(eig.eigenvalues(k) - lambda) <= match_tol) {
      proj += eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
      hit = true;
    }
  }
  if (matched) *matched = hit;
  return proj;
}

Matrix range_basis(const Matrix& projector, const Tolerance& tol) {
  Tolerance t = tol;
  EigenDecomposition eig = hermitian_eig(projector, t);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (eig.eigenvalues(k) > 0.5) ++rank;
  }
  Matrix basis(projector.rows(), rank);
  Eigen::Index c = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (eig.eigenvalues(k) > 0.5) basis.col(c++) = eig.eigenvectors.col(k);
  }
  return basis;
}

}  // namespace clh
