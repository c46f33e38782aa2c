#pragma once

#include <set>
#include <utility>
#include <vector>

#include "clh/operator.hpp"

namespace clh {

struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, column k <-> eigenvalues[k]
};

// Hermitian eigendecomposition with deterministic output. Degenerate
// eigenspaces are re-based by projecting the standard basis vectors in
// ascending index order (Gram-Schmidt), then each column's global phase is
// fixed so its largest-magnitude entry is real positive.
EigenDecomposition hermitian_eig(const Operator& m, const Tolerance& tol);
EigenDecomposition hermitian_eig(const Matrix& m, const Tolerance& tol);

// Kronecker product; qudit supports concatenate left-to-right.
Operator tensor(const Operator& a, const Operator& b);
Matrix kron(const Matrix& a, const Matrix& b);

// Partial trace over the qudits of `m` not listed in `keep`. `dims` holds the
// per-qudit dimension aligned with m.qudit_support(). The result's support is
// the kept qudits in their original order.
Operator partial_trace(const Operator& m, const std::set<int>& keep,
                       const std::vector<Eigen::Index>& dims);

// Projection onto span of eigenvectors with |lambda| <= eps_rank * ||m||.
// Requires m Hermitian and positive semidefinite within the same cutoff.
Operator kernel_projector(const Operator& m, const Tolerance& tol);
Matrix kernel_projector(const Matrix& m, const Tolerance& tol);

// Projection onto the eigenspace of `m` nearest `lambda`; the match must be
// within `match_tol`, else returns nullopt-like empty matrix (caller checks).
Matrix eigenspace_projector(const Matrix& m, double lambda, double match_tol,
                            const Tolerance& tol, bool* matched);

// Orthonormal basis of the range of a Hermitian PSD projector-like matrix,
// deterministic (standard-basis Gram-Schmidt + phase fix).
Matrix range_basis(const Matrix& projector, const Tolerance& tol);

// Deterministic orthonormalization of arbitrary columns; columns whose
// residual norm falls below `cut` are dropped.
Matrix gram_schmidt(const Matrix& columns, double cut);

}  // namespace clh
