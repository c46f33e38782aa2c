#pragma once

#include <optional>

#include "clh/instance.hpp"

namespace clh {

// Finite-dimensional C*-algebra given by an orthonormal spanning set under
// the Hilbert-Schmidt inner product tr(a^dagger b).
struct MatrixAlgebra {
  Eigen::Index dim = 0;
  std::vector<Matrix> basis;
  bool contains_identity = true;

  Eigen::Index span_dim() const { return Eigen::Index(basis.size()); }
  bool is_trivial() const { return basis.size() <= 1; }
  bool is_full() const { return Eigen::Index(basis.size()) == dim * dim; }

  // Hilbert-Schmidt projection of x onto the span.
  Matrix project(const Matrix& x) const;
  bool contains(const Matrix& x, double eps) const;
};

struct Block {
  Matrix projector;       // Pi_i on the ambient space
  Eigen::Index d1 = 1;    // the algebra acts as L(d1) x I(d2) on this block
  Eigen::Index d2 = 1;
  Matrix block_unitary;   // (d1*d2) x dim isometry; rows indexed (a, beta)
  Eigen::Index block_dim() const { return d1 * d2; }
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  std::vector<Eigen::Index> profile() const;  // sorted block dims
  bool trivial() const { return blocks.size() <= 1; }
};

// How two commuting terms decouple on their single shared qudit.
struct CommuteWay {
  std::vector<Eigen::Index> profile;
  // Names the trivially-acting term (0 = first, 1 = second) for single-block
  // cases where one side must act trivially (prime-dimension full blocks).
  std::optional<int> which_trivial;
  BlockDecomposition decomposition;
  int better_source = 0;  // whose induced algebra produced the decomposition
};

// Smallest adjoint-closed algebra containing `gens` and the identity.
MatrixAlgebra generate_algebra(const std::vector<Matrix>& gens, Eigen::Index dim,
                               const Tolerance& tol);

// Induced algebra of `m` on leg `leg` of the tensor factorization `dims`:
// generated by the coefficients h_ij of m = sum_ij h_ij x |i><j|.
MatrixAlgebra induced_algebra_on_leg(const Matrix& m,
                                     const std::vector<Eigen::Index>& dims,
                                     size_t leg, const Tolerance& tol);
MatrixAlgebra induced_algebra(const Term& term, int site, const Instance& inst);

// Center Z(A) = {a in A : [a, A] = 0}; always contains the identity.
MatrixAlgebra center(const MatrixAlgebra& alg, const Tolerance& tol);

// Wedderburn decomposition: minimal central projectors from the eigenspaces
// of a seeded-random Hermitian central element, block unitaries from a
// minimal projection of the restricted algebra. Deterministic given seed;
// re-seeds (seed + attempt) up to 8 times before NumericalDegeneracy.
BlockDecomposition structure_decompose(const MatrixAlgebra& alg, const Tolerance& tol);

CommuteWay classify_way(const Term& a, const Term& b, int shared_site,
                        const Instance& inst);

// Reorder the tensor legs of a square matrix; entry k of `order` names the
// source leg that becomes leg k.
Matrix permute_legs(const Matrix& m, const std::vector<Eigen::Index>& dims,
                    const std::vector<size_t>& order);

}  // namespace clh
