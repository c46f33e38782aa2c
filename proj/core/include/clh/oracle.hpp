#pragma once

#include <optional>

#include "clh/instance.hpp"
#include "clh/witness.hpp"

namespace clh {

struct DenseHamiltonian {
  Matrix matrix;
  std::vector<Eigen::Index> site_dims;
};

// Embed every term with identity padding on the full site list and sum.
DenseHamiltonian assemble(const Instance& inst);

double ground_energy(const DenseHamiltonian& h, const Tolerance& tol);

// Number of eigenvalues <= eps_rank * ||H||; requires H PSD.
Eigen::Index kernel_dim(const DenseHamiltonian& h, const Tolerance& tol);

// True iff the commuting-projection instance has a nontrivial common kernel.
bool has_frustration_free_state(const Instance& inst);

struct ProveOptions {
  long budget = 200000;       // eigenvalue-vector candidates and search nodes
  bool factorized = false;    // route through the subspace tree
};

// Desk-scale prover: eigenvalue search, reduction to fixpoint, then removal
// witness enumeration (or the factorized tree), emitting a witness the
// verifier accepts iff lambda(H) <= a. nullopt = no witness (Unsat).
std::optional<Witness> prove(const Instance& inst, double a,
                             const ProveOptions& options = {});

}  // namespace clh
