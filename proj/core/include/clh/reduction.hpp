#pragma once

#include <functional>
#include <optional>

#include "clh/algebra.hpp"
#include "clh/instance.hpp"

namespace clh {

// Witness that a site admits a nontrivial decomposition kept invariant by
// every term except at most one (the exempt term).
struct SemiSepCertificate {
  int site = -1;
  std::vector<Matrix> projectors;  // on the site space; orthogonal, sum = I
  std::optional<int> exempt_term;  // term id allowed to break invariance
};

struct ReductionStep {
  SemiSepCertificate cert;
  int chosen_block = 0;
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
  Instance final_instance;
};

// Throws InvalidCertificate when the certificate fails its invariants
// against `inst` (shape, orthogonality, completeness, invariance).
void validate_certificate(const Instance& inst, const SemiSepCertificate& cert);

// Scans sites in ascending order. Per site, first checks for a fully
// separable decomposition (the algebra generated by all induced algebras is
// not full), then tries the decomposition induced by each term on the site,
// accepting when at most one other term breaks invariance.
std::optional<SemiSepCertificate> find_semi_separable(const Instance& inst);

// The block restriction: non-exempt terms are compressed to range(Pi_j);
// the exempt term is compressed and then rounded to its 1-eigenspace.
Instance reduced_hamiltonian(const Instance& inst, const SemiSepCertificate& cert,
                             int block);

// Verifier mode: replay the steps, validating each certificate. The final
// instance must have no semi-separable sites left.
ReductionTrace reduce_to_fixpoint(const Instance& inst,
                                  const std::vector<ReductionStep>& witness);

// Prover mode: depth-first over blocks (larger blocks first); a branch is
// accepted when `leaf_accepts` approves its fixpoint instance. `budget`
// bounds the number of reduction steps explored (Budget error on overrun).
std::optional<ReductionTrace> reduce_to_fixpoint_prover(
    const Instance& inst, const std::function<bool(const Instance&)>& leaf_accepts,
    long budget = 100000);

}  // namespace clh
