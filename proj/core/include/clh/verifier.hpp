#pragma once

#include "clh/instance.hpp"
#include "clh/witness.hpp"

namespace clh {

struct VerifyResult {
  bool accept = false;
  std::string reason;
  double value = 0;  // contraction value or leaf energy bound
};

// The NP verifier: replays the witness against the instance, never
// assembling the global Hamiltonian. Pipeline: eigenvalue projection,
// reduction to fixpoint, site tagging, elimination and 1D contraction;
// with `factorized` set, branch restriction and stabilizer verification.
// Structural failures throw; a sound witness that merely fails the final
// positivity/energy check returns accept = false.
VerifyResult verify(const Instance& inst, const Witness& witness, double a,
                    bool factorized);

// Scale-aware positivity threshold: 1e-8 times the product of site dims.
double positivity_threshold(const Instance& inst);

}  // namespace clh
