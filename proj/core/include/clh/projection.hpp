#pragma once

#include <map>

#include "clh/instance.hpp"

namespace clh {

// Per-term eigenvalue claimed by the prover; each value must match an
// eigenvalue of its term within eps_rank * ||term||.
struct ProjectionWitness {
  std::map<int, double> lambda;  // term id -> lambda_p
};

struct ProjectionReduction {
  Instance instance;   // terms replaced by p_hat = I - Pi_{p,lambda_p}
  double sum_lambda = 0;  // for the verifier threshold test sum <= a
};

// Appendix-style reduction from Hermitian terms to commuting projections.
ProjectionReduction projection_reduce(const Instance& inst,
                                      const ProjectionWitness& witness);

}  // namespace clh
