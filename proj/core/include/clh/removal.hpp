#pragma once

#include <map>

#include "clh/algebra.hpp"
#include "clh/instance.hpp"

namespace clh {

enum class RemovKind { R1, R2, Full, TrivialDim1 };

// Classification of one site for the trace evaluation. R1 carries the two
// pair decompositions (by checkerboard color) and the rank table of their
// products; R2 carries the tensor split and per-term trace divisors.
struct RemovalTag {
  int site = -1;
  RemovKind kind = RemovKind::TrivialDim1;

  std::vector<Matrix> black_projectors;  // R1; {I} when the pair is absent
  std::vector<Matrix> white_projectors;
  std::vector<std::vector<int>> rank_table;  // rank(P_i P'_j)

  Matrix split_isometry;  // R2: (d1*d2) x d
  Eigen::Index split_d1 = 1, split_d2 = 1;
  std::map<int, double> divisors;  // R2: term id -> trace divisor
  double free_factor = 1.0;        // R2: dim factors of unoccupied split sides
};

using TagMap = std::map<int, RemovalTag>;

// Per-site removability per the no-semi-separable case analysis. Throws
// IllegalPattern when a site fits neither R1/R2/Full (for qutrits: the
// (1,2)x(3) and (1,2)x(1,2) patterns).
TagMap tag_sites(const Instance& inst);

// Checkerboard color of a term (0 = black, 1 = white): the color of the
// first lattice face containing its support.
int term_color(const Instance& inst, const Term& t);

// One surviving node of the 1D structure: the term's operator with only its
// full-site legs remaining.
struct ChainNode {
  int term_id = -1;
  Matrix mat;
  std::vector<int> legs;
  std::vector<Eigen::Index> leg_dims;
};

struct ChainGraph {
  std::vector<ChainNode> nodes;
  double scalar = 1.0;  // channel values and free-site dimension factors
};

// Contract the disjoint paths/cycles; every node must have <= 2 neighbours
// (DegreeViolation otherwise). Returns scalar * product of component traces.
double contract_chains(const ChainGraph& graph);

// Block-pair choice per R1 site.
struct R1Choice {
  int block_black = 0;
  int block_white = 0;
};

// Evaluate one summand of tr prod (I - p): black terms left, white terms
// right, every R1 site replaced through its rank-<=1 block overlap, R2 and
// dim-1 sites traced out by closed-form channels, the residual chain graph
// contracted. The result is >= 0 up to numerical noise (values within 1e-9
// of zero are clamped).
double eliminate_and_contract(const Instance& inst, const TagMap& tags,
                              const std::map<int, R1Choice>& witness);

// Helper shared with the verifier: builds the chain graph without
// contracting (exposed for tests).
ChainGraph build_chain_graph(const Instance& inst, const TagMap& tags,
                             const std::map<int, R1Choice>& witness);

}  // namespace clh
