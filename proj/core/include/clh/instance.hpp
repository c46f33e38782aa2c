#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clh/lattice.hpp"
#include "clh/linalg.hpp"
#include "clh/operator.hpp"

namespace clh {

// One local Hermitian term. `support` lists the sites it acts on in tensor
// order; `factors` is present iff the term is stored factorized, in which
// case matrix = factors[0] x factors[1] x ... and a zero term is stored as a
// tensor of zero factors.
struct Term {
  int id = 0;
  std::vector<int> support;
  Matrix matrix;
  std::optional<std::vector<Matrix>> factors;

  Eigen::Index dim() const { return matrix.rows(); }
  bool acts_on(int site) const;
  // Position of `site` inside `support`, or -1.
  int leg_of(int site) const;
};

struct CommuteReport {
  double max_commutator_norm = 0;
  int worst_a = -1, worst_b = -1;
  bool pass = true;
};

// A 2D commuting local Hamiltonian instance. Immutable in spirit: every
// pipeline operation returns a fresh instance.
struct Instance {
  Lattice2D lattice;
  std::vector<Eigen::Index> qudit_dims;  // indexed by site id
  std::vector<Term> terms;
  Tolerance tol;

  Eigen::Index dim_of(int site) const { return qudit_dims.at(size_t(site)); }
  std::int64_t global_dim() const;
  const Term& term_by_id(int id) const;

  // Terms acting on `site` (ids into `terms` vector order).
  std::vector<int> terms_on_site(int site) const;

  // Structural + numerical validation; throws ValidationError/NotHermitian.
  // `require_projections` additionally demands every term be a projection.
  void validate(bool require_projections = false) const;
};

// Max pairwise commutator norm over overlapping term pairs, embedded on the
// joint support. Report only, never throws on failure.
CommuteReport check_commuting(const Instance& inst);

// Embed `m` (acting on `from`) into the ordered site list `to` (identity
// padding). Every site of `from` must appear in `to`.
Matrix embed(const Matrix& m, const std::vector<int>& from,
             const std::vector<int>& to, const std::vector<Eigen::Index>& to_dims);

// Embed a single-site operator into a term's support space.
Matrix embed_site_op(const Matrix& site_op, int site, const Term& term,
                     const Instance& inst);

// Ordered union of two supports (first's order, then new sites of second).
std::vector<int> support_union(const std::vector<int>& a, const std::vector<int>& b);

std::vector<int> shared_sites(const Term& a, const Term& b);

// Dimensions vector aligned with an ordered site list.
std::vector<Eigen::Index> dims_for(const Instance& inst, const std::vector<int>& sites);

}  // namespace clh
