#pragma once

#include <map>
#include <optional>

#include "clh/instance.hpp"
#include "clh/pauli.hpp"

namespace clh {

enum class SiteRelation { Dash, Zero, Cross };

// Per-shared-site factor relations of a commuting factorized pair.
struct CommuteMode {
  int term_a = -1, term_b = -1;
  std::map<int, SiteRelation> relations;
  bool regular = true;  // singular iff some site is Cross
};

CommuteMode commute_mode(const Term& a, const Term& b, const Instance& inst);

struct SeparableSplit {
  int site = -1;
  std::vector<Matrix> projectors;
};

// Separable-site search for factorized instances: kernel splits from
// singular pairs, the two-algebra split of the crossed pattern, then the
// generic scan (algebra of all factors not full). First hit in site order.
std::optional<SeparableSplit> find_separable_factorized(const Instance& inst);

struct SitePauliBasis {
  int site = -1;
  int qubit_count = 0;
  Matrix unitary;  // U^q with U p~ U^dagger a signed Pauli word
};

struct PauliFormTerm {
  int term_id = -1;
  double coeff = 0;  // real; term acts as coeff * sigma(word) on the leaf
  StabWord word;
  bool dropped_zero = false;
};

struct PauliForm {
  std::vector<SitePauliBasis> sites;   // ordered by site id
  std::vector<int> qubit_offset;       // site id -> first qubit (or -1)
  int total_qubits = 0;
  std::vector<PauliFormTerm> terms;
};

// Requires: factorized, commuting, no separable sites, all modes regular.
PauliForm to_pauli_form(const Instance& inst);

struct TreeLeaf {
  std::vector<Matrix> site_isometries;  // per site: original dim x leaf dim
  Instance restricted;
  PauliForm form;
};

struct SimpleSubspaceTree {
  std::vector<TreeLeaf> leaves;
};

SimpleSubspaceTree build_subspace_tree(const Instance& inst);

// Verifier: checks the eigenvalue witness (lambda in {-1,+1} per term),
// sum_h coeff_h lambda_h <= a, and that the signed words exclude -I.
bool stabilizer_verify(const PauliForm& form, double a,
                       const std::map<int, int>& lambdas);

// Prover: minimum energy over consistent sign assignments.
double leaf_ground_energy(const PauliForm& form, std::map<int, int>* lambdas);

}  // namespace clh
