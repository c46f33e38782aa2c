#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clh/operator.hpp"

namespace clh {

// Signed Hermitian Pauli word: (-1)^sign * sigma(x, z) where
// sigma(x, z) = i^(x.z) X^x Z^z is the canonical Hermitian unit word.
struct StabWord {
  std::vector<std::uint8_t> x, z;
  int sign = 1;  // +1 or -1

  size_t qubits() const { return x.size(); }
  bool is_identity_word() const;
  std::string to_string() const;  // e.g. "+XIYZ"
};

// Symplectic product parity: 0 = commute, 1 = anticommute.
int symplectic_parity(const StabWord& a, const StabWord& b);

// Product of two commuting signed words (throws NonCommutingWords if the
// phase leaves {+1, -1}).
StabWord multiply(const StabWord& a, const StabWord& b);

// Dense matrix of the word on 2^n dimensions (test/desk use only).
Matrix word_matrix(const StabWord& w);

// Gaussian elimination over GF(2) with sign tracking. Returns false iff the
// generated group contains -I.
bool group_excludes_minus_identity(std::vector<StabWord> generators);

// Minimum of sum_h coeff[h] * lambda[h] over sign assignments lambda that
// are multiplicatively consistent with the words' group relations. The
// number of independent generators is capped (Budget error beyond 24).
double min_consistent_energy(const std::vector<StabWord>& words,
                             const std::vector<double>& coeffs,
                             std::vector<int>* best_lambdas);

}  // namespace clh
