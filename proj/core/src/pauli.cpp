#include "clh/pauli.hpp"

#include <algorithm>

#include "clh/errors.hpp"
#include "clh/linalg.hpp"

namespace clh {

namespace {

int dot(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  int s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] & b[k];
  return s;
}

int weight(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  return dot(a, b);
}

}  // namespace

bool StabWord::is_identity_word() const {
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k] || z[k]) return false;
  }
  return true;
}

std::string StabWord::to_string() const {
  std::string out(sign >= 0 ? "+" : "-");
  for (size_t k = 0; k < x.size(); ++k) {
    out += x[k] ? (z[k] ? 'Y' : 'X') : (z[k] ? 'Z' : 'I');
  }
  return out;
}

int symplectic_parity(const StabWord& a, const StabWord& b) {
  return (dot(a.x, b.z) + dot(a.z, b.x)) % 2;
}

StabWord multiply(const StabWord& a, const StabWord& b) {
  if (a.qubits() != b.qubits()) {
    fail(ErrorKind::BadShape, "word length mismatch");
  }
  StabWord out;
  out.x.resize(a.qubits());
  out.z.resize(a.qubits());
  for (size_t k = 0; k < a.qubits(); ++k) {
    out.x[k] = a.x[k] ^ b.x[k];
    out.z[k] = a.z[k] ^ b.z[k];
  }
  // sigma(a) sigma(b) = i^(ma + mb - mab + 2 b_a.x_b) sigma(a^b)
  int t = weight(a.x, a.z) + weight(b.x, b.z) - weight(out.x, out.z) +
          2 * dot(a.z, b.x);
  t %= 4;
  if (t < 0) t += 4;
  if (t % 2 != 0) {
    fail(ErrorKind::NonCommutingWords, "product of words is not Hermitian");
  }
  out.sign = a.sign * b.sign * (t == 2 ? -1 : 1);
  return out;
}

Matrix word_matrix(const StabWord& w) {
  Matrix x2(2, 2), z2(2, 2), y2(2, 2), i2 = Matrix::Identity(2, 2);
  x2 << 0, 1, 1, 0;
  z2 << 1, 0, 0, -1;
  y2 << 0, Complex(0, -1), Complex(0, 1), 0;
  Matrix out = Matrix::Identity(1, 1);
  for (size_t k = 0; k < w.qubits(); ++k) {
    const Matrix& letter = w.x[k] ? (w.z[k] ? y2 : x2) : (w.z[k] ? z2 : i2);
    out = kron(out, letter);
  }
  return double(w.sign) * out;
}

namespace {

// Reduce `w` against the basis rows (echelon over GF(2) with pivot list),
// multiplying signs. Returns the reduced word.
StabWord reduce_against(StabWord w, const std::vector<StabWord>& basis,
                        const std::vector<size_t>& pivots) {
  for (size_t r = 0; r < basis.size(); ++r) {
    size_t p = pivots[r];
    std::uint8_t bit = p < w.qubits() ? w.x[p] : w.z[p - w.qubits()];
    if (bit) w = multiply(w, basis[r]);
  }
  return w;
}

size_t leading_bit(const StabWord& w) {
  for (size_t k = 0; k < w.qubits(); ++k) {
    if (w.x[k]) return k;
  }
  for (size_t k = 0; k < w.qubits(); ++k) {
    if (w.z[k]) return w.qubits() + k;
  }
  return 2 * w.qubits();
}

}  // namespace

bool group_excludes_minus_identity(std::vector<StabWord> generators) {
  std::vector<StabWord> basis;
  std::vector<size_t> pivots;
  for (StabWord w : generators) {
    StabWord r = reduce_against(std::move(w), basis, pivots);
    if (r.is_identity_word()) {
      if (r.sign < 0) return false;  // -I generated
      continue;
    }
    basis.push_back(r);
    pivots.push_back(leading_bit(r));
    // Keep echelon order by pivot.
    for (size_t k = basis.size(); k-- > 1;) {
      if (pivots[k] < pivots[k - 1]) {
        std::swap(pivots[k], pivots[k - 1]);
        std::swap(basis[k], basis[k - 1]);
      }
    }
  }
  return true;
}

double min_consistent_energy(const std::vector<StabWord>& words,
                             const std::vector<double>& coeffs,
                             std::vector<int>* best_lambdas) {
  if (words.size() != coeffs.size()) {
    fail(ErrorKind::BadShape, "coefficient count mismatch");
  }
  // Build an independent signed basis; record each word's expansion.
  std::vector<StabWord> basis;
  std::vector<size_t> pivots;
  // expansion[i]: subset of basis indices whose product (times recorded
  // sign) reproduces word i.
  std::vector<std::vector<size_t>> expansion(words.size());
  std::vector<int> residual_sign(words.size(), 1);

  for (size_t i = 0; i < words.size(); ++i) {
    StabWord w = words[i];
    w.sign = 1;  // minimize over the canonical Hermitian words
    StabWord r = w;
    std::vector<size_t> used;
    for (size_t step = 0; step < basis.size(); ++step) {
      // repeated reduction with bookkeeping
      size_t p = pivots[step];
      std::uint8_t bit = p < r.qubits() ? r.x[p] : r.z[p - r.qubits()];
      if (bit) {
        r = multiply(r, basis[step]);
        used.push_back(step);
      }
    }
    if (r.is_identity_word()) {
      expansion[i] = used;
      residual_sign[i] = r.sign;
    } else {
      // New independent element; add to basis, keeping echelon order would
      // invalidate recorded indices, so append without reordering and use
      // full scans for reduction.
      basis.push_back(r);
      pivots.push_back(leading_bit(r));
      used.push_back(basis.size() - 1);
      expansion[i] = used;
      residual_sign[i] = 1;
    }
  }

  size_t rank = basis.size();
  if (rank > 24) {
    fail(ErrorKind::Budget, "too many independent generators to enumerate");
  }

  double best = 0;
  std::vector<int> best_mu;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << rank); ++mask) {
    double energy = 0;
    for (size_t i = 0; i < words.size(); ++i) {
      int lambda = residual_sign[i] * words[i].sign;
      for (size_t b : expansion[i]) {
        if (mask & (std::uint64_t(1) << b)) lambda = -lambda;
      }
      energy += coeffs[i] * lambda;
    }
    if (mask == 0 || energy < best) {
      best = energy;
      if (best_lambdas) {
        best_mu.assign(words.size(), 1);
        for (size_t i = 0; i < words.size(); ++i) {
          int lambda = residual_sign[i] * words[i].sign;
          for (size_t b : expansion[i]) {
            if (mask & (std::uint64_t(1) << b)) lambda = -lambda;
          }
          best_mu[size_t(i)] = lambda;
        }
      }
    }
  }
  if (best_lambdas) *best_lambdas = best_mu;
  return best;
}

}  // namespace clh
