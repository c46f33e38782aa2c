#pragma once

#include <random>

#include "clh/instance.hpp"

namespace clh::testing {

// Deterministic uniform/normal helpers (pinned bit behavior).
double uniform01(std::mt19937_64& rng);
double normal(std::mt19937_64& rng);
int uniform_int(std::mt19937_64& rng, int lo, int hi);  // inclusive

Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng);
Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng);

// Toric code on the 2x2 torus (edges carrier, 8 qubits): projected terms
// (I - X^{x4})/2 on stars and (I - Z^{x4})/2 on plaquettes.
Instance toric_code_2x2();

// Raw (unprojected) toric code: terms X^{x4} and Z^{x4}.
Instance toric_code_2x2_raw();

// Random diagonal 0/1 projections on every plaquette of an open grid,
// conjugated by one random product unitary. Always commuting.
Instance conjugated_classical(int rows, int cols, std::vector<Eigen::Index> dims,
                              std::uint64_t seed, double zero_bias = 0.5);

// Commuting chain/cycle built from maximally-entangled-basis projectors on
// the shared edges: interior sites carry full induced algebras.
Instance bell_chain(int plaquettes, Eigen::Index d, bool cycle, std::uint64_t seed);

// Instance with a planted semi-separable site (exempt term breaks the
// decomposition). Returns the planted site through `site_out`.
Instance planted_semi_separable(std::uint64_t seed, int* site_out);

// Commuting factorized instance from single-qudit Pauli-type patterns on a
// strip, optionally conjugated per site and with a planted block-diagonal
// (separable) site.
Instance factorized_pattern(int plaquettes, std::uint64_t seed, bool conjugate,
                            bool plant_separable);

// Factorized instance containing a singular pair (zero product at one shared
// site, non-pm-commuting factors at the other).
Instance factorized_singular(std::uint64_t seed);

}  // namespace clh::testing
