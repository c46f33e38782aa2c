#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clh/reduction.hpp"

namespace clh {

// clh-witness/v1 steps.

struct ProjectStep {
  std::map<int, double> lambdas;  // term id -> claimed eigenvalue
};

struct ReduceStep {
  int site = -1;
  std::vector<Matrix> projectors;
  std::optional<int> exempt_term;
  int chosen_block = 0;
};

struct RemoveStep {
  int site = -1;
  int block_i = 0;  // black-pair block
  int block_j = 0;  // white-pair block
};

struct SplitStep {
  int site = -1;
};

struct LeafStep {
  std::vector<Matrix> site_projectors;  // per site id, on the original space
  std::vector<Matrix> site_unitaries;   // per site id, on the leaf space
  std::map<int, std::string> pauli_words;
  std::map<int, int> eigenvalues;  // term id -> +/-1
};

using WitnessStep =
    std::variant<ProjectStep, ReduceStep, RemoveStep, SplitStep, LeafStep>;

struct Witness {
  std::vector<WitnessStep> steps;
};

Witness load_witness(const std::string& path);
Witness witness_from_json_text(const std::string& text);
void save_witness(const Witness& w, const std::string& path);
std::string witness_to_json_text(const Witness& w);

}  // namespace clh
