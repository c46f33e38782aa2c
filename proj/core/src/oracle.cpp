#include "clh/oracle.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "clh/factorized.hpp"
#include "clh/linalg.hpp"
#include "clh/projection.hpp"
#include "clh/removal.hpp"
#include "clh/verifier.hpp"

namespace clh {

DenseHamiltonian assemble(const Instance& inst) {
  std::int64_t total = inst.global_dim();
  if (total > kDimCap) {
    fail(ErrorKind::OverflowDim, "global dimension exceeds the dense cap");
  }
  std::vector<int> all_sites(inst.qudit_dims.size());
  for (size_t k = 0; k < all_sites.size(); ++k) all_sites[k] = int(k);
  std::vector<Eigen::Index> dims = inst.qudit_dims;

  DenseHamiltonian h;
  h.site_dims = dims;
  h.matrix = Matrix::Zero(total, total);
  for (const Term& t : inst.terms) {
    h.matrix += embed(t.matrix, t.support, all_sites, dims);
  }
  return h;
}

double ground_energy(const DenseHamiltonian& h, const Tolerance& tol) {
  if (h.matrix.rows() == 0) return 0;
  EigenDecomposition eig = hermitian_eig(h.matrix, tol);
  return eig.eigenvalues(0);
}

Eigen::Index kernel_dim(const DenseHamiltonian& h, const Tolerance& tol) {
  if (h.matrix.rows() == 0) return 0;
  EigenDecomposition eig = hermitian_eig(h.matrix, tol);
  Eigen::Index n = eig.eigenvalues.size();
  double scale = std::max(std::abs(eig.eigenvalues(0)),
                          std::abs(eig.eigenvalues(n - 1)));
  double cut = tol.eps_rank * std::max(scale, 1.0);
  if (eig.eigenvalues(0) < -cut) {
    fail(ErrorKind::NotPSD, "kernel_dim requires a PSD Hamiltonian");
  }
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(eig.eigenvalues(k)) <= cut) ++count;
  }
  return count;
}

bool has_frustration_free_state(const Instance& inst) {
  DenseHamiltonian h = assemble(inst);
  return kernel_dim(h, inst.tol) > 0;
}

namespace {

// Distinct eigenvalues of a Hermitian matrix, clustered.
std::vector<double> distinct_eigenvalues(const Matrix& m, const Tolerance& tol) {
  EigenDecomposition eig = hermitian_eig(m, tol);
  std::vector<double> out;
  double gap = 1e-9 * std::max(1.0, m.norm());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (out.empty() || eig.eigenvalues(k) - out.back() > gap) {
      out.push_back(eig.eigenvalues(k));
    }
  }
  return out;
}

// Exhaustive R1 block-pair search for a positive summand; returns the
// choices and value through the out-parameters.
bool removal_witness_search(const Instance& fixpoint, TagMap& tags,
                            std::map<int, R1Choice>& best, double& value,
                            long& budget) {
  tags = tag_sites(fixpoint);
  std::vector<int> r1_sites;
  for (const auto& [site, tag] : tags) {
    if (tag.kind == RemovKind::R1) r1_sites.push_back(site);
  }
  std::map<int, R1Choice> choice;
  double threshold = positivity_threshold(fixpoint);

  std::function<bool(size_t)> dfs = [&](size_t idx) -> bool {
    if (--budget < 0) fail(ErrorKind::Budget, "removal witness budget exhausted");
    if (idx == r1_sites.size()) {
      double v = eliminate_and_contract(fixpoint, tags, choice);
      if (v > threshold) {
        best = choice;
        value = v;
        return true;
      }
      return false;
    }
    const RemovalTag& tag = tags.at(r1_sites[idx]);
    for (size_t i = 0; i < tag.black_projectors.size(); ++i) {
      for (size_t j = 0; j < tag.white_projectors.size(); ++j) {
        if (tag.rank_table[i][j] > 1) continue;
        if (tag.rank_table[i][j] == 0) continue;  // summand vanishes
        choice[r1_sites[idx]] = {int(i), int(j)};
        if (dfs(idx + 1)) return true;
      }
    }
    choice.erase(r1_sites[idx]);
    return false;
  };
  return dfs(0);
}

std::optional<Witness> prove_projection(const Instance& proj_instance,
                                        const ProjectStep* project_step,
                                        long& budget) {
  TagMap tags;
  std::map<int, R1Choice> choices;
  double value = 0;
  std::vector<ReductionStep> steps_out;

  auto leaf_accepts = [&](const Instance& leaf) -> bool {
    try {
      return removal_witness_search(leaf, tags, choices, value, budget);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Budget) throw;
      return false;
    }
  };

  auto trace = reduce_to_fixpoint_prover(proj_instance, leaf_accepts, budget);
  if (!trace) return std::nullopt;

  Witness w;
  if (project_step) w.steps.push_back(*project_step);
  for (const ReductionStep& st : trace->steps) {
    ReduceStep rs;
    rs.site = st.cert.site;
    rs.projectors = st.cert.projectors;
    rs.exempt_term = st.cert.exempt_term;
    rs.chosen_block = st.chosen_block;
    w.steps.push_back(std::move(rs));
  }
  for (const auto& [site, choice] : choices) {
    RemoveStep rm;
    rm.site = site;
    rm.block_i = choice.block_black;
    rm.block_j = choice.block_white;
    w.steps.push_back(rm);
  }
  return w;
}

std::optional<Witness> prove_factorized(const Instance& inst, double a) {
  SimpleSubspaceTree tree = build_subspace_tree(inst);
  const TreeLeaf* best_leaf = nullptr;
  double best_energy = 0;
  std::map<int, int> best_lambdas;
  for (const TreeLeaf& leaf : tree.leaves) {
    std::map<int, int> lambdas;
    double e = leaf_ground_energy(leaf.form, &lambdas);
    if (!best_leaf || e < best_energy) {
      best_leaf = &leaf;
      best_energy = e;
      best_lambdas = std::move(lambdas);
    }
  }
  if (!best_leaf || best_energy > a + 1e-9) return std::nullopt;

  LeafStep leaf;
  for (size_t q = 0; q < best_leaf->site_isometries.size(); ++q) {
    const Matrix& v = best_leaf->site_isometries[q];
    leaf.site_projectors.push_back(v * v.adjoint());
  }
  for (const SitePauliBasis& b : best_leaf->form.sites) {
    leaf.site_unitaries.push_back(b.unitary);
  }
  for (const PauliFormTerm& ft : best_leaf->form.terms) {
    if (ft.dropped_zero) continue;
    StabWord w = ft.word;
    w.sign = ft.coeff >= 0 ? 1 : -1;
    leaf.pauli_words[ft.term_id] = w.to_string();
  }
  leaf.eigenvalues = best_lambdas;
  Witness w;
  w.steps.push_back(std::move(leaf));
  return w;
}

}  // namespace

std::optional<Witness> prove(const Instance& inst, double a,
                             const ProveOptions& options) {
  inst.validate();
  if (options.factorized) return prove_factorized(inst, a);

  long budget = options.budget;

  // Per-term eigenvalue lists, ascending.
  std::vector<std::vector<double>> spectra;
  for (const Term& t : inst.terms) {
    spectra.push_back(distinct_eigenvalues(t.matrix, inst.tol));
  }

  // Best-first enumeration of eigenvalue vectors by total sum.
  size_t n = spectra.size();
  using State = std::vector<size_t>;
  auto sum_of = [&](const State& s) {
    double sum = 0;
    for (size_t k = 0; k < n; ++k) sum += spectra[k][s[k]];
    return sum;
  };
  std::priority_queue<std::pair<double, State>,
                      std::vector<std::pair<double, State>>, std::greater<>>
      queue;
  std::set<State> seen;
  State first(n, 0);
  queue.push({sum_of(first), first});
  seen.insert(first);

  while (!queue.empty()) {
    if (--budget < 0) fail(ErrorKind::Budget, "eigenvalue search budget exhausted");
    auto [sum, state] = queue.top();
    queue.pop();
    if (sum > a + 1e-9) break;  // monotone: no later state can pass

    ProjectStep step;
    for (size_t k = 0; k < n; ++k) {
      step.lambdas[inst.terms[k].id] = spectra[k][state[k]];
    }
    ProjectionWitness pw;
    pw.lambda = step.lambdas;
    ProjectionReduction red = projection_reduce(inst, pw);
    if (auto w = prove_projection(red.instance, &step, budget)) return w;

    for (size_t k = 0; k < n; ++k) {
      if (state[k] + 1 < spectra[k].size()) {
        State nxt = state;
        ++nxt[k];
        if (seen.insert(nxt).second) queue.push({sum_of(nxt), nxt});
      }
    }
  }
  return std::nullopt;
}

}  // namespace clh
