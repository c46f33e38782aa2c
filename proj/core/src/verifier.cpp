#include "clh/verifier.hpp"

#include "clh/factorized.hpp"
#include "clh/linalg.hpp"
#include "clh/projection.hpp"
#include "clh/removal.hpp"

namespace clh {

double positivity_threshold(const Instance& inst) {
  double dims = 1;
  for (auto d : inst.qudit_dims) dims *= double(d);
  return 1e-8 * dims;
}

namespace {

VerifyResult verify_factorized(const Instance& inst, const Witness& witness,
                               double a) {
  const LeafStep* leaf = nullptr;
  for (const WitnessStep& step : witness.steps) {
    if (const auto* lf = std::get_if<LeafStep>(&step)) leaf = lf;
  }
  if (!leaf) {
    fail(ErrorKind::InvalidStep, "factorized witness needs a leaf step", 0);
  }
  if (leaf->site_projectors.size() != inst.qudit_dims.size()) {
    fail(ErrorKind::InvalidStep, "leaf step must cover every site", 0);
  }

  // Every term must keep every site subspace invariant.
  Instance restricted = inst;
  std::vector<Matrix> isometries;
  for (size_t q = 0; q < inst.qudit_dims.size(); ++q) {
    const Matrix& p = leaf->site_projectors[q];
    Eigen::Index d = inst.dim_of(int(q));
    if (p.rows() != d || p.cols() != d) {
      fail(ErrorKind::InvalidStep, "leaf projector dimension mismatch", long(q));
    }
    if (hermiticity_defect(p) > 1e-8 || (p * p - p).norm() > 1e-8) {
      fail(ErrorKind::InvalidStep,
           "leaf projector is not an orthogonal projection at site " +
               std::to_string(q),
           long(q));
    }
    for (const Term& t : inst.terms) {
      int leg = t.leg_of(int(q));
      if (leg < 0) continue;
      const Matrix& f = (*t.factors)[size_t(leg)];
      if (commutator_norm(f, p) > inst.tol.eps_eq * std::max(1.0, f.norm()) * 10) {
        fail(ErrorKind::InvalidStep,
             "term " + std::to_string(t.id) +
                 " does not keep the leaf subspace at site " + std::to_string(q),
             t.id);
      }
    }
    isometries.push_back(range_basis(p, inst.tol));
  }
  for (size_t q = 0; q < inst.qudit_dims.size(); ++q) {
    const Matrix& v = isometries[q];
    restricted.qudit_dims[q] = v.cols();
    for (Term& t : restricted.terms) {
      int leg = t.leg_of(int(q));
      if (leg < 0) continue;
      (*t.factors)[size_t(leg)] = v.adjoint() * (*t.factors)[size_t(leg)] * v;
    }
  }
  for (Term& t : restricted.terms) {
    bool zero = false;
    for (const Matrix& f : *t.factors) {
      zero = zero || f.norm() <= restricted.tol.eps_rank;
    }
    if (zero) {
      for (Matrix& f : *t.factors) f = Matrix::Zero(f.rows(), f.cols());
    }
    Matrix prod = Matrix::Identity(1, 1);
    for (const Matrix& f : *t.factors) prod = kron(prod, f);
    t.matrix = std::move(prod);
  }
  restricted.validate();

  PauliForm form = to_pauli_form(restricted);

  // Cross-check prover-supplied words when present.
  for (const PauliFormTerm& ft : form.terms) {
    auto it = leaf->pauli_words.find(ft.term_id);
    if (it != leaf->pauli_words.end() && !ft.dropped_zero) {
      StabWord w = ft.word;
      w.sign = ft.coeff >= 0 ? 1 : -1;
      if (w.to_string() != it->second) {
        fail(ErrorKind::InvalidStep,
             "witness word mismatch for term " + std::to_string(ft.term_id),
             ft.term_id);
      }
    }
  }

  VerifyResult res;
  res.accept = stabilizer_verify(form, a, leaf->eigenvalues);
  double energy = 0;
  for (const PauliFormTerm& ft : form.terms) {
    auto it = leaf->eigenvalues.find(ft.term_id);
    if (it != leaf->eigenvalues.end()) energy += ft.coeff * it->second;
  }
  res.value = energy;
  res.reason = res.accept ? "stabilizer witness accepted"
                          : "stabilizer check rejected the witness";
  return res;
}

}  // namespace

VerifyResult verify(const Instance& inst, const Witness& witness, double a,
                    bool factorized) {
  inst.validate();
  if (factorized) return verify_factorized(inst, witness, a);

  // Leading projection step (general Hermitian instances).
  Instance current = inst;
  size_t next = 0;
  if (next < witness.steps.size() &&
      std::holds_alternative<ProjectStep>(witness.steps[next])) {
    const auto& p = std::get<ProjectStep>(witness.steps[next]);
    ProjectionWitness pw;
    pw.lambda = p.lambdas;
    ProjectionReduction red = projection_reduce(current, pw);
    if (red.sum_lambda > a + 1e-9) {
      return {false, "sum of claimed eigenvalues exceeds the threshold",
              red.sum_lambda};
    }
    current = std::move(red.instance);
    ++next;
  } else {
    current.validate(/*require_projections=*/true);
    if (a < -1e-9) {
      return {false, "projection instances have nonnegative energy", 0};
    }
  }

  // Reduction steps.
  std::vector<ReductionStep> reduce_steps;
  for (; next < witness.steps.size(); ++next) {
    const auto* r = std::get_if<ReduceStep>(&witness.steps[next]);
    if (!r) break;
    ReductionStep step;
    step.cert.site = r->site;
    step.cert.projectors = r->projectors;
    step.cert.exempt_term = r->exempt_term;
    step.chosen_block = r->chosen_block;
    reduce_steps.push_back(std::move(step));
  }
  ReductionTrace trace = reduce_to_fixpoint(current, reduce_steps);
  current = trace.final_instance;

  // Removal choices.
  TagMap tags = tag_sites(current);
  std::map<int, R1Choice> choices;
  for (; next < witness.steps.size(); ++next) {
    if (const auto* rm = std::get_if<RemoveStep>(&witness.steps[next])) {
      auto it = tags.find(rm->site);
      if (it == tags.end() || it->second.kind != RemovKind::R1) {
        fail(ErrorKind::InvalidStep,
             "remove step names a site that is not removable: " +
                 std::to_string(rm->site),
             long(next));
      }
      choices[rm->site] = {rm->block_i, rm->block_j};
    } else if (const auto* sp = std::get_if<SplitStep>(&witness.steps[next])) {
      auto it = tags.find(sp->site);
      if (it == tags.end() || it->second.kind != RemovKind::R2) {
        fail(ErrorKind::InvalidStep,
             "split step names a site without a tensor split: " +
                 std::to_string(sp->site),
             long(next));
      }
    } else {
      fail(ErrorKind::InvalidStep, "unexpected witness step", long(next));
    }
  }

  double value = eliminate_and_contract(current, tags, choices);
  double threshold = positivity_threshold(current);
  VerifyResult res;
  res.value = value;
  res.accept = value > threshold;
  res.reason = res.accept
                   ? "positive trace summand"
                   : "selected summand is not positive (value " +
                         std::to_string(value) + " <= threshold " +
                         std::to_string(threshold) + ")";
  return res;
}

}  // namespace clh
