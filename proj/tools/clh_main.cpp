// clh: command-line workbench for 2D commuting local Hamiltonian instances.
//
// Subcommands:
//   validate   check a CLH-JSON instance (structure, Hermiticity, commutation)
//   analyze    per-site induced algebras, commuting ways and removability tags
//   reduce     run the semi-separable reduction to a fixpoint (prover search)
//   remove     tag sites and evaluate the selected trace summand
//   verify     replay a witness; exit 0 = accept, 1 = reject
//   prove      search for a witness that `verify` accepts
//   oracle     dense diagnostics: ground energy and kernel dimension
//   dualize    flip the lattice carrier (edges <-> vertices) on a torus
//   factorized-to-stabilizer   emit a stab/v1 description of a leaf
//
// Every run prints one machine-readable JSON object to stdout; diagnostics
// go to stderr. Exit codes: 0 accept/success, 1 reject, 2 error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "clh/algebra.hpp"
#include "clh/duality.hpp"
#include "clh/factorized.hpp"
#include "clh/instance_io.hpp"
#include "clh/oracle.hpp"
#include "clh/reduction.hpp"
#include "clh/removal.hpp"
#include "clh/verifier.hpp"

using nlohmann::json;
using namespace clh;

namespace {

struct CommonOpts {
  std::optional<double> tol_eq;
  std::optional<double> tol_rank;
  std::optional<std::uint64_t> seed;
  long budget = 200000;
  bool factorized = false;
};

void apply_overrides(Instance& inst, const CommonOpts& opts) {
  if (opts.tol_eq) inst.tol.eps_eq = *opts.tol_eq;
  if (opts.tol_rank) inst.tol.eps_rank = *opts.tol_rank;
  if (opts.seed) inst.tol.seed = *opts.seed;
  inst.tol.validate();
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--tol-eq", opts.tol_eq, "override eps_eq");
  cmd->add_option("--tol-rank", opts.tol_rank, "override eps_rank");
  cmd->add_option("--seed", opts.seed, "override the RNG seed");
  cmd->add_option("--budget", opts.budget, "search budget for prover modes");
}

int emit(const json& j, int code) {
  std::cout << j.dump() << std::endl;
  return code;
}

std::string kind_string(RemovKind k) {
  switch (k) {
    case RemovKind::R1: return "R1";
    case RemovKind::R2: return "R2";
    case RemovKind::Full: return "FULL";
    case RemovKind::TrivialDim1: return "TRIVIAL_DIM1";
  }
  return "?";
}

json profile_json(const std::vector<Eigen::Index>& profile) {
  json out = json::array();
  for (auto d : profile) out.push_back(d);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D commuting local Hamiltonian workbench"};
  app.require_subcommand(1);

  std::string instance_path, witness_path, output_path;
  double threshold_a = 0;
  CommonOpts opts;

  auto* validate_cmd = app.add_subcommand("validate", "validate an instance file");
  validate_cmd->add_option("instance", instance_path)->required();
  add_common(validate_cmd, opts);

  auto* analyze_cmd = app.add_subcommand("analyze", "per-site algebra analysis");
  analyze_cmd->add_option("instance", instance_path)->required();
  add_common(analyze_cmd, opts);

  auto* reduce_cmd = app.add_subcommand("reduce", "reduce to a fixpoint");
  reduce_cmd->add_option("instance", instance_path)->required();
  reduce_cmd->add_option("-o,--output", output_path, "write the reduced instance");
  add_common(reduce_cmd, opts);

  auto* remove_cmd = app.add_subcommand("remove", "tag sites and contract");
  remove_cmd->add_option("instance", instance_path)->required();
  remove_cmd->add_option("witness", witness_path, "witness with remove steps");
  add_common(remove_cmd, opts);

  auto* verify_cmd = app.add_subcommand("verify", "verify a witness");
  verify_cmd->add_option("instance", instance_path)->required();
  verify_cmd->add_option("witness", witness_path)->required();
  verify_cmd->add_option("-a,--threshold", threshold_a, "energy threshold a");
  verify_cmd->add_flag("--factorized", opts.factorized, "stabilizer pipeline");
  add_common(verify_cmd, opts);

  auto* prove_cmd = app.add_subcommand("prove", "search for a witness");
  prove_cmd->add_option("instance", instance_path)->required();
  prove_cmd->add_option("-a,--threshold", threshold_a, "energy threshold a");
  prove_cmd->add_option("-o,--output", output_path, "write the witness file");
  prove_cmd->add_flag("--factorized", opts.factorized, "stabilizer pipeline");
  add_common(prove_cmd, opts);

  auto* oracle_cmd = app.add_subcommand("oracle", "dense ground truth");
  oracle_cmd->add_option("instance", instance_path)->required();
  add_common(oracle_cmd, opts);

  auto* dualize_cmd = app.add_subcommand("dualize", "edge<->vertex duality");
  dualize_cmd->add_option("instance", instance_path)->required();
  dualize_cmd->add_option("-o,--output", output_path, "write the dual instance");
  add_common(dualize_cmd, opts);

  auto* stab_cmd = app.add_subcommand("factorized-to-stabilizer",
                                      "emit a stab/v1 description");
  stab_cmd->add_option("instance", instance_path)->required();
  stab_cmd->add_option("-o,--output", output_path, "write the stab/v1 file");
  add_common(stab_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    Instance inst = load_instance(instance_path);
    apply_overrides(inst, opts);

    if (*validate_cmd) {
      CommuteReport report = check_commuting(inst);
      json j{{"valid", true},
             {"max_commutator_norm", report.max_commutator_norm},
             {"sites", inst.qudit_dims.size()},
             {"terms", inst.terms.size()}};
      return emit(j, 0);
    }

    if (*analyze_cmd) {
      json sites = json::array();
      TagMap tags;
      std::string tag_error;
      try {
        tags = tag_sites(inst);
      } catch (const Error& e) {
        tag_error = e.what();
      }
      for (int q = 0; q < int(inst.qudit_dims.size()); ++q) {
        json js{{"site", q}, {"dim", inst.dim_of(q)}};
        json algebras = json::array();
        for (int k : inst.terms_on_site(q)) {
          const Term& t = inst.terms[size_t(k)];
          MatrixAlgebra alg = induced_algebra(t, q, inst);
          BlockDecomposition dec = structure_decompose(alg, inst.tol);
          algebras.push_back(json{{"term", t.id},
                                  {"span_dim", alg.span_dim()},
                                  {"full", alg.is_full()},
                                  {"profile", profile_json(dec.profile())}});
        }
        js["induced_algebras"] = std::move(algebras);
        if (auto it = tags.find(q); it != tags.end()) {
          js["tag"] = kind_string(it->second.kind);
        }
        sites.push_back(std::move(js));
      }
      json j{{"sites", std::move(sites)}};
      if (!tag_error.empty()) j["tag_error"] = tag_error;
      return emit(j, 0);
    }

    if (*reduce_cmd) {
      long budget = opts.budget;
      auto trace = reduce_to_fixpoint_prover(
          inst, [](const Instance&) { return true; }, budget);
      json j{{"steps", trace ? trace->steps.size() : 0},
             {"fixpoint", trace.has_value()}};
      if (trace && !output_path.empty()) {
        save_instance(trace->final_instance, output_path);
        j["output"] = output_path;
      }
      if (trace) {
        json dims = json::array();
        for (auto d : trace->final_instance.qudit_dims) dims.push_back(d);
        j["final_dims"] = std::move(dims);
      }
      return emit(j, 0);
    }

    if (*remove_cmd) {
      TagMap tags = tag_sites(inst);
      std::map<int, R1Choice> choices;
      if (!witness_path.empty()) {
        Witness w = load_witness(witness_path);
        for (const WitnessStep& step : w.steps) {
          if (const auto* rm = std::get_if<RemoveStep>(&step)) {
            choices[rm->site] = {rm->block_i, rm->block_j};
          }
        }
      }
      double value = eliminate_and_contract(inst, tags, choices);
      json jt = json::object();
      for (const auto& [site, tag] : tags) {
        jt[std::to_string(site)] = kind_string(tag.kind);
      }
      json j{{"tags", std::move(jt)},
             {"value", value},
             {"positive", value > positivity_threshold(inst)}};
      return emit(j, value > positivity_threshold(inst) ? 0 : 1);
    }

    if (*verify_cmd) {
      Witness w = load_witness(witness_path);
      VerifyResult res = verify(inst, w, threshold_a, opts.factorized);
      json j{{"accept", res.accept}, {"value", res.value}, {"reason", res.reason}};
      return emit(j, res.accept ? 0 : 1);
    }

    if (*prove_cmd) {
      ProveOptions popts;
      popts.budget = opts.budget;
      popts.factorized = opts.factorized;
      auto w = prove(inst, threshold_a, popts);
      if (!w) {
        return emit(json{{"witness", nullptr}, {"unsat", true}}, 1);
      }
      json j{{"unsat", false}, {"steps", w->steps.size()}};
      if (!output_path.empty()) {
        save_witness(*w, output_path);
        j["output"] = output_path;
      }
      return emit(j, 0);
    }

    if (*oracle_cmd) {
      DenseHamiltonian h = assemble(inst);
      double lambda = ground_energy(h, inst.tol);
      json j{{"lambda", lambda}};
      try {
        j["kernel_dim"] = kernel_dim(h, inst.tol);
      } catch (const Error&) {
        j["kernel_dim"] = nullptr;  // indefinite Hamiltonian
      }
      return emit(j, 0);
    }

    if (*dualize_cmd) {
      Instance dual = dualize(inst);
      json j{{"rows", dual.lattice.rows},
             {"cols", dual.lattice.cols},
             {"carrier", to_string(dual.lattice.carrier)},
             {"shift", dual.lattice.shift},
             {"sites", dual.qudit_dims.size()}};
      if (!output_path.empty()) {
        save_instance(dual, output_path);
        j["output"] = output_path;
      }
      return emit(j, 0);
    }

    if (*stab_cmd) {
      SimpleSubspaceTree tree = build_subspace_tree(inst);
      if (tree.leaves.empty()) {
        fail(ErrorKind::Internal, "subspace tree has no leaves");
      }
      const PauliForm& form = tree.leaves.front().form;
      json gens = json::array();
      for (const PauliFormTerm& t : form.terms) {
        if (t.dropped_zero) continue;
        StabWord w = t.word;
        w.sign = t.coeff >= 0 ? 1 : -1;
        gens.push_back(w.to_string());
      }
      json j{{"format", "stab/v1"},
             {"qubits", form.total_qubits},
             {"generators", std::move(gens)},
             {"leaves", tree.leaves.size()}};
      if (!output_path.empty()) {
        std::ofstream out(output_path);
        out << j.dump(2) << "\n";
        json note{{"format", "stab/v1"}, {"output", output_path}};
        return emit(note, 0);
      }
      return emit(j, 0);
    }
  } catch (const Error& e) {
    json j{{"error", error_kind_name(e.kind())},
           {"message", e.message()},
           {"index", e.index()}};
    std::cerr << e.what() << std::endl;
    std::cout << j.dump() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << std::endl;
    std::cout << json{{"error", "Internal"}, {"message", e.what()}}.dump()
              << std::endl;
    return 2;
  }
  return 2;
}
