#include "clh/reduction.hpp"

#include <algorithm>

#include "clh/linalg.hpp"

namespace clh {

namespace {

double invariance_defect(const Instance& inst, const Term& t, int site,
                         const Matrix& projector) {
  Matrix embedded = embed_site_op(projector, site, t, inst);
  return commutator_norm(t.matrix, embedded);
}

double term_scale(const Term& t) { return std::max(1.0, t.matrix.norm()); }

// Decomposition of the site space kept invariant by every term, or nullopt.
// Exact criterion: the algebra generated by all induced algebras on the site
// is not the full matrix algebra.
std::optional<std::vector<Matrix>> separable_decomposition(const Instance& inst,
                                                           int site) {
  Eigen::Index d = inst.dim_of(site);
  std::vector<Matrix> gens;
  for (int k : inst.terms_on_site(site)) {
    MatrixAlgebra a = induced_algebra(inst.terms[size_t(k)], site, inst);
    gens.insert(gens.end(), a.basis.begin(), a.basis.end());
  }
  MatrixAlgebra all = generate_algebra(gens, d, inst.tol);
  if (all.is_full()) return std::nullopt;

  BlockDecomposition dec = structure_decompose(all, inst.tol);
  std::vector<Matrix> projectors;
  if (dec.blocks.size() >= 2) {
    for (const Block& b : dec.blocks) projectors.push_back(b.projector);
    return projectors;
  }
  // Single block L(d1) x I(d2) with d2 >= 2: split along the second factor.
  const Block& b = dec.blocks[0];
  if (b.d2 < 2) {
    fail(ErrorKind::Internal, "non-full algebra with no invariant split");
  }
  const Matrix& w = b.block_unitary;  // (d1*d2) x d isometry
  for (Eigen::Index beta = 0; beta < b.d2; ++beta) {
    Matrix sel = Matrix::Zero(b.d1 * b.d2, b.d1 * b.d2);
    for (Eigen::Index a = 0; a < b.d1; ++a) {
      sel(a * b.d2 + beta, a * b.d2 + beta) = 1.0;
    }
    projectors.push_back(w.adjoint() * sel * w);
  }
  return projectors;
}

}  // namespace

void validate_certificate(const Instance& inst, const SemiSepCertificate& cert) {
  if (cert.site < 0 || cert.site >= int(inst.qudit_dims.size())) {
    fail(ErrorKind::InvalidCertificate, "certificate site out of range");
  }
  Eigen::Index d = inst.dim_of(cert.site);
  if (cert.projectors.size() < 2) {
    fail(ErrorKind::InvalidCertificate, "decomposition must have >= 2 blocks");
  }
  Matrix sum = Matrix::Zero(d, d);
  for (size_t a = 0; a < cert.projectors.size(); ++a) {
    const Matrix& p = cert.projectors[a];
    if (p.rows() != d || p.cols() != d) {
      fail(ErrorKind::InvalidCertificate, "projector dimension mismatch");
    }
    if (hermiticity_defect(p) > 1e-8 || (p * p - p).norm() > 1e-8) {
      fail(ErrorKind::InvalidCertificate, "block is not an orthogonal projection");
    }
    for (size_t b = a + 1; b < cert.projectors.size(); ++b) {
      if ((p * cert.projectors[b]).norm() > 1e-8) {
        fail(ErrorKind::InvalidCertificate, "blocks are not mutually orthogonal");
      }
    }
    sum += p;
  }
  if ((sum - Matrix::Identity(d, d)).norm() > 1e-8) {
    fail(ErrorKind::InvalidCertificate, "blocks do not sum to the identity");
  }
  if (cert.exempt_term) {
    inst.term_by_id(*cert.exempt_term);  // must exist
  }
  for (int k : inst.terms_on_site(cert.site)) {
    const Term& t = inst.terms[size_t(k)];
    if (cert.exempt_term && t.id == *cert.exempt_term) continue;
    for (const Matrix& p : cert.projectors) {
      if (invariance_defect(inst, t, cert.site, p) >
          inst.tol.eps_eq * term_scale(t) * 10) {
        fail(ErrorKind::InvalidCertificate,
             "term " + std::to_string(t.id) + " does not keep the decomposition",
             t.id);
      }
    }
  }
}

std::optional<SemiSepCertificate> find_semi_separable(const Instance& inst) {
  for (int site = 0; site < int(inst.qudit_dims.size()); ++site) {
    if (inst.dim_of(site) < 2) continue;

    if (auto projectors = separable_decomposition(inst, site)) {
      SemiSepCertificate cert;
      cert.site = site;
      cert.projectors = std::move(*projectors);
      return cert;
    }

    std::vector<int> on_site = inst.terms_on_site(site);
    for (int k : on_site) {
      const Term& gen = inst.terms[size_t(k)];
      MatrixAlgebra alg = induced_algebra(gen, site, inst);
      if (alg.is_trivial()) continue;
      BlockDecomposition dec = structure_decompose(alg, inst.tol);
      if (dec.trivial()) continue;

      std::optional<int> exempt;
      bool ok = true;
      for (int j : on_site) {
        const Term& t = inst.terms[size_t(j)];
        bool keeps = true;
        for (const Block& b : dec.blocks) {
          if (invariance_defect(inst, t, site, b.projector) >
              inst.tol.eps_eq * term_scale(t) * 10) {
            keeps = false;
            break;
          }
        }
        if (!keeps) {
          if (exempt) {
            ok = false;
            break;
          }
          exempt = t.id;
        }
      }
      if (ok) {
        SemiSepCertificate cert;
        cert.site = site;
        for (const Block& b : dec.blocks) cert.projectors.push_back(b.projector);
        cert.exempt_term = exempt;
        return cert;
      }
    }
  }
  return std::nullopt;
}

Instance reduced_hamiltonian(const Instance& inst, const SemiSepCertificate& cert,
                             int block) {
  validate_certificate(inst, cert);
  if (block < 0 || block >= int(cert.projectors.size())) {
    fail(ErrorKind::InvalidCertificate, "chosen block index out of range");
  }
  const Matrix& proj = cert.projectors[size_t(block)];
  Matrix v = range_basis(proj, inst.tol);  // d x k isometry
  Eigen::Index k = v.cols();
  if (k < 1 || k >= inst.dim_of(cert.site)) {
    fail(ErrorKind::InvalidCertificate, "block does not strictly reduce the site");
  }

  Instance out = inst;
  out.qudit_dims[size_t(cert.site)] = k;
  for (Term& t : out.terms) {
    int leg = t.leg_of(cert.site);
    if (leg < 0) continue;
    std::vector<Eigen::Index> dims = dims_for(inst, t.support);
    Eigen::Index pre = 1, post = 1;
    for (int i = 0; i < leg; ++i) pre *= dims[size_t(i)];
    for (size_t i = size_t(leg) + 1; i < dims.size(); ++i) post *= dims[i];
    Matrix restrictor =
        kron(kron(Matrix::Identity(pre, pre), v), Matrix::Identity(post, post));
    Matrix compressed = restrictor.adjoint() * t.matrix * restrictor;

    bool is_exempt = cert.exempt_term && t.id == *cert.exempt_term;
    if (is_exempt) {
      // Round: keep only the 1-eigenspace of Pi_j h0 Pi_j.
      EigenDecomposition eig = hermitian_eig(compressed, inst.tol);
      Matrix rounded = Matrix::Zero(compressed.rows(), compressed.cols());
      for (Eigen::Index e = 0; e < eig.eigenvalues.size(); ++e) {
        if (eig.eigenvalues(e) >= 1.0 - inst.tol.eps_rank) {
          rounded += eig.eigenvectors.col(e) * eig.eigenvectors.col(e).adjoint();
        }
      }
      t.matrix = rounded;
      t.factors.reset();
    } else {
      t.matrix = compressed;
      if (t.factors) {
        (*t.factors)[size_t(leg)] = v.adjoint() * (*t.factors)[size_t(leg)] * v;
      }
    }
  }
  out.validate(/*require_projections=*/true);
  return out;
}

ReductionTrace reduce_to_fixpoint(const Instance& inst,
                                  const std::vector<ReductionStep>& witness) {
  ReductionTrace trace;
  trace.final_instance = inst;
  for (size_t k = 0; k < witness.size(); ++k) {
    try {
      trace.final_instance = reduced_hamiltonian(
          trace.final_instance, witness[k].cert, witness[k].chosen_block);
    } catch (const Error& e) {
      fail(ErrorKind::InvalidStep,
           "reduction step " + std::to_string(k) + ": " + e.message(), long(k));
    }
    trace.steps.push_back(witness[k]);
  }
  if (find_semi_separable(trace.final_instance)) {
    fail(ErrorKind::InvalidStep,
         "semi-separable site remains after replaying the witness",
         long(witness.size()));
  }
  return trace;
}

namespace {

bool prover_dfs(const Instance& current, std::vector<ReductionStep>& steps,
                const std::function<bool(const Instance&)>& leaf_accepts,
                long& budget, Instance& final_out) {
  auto cert = find_semi_separable(current);
  if (!cert) {
    if (leaf_accepts(current)) {
      final_out = current;
      return true;
    }
    return false;
  }
  // Blocks in decreasing dimension (ties by index).
  std::vector<std::pair<Eigen::Index, int>> order;
  for (size_t j = 0; j < cert->projectors.size(); ++j) {
    Eigen::Index rank =
        Eigen::Index(std::llround(cert->projectors[j].trace().real()));
    order.push_back({-rank, int(j)});
  }
  std::sort(order.begin(), order.end());
  for (auto [neg_rank, j] : order) {
    if (--budget < 0) {
      fail(ErrorKind::Budget, "reduction search budget exhausted");
    }
    Instance child = reduced_hamiltonian(current, *cert, j);
    steps.push_back({*cert, j});
    if (prover_dfs(child, steps, leaf_accepts, budget, final_out)) return true;
    steps.pop_back();
  }
  return false;
}

}  // namespace

std::optional<ReductionTrace> reduce_to_fixpoint_prover(
    const Instance& inst, const std::function<bool(const Instance&)>& leaf_accepts,
    long budget) {
  ReductionTrace trace;
  trace.final_instance = inst;
  if (prover_dfs(inst, trace.steps, leaf_accepts, budget, trace.final_instance)) {
    return trace;
  }
  return std::nullopt;
}

}  // namespace clh
