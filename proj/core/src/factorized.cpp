#include "clh/factorized.hpp"

#include <algorithm>

#include "clh/algebra.hpp"
#include "clh/linalg.hpp"

namespace clh {

namespace {

double fnorm(const Matrix& m) { return m.norm(); }

const std::vector<Matrix>& factors_of(const Term& t) {
  if (!t.factors) {
    fail(ErrorKind::NotFactorized,
         "term " + std::to_string(t.id) + " carries no factors", t.id);
  }
  return *t.factors;
}

bool is_zero_term(const Term& t, double eps) {
  for (const Matrix& f : factors_of(t)) {
    if (f.norm() <= eps) return true;
  }
  return false;
}

// Factor of `t` on `site`; identity when the term does not touch the site.
Matrix factor_on(const Instance& inst, const Term& t, int site) {
  int leg = t.leg_of(site);
  if (leg < 0) return Matrix::Identity(inst.dim_of(site), inst.dim_of(site));
  return factors_of(t)[size_t(leg)];
}

SiteRelation relate(const Matrix& f, const Matrix& g, double eps) {
  double scale = std::max(1.0, f.norm() * g.norm());
  Matrix fg = f * g;
  Matrix gf = g * f;
  if ((fg - gf).norm() <= eps * scale || (fg + gf).norm() <= eps * scale) {
    if (fg.norm() <= eps * scale) return SiteRelation::Zero;
    return SiteRelation::Dash;
  }
  return SiteRelation::Cross;
}

}  // namespace

CommuteMode commute_mode(const Term& a, const Term& b, const Instance& inst) {
  factors_of(a);
  factors_of(b);
  std::vector<int> shared = shared_sites(a, b);
  CommuteMode mode;
  mode.term_a = a.id;
  mode.term_b = b.id;
  if (shared.empty()) return mode;

  std::vector<int> joint = support_union(a.support, b.support);
  std::vector<Eigen::Index> dims = dims_for(inst, joint);
  Matrix ea = embed(a.matrix, a.support, joint, dims);
  Matrix eb = embed(b.matrix, b.support, joint, dims);
  if (commutator_norm(ea, eb) >
      inst.tol.eps_eq * std::max(1.0, ea.norm() * eb.norm())) {
    fail(ErrorKind::NotCommuting, "terms do not commute");
  }

  for (int q : shared) {
    SiteRelation rel = relate(factor_on(inst, a, q), factor_on(inst, b, q),
                              inst.tol.eps_eq);
    mode.relations[q] = rel;
    if (rel == SiteRelation::Cross) mode.regular = false;
  }
  return mode;
}

namespace {

Matrix kernel_of_hermitian(const Matrix& f, const Tolerance& tol) {
  EigenDecomposition eig = hermitian_eig(f, tol);
  double scale = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    scale = std::max(scale, std::abs(eig.eigenvalues(k)));
  }
  double cut = std::max(tol.eps_rank * scale, tol.eps_rank);
  Matrix proj = Matrix::Zero(f.rows(), f.cols());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (std::abs(eig.eigenvalues(k)) <= cut) {
      proj += eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
    }
  }
  return proj;
}

// Generic scan: the algebra generated by every factor on the site.
std::optional<std::vector<Matrix>> generic_split(const Instance& inst, int site) {
  Eigen::Index d = inst.dim_of(site);
  if (d < 2) return std::nullopt;
  std::vector<Matrix> gens;
  for (int k : inst.terms_on_site(site)) {
    const Term& t = inst.terms[size_t(k)];
    if (is_zero_term(t, inst.tol.eps_rank)) continue;
    gens.push_back(factor_on(inst, t, site));
  }
  MatrixAlgebra all = generate_algebra(gens, d, inst.tol);
  if (all.is_full()) return std::nullopt;

  BlockDecomposition dec = structure_decompose(all, inst.tol);
  std::vector<Matrix> projectors;
  if (dec.blocks.size() >= 2) {
    for (const Block& b : dec.blocks) projectors.push_back(b.projector);
    return projectors;
  }
  const Block& b = dec.blocks[0];
  if (b.d2 < 2) {
    fail(ErrorKind::Internal, "non-full factor algebra with no split");
  }
  const Matrix& w = b.block_unitary;
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

std::optional<SeparableSplit> find_separable_factorized(const Instance& inst) {
  double eps = inst.tol.eps_eq;
  for (int site = 0; site < int(inst.qudit_dims.size()); ++site) {
    Eigen::Index d = inst.dim_of(site);
    if (d < 2) continue;
    std::vector<int> on_site;
    for (int k : inst.terms_on_site(site)) {
      if (!is_zero_term(inst.terms[size_t(k)], inst.tol.eps_rank)) {
        on_site.push_back(k);
      }
    }

    // (a) Kernel split: a factor that +/- commutes with every other factor
    // and annihilates some nonzero factor.
    for (int k : on_site) {
      Matrix f = factor_on(inst, inst.terms[size_t(k)], site);
      if (f.norm() <= inst.tol.eps_rank) continue;
      bool all_pm = true;
      bool kills = false;
      for (int j : on_site) {
        if (j == k) continue;
        Matrix g = factor_on(inst, inst.terms[size_t(j)], site);
        if (g.norm() <= inst.tol.eps_rank) continue;
        SiteRelation rel = relate(f, g, eps);
        if (rel == SiteRelation::Cross) {
          all_pm = false;
          break;
        }
        if (rel == SiteRelation::Zero) kills = true;
      }
      if (all_pm && kills) {
        Matrix ker = kernel_of_hermitian(f, inst.tol);
        double rank = ker.trace().real();
        if (rank > 0.5 && rank < double(d) - 0.5) {
          SeparableSplit split;
          split.site = site;
          split.projectors = {ker, Matrix::Identity(d, d) - ker};
          return split;
        }
      }
    }

    // (b) Crossed pattern: two commuting sub-families with a vanishing
    // cross product generate commuting algebras with a nontrivial
    // decomposition.
    for (size_t a1 = 0; a1 + 1 < on_site.size(); ++a1) {
      for (size_t a2 = a1 + 1; a2 < on_site.size(); ++a2) {
        for (size_t b1 = 0; b1 + 1 < on_site.size(); ++b1) {
          for (size_t b2 = b1 + 1; b2 < on_site.size(); ++b2) {
            std::set<size_t> picked{a1, a2, b1, b2};
            if (picked.size() != 4) continue;
            Matrix fa1 = factor_on(inst, inst.terms[size_t(on_site[a1])], site);
            Matrix fa2 = factor_on(inst, inst.terms[size_t(on_site[a2])], site);
            Matrix fb1 = factor_on(inst, inst.terms[size_t(on_site[b1])], site);
            Matrix fb2 = factor_on(inst, inst.terms[size_t(on_site[b2])], site);
            MatrixAlgebra alg_a = generate_algebra({fa1, fa2}, d, inst.tol);
            MatrixAlgebra alg_b = generate_algebra({fb1, fb2}, d, inst.tol);
            bool commuting = true;
            for (const Matrix& x : alg_a.basis) {
              for (const Matrix& y : alg_b.basis) {
                if (commutator_norm(x, y) > eps * 10) commuting = false;
              }
            }
            if (!commuting) continue;
            bool killing_pair = false;
            for (const Matrix& x : {fa1, fa2}) {
              for (const Matrix& y : {fb1, fb2}) {
                if (x.norm() > inst.tol.eps_rank && y.norm() > inst.tol.eps_rank &&
                    (x * y).norm() <= eps * std::max(1.0, x.norm() * y.norm())) {
                  killing_pair = true;
                }
              }
            }
            if (!killing_pair) continue;
            BlockDecomposition dec = structure_decompose(alg_a, inst.tol);
            if (dec.blocks.size() >= 2) {
              SeparableSplit split;
              split.site = site;
              for (const Block& blk : dec.blocks) {
                split.projectors.push_back(blk.projector);
              }
              return split;
            }
          }
        }
      }
    }

    // (c) Generic scan.
    if (auto projectors = generic_split(inst, site)) {
      SeparableSplit split;
      split.site = site;
      split.projectors = std::move(*projectors);
      return split;
    }
  }
  return std::nullopt;
}

namespace {

struct Synthesized {
  Matrix unitary;  // d x d
  // Per input operator: x/z bits (most-significant qubit first) and sign.
  std::vector<std::vector<std::uint8_t>> x, z;
  std::vector<int> sign;
  int qubits = 0;
};

bool anticommutes(const Matrix& a, const Matrix& b, double eps) {
  return (a * b + b * a).norm() <= eps * std::max(1.0, a.norm() * b.norm());
}

// Recursive Bravyi-Vyalyi style synthesis for Hermitian involutions that
// pairwise commute or anticommute and generate the full algebra.
Synthesized synthesize(std::vector<Matrix> ops, Eigen::Index d, int site,
                       const Tolerance& tol) {
  Synthesized out;
  out.x.assign(ops.size(), {});
  out.z.assign(ops.size(), {});
  out.sign.assign(ops.size(), 1);
  if (d == 1) {
    out.unitary = Matrix::Identity(1, 1);
    for (size_t i = 0; i < ops.size(); ++i) {
      out.sign[i] = ops[i](0, 0).real() >= 0 ? 1 : -1;
    }
    return out;
  }

  double eps = std::max(tol.eps_eq, 1e-9);
  // Lowest-index anticommuting pair.
  long ia = -1, ib = -1;
  for (size_t i = 0; i < ops.size() && ia < 0; ++i) {
    for (size_t j = i + 1; j < ops.size(); ++j) {
      if (anticommutes(ops[i], ops[j], eps)) {
        ia = long(i);
        ib = long(j);
        break;
      }
    }
  }
  if (ia < 0) {
    // Everything commutes: on a >1 dimensional space the generated algebra
    // is commutative, so a common invariant split was missed upstream.
    fail(ErrorKind::SeparableSitePresent,
         "commuting factors on a nontrivial site imply a separable site " +
             std::to_string(site),
         site);
  }
  if (d % 2 != 0) {
    fail(ErrorKind::NonPowerOfTwoBlock,
         "site dimension is not a power of two at site " + std::to_string(site),
         site);
  }

  const Matrix ga = ops[size_t(ia)];
  const Matrix gb = ops[size_t(ib)];
  // Basis: +1 eigenspace of ga, then gb maps it onto the -1 eigenspace.
  Tolerance t = tol;
  EigenDecomposition eig = hermitian_eig(ga, t);
  Eigen::Index half = d / 2;
  Matrix wplus(d, half);
  Eigen::Index c = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (eig.eigenvalues(k) > 0) {
      if (c == half) {
        fail(ErrorKind::NonPowerOfTwoBlock,
             "anticommuting generator has unbalanced spectrum at site " +
                 std::to_string(site),
             site);
      }
      wplus.col(c++) = eig.eigenvectors.col(k);
    }
  }
  if (c != half) {
    fail(ErrorKind::NonPowerOfTwoBlock,
         "anticommuting generator has unbalanced spectrum at site " +
             std::to_string(site),
         site);
  }
  Matrix basis(d, d);
  basis.leftCols(half) = wplus;
  basis.rightCols(half) = gb * wplus;
  Matrix u0 = basis.adjoint();  // in this basis ga = Z x I, gb = X x I

  // Extract per-operator qubit letters and residuals.
  Matrix x2(2, 2), z2(2, 2);
  x2 << 0, 1, 1, 0;
  z2 << 1, 0, 0, -1;
  std::vector<Matrix> residuals;
  std::vector<std::uint8_t> xbit(ops.size()), zbit(ops.size());
  for (size_t i = 0; i < ops.size(); ++i) {
    std::uint8_t s = anticommutes(ops[i], ga, eps) ? 1 : 0;  // X component
    std::uint8_t tt = anticommutes(ops[i], gb, eps) ? 1 : 0;  // Z component
    xbit[i] = s;
    zbit[i] = tt;
    Matrix m = u0 * ops[i] * u0.adjoint();
    // sigma(s,t) on the extracted qubit, tensored with identity.
    Matrix sigma = Matrix::Identity(2, 2);
    if (s && tt) {
      sigma = Complex(0, 1) * x2 * z2;  // Y
    } else if (s) {
      sigma = x2;
    } else if (tt) {
      sigma = z2;
    }
    Matrix n = kron(sigma.adjoint(), Matrix::Identity(half, half)) * m;
    // n must equal I_2 tensor R.
    Matrix r = n.topLeftCorner(half, half);
    Matrix rebuilt = kron(Matrix::Identity(2, 2), r);
    if ((n - rebuilt).norm() > 1e-6 * std::max(1.0, n.norm())) {
      fail(ErrorKind::NonPowerOfTwoBlock,
           "factor does not factor through the extracted qubit at site " +
               std::to_string(site),
           site);
    }
    residuals.push_back(std::move(r));
  }

  Synthesized inner = synthesize(std::move(residuals), half, site, tol);
  out.qubits = inner.qubits + 1;
  out.unitary = kron(Matrix::Identity(2, 2), inner.unitary) * u0;
  for (size_t i = 0; i < ops.size(); ++i) {
    out.x[i].push_back(xbit[i]);
    out.x[i].insert(out.x[i].end(), inner.x[i].begin(), inner.x[i].end());
    out.z[i].push_back(zbit[i]);
    out.z[i].insert(out.z[i].end(), inner.z[i].begin(), inner.z[i].end());
    out.sign[i] = inner.sign[i];
  }
  return out;
}

}  // namespace

PauliForm to_pauli_form(const Instance& inst) {
  // Regularity check over all overlapping pairs.
  for (size_t i = 0; i < inst.terms.size(); ++i) {
    for (size_t j = i + 1; j < inst.terms.size(); ++j) {
      const Term& a = inst.terms[i];
      const Term& b = inst.terms[j];
      if (is_zero_term(a, inst.tol.eps_rank) || is_zero_term(b, inst.tol.eps_rank)) {
        continue;
      }
      if (shared_sites(a, b).empty()) continue;
      CommuteMode mode = commute_mode(a, b, inst);
      if (!mode.regular) {
        fail(ErrorKind::IrregularPair,
             "terms " + std::to_string(a.id) + ", " + std::to_string(b.id) +
                 " commute in a singular way; a separable site must exist");
      }
    }
  }
  if (auto split = find_separable_factorized(inst)) {
    fail(ErrorKind::SeparableSitePresent,
         "site " + std::to_string(split->site) + " is separable", split->site);
  }

  PauliForm form;
  form.qubit_offset.assign(inst.qudit_dims.size(), -1);

  // Active (nonzero) terms in id order.
  std::vector<int> active;
  for (size_t k = 0; k < inst.terms.size(); ++k) {
    if (!is_zero_term(inst.terms[k], inst.tol.eps_rank)) active.push_back(int(k));
  }

  // Normalize factors: p~ = p / sqrt(c), (p~)^2 = I.
  std::vector<double> coeff(inst.terms.size(), 1.0);
  std::map<int, std::vector<std::pair<int, Matrix>>> site_ops;  // site -> (term idx, p~)
  for (int k : active) {
    const Term& t = inst.terms[size_t(k)];
    const std::vector<Matrix>& fk = factors_of(t);
    for (size_t leg = 0; leg < fk.size(); ++leg) {
      const Matrix& f = fk[leg];
      Matrix sq = f * f;
      Eigen::Index dq = f.rows();
      Complex c = sq.trace() / double(dq);
      double cr = c.real();
      if (cr <= inst.tol.eps_rank ||
          (sq - cr * Matrix::Identity(dq, dq)).norm() >
              inst.tol.eps_eq * std::max(1.0, sq.norm()) * 10) {
        fail(ErrorKind::SeparableSitePresent,
             "factor square is not a positive scalar at site " +
                 std::to_string(t.support[leg]),
             t.support[leg]);
      }
      double root = std::sqrt(cr);
      coeff[size_t(k)] *= root;
      site_ops[t.support[leg]].push_back({k, f / root});
    }
  }

  // Per-site synthesis.
  int offset = 0;
  std::map<int, std::map<int, size_t>> site_slot;  // site -> term idx -> op slot
  std::map<int, Synthesized> synth;
  for (int site = 0; site < int(inst.qudit_dims.size()); ++site) {
    Eigen::Index d = inst.dim_of(site);
    auto it = site_ops.find(site);
    std::vector<Matrix> ops;
    if (it != site_ops.end()) {
      for (size_t s = 0; s < it->second.size(); ++s) {
        site_slot[site][it->second[s].first] = s;
        ops.push_back(it->second[s].second);
      }
    }
    if (d == 1) {
      Synthesized sy;
      sy.unitary = Matrix::Identity(1, 1);
      sy.x.assign(ops.size(), {});
      sy.z.assign(ops.size(), {});
      sy.sign.assign(ops.size(), 1);
      for (size_t s = 0; s < ops.size(); ++s) {
        sy.sign[s] = ops[s](0, 0).real() >= 0 ? 1 : -1;
      }
      synth[site] = std::move(sy);
    } else {
      if (ops.empty()) {
        fail(ErrorKind::SeparableSitePresent,
             "unused site of dimension > 1 is separable: " + std::to_string(site),
             site);
      }
      synth[site] = synthesize(ops, d, site, inst.tol);
    }
    Synthesized& sy = synth[site];
    SitePauliBasis basis;
    basis.site = site;
    basis.qubit_count = sy.qubits;
    basis.unitary = sy.unitary;
    form.sites.push_back(basis);
    form.qubit_offset[size_t(site)] = offset;
    offset += sy.qubits;
  }
  form.total_qubits = offset;

  for (int k : active) {
    const Term& t = inst.terms[size_t(k)];
    PauliFormTerm ft;
    ft.term_id = t.id;
    ft.word.x.assign(size_t(form.total_qubits), 0);
    ft.word.z.assign(size_t(form.total_qubits), 0);
    ft.word.sign = 1;
    double c = coeff[size_t(k)];
    for (int site : t.support) {
      const Synthesized& sy = synth.at(site);
      size_t slot = site_slot.at(site).at(k);
      c *= sy.sign[slot];
      int base = form.qubit_offset[size_t(site)];
      for (size_t b = 0; b < sy.x[slot].size(); ++b) {
        ft.word.x[size_t(base) + b] = sy.x[slot][b];
        ft.word.z[size_t(base) + b] = sy.z[slot][b];
      }
    }
    ft.coeff = c;
    form.terms.push_back(std::move(ft));
  }
  for (size_t k = 0; k < inst.terms.size(); ++k) {
    if (is_zero_term(inst.terms[k], inst.tol.eps_rank)) {
      PauliFormTerm ft;
      ft.term_id = inst.terms[k].id;
      ft.coeff = 0;
      ft.dropped_zero = true;
      ft.word.x.assign(size_t(form.total_qubits), 0);
      ft.word.z.assign(size_t(form.total_qubits), 0);
      form.terms.push_back(std::move(ft));
    }
  }
  return form;
}

namespace {

void restrict_instance(Instance& inst, int site, const Matrix& projector,
                       std::vector<Matrix>& isometries) {
  Matrix v = range_basis(projector, inst.tol);
  isometries[size_t(site)] = isometries[size_t(site)] * v;
  inst.qudit_dims[size_t(site)] = v.cols();
  for (Term& t : inst.terms) {
    int leg = t.leg_of(site);
    if (leg < 0) continue;
    std::vector<Matrix>& fs = *t.factors;
    fs[size_t(leg)] = v.adjoint() * fs[size_t(leg)] * v;
    // Zero terms are always rewritten as tensors of zeros.
    bool zero = false;
    for (const Matrix& f : fs) zero = zero || f.norm() <= inst.tol.eps_rank;
    if (zero) {
      for (Matrix& f : fs) f = Matrix::Zero(f.rows(), f.cols());
    }
    Matrix prod = Matrix::Identity(1, 1);
    for (const Matrix& f : fs) prod = kron(prod, f);
    t.matrix = std::move(prod);
  }
}

void build_leaves(const Instance& inst, std::vector<Matrix> isometries,
                  SimpleSubspaceTree& tree) {
  auto split = find_separable_factorized(inst);
  if (!split) {
    TreeLeaf leaf;
    leaf.site_isometries = std::move(isometries);
    leaf.restricted = inst;
    leaf.form = to_pauli_form(inst);
    tree.leaves.push_back(std::move(leaf));
    return;
  }
  for (const Matrix& p : split->projectors) {
    Instance child = inst;
    std::vector<Matrix> child_iso = isometries;
    restrict_instance(child, split->site, p, child_iso);
    build_leaves(child, std::move(child_iso), tree);
  }
}

}  // namespace

SimpleSubspaceTree build_subspace_tree(const Instance& inst) {
  for (const Term& t : inst.terms) factors_of(t);
  std::vector<Matrix> isometries;
  for (auto d : inst.qudit_dims) {
    isometries.push_back(Matrix::Identity(d, d));
  }
  SimpleSubspaceTree tree;
  build_leaves(inst, std::move(isometries), tree);
  return tree;
}

bool stabilizer_verify(const PauliForm& form, double a,
                       const std::map<int, int>& lambdas) {
  std::vector<StabWord> signed_words;
  double energy = 0;
  for (const PauliFormTerm& t : form.terms) {
    if (t.dropped_zero) continue;
    auto it = lambdas.find(t.term_id);
    if (it == lambdas.end()) {
      fail(ErrorKind::BadEigenvalueSign,
           "missing eigenvalue for term " + std::to_string(t.term_id), t.term_id);
    }
    if (it->second != 1 && it->second != -1) {
      fail(ErrorKind::BadEigenvalueSign,
           "eigenvalue must be +1 or -1 for term " + std::to_string(t.term_id),
           t.term_id);
    }
    energy += t.coeff * it->second;
    // Common +1 eigenstate of lambda_h * sigma_h must exist.
    StabWord w = t.word;
    w.sign = t.word.sign * it->second;
    signed_words.push_back(std::move(w));
  }
  for (size_t i = 0; i < signed_words.size(); ++i) {
    for (size_t j = i + 1; j < signed_words.size(); ++j) {
      if (symplectic_parity(signed_words[i], signed_words[j]) != 0) {
        fail(ErrorKind::NonCommutingWords, "witness words do not commute");
      }
    }
  }
  if (energy > a + 1e-9) return false;
  return group_excludes_minus_identity(std::move(signed_words));
}

double leaf_ground_energy(const PauliForm& form, std::map<int, int>* lambdas) {
  std::vector<StabWord> words;
  std::vector<double> coeffs;
  std::vector<int> ids;
  for (const PauliFormTerm& t : form.terms) {
    if (t.dropped_zero) continue;
    words.push_back(t.word);
    coeffs.push_back(t.coeff);
    ids.push_back(t.term_id);
  }
  for (size_t i = 0; i < words.size(); ++i) {
    for (size_t j = i + 1; j < words.size(); ++j) {
      if (symplectic_parity(words[i], words[j]) != 0) {
        fail(ErrorKind::NonCommutingWords, "leaf words do not commute");
      }
    }
  }
  std::vector<int> best;
  double e = min_consistent_energy(words, coeffs, &best);
  if (lambdas) {
    lambdas->clear();
    for (size_t i = 0; i < ids.size(); ++i) (*lambdas)[ids[i]] = best[i];
  }
  return e;
}

}  // namespace clh
