#include "clh/removal.hpp"

#include <algorithm>

#include "clh/linalg.hpp"

namespace clh {

namespace {

double tol_scale(const Instance& inst, const Matrix& m) {
  return inst.tol.eps_eq * std::max(1.0, m.norm()) * 10;
}

// True iff the matrix `m` (on `dims`) acts on leg `leg` as P tensor rest,
// i.e. trivially inside range(P). On success `rest` receives the channel
// tr_q(P m P) / tr(P) on the remaining legs.
bool acts_trivially_on_block(const Matrix& m, const std::vector<Eigen::Index>& dims,
                             size_t leg, const Matrix& p, const Instance& inst,
                             Matrix* rest) {
  Eigen::Index pre = 1, post = 1;
  for (size_t i = 0; i < leg; ++i) pre *= dims[i];
  for (size_t i = leg + 1; i < dims.size(); ++i) post *= dims[i];
  Matrix pe = kron(kron(Matrix::Identity(pre, pre), p),
                   Matrix::Identity(post, post));
  Matrix sandwiched = pe * m * pe;

  double ptr = p.trace().real();
  if (ptr < 0.5) {
    // Zero projector; the sandwich vanishes.
    if (rest) *rest = Matrix::Zero(pre * post, pre * post);
    return sandwiched.norm() <= tol_scale(inst, m);
  }

  // Partial trace of the sandwich over the leg.
  Eigen::Index d = dims[leg];
  Matrix traced = Matrix::Zero(pre * post, pre * post);
  for (Eigen::Index a = 0; a < pre; ++a) {
    for (Eigen::Index b = 0; b < pre; ++b) {
      for (Eigen::Index x = 0; x < post; ++x) {
        for (Eigen::Index y = 0; y < post; ++y) {
          Complex sum = 0;
          for (Eigen::Index q = 0; q < d; ++q) {
            sum += sandwiched((a * d + q) * post + x, (b * d + q) * post + y);
          }
          traced(a * post + x, b * post + y) = sum;
        }
      }
    }
  }
  traced /= ptr;

  // Rebuild P tensor traced and compare.
  Matrix rebuilt = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < pre; ++a) {
    for (Eigen::Index b = 0; b < pre; ++b) {
      for (Eigen::Index q = 0; q < d; ++q) {
        for (Eigen::Index r = 0; r < d; ++r) {
          for (Eigen::Index x = 0; x < post; ++x) {
            for (Eigen::Index y = 0; y < post; ++y) {
              rebuilt((a * d + q) * post + x, (b * d + r) * post + y) =
                  p(q, r) * traced(a * post + x, b * post + y);
            }
          }
        }
      }
    }
  }
  bool trivial = (sandwiched - rebuilt).norm() <= tol_scale(inst, m);
  if (trivial && rest) *rest = traced;
  return trivial;
}

// Contract one leg of `m` with row vector <v| on the left and |v> (or |w>)
// on the right: out = <v| m |w> over that leg.
Matrix sandwich_leg(const Matrix& m, const std::vector<Eigen::Index>& dims,
                    size_t leg, const Vector& v, const Vector& w) {
  Eigen::Index pre = 1, post = 1;
  for (size_t i = 0; i < leg; ++i) pre *= dims[i];
  for (size_t i = leg + 1; i < dims.size(); ++i) post *= dims[i];
  Eigen::Index d = dims[leg];
  Matrix out = Matrix::Zero(pre * post, pre * post);
  for (Eigen::Index a = 0; a < pre; ++a) {
    for (Eigen::Index b = 0; b < pre; ++b) {
      for (Eigen::Index x = 0; x < post; ++x) {
        for (Eigen::Index y = 0; y < post; ++y) {
          Complex sum = 0;
          for (Eigen::Index q = 0; q < d; ++q) {
            for (Eigen::Index r = 0; r < d; ++r) {
              sum += std::conj(v(q)) * m((a * d + q) * post + x, (b * d + r) * post + y) *
                     w(r);
            }
          }
          out(a * post + x, b * post + y) = sum;
        }
      }
    }
  }
  return out;
}

// Plain partial trace of one leg (no projector sandwich).
Matrix trace_leg(const Matrix& m, const std::vector<Eigen::Index>& dims, size_t leg) {
  Eigen::Index pre = 1, post = 1;
  for (size_t i = 0; i < leg; ++i) pre *= dims[i];
  for (size_t i = leg + 1; i < dims.size(); ++i) post *= dims[i];
  Eigen::Index d = dims[leg];
  Matrix out = Matrix::Zero(pre * post, pre * post);
  for (Eigen::Index a = 0; a < pre; ++a) {
    for (Eigen::Index b = 0; b < pre; ++b) {
      for (Eigen::Index x = 0; x < post; ++x) {
        for (Eigen::Index y = 0; y < post; ++y) {
          Complex sum = 0;
          for (Eigen::Index q = 0; q < d; ++q) {
            sum += m((a * d + q) * post + x, (b * d + q) * post + y);
          }
          out(a * post + x, b * post + y) = sum;
        }
      }
    }
  }
  return out;
}

Eigen::Index matrix_rank(const Matrix& m, double cut) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  Eigen::Index rank = 0;
  double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > cut * std::max(1.0, top)) ++rank;
  }
  return rank;
}

bool algebra_nontrivial(const MatrixAlgebra& a) { return a.span_dim() > 1; }

}  // namespace

int term_color(const Instance& inst, const Term& t) {
  std::vector<Face> faces = inst.lattice.faces();
  for (const Face& f : faces) {
    std::set<int> fs(f.sites.begin(), f.sites.end());
    bool all = true;
    for (int s : t.support) all = all && fs.count(s) > 0;
    if (all) return f.color;
  }
  fail(ErrorKind::ValidationError,
       "term " + std::to_string(t.id) + " fits no lattice face", t.id);
}

namespace {

struct SiteView {
  std::vector<int> black, white;  // indices into inst.terms (nontrivial on q)
  std::vector<int> all_terms;     // every term touching q
};

SiteView site_view(const Instance& inst, int site,
                   const std::vector<int>& colors) {
  SiteView view;
  view.all_terms = inst.terms_on_site(site);
  for (int k : view.all_terms) {
    MatrixAlgebra a = induced_algebra(inst.terms[size_t(k)], site, inst);
    if (!algebra_nontrivial(a)) continue;
    if (colors[size_t(k)] == 0) {
      view.black.push_back(k);
    } else {
      view.white.push_back(k);
    }
  }
  return view;
}

// Decomposition kept by one color pair on the site: the better induced
// decomposition when two terms act, the single term's decomposition when one
// does, {I} when none does.
BlockDecomposition pair_decomposition(const Instance& inst, int site,
                                      const std::vector<int>& members) {
  if (members.empty()) {
    BlockDecomposition dec;
    Block b;
    Eigen::Index d = inst.dim_of(site);
    b.projector = Matrix::Identity(d, d);
    b.d1 = 1;
    b.d2 = d;
    b.block_unitary = Matrix::Identity(d, d);
    dec.blocks.push_back(std::move(b));
    return dec;
  }
  if (members.size() == 1) {
    MatrixAlgebra a = induced_algebra(inst.terms[size_t(members[0])], site, inst);
    return structure_decompose(a, inst.tol);
  }
  CommuteWay way = classify_way(inst.terms[size_t(members[0])],
                                inst.terms[size_t(members[1])], site, inst);
  return way.decomposition;
}

// Def (i) per-block condition: at most one pair member acts nontrivially on
// each block.
bool blocks_single_owner(const Instance& inst, int site,
                         const std::vector<int>& members,
                         const BlockDecomposition& dec) {
  for (const Block& blk : dec.blocks) {
    int owners = 0;
    for (int k : members) {
      const Term& t = inst.terms[size_t(k)];
      std::vector<Eigen::Index> dims = dims_for(inst, t.support);
      if (!acts_trivially_on_block(t.matrix, dims, size_t(t.leg_of(site)),
                                   blk.projector, inst, nullptr)) {
        ++owners;
      }
    }
    if (owners > 1) return false;
  }
  return true;
}

}  // namespace

TagMap tag_sites(const Instance& inst) {
  TagMap tags;
  std::vector<int> colors(inst.terms.size());
  for (size_t k = 0; k < inst.terms.size(); ++k) {
    colors[k] = term_color(inst, inst.terms[k]);
  }

  for (int site = 0; site < int(inst.qudit_dims.size()); ++site) {
    RemovalTag tag;
    tag.site = site;
    Eigen::Index d = inst.dim_of(site);
    if (d == 1) {
      tag.kind = RemovKind::TrivialDim1;
      tags[site] = tag;
      continue;
    }

    SiteView view = site_view(inst, site, colors);
    if (view.black.size() > 2 || view.white.size() > 2) {
      fail(ErrorKind::IllegalPattern,
           "site " + std::to_string(site) + " has more than two terms per color",
           site);
    }

    // Same-color pairs must overlap exactly on this site.
    for (const auto* side : {&view.black, &view.white}) {
      if (side->size() == 2) {
        const Term& a = inst.terms[size_t((*side)[0])];
        const Term& b = inst.terms[size_t((*side)[1])];
        std::vector<int> sh = shared_sites(a, b);
        if (sh.size() != 1 || sh[0] != site) {
          fail(ErrorKind::IllegalPattern,
               "same-color terms overlap beyond site " + std::to_string(site),
               site);
        }
      }
    }

    if (view.black.empty() && view.white.empty()) {
      // No term acts nontrivially: trace the site out whole.
      tag.kind = RemovKind::R2;
      tag.split_isometry = Matrix::Identity(d, d);
      tag.split_d1 = d;
      tag.split_d2 = 1;
      for (int k : view.all_terms) tag.divisors[inst.terms[size_t(k)].id] = double(d);
      tag.free_factor = double(d);
      tags[site] = tag;
      continue;
    }

    BlockDecomposition black_dec = pair_decomposition(inst, site, view.black);
    BlockDecomposition white_dec = pair_decomposition(inst, site, view.white);

    // R1: every block owned by at most one pair member and every projector
    // product of rank <= 1.
    bool r1 = blocks_single_owner(inst, site, view.black, black_dec) &&
              blocks_single_owner(inst, site, view.white, white_dec);
    std::vector<std::vector<int>> rank_table;
    if (r1) {
      for (const Block& bb : black_dec.blocks) {
        std::vector<int> row;
        for (const Block& wb : white_dec.blocks) {
          Eigen::Index rank =
              matrix_rank(bb.projector * wb.projector, inst.tol.eps_rank * 100);
          row.push_back(int(rank));
          if (rank > 1) r1 = false;
        }
        rank_table.push_back(std::move(row));
      }
    }
    if (r1) {
      tag.kind = RemovKind::R1;
      for (const Block& b : black_dec.blocks) tag.black_projectors.push_back(b.projector);
      for (const Block& b : white_dec.blocks) tag.white_projectors.push_back(b.projector);
      tag.rank_table = std::move(rank_table);
      tags[site] = tag;
      continue;
    }

    // Full-full: a black and a white member whose induced algebras are full.
    auto side_has_full = [&](const std::vector<int>& members) {
      for (int k : members) {
        MatrixAlgebra a = induced_algebra(inst.terms[size_t(k)], site, inst);
        if (a.is_full()) return true;
      }
      return false;
    };
    if (side_has_full(view.black) && side_has_full(view.white)) {
      tag.kind = RemovKind::Full;
      tags[site] = tag;
      continue;
    }

    // One side empty with a tensor split on the other: R2.
    if (view.black.empty() || view.white.empty()) {
      const std::vector<int>& active = view.black.empty() ? view.white : view.black;
      BlockDecomposition& dec = view.black.empty() ? white_dec : black_dec;
      if (dec.blocks.size() == 1) {
        const Block& blk = dec.blocks[0];
        tag.kind = RemovKind::R2;
        tag.split_isometry = blk.block_unitary;
        tag.split_d1 = blk.d1;
        tag.split_d2 = blk.d2;
        bool side1 = false, side2 = false;
        for (int k : view.all_terms) {
          const Term& t = inst.terms[size_t(k)];
          bool nontrivial =
              std::find(active.begin(), active.end(), k) != active.end();
          if (!nontrivial) {
            tag.divisors[t.id] = double(d);
            continue;
          }
          // First active member acts on the d1 factor, second on d2.
          if (!side1) {
            tag.divisors[t.id] = double(blk.d2);
            side1 = true;
          } else {
            tag.divisors[t.id] = double(blk.d1);
            side2 = true;
          }
        }
        tag.free_factor = (side1 ? 1.0 : double(blk.d1)) *
                          (side2 ? 1.0 : double(blk.d2));
        tags[site] = tag;
        continue;
      }
    }

    fail(ErrorKind::IllegalPattern,
         "site " + std::to_string(site) +
             " is neither removable nor full (illegal commuting pattern)",
         site);
  }
  return tags;
}

namespace {

// Split P_black(i) * P_white(j) = |alpha><beta| by SVD; rank 0 gives zero
// vectors (the summand vanishes).
void alpha_beta(const Matrix& pb, const Matrix& pw, double cut, Vector& alpha,
                Vector& beta, bool* zero) {
  Matrix prod = pb * pw;
  Eigen::JacobiSVD<Matrix> svd(prod, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  *zero = top <= cut;
  if (*zero) {
    alpha = Vector::Zero(prod.rows());
    beta = Vector::Zero(prod.rows());
    return;
  }
  double root = std::sqrt(top);
  alpha = root * svd.matrixU().col(0);
  beta = root * svd.matrixV().col(0);
}

}  // namespace

ChainGraph build_chain_graph(const Instance& inst, const TagMap& tags,
                             const std::map<int, R1Choice>& witness) {
  ChainGraph graph;
  std::vector<int> colors(inst.terms.size());
  for (size_t k = 0; k < inst.terms.size(); ++k) {
    colors[k] = term_color(inst, inst.terms[k]);
  }

  // Per R1 site: the chosen sandwich vectors and a per-color "already used
  // the alpha route" flag.
  struct R1State {
    Vector alpha, beta;
    bool zero = false;
    bool black_used = false, white_used = false;
  };
  std::map<int, R1State> r1;
  for (const auto& [site, tag] : tags) {
    if (tag.kind != RemovKind::R1) continue;
    auto wit = witness.find(site);
    R1Choice choice;
    if (wit != witness.end()) {
      choice = wit->second;
    } else if (tag.black_projectors.size() == 1 && tag.white_projectors.size() == 1) {
      choice = {0, 0};
    } else {
      fail(ErrorKind::MissingWitness,
           "no block choice for removable site " + std::to_string(site), site);
    }
    if (choice.block_black < 0 ||
        choice.block_black >= int(tag.black_projectors.size()) ||
        choice.block_white < 0 ||
        choice.block_white >= int(tag.white_projectors.size())) {
      fail(ErrorKind::MissingWitness,
           "block choice out of range at site " + std::to_string(site), site);
    }
    if (tag.rank_table[size_t(choice.block_black)][size_t(choice.block_white)] > 1) {
      fail(ErrorKind::RankTooHigh,
           "chosen blocks overlap with rank > 1 at site " + std::to_string(site),
           site);
    }
    R1State st;
    alpha_beta(tag.black_projectors[size_t(choice.block_black)],
               tag.white_projectors[size_t(choice.block_white)],
               inst.tol.eps_rank * 100, st.alpha, st.beta, &st.zero);
    r1[site] = std::move(st);
  }

  // Order: black terms (ascending id) then white terms.
  std::vector<int> order;
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::pair<int, int>> ids;
    for (size_t k = 0; k < inst.terms.size(); ++k) {
      if (colors[k] == pass) ids.push_back({inst.terms[k].id, int(k)});
    }
    std::sort(ids.begin(), ids.end());
    for (auto [id, k] : ids) order.push_back(k);
  }

  for (int k : order) {
    const Term& t = inst.terms[size_t(k)];
    Matrix m = Matrix::Identity(t.dim(), t.dim()) - t.matrix;
    std::vector<int> legs = t.support;
    std::vector<Eigen::Index> dims = dims_for(inst, t.support);

    // Contract removable legs one at a time (leftmost first).
    size_t leg = 0;
    while (leg < legs.size()) {
      int site = legs[leg];
      const RemovalTag& tag = tags.at(site);
      bool keep = false;
      switch (tag.kind) {
        case RemovKind::TrivialDim1: {
          m = trace_leg(m, dims, leg);
          break;
        }
        case RemovKind::R2: {
          m = trace_leg(m, dims, leg);
          m /= tag.divisors.at(t.id);
          break;
        }
        case RemovKind::R1: {
          R1State& st = r1.at(site);
          if (st.zero) {
            graph.scalar = 0;
            m = trace_leg(m, dims, leg);  // shape bookkeeping only
            break;
          }
          bool is_black = colors[size_t(k)] == 0;
          const Matrix& proj = is_black
              ? tag.black_projectors[size_t(
                    witness.count(site) ? witness.at(site).block_black : 0)]
              : tag.white_projectors[size_t(
                    witness.count(site) ? witness.at(site).block_white : 0)];
          Matrix rest;
          if (acts_trivially_on_block(m, dims, leg, proj, inst, &rest)) {
            m = std::move(rest);
          } else {
            bool& used = is_black ? st.black_used : st.white_used;
            if (used) {
              fail(ErrorKind::IllegalPattern,
                   "two same-color terms act nontrivially on block at site " +
                       std::to_string(site),
                   site);
            }
            used = true;
            const Vector& v = is_black ? st.alpha : st.beta;
            m = sandwich_leg(m, dims, leg, v, v);
          }
          break;
        }
        case RemovKind::Full: {
          // Keep the leg unless the term acts trivially here.
          Matrix id = Matrix::Identity(dims[leg], dims[leg]) / double(dims[leg]);
          Matrix rest;
          if (acts_trivially_on_block(m, dims,
                                      leg, Matrix::Identity(dims[leg], dims[leg]),
                                      inst, &rest)) {
            m = std::move(rest);
          } else {
            keep = true;
          }
          break;
        }
      }
      if (keep) {
        ++leg;
      } else {
        legs.erase(legs.begin() + long(leg));
        dims.erase(dims.begin() + long(leg));
      }
    }

    if (legs.empty()) {
      graph.scalar *= m(0, 0).real();
    } else {
      ChainNode node;
      node.term_id = t.id;
      node.mat = std::move(m);
      node.legs = std::move(legs);
      node.leg_dims = std::move(dims);
      graph.nodes.push_back(std::move(node));
    }
  }

  // R1 sites where a side never used the alpha route contribute <v|v>.
  for (auto& [site, st] : r1) {
    if (st.zero) continue;
    if (!st.black_used) graph.scalar *= st.alpha.squaredNorm();
    if (!st.white_used) graph.scalar *= st.beta.squaredNorm();
  }
  // R2 free factors and untouched sites.
  std::vector<bool> touched(inst.qudit_dims.size(), false);
  for (const Term& t : inst.terms) {
    for (int s : t.support) touched[size_t(s)] = true;
  }
  for (const auto& [site, tag] : tags) {
    if (tag.kind == RemovKind::R2 && touched[size_t(site)]) {
      graph.scalar *= tag.free_factor;
    } else if (!touched[size_t(site)]) {
      graph.scalar *= double(inst.dim_of(site));
    }
  }
  return graph;
}

namespace {

// absorb: contract environment X (operator over `xlegs`) with node M over
// the shared legs; Y[(u,v),(u',v')] = sum_{s,s'} X[(u,s),(u',s')] M[(s',v),(s,v')].
void absorb(Matrix& x, std::vector<int>& xlegs, std::vector<Eigen::Index>& xdims,
            const ChainNode& node) {
  std::vector<size_t> shared_x, shared_m;
  std::vector<size_t> kept_x, new_m;
  for (size_t i = 0; i < xlegs.size(); ++i) {
    bool shared = false;
    for (size_t j = 0; j < node.legs.size(); ++j) {
      if (node.legs[j] == xlegs[i]) {
        shared_x.push_back(i);
        shared_m.push_back(j);
        shared = true;
      }
    }
    if (!shared) kept_x.push_back(i);
  }
  for (size_t j = 0; j < node.legs.size(); ++j) {
    bool shared = false;
    for (size_t i : shared_m) shared = shared || i == j;
    if (!shared) new_m.push_back(j);
  }

  // Permute X to [kept..., shared...] and M to [shared..., new...].
  std::vector<size_t> xorder = kept_x;
  xorder.insert(xorder.end(), shared_x.begin(), shared_x.end());
  Matrix xp = permute_legs(x, xdims, xorder);
  std::vector<size_t> morder = shared_m;
  morder.insert(morder.end(), new_m.begin(), new_m.end());
  Matrix mp = permute_legs(node.mat, node.leg_dims, morder);

  Eigen::Index udim = 1, sdim = 1, vdim = 1;
  for (size_t i : kept_x) udim *= xdims[i];
  for (size_t i : shared_x) sdim *= xdims[i];
  for (size_t j : new_m) vdim *= node.leg_dims[j];

  // A[(u,u'),(s,s')] = X[(u,s),(u',s')];  B[(s,s'),(v,v')] = M[(s',v),(s,v')].
  Matrix a(udim * udim, sdim * sdim);
  for (Eigen::Index u = 0; u < udim; ++u) {
    for (Eigen::Index u2 = 0; u2 < udim; ++u2) {
      for (Eigen::Index s = 0; s < sdim; ++s) {
        for (Eigen::Index s2 = 0; s2 < sdim; ++s2) {
          a(u * udim + u2, s * sdim + s2) = xp(u * sdim + s, u2 * sdim + s2);
        }
      }
    }
  }
  Matrix b(sdim * sdim, vdim * vdim);
  for (Eigen::Index s = 0; s < sdim; ++s) {
    for (Eigen::Index s2 = 0; s2 < sdim; ++s2) {
      for (Eigen::Index v = 0; v < vdim; ++v) {
        for (Eigen::Index v2 = 0; v2 < vdim; ++v2) {
          b(s * sdim + s2, v * vdim + v2) = mp(s2 * vdim + v, s * vdim + v2);
        }
      }
    }
  }
  Matrix y = a * b;

  Matrix out(udim * vdim, udim * vdim);
  for (Eigen::Index u = 0; u < udim; ++u) {
    for (Eigen::Index u2 = 0; u2 < udim; ++u2) {
      for (Eigen::Index v = 0; v < vdim; ++v) {
        for (Eigen::Index v2 = 0; v2 < vdim; ++v2) {
          out(u * vdim + v, u2 * vdim + v2) = y(u * udim + u2, v * vdim + v2);
        }
      }
    }
  }

  std::vector<int> ylegs;
  std::vector<Eigen::Index> ydims;
  for (size_t i : kept_x) {
    ylegs.push_back(xlegs[i]);
    ydims.push_back(xdims[i]);
  }
  for (size_t j : new_m) {
    ylegs.push_back(node.legs[j]);
    ydims.push_back(node.leg_dims[j]);
  }
  x = std::move(out);
  xlegs = std::move(ylegs);
  xdims = std::move(ydims);
}

}  // namespace

double contract_chains(const ChainGraph& graph) {
  size_t n = graph.nodes.size();
  // Adjacency by shared legs.
  std::vector<std::vector<size_t>> adj(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      bool share = false;
      for (int l : graph.nodes[i].legs) {
        for (int l2 : graph.nodes[j].legs) share = share || l == l2;
      }
      if (share) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (adj[i].size() > 2) {
      fail(ErrorKind::DegreeViolation,
           "term " + std::to_string(graph.nodes[i].term_id) +
               " links more than two neighbours",
           graph.nodes[i].term_id);
    }
  }

  double value = graph.scalar;
  std::vector<bool> visited(n, false);
  for (size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    // Walk to an endpoint if one exists (path); otherwise it is a cycle.
    size_t head = start;
    size_t prev = SIZE_MAX;
    for (size_t hops = 0; hops <= n; ++hops) {
      size_t next = SIZE_MAX;
      for (size_t nb : adj[head]) {
        if (nb != prev) next = nb;
      }
      if (adj[head].size() <= 1) break;  // endpoint
      if (next == SIZE_MAX || next == start) break;
      prev = head;
      head = next;
      if (head == start) break;  // cycle closed
    }

    // Contract along the walk from `head`.
    visited[head] = true;
    Matrix env = graph.nodes[head].mat;
    std::vector<int> legs = graph.nodes[head].legs;
    std::vector<Eigen::Index> dims = graph.nodes[head].leg_dims;
    size_t cur = head;
    size_t came = SIZE_MAX;
    while (true) {
      size_t next = SIZE_MAX;
      for (size_t nb : adj[cur]) {
        if (nb != came && !visited[nb]) next = nb;
      }
      if (next == SIZE_MAX) {
        // Close any remaining legs against the first node (cycle) or finish.
        break;
      }
      visited[next] = true;
      absorb(env, legs, dims, graph.nodes[next]);
      came = cur;
      cur = next;
    }
    if (!legs.empty()) {
      // A cycle leaves the walk with legs shared against the start node;
      // they were already absorbed because the start node appears once.
      // Remaining legs at this point mean the component is a single node
      // with self-legs, which cannot happen; treat as an error.
      fail(ErrorKind::DegreeViolation, "dangling legs after chain contraction");
    }
    value *= env(0, 0).real();
  }
  return value;
}

double eliminate_and_contract(const Instance& inst, const TagMap& tags,
                              const std::map<int, R1Choice>& witness) {
  ChainGraph graph = build_chain_graph(inst, tags, witness);
  double value = contract_chains(graph);
  if (value < 0 && value > -1e-9 * std::max(1.0, std::abs(graph.scalar))) {
    value = 0;
  }
  return value;
}

}  // namespace clh
