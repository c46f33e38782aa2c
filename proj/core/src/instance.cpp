#include "clh/instance.hpp"

#include <algorithm>
#include <sstream>

namespace clh {

bool Term::acts_on(int site) const {
  return std::find(support.begin(), support.end(), site) != support.end();
}

int Term::leg_of(int site) const {
  for (size_t k = 0; k < support.size(); ++k) {
    if (support[k] == site) return int(k);
  }
  return -1;
}

std::int64_t Instance::global_dim() const {
  std::int64_t d = 1;
  for (auto q : qudit_dims) {
    d *= q;
    if (d > kDimCap) return d;
  }
  return d;
}

const Term& Instance::term_by_id(int id) const {
  for (const Term& t : terms) {
    if (t.id == id) return t;
  }
  fail(ErrorKind::ValidationError, "unknown term id " + std::to_string(id));
}

std::vector<int> Instance::terms_on_site(int site) const {
  std::vector<int> out;
  for (size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].acts_on(site)) out.push_back(int(k));
  }
  return out;
}

std::vector<int> support_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  for (int s : b) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<int> shared_sites(const Term& a, const Term& b) {
  std::vector<int> out;
  for (int s : a.support) {
    if (b.acts_on(s)) out.push_back(s);
  }
  return out;
}

std::vector<Eigen::Index> dims_for(const Instance& inst, const std::vector<int>& sites) {
  std::vector<Eigen::Index> dims;
  dims.reserve(sites.size());
  for (int s : sites) dims.push_back(inst.dim_of(s));
  return dims;
}

Matrix embed(const Matrix& m, const std::vector<int>& from,
             const std::vector<int>& to, const std::vector<Eigen::Index>& to_dims) {
  Eigen::Index total = 1;
  for (auto d : to_dims) total *= d;
  if (total > kDimCap) {
    fail(ErrorKind::OverflowDim, "embedding exceeds the dense dimension cap");
  }

  // Map each target digit position to the source leg (or -1 for padding).
  std::vector<int> leg_of_target(to.size(), -1);
  std::vector<Eigen::Index> from_dims(from.size(), 1);
  for (size_t k = 0; k < to.size(); ++k) {
    for (size_t j = 0; j < from.size(); ++j) {
      if (from[j] == to[k]) {
        leg_of_target[k] = int(j);
        from_dims[j] = to_dims[k];
      }
    }
  }
  for (size_t j = 0; j < from.size(); ++j) {
    bool found = false;
    for (int lk : leg_of_target) found = found || lk == int(j);
    if (!found) {
      fail(ErrorKind::BadShape, "embed: source support is not contained in target");
    }
  }
  Eigen::Index from_total = 1;
  for (auto d : from_dims) from_total *= d;
  if (from_total != m.rows()) {
    fail(ErrorKind::BadShape, "embed: dims do not match source matrix");
  }

  std::vector<Eigen::Index> digits_r(to.size()), digits_c(to.size());
  auto decompose = [&](Eigen::Index idx, std::vector<Eigen::Index>& digits) {
    for (size_t k = to.size(); k-- > 0;) {
      digits[k] = idx % to_dims[k];
      idx /= to_dims[k];
    }
  };
  auto source_index = [&](const std::vector<Eigen::Index>& digits) {
    Eigen::Index idx = 0;
    for (size_t j = 0; j < from.size(); ++j) {
      for (size_t k = 0; k < to.size(); ++k) {
        if (leg_of_target[k] == int(j)) idx = idx * to_dims[k] + digits[k];
      }
    }
    return idx;
  };

  Matrix out = Matrix::Zero(total, total);
  for (Eigen::Index r = 0; r < total; ++r) {
    decompose(r, digits_r);
    for (Eigen::Index c = 0; c < total; ++c) {
      decompose(c, digits_c);
      bool identity_on_padding = true;
      for (size_t k = 0; k < to.size(); ++k) {
        if (leg_of_target[k] < 0 && digits_r[k] != digits_c[k]) {
          identity_on_padding = false;
          break;
        }
      }
      if (identity_on_padding) {
        out(r, c) = m(source_index(digits_r), source_index(digits_c));
      }
    }
  }
  return out;
}

Matrix embed_site_op(const Matrix& site_op, int site, const Term& term,
                     const Instance& inst) {
  return embed(site_op, {site}, term.support, dims_for(inst, term.support));
}

void Instance::validate(bool require_projections) const {
  lattice.validate();
  tol.validate();
  if (int(qudit_dims.size()) != lattice.site_count()) {
    fail(ErrorKind::ValidationError,
         "qudit_dims length " + std::to_string(qudit_dims.size()) +
             " does not match lattice site count " +
             std::to_string(lattice.site_count()));
  }
  for (auto d : qudit_dims) {
    if (d < 1) fail(ErrorKind::ValidationError, "qudit dimensions must be >= 1");
  }

  std::vector<Face> faces = lattice.faces();
  std::set<int> seen_ids;
  for (const Term& t : terms) {
    std::string label = "term " + std::to_string(t.id);
    if (!seen_ids.insert(t.id).second) {
      fail(ErrorKind::ValidationError, label + ": duplicate term id");
    }
    if (t.support.empty() || t.support.size() > 4) {
      fail(ErrorKind::ValidationError, label + ": support must have 1..4 sites");
    }
    std::set<int> distinct(t.support.begin(), t.support.end());
    if (distinct.size() != t.support.size()) {
      fail(ErrorKind::ValidationError, label + ": support has repeated sites");
    }
    for (int s : t.support) {
      if (s < 0 || s >= int(qudit_dims.size())) {
        fail(ErrorKind::ValidationError, label + ": support site out of range");
      }
    }
    // Geometric locality: the support must fit inside one face.
    bool inside_face = false;
    for (const Face& f : faces) {
      std::set<int> fs(f.sites.begin(), f.sites.end());
      bool all = true;
      for (int s : t.support) all = all && fs.count(s) > 0;
      if (all) {
        inside_face = true;
        break;
      }
    }
    if (!inside_face) {
      fail(ErrorKind::ValidationError,
           label + ": support does not lie inside any plaquette/star");
    }
    Eigen::Index want = 1;
    for (int s : t.support) want *= dim_of(s);
    if (t.matrix.rows() != want || t.matrix.cols() != want) {
      fail(ErrorKind::ValidationError,
           label + ": matrix dim does not match support dims");
    }
    double scale = std::max(1.0, t.matrix.norm());
    if (hermiticity_defect(t.matrix) > tol.eps_eq * scale) {
      fail(ErrorKind::ValidationError, label + ": matrix is not Hermitian", t.id);
    }
    if (require_projections &&
        (t.matrix * t.matrix - t.matrix).norm() > tol.eps_eq * scale) {
      fail(ErrorKind::ValidationError, label + ": matrix is not a projection", t.id);
    }
    if (t.factors) {
      if (t.factors->size() != t.support.size()) {
        fail(ErrorKind::ValidationError, label + ": factor count != support size");
      }
      Matrix prod = Matrix::Identity(1, 1);
      bool any_zero = false;
      for (size_t k = 0; k < t.factors->size(); ++k) {
        const Matrix& f = (*t.factors)[k];
        if (f.rows() != dim_of(t.support[k]) || f.cols() != f.rows()) {
          fail(ErrorKind::ValidationError, label + ": factor dim mismatch");
        }
        if (hermiticity_defect(f) > tol.eps_eq * std::max(1.0, f.norm())) {
          fail(ErrorKind::ValidationError, label + ": factor is not Hermitian");
        }
        any_zero = any_zero || f.norm() <= tol.eps_rank;
        prod = kron(prod, f);
      }
      if (!approx_equal(prod, t.matrix, tol.eps_eq)) {
        fail(ErrorKind::ValidationError,
             label + ": matrix does not equal the tensor of its factors");
      }
      if (any_zero && t.matrix.norm() > tol.eps_eq) {
        fail(ErrorKind::ValidationError, label + ": zero factor in nonzero term");
      }
      // Zero terms must be stored as a tensor of all-zero factors.
      if (t.matrix.norm() <= tol.eps_rank && !any_zero) {
        fail(ErrorKind::ValidationError, label + ": zero term must use zero factors");
      }
      if (t.matrix.norm() <= tol.eps_rank) {
        for (const Matrix& f : *t.factors) {
          if (f.norm() > tol.eps_rank) {
            fail(ErrorKind::ValidationError,
                 label + ": zero term must use all-zero factors");
          }
        }
      }
    }
  }

  CommuteReport report = check_commuting(*this);
  if (!report.pass) {
    std::ostringstream msg;
    msg << "terms " << report.worst_a << " and " << report.worst_b
        << " do not commute (||[a,b]||_F = " << report.max_commutator_norm << ")";
    fail(ErrorKind::ValidationError, msg.str());
  }
}

CommuteReport check_commuting(const Instance& inst) {
  CommuteReport report;
  for (size_t i = 0; i < inst.terms.size(); ++i) {
    for (size_t j = i + 1; j < inst.terms.size(); ++j) {
      const Term& a = inst.terms[i];
      const Term& b = inst.terms[j];
      if (shared_sites(a, b).empty()) continue;
      std::vector<int> joint = support_union(a.support, b.support);
      std::vector<Eigen::Index> dims = dims_for(inst, joint);
      Matrix ea = embed(a.matrix, a.support, joint, dims);
      Matrix eb = embed(b.matrix, b.support, joint, dims);
      double norm = commutator_norm(ea, eb);
      if (norm > report.max_commutator_norm) {
        report.max_commutator_norm = norm;
        report.worst_a = a.id;
        report.worst_b = b.id;
      }
    }
  }
  double scale = 1.0;
  for (const Term& t : inst.terms) scale = std::max(scale, t.matrix.norm());
  report.pass = report.max_commutator_norm <= inst.tol.eps_eq * scale * scale;
  return report;
}

}  // namespace clh
