#include "clh/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clh/linalg.hpp"

namespace clh {

namespace {

Eigen::Map<const Vector> vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

// Uniform double in [0, 1) with pinned bit-level behavior.
double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; avoids the implementation-defined std::normal_distribution so
// that seeded runs reproduce exactly.
double standard_normal(std::mt19937_64& rng) {
  double u = uniform01(rng);
  double v = uniform01(rng);
  if (u <= 0) u = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

// Seeded Hermitian combination of a spanning set.
Matrix random_hermitian_element(const std::vector<Matrix>& basis, Eigen::Index dim,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix out = Matrix::Zero(dim, dim);
  for (const Matrix& b : basis) {
    double re = standard_normal(rng);
    double im = standard_normal(rng);
    out += Complex(re, im) * b;
  }
  out = (out + out.adjoint()) / 2.0;
  return out;
}

}  // namespace

Matrix MatrixAlgebra::project(const Matrix& x) const {
  Matrix out = Matrix::Zero(dim, dim);
  for (const Matrix& b : basis) {
    out += hs_inner(b, x) * b;
  }
  return out;
}

bool MatrixAlgebra::contains(const Matrix& x, double eps) const {
  return (x - project(x)).norm() <= eps * std::max(1.0, x.norm());
}

std::vector<Eigen::Index> BlockDecomposition::profile() const {
  std::vector<Eigen::Index> out;
  for (const Block& b : blocks) out.push_back(b.block_dim());
  std::sort(out.begin(), out.end());
  return out;
}

MatrixAlgebra generate_algebra(const std::vector<Matrix>& gens, Eigen::Index dim,
                               const Tolerance& tol) {
  MatrixAlgebra alg;
  alg.dim = dim;
  const double cut = 1e-10;

  std::vector<Matrix> basis;
  auto add = [&](const Matrix& candidate) -> bool {
    Matrix residual = candidate;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& b : basis) {
        residual -= hs_inner(b, residual) * b;
      }
    }
    double n = residual.norm();
    if (n <= cut * std::max(1.0, candidate.norm())) return false;
    basis.push_back(residual / n);
    return true;
  };

  add(Matrix::Identity(dim, dim));
  for (const Matrix& g : gens) {
    if (g.rows() != dim || g.cols() != dim) {
      fail(ErrorKind::BadShape, "generator dimension mismatch");
    }
    add(g);
    add(g.adjoint());
  }

  // Close under products; `frontier` marks elements whose products with the
  // rest have not been expanded yet. Bounded by dim^2 basis elements.
  size_t expanded = 0;
  while (expanded < basis.size() && Eigen::Index(basis.size()) < dim * dim) {
    size_t k = expanded++;
    for (size_t j = 0; j < basis.size() && Eigen::Index(basis.size()) < dim * dim; ++j) {
      Matrix p = basis[k] * basis[j];
      if (add(p)) add(p.adjoint());
      if (j < expanded - 1) {
        Matrix q = basis[j] * basis[k];
        if (add(q)) add(q.adjoint());
      }
    }
  }

  alg.basis = std::move(basis);
  alg.contains_identity = true;
  return alg;
}

Matrix permute_legs(const Matrix& m, const std::vector<Eigen::Index>& dims,
                    const std::vector<size_t>& order) {
  Eigen::Index total = 1;
  for (auto d : dims) total *= d;
  if (total != m.rows() || order.size() != dims.size()) {
    fail(ErrorKind::BadShape, "permute_legs shape mismatch");
  }
  std::vector<Eigen::Index> new_dims(order.size());
  for (size_t k = 0; k < order.size(); ++k) new_dims[k] = dims[order[k]];

  auto decompose = [&](Eigen::Index idx, std::vector<Eigen::Index>& digits) {
    for (size_t k = dims.size(); k-- > 0;) {
      digits[k] = idx % dims[k];
      idx /= dims[k];
    }
  };
  auto compose_new = [&](const std::vector<Eigen::Index>& digits) {
    Eigen::Index idx = 0;
    for (size_t k = 0; k < order.size(); ++k) idx = idx * new_dims[k] + digits[order[k]];
    return idx;
  };

  Matrix out(total, total);
  std::vector<Eigen::Index> dr(dims.size()), dc(dims.size());
  for (Eigen::Index r = 0; r < total; ++r) {
    decompose(r, dr);
    Eigen::Index nr = compose_new(dr);
    for (Eigen::Index c = 0; c < total; ++c) {
      decompose(c, dc);
      out(nr, compose_new(dc)) = m(r, c);
    }
  }
  return out;
}

MatrixAlgebra induced_algebra_on_leg(const Matrix& m,
                                     const std::vector<Eigen::Index>& dims,
                                     size_t leg, const Tolerance& tol) {
  if (leg >= dims.size()) {
    fail(ErrorKind::SiteNotInSupport, "leg index out of range");
  }
  std::vector<size_t> order;
  order.push_back(leg);
  for (size_t k = 0; k < dims.size(); ++k) {
    if (k != leg) order.push_back(k);
  }
  Matrix perm = permute_legs(m, dims, order);

  Eigen::Index d = dims[leg];
  Eigen::Index rest = m.rows() / d;
  std::vector<Matrix> coeffs;
  coeffs.reserve(size_t(rest * rest));
  for (Eigen::Index i = 0; i < rest; ++i) {
    for (Eigen::Index j = 0; j < rest; ++j) {
      Matrix h(d, d);
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          h(a, b) = perm(a * rest + i, b * rest + j);
        }
      }
      if (h.norm() > 1e-12) coeffs.push_back(std::move(h));
    }
  }
  return generate_algebra(coeffs, d, tol);
}

MatrixAlgebra induced_algebra(const Term& term, int site, const Instance& inst) {
  int leg = term.leg_of(site);
  if (leg < 0) {
    fail(ErrorKind::SiteNotInSupport,
         "site " + std::to_string(site) + " not in support of term " +
             std::to_string(term.id));
  }
  return induced_algebra_on_leg(term.matrix, dims_for(inst, term.support),
                                size_t(leg), inst.tol);
}

MatrixAlgebra center(const MatrixAlgebra& alg, const Tolerance& tol) {
  Eigen::Index m = alg.span_dim();
  Eigen::Index d = alg.dim;
  if (m == 0) return alg;

  // Solve [x, b_k] = 0 for x = sum_i c_i b_i: stack the linear maps
  // c -> vec([b_i, b_k]) for all k and take the kernel.
  Matrix system(m * d * d, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Matrix comm = alg.basis[size_t(i)] * alg.basis[size_t(k)] -
                    alg.basis[size_t(k)] * alg.basis[size_t(i)];
      system.block(k * d * d, i, d * d, 1) = vec(comm);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  double cut = std::max(1e-10, tol.eps_rank) * std::max(1.0, svd.singularValues()(0));
  MatrixAlgebra z;
  z.dim = d;
  for (Eigen::Index k = 0; k < m; ++k) {
    double sigma = k < svd.singularValues().size() ? svd.singularValues()(k) : 0.0;
    if (sigma <= cut) {
      Matrix elem = Matrix::Zero(d, d);
      for (Eigen::Index i = 0; i < m; ++i) {
        elem += svd.matrixV()(i, k) * alg.basis[size_t(i)];
      }
      z.basis.push_back(std::move(elem));
    }
  }
  if (z.basis.empty()) {
    // The identity always commutes; numerical fallback.
    z.basis.push_back(Matrix::Identity(d, d) / std::sqrt(double(d)));
  }
  return z;
}

namespace {

// Cluster the ascending eigenvalues of `eig` with a relative gap threshold;
// returns cluster boundaries [start, stop).
std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_eigenvalues(
    const EigenDecomposition& eig, double gap) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index n = eig.eigenvalues.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && eig.eigenvalues(stop) - eig.eigenvalues(stop - 1) <= gap) ++stop;
    out.push_back({start, stop});
    start = stop;
  }
  return out;
}

BlockDecomposition try_structure_decompose(const MatrixAlgebra& alg,
                                           const Tolerance& tol,
                                           std::uint64_t seed) {
  Eigen::Index d = alg.dim;
  MatrixAlgebra z = center(alg, tol);
  Eigen::Index m = z.span_dim();  // number of minimal central projectors

  Matrix zelem = random_hermitian_element(z.basis, d, seed);
  EigenDecomposition eig = hermitian_eig(zelem, tol);
  double scale = std::max(1.0, zelem.norm());
  auto clusters = cluster_eigenvalues(eig, 1e-6 * scale);
  if (Eigen::Index(clusters.size()) != m) {
    fail(ErrorKind::NumericalDegeneracy,
         "central element eigenvalue clusters do not match center dimension");
  }

  BlockDecomposition out;
  for (auto [start, stop] : clusters) {
    Block blk;
    Eigen::Index bd = stop - start;  // block dimension
    Matrix basis = eig.eigenvectors.middleCols(start, bd);
    blk.projector = basis * basis.adjoint();

    // Restrict the algebra to the block and find its span dimension d1^2.
    std::vector<Matrix> restricted;
    for (const Matrix& b : alg.basis) {
      restricted.push_back(basis.adjoint() * b * basis);
    }
    MatrixAlgebra ralg = generate_algebra(restricted, bd, tol);
    Eigen::Index span = ralg.span_dim();
    Eigen::Index d1 = Eigen::Index(std::llround(std::sqrt(double(span))));
    if (d1 * d1 != span || bd % d1 != 0) {
      fail(ErrorKind::NumericalDegeneracy,
           "restricted algebra span is not a full matrix algebra");
    }
    Eigen::Index d2 = bd / d1;
    blk.d1 = d1;
    blk.d2 = d2;

    // Minimal projection: rank-d2 spectral projector of a random Hermitian
    // element of the restricted algebra.
    Matrix w;  // bd x d2, orthonormal basis of the minimal eigenspace
    if (d1 == 1) {
      w = Matrix::Identity(bd, bd);
    } else {
      Matrix y = random_hermitian_element(ralg.basis, bd, seed + 0x9e3779b9);
      EigenDecomposition yeig = hermitian_eig(y, tol);
      auto yclusters = cluster_eigenvalues(yeig, 1e-6 * std::max(1.0, y.norm()));
      std::pair<Eigen::Index, Eigen::Index> smallest{-1, -1};
      for (auto cl : yclusters) {
        if (smallest.first < 0 ||
            cl.second - cl.first < smallest.second - smallest.first) {
          smallest = cl;
        }
      }
      if (smallest.second - smallest.first != d2) {
        fail(ErrorKind::NumericalDegeneracy,
             "minimal eigenspace of random element is not d2-dimensional");
      }
      w = yeig.eigenvectors.middleCols(smallest.first, d2);
    }

    // Orbit of w's first column under the restricted algebra gives the d1
    // "row" operators; track Gram-Schmidt coefficients to reuse them.
    Vector w1 = w.col(0);
    std::vector<Vector> rows;
    std::vector<Vector> row_coeffs;  // combination over ralg.basis
    for (Eigen::Index j = 0; j < ralg.span_dim() && Eigen::Index(rows.size()) < d1;
         ++j) {
      Vector v = ralg.basis[size_t(j)] * w1;
      Vector coeff = Vector::Zero(ralg.span_dim());
      coeff(j) = 1.0;
      for (size_t k = 0; k < rows.size(); ++k) {
        Complex overlap = rows[k].dot(v);
        v -= overlap * rows[k];
        coeff -= overlap * row_coeffs[k];
      }
      double n = v.norm();
      if (n > 1e-8) {
        rows.push_back(v / n);
        row_coeffs.push_back(coeff / n);
      }
    }
    if (Eigen::Index(rows.size()) != d1) {
      fail(ErrorKind::NumericalDegeneracy, "orbit basis construction failed");
    }

    // u_{a,beta} = x_a w_beta in ambient coordinates.
    Matrix W(d, d1 * d2);
    for (Eigen::Index a = 0; a < d1; ++a) {
      Matrix xa = Matrix::Zero(bd, bd);
      for (Eigen::Index j = 0; j < ralg.span_dim(); ++j) {
        xa += row_coeffs[size_t(a)](j) * ralg.basis[size_t(j)];
      }
      for (Eigen::Index beta = 0; beta < d2; ++beta) {
        W.col(a * d2 + beta) = basis * (xa * w.col(beta));
      }
    }
    if ((W.adjoint() * W - Matrix::Identity(d1 * d2, d1 * d2)).norm() > 1e-7) {
      fail(ErrorKind::NumericalDegeneracy, "block unitary is not an isometry");
    }
    blk.block_unitary = W.adjoint();
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

}  // namespace

BlockDecomposition structure_decompose(const MatrixAlgebra& alg, const Tolerance& tol) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    try {
      return try_structure_decompose(alg, tol, tol.seed + std::uint64_t(attempt));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericalDegeneracy || attempt == 7) throw;
    }
  }
  fail(ErrorKind::NumericalDegeneracy, "structure_decompose exhausted re-seeds");
}

CommuteWay classify_way(const Term& a, const Term& b, int shared_site,
                        const Instance& inst) {
  std::vector<int> shared = shared_sites(a, b);
  if (shared.size() != 1 || shared[0] != shared_site) {
    fail(ErrorKind::NotSingleOverlap,
         "terms must overlap exactly on the given site");
  }
  std::vector<int> joint = support_union(a.support, b.support);
  std::vector<Eigen::Index> dims = dims_for(inst, joint);
  Matrix ea = embed(a.matrix, a.support, joint, dims);
  Matrix eb = embed(b.matrix, b.support, joint, dims);
  double scale = std::max(1.0, a.matrix.norm() * b.matrix.norm());
  if (commutator_norm(ea, eb) > inst.tol.eps_eq * scale) {
    fail(ErrorKind::NotCommuting, "terms do not commute");
  }

  MatrixAlgebra alg_a = induced_algebra(a, shared_site, inst);
  MatrixAlgebra alg_b = induced_algebra(b, shared_site, inst);
  if (alg_a.is_trivial() && alg_b.is_trivial()) {
    fail(ErrorKind::BothTrivial, "both induced algebras are trivial");
  }

  BlockDecomposition da = structure_decompose(alg_a, inst.tol);
  BlockDecomposition db = structure_decompose(alg_b, inst.tol);

  CommuteWay way;
  // "Better" = more blocks; ties go to the first argument.
  if (db.blocks.size() > da.blocks.size()) {
    way.decomposition = db;
    way.better_source = 1;
  } else {
    way.decomposition = da;
    way.better_source = 0;
  }
  way.profile = way.decomposition.profile();
  if (way.decomposition.blocks.size() == 1) {
    const Block& blk = way.decomposition.blocks[0];
    // A full single block of prime dimension forces one side to be trivial.
    if (alg_a.is_trivial()) {
      way.which_trivial = 0;
    } else if (alg_b.is_trivial()) {
      way.which_trivial = 1;
    } else if (blk.d1 == 1 || blk.d2 == 1) {
      // Neither algebra is trivial but the block admits no split: numerical
      // borderline; report the smaller algebra as trivial-acting.
      way.which_trivial = alg_a.span_dim() <= alg_b.span_dim() ? 0 : 1;
    }
  }
  return way;
}

}  // namespace clh
