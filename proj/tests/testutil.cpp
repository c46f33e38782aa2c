#include "testutil.hpp"

#include <cmath>

#include "clh/linalg.hpp"

namespace clh::testing {

double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng) {
  double u = uniform01(rng);
  double v = uniform01(rng);
  if (u <= 0) u = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + int(rng() % std::uint64_t(hi - lo + 1));
}

Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  Matrix g(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      g(r, c) = Complex(normal(rng), normal(rng));
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix rdiag = qr.matrixQR().diagonal().asDiagonal();
  for (Eigen::Index k = 0; k < d; ++k) {
    Complex ph = rdiag(k, k);
    double mag = std::abs(ph);
    q.col(k) *= mag > 0 ? ph / mag : 1.0;
  }
  return q;
}

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  Matrix g(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      g(r, c) = Complex(normal(rng), normal(rng));
    }
  }
  return (g + g.adjoint()) / 2.0;
}

namespace {

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Matrix pauli_z() {
  Matrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

Matrix kron4(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  return kron(kron(a, b), kron(c, d));
}

Instance toric_base(bool projected) {
  Instance inst;
  inst.lattice = Lattice2D{2, 2, Boundary::Torus, Carrier::Edges, 0};
  inst.qudit_dims.assign(8, 2);
  inst.tol = Tolerance{};

  Matrix x = pauli_x(), z = pauli_z(), i2 = Matrix::Identity(2, 2);
  std::vector<Face> faces = inst.lattice.faces();
  int id = 0;
  for (const Face& f : faces) {
    Term t;
    t.id = id++;
    t.support = f.sites;
    const Matrix& p = f.color == 0 ? x : z;
    Matrix raw = kron4(p, p, p, p);
    if (projected) {
      t.matrix = (Matrix::Identity(16, 16) - raw) / 2.0;
    } else {
      t.matrix = raw;
      t.factors = std::vector<Matrix>{p, p, p, p};
    }
    inst.terms.push_back(std::move(t));
  }
  inst.validate();
  return inst;
}

}  // namespace

Instance toric_code_2x2() { return toric_base(true); }
Instance toric_code_2x2_raw() { return toric_base(false); }

Instance conjugated_classical(int rows, int cols, std::vector<Eigen::Index> dims,
                              std::uint64_t seed, double zero_bias) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.lattice = Lattice2D{rows, cols, Boundary::Open, Carrier::Vertices, 0};
  if (int(dims.size()) != inst.lattice.site_count()) {
    fail(ErrorKind::BadShape, "dims size mismatch");
  }
  inst.qudit_dims = dims;
  inst.tol = Tolerance{};
  inst.tol.seed = seed;

  std::vector<Matrix> local_unitaries;
  for (auto d : dims) local_unitaries.push_back(random_unitary(d, rng));

  std::vector<Face> faces = inst.lattice.faces();
  int id = 0;
  for (const Face& f : faces) {
    Eigen::Index dim = 1;
    for (int s : f.sites) dim *= dims[size_t(s)];
    Matrix diag = Matrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      diag(k, k) = uniform01(rng) < zero_bias ? 0.0 : 1.0;
    }
    Matrix u = Matrix::Identity(1, 1);
    for (int s : f.sites) u = kron(u, local_unitaries[size_t(s)]);
    Term t;
    t.id = id++;
    t.support = f.sites;
    t.matrix = u * diag * u.adjoint();
    inst.terms.push_back(std::move(t));
  }
  inst.validate(/*require_projections=*/true);
  return inst;
}

namespace {

// Generalized entangled basis of C^d x C^d: (X^a Z^b x I)|Phi_d> for the
// clock/shift pair; projectors pairwise commute.
std::vector<Matrix> entangled_basis_projectors(Eigen::Index d) {
  Matrix shift = Matrix::Zero(d, d);
  Matrix clock = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    shift((k + 1) % d, k) = 1.0;
    clock(k, k) = std::polar(1.0, 2.0 * M_PI * double(k) / double(d));
  }
  Vector phi = Vector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) phi(k * d + k) = 1.0 / std::sqrt(double(d));
  std::vector<Matrix> projs;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      Matrix op = Matrix::Identity(d, d);
      for (Eigen::Index k = 0; k < a; ++k) op = shift * op;
      for (Eigen::Index k = 0; k < b; ++k) op = clock * op;
      Vector v = kron(op, Matrix::Identity(d, d)) * phi;
      projs.push_back(v * v.adjoint());
    }
  }
  return projs;
}

}  // namespace

Instance bell_chain(int plaquettes, Eigen::Index d, bool cycle, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xbe11c4a1);
  Instance inst;
  int cols = cycle ? plaquettes : plaquettes + 1;
  inst.lattice = Lattice2D{2, cols, cycle ? Boundary::Torus : Boundary::Open,
                           Carrier::Vertices, 0};
  inst.qudit_dims.assign(size_t(inst.lattice.site_count()), d);
  inst.tol = Tolerance{};
  inst.tol.seed = seed;

  std::vector<Matrix> basis = entangled_basis_projectors(d);
  auto pick = [&]() { return basis[size_t(rng() % basis.size())]; };

  // Plaquette (0, c) has corners (0,c), (0,c+1), (1,c), (1,c+1); the edge
  // pair shared with the next plaquette is ((0,c+1), (1,c+1)). Build each
  // term as B_left(tl, bl) x B_right(tr, br) with support order
  // [tl, tr, bl, br], matching the face site order.
  for (int c = 0; c < plaquettes; ++c) {
    Term t;
    t.id = c;
    int tl = inst.lattice.vertex_id(0, c);
    int tr = inst.lattice.vertex_id(0, c + 1);
    int bl = inst.lattice.vertex_id(1, c);
    int br = inst.lattice.vertex_id(1, c + 1);
    t.support = {tl, tr, bl, br};
    Matrix left = pick();
    Matrix right = pick();
    // Reorder (tl, bl, tr, br) -> support order (tl, tr, bl, br).
    Matrix raw = kron(left, right);  // legs: tl, bl, tr, br
    std::vector<Eigen::Index> dims{d, d, d, d};
    Matrix m = permute_legs(raw, dims, {0, 2, 1, 3});
    t.matrix = std::move(m);
    inst.terms.push_back(std::move(t));
  }
  inst.validate(/*require_projections=*/true);
  return inst;
}

Instance planted_semi_separable(std::uint64_t seed, int* site_out) {
  std::mt19937_64 rng(seed ^ 0x5e111);
  Instance inst;
  inst.lattice = Lattice2D{2, 3, Boundary::Open, Carrier::Vertices, 0};
  // Sites 0..5; plaquettes {0,1,3,4} and {1,2,4,5}; planted site 1.
  Eigen::Index dq = uniform_int(rng, 0, 1) ? 3 : 2;
  std::vector<Eigen::Index> dims{2, dq, 2, 1, 2, 1};
  inst.qudit_dims = dims;
  inst.tol = Tolerance{};
  inst.tol.seed = seed;

  // Block split of the planted site: first basis vector vs the rest,
  // rotated by a random unitary.
  Matrix w = random_unitary(dq, rng);

  auto random_projection = [&](Eigen::Index d) {
    if (d == 1) {
      Matrix p(1, 1);
      p(0, 0) = uniform_int(rng, 0, 1);
      return p;
    }
    Matrix u = random_unitary(d, rng);
    Matrix diag = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) diag(k, k) = uniform_int(rng, 0, 1);
    return Matrix(u * diag * u.adjoint());
  };
  auto block_projection = [&]() {
    // Block diagonal w.r.t. the split {w e_0} + {w e_1..}.
    Matrix diag = Matrix::Zero(dq, dq);
    diag(0, 0) = uniform_int(rng, 0, 1);
    Matrix sub = random_projection(dq - 1);
    diag.bottomRightCorner(dq - 1, dq - 1) = sub;
    return Matrix(w * diag * w.adjoint());
  };

  // Exempt term h0 on plaquette {0,1,3,4}: conditioned on the computational
  // basis of sites 0 and 4 (site 3 has dimension 1), place projections on
  // site 1. Assignments with site-4 state |0> get arbitrary projections
  // (these may break the block split); |1> assignments stay block-diagonal.
  Eigen::Index cond_dim = 2 * 1 * 2;  // sites 0, 3, 4
  Matrix h0 = Matrix::Zero(cond_dim / 2 * dq * 2, cond_dim / 2 * dq * 2);
  // Support order (0, 1, 3, 4): legs dims (2, dq, 1, 2).
  for (int s0 = 0; s0 < 2; ++s0) {
    for (int s4 = 0; s4 < 2; ++s4) {
      Matrix m = s4 == 0 ? random_projection(dq) : block_projection();
      for (Eigen::Index a = 0; a < dq; ++a) {
        for (Eigen::Index b = 0; b < dq; ++b) {
          Eigen::Index row = ((s0 * dq + a) * 1 + 0) * 2 + s4;
          Eigen::Index col = ((s0 * dq + b) * 1 + 0) * 2 + s4;
          h0(row, col) = m(a, b);
        }
      }
    }
  }
  Term t0;
  t0.id = 0;
  t0.support = {0, 1, 3, 4};
  t0.matrix = std::move(h0);

  // Non-exempt term on plaquette {1,2,4,5}: block-diagonal at site 1,
  // diagonal on sites 2, 4, 5; commutes with h0 because on the shared sites
  // (1 and 4) it is block-aligned where h0 is arbitrary only at s4 = 0...
  // make its site-4 dependence diagonal and its site-1 factor block-scalar
  // when s4 = 0.
  Eigen::Index d1dim = dq * 2 * 2 * 1;  // support order (1, 2, 4, 5)
  Matrix h1 = Matrix::Zero(d1dim, d1dim);
  for (int s2 = 0; s2 < 2; ++s2) {
    for (int s4 = 0; s4 < 2; ++s4) {
      Matrix m;
      if (s4 == 0) {
        // Must commute with every random projection on site 1: scalar.
        Matrix scalar = Matrix::Identity(dq, dq);
        scalar *= uniform_int(rng, 0, 1);
        m = scalar;
      } else {
        m = block_projection();
      }
      for (Eigen::Index a = 0; a < dq; ++a) {
        for (Eigen::Index b = 0; b < dq; ++b) {
          Eigen::Index row = ((a * 2 + s2) * 2 + s4) * 1 + 0;
          Eigen::Index col = ((b * 2 + s2) * 2 + s4) * 1 + 0;
          h1(row, col) = m(a, b);
        }
      }
    }
  }
  Term t1;
  t1.id = 1;
  t1.support = {1, 2, 4, 5};
  t1.matrix = std::move(h1);

  inst.terms.push_back(std::move(t0));
  inst.terms.push_back(std::move(t1));
  inst.validate(/*require_projections=*/true);
  if (site_out) *site_out = 1;
  return inst;
}

Instance factorized_pattern(int plaquettes, std::uint64_t seed, bool conjugate,
                            bool plant_separable) {
  std::mt19937_64 rng(seed ^ 0xfac70a1);
  Instance inst;
  int cols = plaquettes + 1;
  inst.lattice = Lattice2D{2, cols, Boundary::Open, Carrier::Vertices, 0};
  int sites = inst.lattice.site_count();

  Eigen::Index base = 2;
  std::vector<Eigen::Index> dims(size_t(sites), base);
  int planted_site = -1;
  if (plant_separable) {
    planted_site = inst.lattice.vertex_id(0, uniform_int(rng, 0, cols - 1));
    dims[size_t(planted_site)] = 4;  // two stacked qubit blocks
  }
  inst.qudit_dims = dims;
  inst.tol = Tolerance{};
  inst.tol.seed = seed;

  Matrix x = pauli_x(), z = pauli_z(), i2 = Matrix::Identity(2, 2);

  // Alternating X- and Z-type plaquettes commute on the shared edge pairs
  // (two anticommutations cancel), mirroring the toric pattern.
  std::vector<Matrix> letters{i2, x, z};
  std::vector<Face> faces = inst.lattice.faces();
  int id = 0;
  for (const Face& f : faces) {
    const Matrix& p = (id % 2 == 0) ? x : z;
    double scale = 0.25 + 1.5 * uniform01(rng);
    Term t;
    t.id = id++;
    t.support = f.sites;
    std::vector<Matrix> factors;
    for (size_t k = 0; k < f.sites.size(); ++k) {
      Matrix fac = p;
      if (k == 0) fac *= scale;
      int site = f.sites[k];
      if (site == planted_site) {
        // Two independent single-qubit letters stacked block-diagonally.
        Matrix other = (uniform_int(rng, 0, 1) ? p : Matrix(-p));
        Matrix blocks = Matrix::Zero(4, 4);
        blocks.topLeftCorner(2, 2) = fac.rows() == 2 ? fac : fac;
        blocks.bottomRightCorner(2, 2) = other * (k == 0 ? scale : 1.0);
        if (k == 0) {
          blocks.topLeftCorner(2, 2) = p * scale;
        } else {
          blocks.topLeftCorner(2, 2) = p;
        }
        fac = blocks;
      }
      factors.push_back(fac);
    }
    Matrix m = Matrix::Identity(1, 1);
    for (const Matrix& fac : factors) m = kron(m, fac);
    t.matrix = std::move(m);
    t.factors = std::move(factors);
    inst.terms.push_back(std::move(t));
  }

  if (conjugate) {
    std::vector<Matrix> u;
    for (auto d : dims) u.push_back(random_unitary(d, rng));
    for (Term& t : inst.terms) {
      for (size_t k = 0; k < t.factors->size(); ++k) {
        const Matrix& uq = u[size_t(t.support[k])];
        (*t.factors)[k] = uq * (*t.factors)[k] * uq.adjoint();
      }
      Matrix m = Matrix::Identity(1, 1);
      for (const Matrix& fac : *t.factors) m = kron(m, fac);
      t.matrix = std::move(m);
    }
  }
  inst.validate();
  return inst;
}

Instance factorized_singular(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x51e9a1);
  Instance inst;
  inst.lattice = Lattice2D{2, 2, Boundary::Open, Carrier::Vertices, 0};
  inst.qudit_dims = {2, 2, 2, 2};
  inst.tol = Tolerance{};
  inst.tol.seed = seed;

  // Single plaquette {0,1,2,3}; two terms supported on the edge pairs
  // {0,2} and {0,1} overlap on sites... use two terms on the same
  // plaquette overlapping on sites 0 and 1: h = |0><0| x A, h' = |1><1| x B
  // at site 0 forces h h' = 0 regardless of the site-1 factors.
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  Matrix a = random_hermitian(2, rng);
  Matrix b = random_hermitian(2, rng);
  // Make the site-1 relation a genuine Cross: reroll until
  // ab != +-ba and ab != 0.
  for (int tries = 0; tries < 50; ++tries) {
    Matrix ab = a * b, ba = b * a;
    double scale = std::max(1.0, a.norm() * b.norm());
    if ((ab - ba).norm() > 0.1 * scale && (ab + ba).norm() > 0.1 * scale) break;
    b = random_hermitian(2, rng);
  }

  Term t0;
  t0.id = 0;
  t0.support = {0, 1};
  t0.factors = std::vector<Matrix>{p0, a};
  t0.matrix = kron(p0, a);
  Term t1;
  t1.id = 1;
  t1.support = {0, 1};
  t1.factors = std::vector<Matrix>{p1, b};
  t1.matrix = kron(p1, b);
  inst.terms.push_back(std::move(t0));
  inst.terms.push_back(std::move(t1));
  inst.validate();
  return inst;
}

}  // namespace clh::testing
