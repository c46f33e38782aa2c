#include "clh/duality.hpp"

#include <numeric>

namespace clh {

namespace {

struct TwistForm {
  long rows, cols, shift;
};

long positive_mod(long v, long m) {
  v %= m;
  return v < 0 ? v + m : v;
}

// Extended gcd: returns g and x, y with x*a + y*b = g.
long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  long x1, y1;
  long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

// Standard form of the quotient of Z^2 (coords (col, row)) by the lattice
// generated by (c1, r1), (c2, r2): columns wrap with period `cols`, rows wrap
// with period `rows` while advancing the column by `shift`.
TwistForm standard_form(long c1, long r1, long c2, long r2) {
  long b = std::gcd(std::abs(r1), std::abs(r2));
  long det = c1 * r2 - c2 * r1;
  long a = std::abs(det) / b;
  long x, y;
  ext_gcd(std::abs(r1), std::abs(r2), x, y);
  if (r1 < 0) x = -x;
  if (r2 < 0) y = -y;
  long s = positive_mod(x * c1 + y * c2, a);
  return {b, a, s};
}

// Medial image of a plain R x C edge torus (vertices carrier, twisted).
TwistForm medial_form(long R, long C) {
  // Site (U,V): h(r,c) -> (r+c, r-c), v(r,c) -> (r+c, r-c+1).
  // Identifications: r += R gives (U,V) += (R,R); c += C gives (C,-C).
  return standard_form(R, R, C, -C);
}

// Dashed-lattice image of a plain R x C vertex torus (edges carrier,
// twisted); requires R, C even.
TwistForm dashed_form(long R, long C) {
  return standard_form(R / 2, R / 2, C / 2, -C / 2);
}

// Enumerate plain torus shapes whose image under `form` matches `want`.
std::optional<std::pair<long, long>> invert_form(
    const Lattice2D& want, TwistForm (*form)(long, long),
    long site_ratio_num, long site_ratio_den) {
  // Candidate (R, C) satisfy R*C = want.sites * num/den; try all divisors.
  long sites = long(want.rows) * want.cols;
  long rc2 = sites * site_ratio_num;
  if (rc2 % site_ratio_den != 0) return std::nullopt;
  long rc = rc2 / site_ratio_den;
  for (long R = 2; R * 2 <= rc; ++R) {
    if (rc % R != 0) continue;
    long C = rc / R;
    if (C < 2) continue;
    TwistForm f = form(R, C);
    if (f.rows == want.rows && f.cols == want.cols && f.shift == want.shift) {
      return std::make_pair(R, C);
    }
  }
  return std::nullopt;
}

Instance remap(const Instance& inst, const Lattice2D& target,
               const std::vector<int>& site_map) {
  Instance out;
  out.lattice = target;
  out.tol = inst.tol;
  if (target.site_count() != int(site_map.size())) {
    fail(ErrorKind::Internal, "duality site map is not a bijection");
  }
  std::vector<bool> used(site_map.size(), false);
  for (int s : site_map) {
    if (s < 0 || s >= int(site_map.size()) || used[size_t(s)]) {
      fail(ErrorKind::Internal, "duality site map is not a bijection");
    }
    used[size_t(s)] = true;
  }
  out.qudit_dims.assign(size_t(target.site_count()), 1);
  for (size_t old_id = 0; old_id < site_map.size(); ++old_id) {
    out.qudit_dims[size_t(site_map[old_id])] = inst.qudit_dims[old_id];
  }
  for (const Term& t : inst.terms) {
    Term nt = t;
    for (int& s : nt.support) s = site_map[size_t(s)];
    out.terms.push_back(std::move(nt));
  }
  out.validate();
  return out;
}

}  // namespace

Instance dualize(const Instance& inst) {
  const Lattice2D& lat = inst.lattice;
  if (lat.boundary != Boundary::Torus) {
    fail(ErrorKind::UnsupportedGeometry,
         "dualize is defined on torus lattices only; the rotated dual of an "
         "open grid is diamond-shaped and has no rows x cols representation");
  }

  long R = lat.rows, C = lat.cols;

  if (lat.carrier == Carrier::Edges && lat.shift == 0) {
    // Medial map: edge sites become vertices of the rotated lattice.
    TwistForm f = medial_form(R, C);
    Lattice2D target{int(f.rows), int(f.cols), Boundary::Torus,
                     Carrier::Vertices, int(f.shift)};
    std::vector<int> site_map(size_t(lat.site_count()));
    for (long r = 0; r < R; ++r) {
      for (long c = 0; c < C; ++c) {
        site_map[size_t(lat.edge_id(0, int(r), int(c)))] =
            target.vertex_id(int(r - c), int(r + c));
        site_map[size_t(lat.edge_id(1, int(r), int(c)))] =
            target.vertex_id(int(r - c + 1), int(r + c));
      }
    }
    return remap(inst, target, site_map);
  }

  if (lat.carrier == Carrier::Vertices && lat.shift != 0) {
    auto rc = invert_form(lat, medial_form, 1, 2);
    if (!rc) {
      fail(ErrorKind::UnsupportedGeometry,
           "twisted vertex lattice is not the medial image of any edge torus");
    }
    Lattice2D target{int(rc->first), int(rc->second), Boundary::Torus,
                     Carrier::Edges, 0};
    std::vector<int> site_map(size_t(lat.site_count()));
    for (long V = 0; V < lat.rows; ++V) {
      for (long U = 0; U < lat.cols; ++U) {
        long old_id = lat.vertex_id(int(V), int(U));
        if (positive_mod(U + V, 2) == 0) {
          site_map[size_t(old_id)] =
              target.edge_id(0, int((U + V) / 2), int((U - V) / 2));
        } else {
          // (U - V + 1)/2 with flooring-safe arithmetic.
          site_map[size_t(old_id)] =
              target.edge_id(1, int((U + V - 1) / 2), int((U - V + 1) / 2));
        }
      }
    }
    return remap(inst, target, site_map);
  }

  if (lat.carrier == Carrier::Vertices && lat.shift == 0) {
    if (R % 2 != 0 || C % 2 != 0) {
      fail(ErrorKind::UnsupportedGeometry,
           "vertex->edge duality on a torus needs even rows and cols (the "
           "dashed lattice is not periodic otherwise)");
    }
    TwistForm f = dashed_form(R, C);
    Lattice2D target{int(f.rows), int(f.cols), Boundary::Torus, Carrier::Edges,
                     int(f.shift)};
    std::vector<int> site_map(size_t(lat.site_count()));
    for (long r = 0; r < R; ++r) {
      for (long c = 0; c < C; ++c) {
        long old_id = lat.vertex_id(int(r), int(c));
        if (positive_mod(r + c, 2) == 1) {
          site_map[size_t(old_id)] =
              target.edge_id(0, int((r - c + 1) / 2), int((c + r - 1) / 2));
        } else {
          site_map[size_t(old_id)] =
              target.edge_id(1, int((r - c) / 2), int((c + r) / 2));
        }
      }
    }
    return remap(inst, target, site_map);
  }

  // Edges carrier with a twist: invert the dashed-lattice map.
  auto rc = invert_form(lat, dashed_form, 2, 1);
  if (!rc) {
    fail(ErrorKind::UnsupportedGeometry,
         "twisted edge lattice is not the dashed image of any vertex torus");
  }
  Lattice2D target{int(rc->first), int(rc->second), Boundary::Torus,
                   Carrier::Vertices, 0};
  std::vector<int> site_map(size_t(lat.site_count()));
  for (long beta = 0; beta < lat.rows; ++beta) {
    for (long alpha = 0; alpha < lat.cols; ++alpha) {
      site_map[size_t(lat.edge_id(0, int(beta), int(alpha)))] =
          target.vertex_id(int(alpha + beta), int(alpha - beta + 1));
      site_map[size_t(lat.edge_id(1, int(beta), int(alpha)))] =
          target.vertex_id(int(alpha + beta), int(alpha - beta));
    }
  }
  return remap(inst, target, site_map);
}

}  // namespace clh
