#include "clh/lattice.hpp"

namespace clh {

std::string to_string(Boundary b) { return b == Boundary::Open ? "open" : "torus"; }
std::string to_string(Carrier c) { return c == Carrier::Vertices ? "vertices" : "edges"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::Open;
  if (s == "torus") return Boundary::Torus;
  fail(ErrorKind::ParseError, "boundary must be \"open\" or \"torus\", got \"" + s + "\"");
}

Carrier carrier_from_string(const std::string& s) {
  if (s == "vertices") return Carrier::Vertices;
  if (s == "edges") return Carrier::Edges;
  fail(ErrorKind::ParseError, "carrier must be \"vertices\" or \"edges\", got \"" + s + "\"");
}

void Lattice2D::validate() const {
  if (rows < 1 || cols < 1) {
    fail(ErrorKind::ValidationError, "lattice dimensions must be positive");
  }
  if (shift != 0 && boundary != Boundary::Torus) {
    fail(ErrorKind::ValidationError, "wrap shift requires a torus");
  }
  if (shift < 0 || shift >= cols) {
    fail(ErrorKind::ValidationError, "wrap shift must lie in [0, cols)");
  }
  if (boundary == Boundary::Torus && shift == 0 && (rows < 2 || cols < 2)) {
    fail(ErrorKind::ValidationError, "torus requires rows, cols >= 2");
  }
}

namespace {

// Normalize a (row, col) pair under the lattice wrap rules. Open boundaries
// never call this with out-of-range coordinates.
struct Coord {
  int r, c;
};

Coord normalize(const Lattice2D& lat, int r, int c) {
  if (lat.boundary == Boundary::Torus) {
    while (r < 0) {
      r += lat.rows;
      c -= lat.shift;
    }
    while (r >= lat.rows) {
      r -= lat.rows;
      c += lat.shift;
    }
    c %= lat.cols;
    if (c < 0) c += lat.cols;
  }
  return {r, c};
}

}  // namespace

int Lattice2D::site_count() const {
  int vertices = rows * cols;
  if (carrier == Carrier::Vertices) return vertices;
  if (boundary == Boundary::Torus) return 2 * vertices;
  return rows * (cols - 1) + (rows - 1) * cols;
}

int Lattice2D::vertex_id(int r, int c) const {
  Coord n = normalize(*this, r, c);
  return n.r * cols + n.c;
}

int Lattice2D::edge_id(int orientation, int r, int c) const {
  Coord n = normalize(*this, r, c);
  if (boundary == Boundary::Torus) {
    int base = orientation == 0 ? 0 : rows * cols;
    return base + n.r * cols + n.c;
  }
  if (orientation == 0) return n.r * (cols - 1) + n.c;
  return rows * (cols - 1) + n.r * cols + n.c;
}

std::vector<Face> Lattice2D::faces() const {
  std::vector<Face> out;
  int next_id = 0;
  if (carrier == Carrier::Vertices) {
    int rmax = boundary == Boundary::Torus ? rows : rows - 1;
    int cmax = boundary == Boundary::Torus ? cols : cols - 1;
    for (int r = 0; r < rmax; ++r) {
      for (int c = 0; c < cmax; ++c) {
        Face f;
        f.id = next_id++;
        f.sites = {vertex_id(r, c), vertex_id(r, c + 1), vertex_id(r + 1, c),
                   vertex_id(r + 1, c + 1)};
        f.color = (r + c) & 1;
        out.push_back(std::move(f));
      }
    }
    return out;
  }

  // Edges carrier: stars (black) enumerated over vertices, then plaquettes
  // (white) over faces of the underlying vertex lattice.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Face f;
      f.id = next_id++;
      f.color = 0;
      if (boundary == Boundary::Torus) {
        f.sites = {edge_id(0, r, c - 1), edge_id(0, r, c), edge_id(1, r - 1, c),
                   edge_id(1, r, c)};
      } else {
        if (c > 0) f.sites.push_back(edge_id(0, r, c - 1));
        if (c + 1 < cols) f.sites.push_back(edge_id(0, r, c));
        if (r > 0) f.sites.push_back(edge_id(1, r - 1, c));
        if (r + 1 < rows) f.sites.push_back(edge_id(1, r, c));
      }
      out.push_back(std::move(f));
    }
  }
  int rmax = boundary == Boundary::Torus ? rows : rows - 1;
  int cmax = boundary == Boundary::Torus ? cols : cols - 1;
  for (int r = 0; r < rmax; ++r) {
    for (int c = 0; c < cmax; ++c) {
      Face f;
      f.id = next_id++;
      f.color = 1;
      f.sites = {edge_id(0, r, c), edge_id(0, r + 1, c), edge_id(1, r, c),
                 edge_id(1, r, c + 1)};
      out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace clh
