#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clh/errors.hpp"

namespace clh {

enum class Boundary { Open, Torus };
enum class Carrier { Vertices, Edges };

// A face of the lattice: the ordered sites a local term may act on, plus the
// checkerboard color used by the removal pipeline (black = 0, white = 1).
struct Face {
  int id = 0;
  std::vector<int> sites;
  int color = 0;
};

// 2D square lattice carrying qudits on vertices or on edges.
//
// Site ids are row-major; for the edges carrier all horizontal edges come
// first (row-major), then all vertical edges. Faces are plaquettes for the
// vertices carrier, plaquettes plus stars for the edges carrier.
//
// `shift` generalizes the torus: wrapping the row coordinate past `rows`
// advances the column coordinate by `shift` (a twisted torus). Plain lattices
// have shift 0. Twisted lattices arise only as outputs of the edge<->vertex
// duality map, where the rotated lattice never aligns with a plain grid.
struct Lattice2D {
  int rows = 1;
  int cols = 1;
  Boundary boundary = Boundary::Open;
  Carrier carrier = Carrier::Vertices;
  int shift = 0;

  void validate() const;

  int site_count() const;
  std::vector<Face> faces() const;

  // Vertices carrier helpers (row, col) <-> id under the twisted wrap.
  int vertex_id(int r, int c) const;
  // Edges carrier helpers; orientation 0 = horizontal, 1 = vertical.
  int edge_id(int orientation, int r, int c) const;

  bool operator==(const Lattice2D&) const = default;
};

std::string to_string(Boundary b);
std::string to_string(Carrier c);
Boundary boundary_from_string(const std::string& s);
Carrier carrier_from_string(const std::string& s);

}  // namespace clh
