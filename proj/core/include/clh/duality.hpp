#pragma once

#include "clh/instance.hpp"

namespace clh {

// Edge<->vertex duality on torus lattices.
//
// The qudits of an R x C edge torus sit at the midpoints of the lattice
// edges, which form the vertices of a 45-degree rotated square lattice whose
// plaquettes are exactly the original stars and plaquettes. Expressed in its
// own lattice coordinates, that rotated lattice is a torus with a nonzero
// wrap shift (the quotient of the plane by the rotated period lattice never
// aligns with a plain grid), which is why Lattice2D carries `shift`.
//
// dualize maps:
//   edges, shift 0      -> vertices, twisted (medial map)
//   vertices, twisted   -> edges, shift 0 (inverse medial map)
//   vertices, shift 0   -> edges, twisted (rows, cols both even)
//   edges, twisted      -> vertices, shift 0
// and is an exact involution on site ids. Open boundaries and twisted
// lattices that are not images of the maps above are rejected with
// UnsupportedGeometry.
Instance dualize(const Instance& inst);

}  // namespace clh
