#pragma once

// Mukai vectors on a K3 surface and the numerical non-emptiness criterion for
// moduli of slope-stable sheaves.

#include "hsys/lattice.hpp"

namespace hsys::moduli {

/// (rank, first Chern class, v2). For c1 = 0 bundles v2 = rank - c2.
struct MukaiVector {
  Integer v0;
  lattice::LatticeClass v1;
  Integer v2;

  friend bool operator==(const MukaiVector&, const MukaiVector&) = default;
};

/// (v, w) = Q(v1, w1) - v0 w2 - v2 w0, so (v, v) = v1^2 - 2 v0 v2.
Integer mukai_pairing(const MukaiVector& v, const MukaiVector& w);

/// Mukai vector of the tangent-type bundle T^{1,0}X / T^2: rank 3, c1 = 0,
/// c2 = 24, i.e. (3, 0, -21).
MukaiVector tangent_mukai();

/// (r, 0, r - c2). Throws std::invalid_argument for r <= 0.
MukaiVector bundle_mukai(const Integer& r, const Integer& c2);

/// True iff (v, v) >= 0, the sufficient condition for the moduli space of
/// slope-stable sheaves with Mukai vector v to be non-empty (and hence, via
/// Donaldson-Uhlenbeck-Yau, for a Hermite-Yang-Mills connection to exist).
/// Throws std::invalid_argument for v0 <= 0.
bool hym_exists(const MukaiVector& v);

Json to_json(const MukaiVector& v);
MukaiVector mukai_from_json(const Json& j);

}  // namespace hsys::moduli
