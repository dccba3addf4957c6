#include "hsys/moduli.hpp"

#include <stdexcept>

namespace hsys::moduli {

Integer mukai_pairing(const MukaiVector& v, const MukaiVector& w) {
  return lattice::intersect(v.v1, w.v1) - v.v0 * w.v2 - v.v2 * w.v0;
}

MukaiVector tangent_mukai() { return bundle_mukai(3, 24); }

MukaiVector bundle_mukai(const Integer& r, const Integer& c2) {
  if (r <= 0) throw std::invalid_argument("bundle rank must be positive, got " + r.get_str());
  return MukaiVector{r, lattice::LatticeClass{}, r - c2};
}

bool hym_exists(const MukaiVector& v) {
  if (v.v0 <= 0) throw std::invalid_argument("Mukai vector needs positive rank, got " + v.v0.get_str());
  return mukai_pairing(v, v) >= 0;
}

Json to_json(const MukaiVector& v) {
  Json j;
  j["v0"] = integer_to_json(v.v0);
  j["v1"] = lattice::to_json(v.v1);
  j["v2"] = integer_to_json(v.v2);
  return j;
}

MukaiVector mukai_from_json(const Json& j) {
  return MukaiVector{integer_from_json(require(j, "v0")), lattice::class_from_json(require(j, "v1")),
                     integer_from_json(require(j, "v2"))};
}

}  // namespace hsys::moduli
