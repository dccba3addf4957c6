#include "hsys/topology.hpp"

namespace hsys::topology {

using lattice::IntMatrix;
using lattice::kRank;
using lattice::LatticeClass;

std::string AbelianGroup::to_string() const {
  std::string out;
  if (free_rank == 1) out = "Z";
  if (free_rank > 1) out = "Z^" + std::to_string(free_rank);
  for (const auto& d : torsion) {
    if (!out.empty()) out += "+";
    out += "Z/" + d.get_str();
  }
  return out.empty() ? "0" : out;
}

IntMatrix pairing_matrix(const LatticeClass& k1, const LatticeClass& k2, const lattice::GramMatrix& gram) {
  IntMatrix m(2, kRank);
  const auto r1 = gram.apply(k1);
  const auto r2 = gram.apply(k2);
  for (std::size_t c = 0; c < kRank; ++c) {
    m(0, c) = r1[c];
    m(1, c) = r2[c];
  }
  return m;
}

AbelianGroup pi1(const LatticeClass& k1, const LatticeClass& k2, const lattice::GramMatrix& gram) {
  const auto snf = lattice::smith_normal_form(pairing_matrix(k1, k2, gram));
  AbelianGroup g;
  for (const auto& d : snf.factors)
    if (d > 1) g.torsion.push_back(d);
  g.free_rank = 2 - static_cast<int>(snf.rank);
  return g;
}

std::vector<Integer> pairing_invariants(const LatticeClass& k1, const LatticeClass& k2) {
  return lattice::smith_normal_form(pairing_matrix(k1, k2)).factors;
}

int h2_rank(const LatticeClass& k1, const LatticeClass& k2) {
  IntMatrix m(2, kRank);
  for (std::size_t c = 0; c < kRank; ++c) {
    m(0, c) = k1[c];
    m(1, c) = k2[c];
  }
  return static_cast<int>(kRank) - static_cast<int>(lattice::smith_normal_form(m).rank);
}

Json to_json(const AbelianGroup& g) {
  Json j;
  Json tors = Json::array();
  for (const auto& d : g.torsion) tors.push_back(integer_to_json(d));
  j["torsion"] = tors;
  j["free_rank"] = g.free_rank;
  return j;
}

AbelianGroup group_from_json(const Json& j) {
  AbelianGroup g;
  const Json& tors = require(j, "torsion");
  if (!tors.is_array()) throw ParseError("'torsion' must be an array");
  for (const auto& d : tors) g.torsion.push_back(integer_from_json(d));
  const Json& fr = require(j, "free_rank");
  if (!fr.is_number_integer()) throw ParseError("'free_rank' must be an integer");
  g.free_rank = fr.get<int>();
  return g;
}

TopologyComparison topology_report(const anomaly::SolutionParams& a, const anomaly::SolutionParams& b) {
  TopologyComparison c;
  c.pi1_a = pi1(a.kappa1(), a.kappa2());
  c.pi1_b = pi1(b.kappa1(), b.kappa2());
  c.h2rank_a = h2_rank(a.kappa1(), a.kappa2());
  c.h2rank_b = h2_rank(b.kappa1(), b.kappa2());
  c.same_pi1 = c.pi1_a == c.pi1_b;
  c.same_h2rank = c.h2rank_a == c.h2rank_b;
  return c;
}

Json to_json(const TopologyComparison& c) {
  Json j;
  j["pi1"] = Json::array({to_json(c.pi1_a), to_json(c.pi1_b)});
  j["h2rank"] = Json::array({c.h2rank_a, c.h2rank_b});
  j["same_pi1"] = c.same_pi1;
  j["same_h2rank"] = c.same_h2rank;
  return j;
}

}  // namespace hsys::topology
