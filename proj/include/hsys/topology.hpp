#pragma once

// Topological invariants of the total space X_k of the T^2-bundle over S
// with Chern classes (k1, k2).
//
// S is simply connected, so the homotopy sequence of T^2 -> X_k -> S ends in
//
//   pi2(S) --c--> pi1(T^2) = Z^2 --> pi1(X_k) --> 0
//
// and pi1(X_k) = coker(c). Under pi2(S) = H2(S, Z) and Poincare duality,
// c(b) = (Q(k1, b), Q(k2, b)), so c is the 2x22 matrix with rows (G k1)^T and
// (G k2)^T. Worked 2x4 case (one U plane plus one more U plane):
//
//   k1 = e1 - f1, k2 = e2 - f2  ->  rows [-1 1 0 0], [0 0 -1 1]  ->  SNF (1,1),
//   trivial cokernel; doubling both classes gives SNF (2,2) and Z/2 + Z/2.

#include "hsys/lattice.hpp"
#include "hsys/params.hpp"

#include <string>
#include <vector>

namespace hsys::topology {

/// Finitely generated abelian group Z^free_rank + Z/d1 + ... with d1 | d2 | ...
struct AbelianGroup {
  std::vector<Integer> torsion;  ///< invariant factors, each >= 2
  int free_rank = 0;

  bool is_trivial() const { return torsion.empty() && free_rank == 0; }
  /// "0", "Z^2", "Z/2+Z/2", "Z+Z/3", ...
  std::string to_string() const;

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

/// The 2x22 pairing matrix c described above.
lattice::IntMatrix pairing_matrix(const lattice::LatticeClass& k1, const lattice::LatticeClass& k2,
                                  const lattice::GramMatrix& gram = lattice::GramMatrix::standard());

/// pi1(X_k) as coker of the pairing matrix.
AbelianGroup pi1(const lattice::LatticeClass& k1, const lattice::LatticeClass& k2,
                 const lattice::GramMatrix& gram = lattice::GramMatrix::standard());

/// Full SNF diagonal (including unit factors) of the pairing matrix.
std::vector<Integer> pairing_invariants(const lattice::LatticeClass& k1, const lattice::LatticeClass& k2);

/// rank H^2(X, R) = 22 - dim span_Q{k1, k2}.
int h2_rank(const lattice::LatticeClass& k1, const lattice::LatticeClass& k2);

Json to_json(const AbelianGroup& g);
AbelianGroup group_from_json(const Json& j);

/// Side-by-side invariants of two parameter sets.
struct TopologyComparison {
  AbelianGroup pi1_a;
  AbelianGroup pi1_b;
  int h2rank_a = 0;
  int h2rank_b = 0;
  bool same_pi1 = false;
  bool same_h2rank = false;
};

TopologyComparison topology_report(const anomaly::SolutionParams& a, const anomaly::SolutionParams& b);

Json to_json(const TopologyComparison& c);

}  // namespace hsys::topology
