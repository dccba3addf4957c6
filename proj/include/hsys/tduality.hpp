#pragma once

// T-duality on solution parameters.
//
// The full duality acts as (k, t) -> (-t k, 1/t) and fixes alpha, r and
// c2(W). Dualizing a single circle j acts as (k_j, t_j) -> (-t_j k_j, 1/t_j)
// and preserves t_j Q(k_j); chains of such steps generate orbits.

#include "hsys/anomaly.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsys::tduality {

/// Thrown when a duality step's integrality precondition fails.
class DualityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameters with independent fiber sizes t1, t2 for the two circles.
class ExtendedParams {
 public:
  ExtendedParams(lattice::LatticeClass kappa1, lattice::LatticeClass kappa2, Rational t1, Rational t2,
                 Rational alpha, Integer r);
  explicit ExtendedParams(const anomaly::SolutionParams& p);

  const lattice::LatticeClass& kappa(int circle) const { return circle == 1 ? kappa1_ : kappa2_; }
  const lattice::LatticeClass& kappa1() const { return kappa1_; }
  const lattice::LatticeClass& kappa2() const { return kappa2_; }
  const Rational& t(int circle) const { return circle == 1 ? t1_ : t2_; }
  const Rational& t1() const { return t1_; }
  const Rational& t2() const { return t2_; }
  const Rational& alpha() const { return alpha_; }
  const Integer& r() const { return r_; }

  /// The single-size parameters when t1 == t2.
  std::optional<anomaly::SolutionParams> reduce() const;

  friend bool operator==(const ExtendedParams&, const ExtendedParams&) = default;

 private:
  lattice::LatticeClass kappa1_;
  lattice::LatticeClass kappa2_;
  Rational t1_;
  Rational t2_;
  Rational alpha_;
  Integer r_;
};

Json to_json(const ExtendedParams& p);
/// Accepts {"t1","t2"} or a single {"t"} applied to both circles.
ExtendedParams extended_from_json(const Json& j);

/// 24 + (t1 Q(k1) + t2 Q(k2)) / alpha; equals c2_W when t1 == t2.
Rational generalized_c2(const ExtendedParams& p);

/// (k, t, alpha, r) -> (-t k, 1/t, alpha, r). Requires t k integral and a
/// valid certificate for p; throws DualityError otherwise.
anomaly::SolutionParams dualize(const anomaly::SolutionParams& p);

/// Dualizes circle 1 or 2. Requires t_j k_j integral.
ExtendedParams dualize_circle(const ExtendedParams& p, int circle);

/// Hypothesis checks for per-circle parameters. Reduces to
/// build_certificate (scope "established") when t1 == t2 and is
/// labeled "extension" otherwise.
struct ExtendedCertificate {
  ExtendedParams params;
  std::optional<Integer> k1;
  std::optional<Integer> k2;
  Rational c2;
  std::vector<anomaly::CheckRecord> checks;
  topology::AbelianGroup pi1;
  int h2rank = 0;
  std::string scope;
  std::vector<std::string> notes;
  std::string version;

  bool valid() const;
};
ExtendedCertificate certify(const ExtendedParams& p);
Json to_json(const ExtendedCertificate& c);

// ---------------------------------------------------------------------------
// Orbits

enum class Step { Circle1, Circle2, Both };
std::string to_string(Step s);

struct OrbitNode {
  ExtendedParams params;
  std::string key;  ///< canonical serialization
  topology::AbelianGroup pi1;
  Rational c2;
  bool valid = false;
};

struct OrbitEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  Step step = Step::Both;

  friend bool operator==(const OrbitEdge&, const OrbitEdge&) = default;
};

struct OrbitGraph {
  std::vector<OrbitNode> nodes;  ///< sorted by key
  std::vector<OrbitEdge> edges;  ///< sorted by (from, to, step)
  std::size_t root = 0;
  bool truncated = false;
  std::size_t max_nodes = 0;
  Integer denominator_bound;
};

/// Representative of {p, p with both classes negated}: the overall sign is
/// fixed so the first nonzero coordinate of (k1, k2) is positive.
ExtendedParams canonicalize(const ExtendedParams& p);
std::string canonical_key(const ExtendedParams& p);

/// Applies `step` when its integrality preconditions hold and the resulting
/// fiber-size denominators stay within `denominator_bound`.
std::optional<ExtendedParams> try_step(const ExtendedParams& p, Step step, const Integer& denominator_bound);

/// Breadth-first closure under single- and double-circle dualization.
/// Stops adding nodes at max_nodes and records the truncation. Frontier
/// expansion uses up to `threads` workers; the result does not depend on it.
OrbitGraph orbit(const ExtendedParams& p, std::size_t max_nodes, const Integer& denominator_bound,
                 unsigned threads = 1);

std::string to_dot(const OrbitGraph& g);
Json to_json(const OrbitGraph& g);

// ---------------------------------------------------------------------------
// Invariance audit

struct Comparison {
  Rational before;
  Rational after;
  bool equal = false;
};

struct CircleAudit {
  Comparison tq;            ///< t_j Q(k_j)
  Integer q_before;         ///< Q(k_j)
  Integer q_after;          ///< Q(k'_j)
  bool dualized = false;    ///< k'_j = -t_j k_j and t'_j = 1/t_j
  std::optional<bool> q_scaling;  ///< Q(k'_j) = t_j^2 Q(k_j), when dualized
};

struct InvarianceReport {
  Comparison alpha;
  Comparison c2;
  std::array<CircleAudit, 2> circles;
  bool all_equal = false;  ///< alpha, c2 and both t_j Q(k_j) agree
};

InvarianceReport invariance_report(const ExtendedParams& before, const ExtendedParams& after);
Json to_json(const InvarianceReport& r);

}  // namespace hsys::tduality
