#pragma once

// Anomaly cancellation bookkeeping: integrality, c2(W), and the ordered
// hypothesis checks that make up a solution certificate.

#include "hsys/params.hpp"
#include "hsys/topology.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsys::anomaly {

/// c2(S) of a K3 surface, equal to c2(V) for V = T^{1,0}X / T^2.
inline constexpr long kC2Surface = 24;

struct IntegralityResult {
  Rational value;  ///< (t / alpha)(Q(k1) + Q(k2))
  bool ok = false;
};

IntegralityResult integrality_check(const SolutionParams& p);

/// 24 + (t / alpha)(Q(k1) + Q(k2)).
Rational c2_W(const SolutionParams& p);

struct CheckRecord {
  std::string name;
  bool ok = false;
  std::string detail;

  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

/// Check names, in evaluation order.
inline constexpr std::array<std::string_view, 7> kCheckOrder{"asd1",      "asd2",  "integrality", "c2-integer",
                                                             "rank-bound", "hym-V", "hym-W"};

struct SolutionCertificate {
  SolutionParams params;
  std::optional<Integer> k1;
  std::optional<Integer> k2;
  Rational c2W;
  std::vector<CheckRecord> checks;
  topology::AbelianGroup pi1;
  int h2rank = 0;
  std::string scope;  ///< "established" or "extension"
  std::vector<std::string> notes;
  std::string version;

  bool valid() const;
  /// nullptr when no check with that name exists.
  const CheckRecord* find(std::string_view name) const;

  friend bool operator==(const SolutionCertificate&, const SolutionCertificate&) = default;
};

/// Outcome of the seven ordered checks for a generic (k1, k2, c2, r) tuple.
struct CheckBundle {
  std::optional<Integer> k1;
  std::optional<Integer> k2;
  std::vector<CheckRecord> checks;
};

/// Shared by the single-size and per-circle certificates: `integrality` is
/// the quantity that must be an integer and `c2` the resulting c2(W).
CheckBundle evaluate_checks(const lattice::LatticeClass& kappa1, const lattice::LatticeClass& kappa2,
                            const Rational& integrality, const Rational& c2, const Integer& r);

/// Never throws on a failing hypothesis; failures are recorded in order.
SolutionCertificate build_certificate(const SolutionParams& p);

/// Caveats attached to every certificate.
std::vector<std::string> standard_notes(const lattice::LatticeClass& kappa1, const lattice::LatticeClass& kappa2);

Json to_json(const SolutionCertificate& c);
SolutionCertificate certificate_from_json(const Json& j);

}  // namespace hsys::anomaly
