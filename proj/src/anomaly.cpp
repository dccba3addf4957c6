#include "hsys/anomaly.hpp"

#include "hsys/moduli.hpp"
#include "hsys/version.hpp"

#include <algorithm>
#include <stdexcept>

namespace hsys::anomaly {

using lattice::LatticeClass;

SolutionParams::SolutionParams(LatticeClass kappa1, LatticeClass kappa2, Rational t, Rational alpha, Integer r)
    : kappa1_(std::move(kappa1)), kappa2_(std::move(kappa2)), t_(std::move(t)), alpha_(std::move(alpha)), r_(std::move(r)) {
  t_.canonicalize();
  alpha_.canonicalize();
  if (t_ <= 0) throw std::invalid_argument("fiber size t must be positive, got " + to_string(t_));
  if (alpha_ == 0) throw std::invalid_argument("alpha must be nonzero");
  if (r_ < 1) throw std::invalid_argument("rank r must be at least 1, got " + r_.get_str());
}

Json to_json(const SolutionParams& p) {
  Json j;
  j["kappa1"] = lattice::to_json(p.kappa1());
  j["kappa2"] = lattice::to_json(p.kappa2());
  j["t"] = rational_to_json(p.t());
  j["alpha"] = rational_to_json(p.alpha());
  j["r"] = integer_to_json(p.r());
  return j;
}

SolutionParams params_from_json(const Json& j) {
  auto k1 = lattice::class_from_json(require(j, "kappa1"));
  auto k2 = lattice::class_from_json(require(j, "kappa2"));
  auto t = rational_from_json(require(j, "t"));
  auto alpha = rational_from_json(require(j, "alpha"));
  auto r = integer_from_json(require(j, "r"));
  try {
    return SolutionParams(std::move(k1), std::move(k2), std::move(t), std::move(alpha), std::move(r));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

IntegralityResult integrality_check(const SolutionParams& p) {
  const Integer qsum = lattice::self_intersection(p.kappa1()) + lattice::self_intersection(p.kappa2());
  Rational value = p.t() / p.alpha() * Rational(qsum);
  value.canonicalize();
  return {value, is_integral(value)};
}

Rational c2_W(const SolutionParams& p) { return Rational(kC2Surface) + integrality_check(p).value; }

bool SolutionCertificate::valid() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.ok; });
}

const CheckRecord* SolutionCertificate::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

CheckRecord asd_record(std::string_view name, const LatticeClass& kappa, std::optional<Integer>& k_out) {
  const Integer q = lattice::self_intersection(kappa);
  k_out = lattice::asd_admissible(kappa);
  if (k_out) return {std::string(name), true, "Q = " + q.get_str() + " = -2k with k = " + k_out->get_str()};
  return {std::string(name), false, "Q = " + q.get_str() + " admits no nonzero anti-self-dual representative"};
}

}  // namespace

CheckBundle evaluate_checks(const LatticeClass& kappa1, const LatticeClass& kappa2, const Rational& integrality,
                            const Rational& c2, const Integer& r) {
  CheckBundle out;
  out.checks.reserve(kCheckOrder.size());
  out.checks.push_back(asd_record("asd1", kappa1, out.k1));
  out.checks.push_back(asd_record("asd2", kappa2, out.k2));

  const bool int_ok = is_integral(integrality);
  out.checks.push_back({"integrality", int_ok,
                        "value " + to_string(integrality) + (int_ok ? " is an integer" : " is not an integer")});

  const bool c2_ok = is_integral(c2);
  out.checks.push_back({"c2-integer", c2_ok, "c2(W) = " + to_string(c2)});

  if (c2_ok) {
    const Integer c2i = c2.get_num();
    const bool bound = r <= c2i;
    out.checks.push_back({"rank-bound", bound, "r = " + r.get_str() + (bound ? " <= " : " > ") + c2i.get_str()});
  } else {
    out.checks.push_back({"rank-bound", false, "c2(W) not integral"});
  }

  const auto tv = moduli::tangent_mukai();
  const Integer tv_pair = moduli::mukai_pairing(tv, tv);
  out.checks.push_back({"hym-V", moduli::hym_exists(tv), "(v,v) = " + tv_pair.get_str() + " for v = (3,0,-21)"});

  if (c2_ok) {
    const auto wv = moduli::bundle_mukai(r, c2.get_num());
    const Integer w_pair = moduli::mukai_pairing(wv, wv);
    out.checks.push_back({"hym-W", moduli::hym_exists(wv),
                          "(v,v) = " + w_pair.get_str() + " for v = (" + wv.v0.get_str() + ",0," + wv.v2.get_str() + ")"});
  } else {
    out.checks.push_back({"hym-W", false, "c2(W) not integral"});
  }
  return out;
}

std::vector<std::string> standard_notes(const LatticeClass& kappa1, const LatticeClass& kappa2) {
  std::vector<std::string> notes{
      "asd: lattice-level condition only (Q < 0 or class zero); orthogonality to the Kahler class and "
      "period plane depends on the moduli of S and is not modeled",
      "hym: numerical Mukai criterion (v,v) >= 0 with c1 = 0; stability subtleties on non-projective K3 "
      "surfaces are not adjudicated",
      "integrality and c2-integer are both required",
  };
  if (kappa1.is_zero() && kappa2.is_zero())
    notes.emplace_back("product case: k1 = k2 = 0, total space S x T^2");
  return notes;
}

SolutionCertificate build_certificate(const SolutionParams& p) {
  const auto integ = integrality_check(p);
  const Rational c2 = Rational(kC2Surface) + integ.value;
  CheckBundle bundle = evaluate_checks(p.kappa1(), p.kappa2(), integ.value, c2, p.r());
  return SolutionCertificate{p,
                             std::move(bundle.k1),
                             std::move(bundle.k2),
                             c2,
                             std::move(bundle.checks),
                             topology::pi1(p.kappa1(), p.kappa2()),
                             topology::h2_rank(p.kappa1(), p.kappa2()),
                             "established",
                             standard_notes(p.kappa1(), p.kappa2()),
                             std::string(kVersion)};
}

namespace {

Json optional_integer(const std::optional<Integer>& z) { return z ? integer_to_json(*z) : Json(nullptr); }

std::optional<Integer> optional_integer_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return integer_from_json(j);
}

}  // namespace

Json to_json(const SolutionCertificate& c) {
  Json j;
  j["params"] = to_json(c.params);
  j["k1"] = optional_integer(c.k1);
  j["k2"] = optional_integer(c.k2);
  j["c2W"] = rational_to_json(c.c2W);
  Json checks = Json::array();
  for (const auto& rec : c.checks) {
    Json r;
    r["name"] = rec.name;
    r["ok"] = rec.ok;
    r["detail"] = rec.detail;
    checks.push_back(std::move(r));
  }
  j["checks"] = std::move(checks);
  j["pi1"] = topology::to_json(c.pi1);
  j["h2rank"] = c.h2rank;
  j["valid"] = c.valid();
  j["scope"] = c.scope;
  j["notes"] = c.notes;
  j["version"] = c.version;
  return j;
}

SolutionCertificate certificate_from_json(const Json& j) {
  std::vector<CheckRecord> checks;
  for (const auto& r : require(j, "checks"))
    checks.push_back({require(r, "name").get<std::string>(), require(r, "ok").get<bool>(),
                      require(r, "detail").get<std::string>()});
  return SolutionCertificate{params_from_json(require(j, "params")),
                             optional_integer_from(require(j, "k1")),
                             optional_integer_from(require(j, "k2")),
                             rational_from_json(require(j, "c2W")),
                             std::move(checks),
                             topology::group_from_json(require(j, "pi1")),
                             require(j, "h2rank").get<int>(),
                             require(j, "scope").get<std::string>(),
                             require(j, "notes").get<std::vector<std::string>>(),
                             require(j, "version").get<std::string>()};
}

}  // namespace hsys::anomaly
