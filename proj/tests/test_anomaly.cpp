#include <doctest.h>

#include "hsys/anomaly.hpp"
#include "hsys/moduli.hpp"

#include <random>

using namespace hsys;
using namespace hsys::anomaly;
using lattice::LatticeClass;

namespace {

const LatticeClass k1 = LatticeClass::parse("e1-f1");
const LatticeClass k2 = LatticeClass::parse("e2-f2");

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SolutionParams(k1, k2, 0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(SolutionParams(k1, k2, -1, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(SolutionParams(k1, k2, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(SolutionParams(k1, k2, 1, 2, 0), std::invalid_argument);
}

TEST_CASE("integrality examples") {
  auto r = integrality_check(SolutionParams(k1, k2, 1, 2, 1));
  CHECK(r.value == -2);
  CHECK(r.ok);

  r = integrality_check(SolutionParams(k1, k2, 1, 3, 1));
  CHECK(r.value == Rational(-4, 3));
  CHECK_FALSE(r.ok);

  r = integrality_check(SolutionParams({}, {}, Rational(7, 3), Rational(5, 11), 1));
  CHECK(r.value == 0);
  CHECK(r.ok);
}

TEST_CASE("c2 of the gauge bundle") {
  CHECK(c2_W(SolutionParams(k1, k2, 1, 2, 1)) == 22);
  CHECK(c2_W(SolutionParams(k1, k2, 1, 4, 1)) == 23);
  CHECK(c2_W(SolutionParams({}, {}, 1, 2, 1)) == 24);
}

TEST_CASE("certificate for the alpha/t = 2 family") {
  const auto cert = build_certificate(SolutionParams(k1, k2, 1, 2, 22));
  CHECK(cert.valid());
  CHECK(cert.c2W == 22);
  CHECK(cert.k1 == Integer(1));
  CHECK(cert.k2 == Integer(1));
  CHECK(cert.pi1.is_trivial());
  CHECK(cert.h2rank == 20);
  CHECK(cert.scope == "established");
  REQUIRE(cert.checks.size() == kCheckOrder.size());
  for (std::size_t i = 0; i < kCheckOrder.size(); ++i) CHECK(cert.checks[i].name == kCheckOrder[i]);

  const auto bad = build_certificate(SolutionParams(k1, k2, 1, 2, 23));
  CHECK_FALSE(bad.valid());
  CHECK_FALSE(bad.find("rank-bound")->ok);
  CHECK_FALSE(bad.find("hym-W")->ok);
  CHECK(bad.find("integrality")->ok);
}

TEST_CASE("product case certificate") {
  const auto cert = build_certificate(SolutionParams({}, {}, 1, 2, 24));
  CHECK(cert.valid());
  CHECK(cert.c2W == 24);
  CHECK(cert.k1 == Integer(0));
  CHECK(cert.pi1.free_rank == 2);
  bool flagged = false;
  for (const auto& n : cert.notes) flagged |= n.find("product case") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("failing hypotheses are recorded, never thrown") {
  const auto pos = LatticeClass::parse("e1+f1");
  const auto cert = build_certificate(SolutionParams(pos, k2, 1, 3, 1));
  CHECK_FALSE(cert.valid());
  CHECK_FALSE(cert.find("asd1")->ok);
  CHECK(cert.find("asd2")->ok);
  CHECK_FALSE(cert.k1.has_value());
  // Q sum is 2 - 2 = 0 so integrality holds even with alpha = 3.
  CHECK(cert.find("integrality")->ok);

  const auto frac = build_certificate(SolutionParams(k1, k2, 1, 3, 1));
  CHECK_FALSE(frac.find("integrality")->ok);
  CHECK_FALSE(frac.find("c2-integer")->ok);
  CHECK_FALSE(frac.find("rank-bound")->ok);
  CHECK(frac.find("hym-V")->ok);
}

TEST_CASE("certificate properties over random parameters") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> coord(-2, 2);
  std::uniform_int_distribution<int> num(1, 6);
  std::uniform_int_distribution<int> rank(1, 30);
  for (int i = 0; i < 300; ++i) {
    std::array<Integer, lattice::kRank> a, b;
    for (std::size_t j = 0; j < lattice::kRank; ++j) {
      a[j] = coord(rng);
      b[j] = coord(rng);
    }
    const Rational t(num(rng), num(rng));
    const Rational alpha(num(rng) * (rng() % 2 ? 1 : -1), num(rng));
    const SolutionParams p(LatticeClass(a), LatticeClass(b), t, alpha, rank(rng));
    const auto cert = build_certificate(p);
    if (cert.valid()) {
      CHECK(is_integral(cert.c2W));
      CHECK(p.r() <= cert.c2W.get_num());
      CHECK(moduli::hym_exists(moduli::bundle_mukai(p.r(), cert.c2W.get_num())));
    }

    // alpha -> -alpha flips the sign, never the integrality.
    const auto flipped = integrality_check(SolutionParams(p.kappa1(), p.kappa2(), t, -alpha, p.r()));
    CHECK(flipped.value == -integrality_check(p).value);
    CHECK(flipped.ok == integrality_check(p).ok);

    // Only alpha / t matters.
    const Rational lambda(num(rng), num(rng));
    const SolutionParams scaled(p.kappa1(), p.kappa2(), lambda * t, lambda * alpha, p.r());
    const auto cs = build_certificate(scaled);
    CHECK(cs.c2W == cert.c2W);
    CHECK(cs.checks == cert.checks);
  }
}

TEST_CASE("alpha = +-2t always passes integrality") {
  std::mt19937_64 rng(44);
  std::uniform_int_distribution<int> coord(-9, 9);
  std::uniform_int_distribution<int> num(1, 9);
  for (int i = 0; i < 1000; ++i) {
    std::array<Integer, lattice::kRank> a, b;
    for (std::size_t j = 0; j < lattice::kRank; ++j) {
      a[j] = coord(rng);
      b[j] = coord(rng);
    }
    const Rational t(num(rng), num(rng));
    for (int s : {1, -1}) {
      const SolutionParams p(LatticeClass(a), LatticeClass(b), t, Rational(2 * s) * t, 1);
      CHECK(integrality_check(p).ok);
    }
  }
}

TEST_CASE("certificate JSON round trip and field order") {
  const auto cert = build_certificate(SolutionParams(k1, k2, Rational(1, 3), Rational(2, 3), 5));
  const auto j = to_json(cert);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> expected{"params", "k1",    "k2",         "c2W",   "checks", "pi1",
                                          "h2rank", "valid", "scope", "notes", "version"};
  CHECK(keys == expected);
  CHECK(j["c2W"]["num"] == 22);
  CHECK(j["c2W"]["den"] == 1);
  CHECK(certificate_from_json(j) == cert);
  CHECK(certificate_from_json(Json::parse(j.dump())) == cert);
}

TEST_CASE("params JSON accepts expressions and rational strings") {
  const auto j = Json::parse(R"({"kappa1":"e1-f1","kappa2":"e2-f2","t":"1/2","alpha":{"num":3,"den":1},"r":4})");
  const auto p = params_from_json(j);
  CHECK(p.kappa1() == k1);
  CHECK(p.t() == Rational(1, 2));
  CHECK(p.alpha() == 3);
  CHECK(params_from_json(to_json(p)) == p);
  CHECK_THROWS_AS(params_from_json(Json::parse(R"({"kappa1":"e1","kappa2":"0","t":0,"alpha":1,"r":1})")), ParseError);
  CHECK_THROWS_AS(params_from_json(Json::parse(R"({"kappa1":"e1"})")), ParseError);
}
