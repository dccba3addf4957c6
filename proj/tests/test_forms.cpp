#include <doctest.h>

#include "hsys/forms.hpp"

#include <random>

using namespace hsys;
using namespace hsys::forms;
using F = InvariantForm;

namespace {

const FormAlgebra alg = FormAlgebra::standard();

F g(Gen x) { return F::gen(x); }

/// Sign of sorting the concatenated odd generators of a then b, counted by
/// bubble sort over the expanded factor list.
int sorting_sign(const Monomial& a, const Monomial& b) {
  std::vector<std::size_t> seq;
  for (const Monomial* m : {&a, &b})
    for (std::size_t i = 0; i < kGenCount; ++i)
      if (generators()[i].odd() && (*m)[i]) seq.push_back(i);
  int sign = 1;
  for (std::size_t pass = 0; pass < seq.size(); ++pass)
    for (std::size_t j = 0; j + 1 < seq.size(); ++j)
      if (seq[j] > seq[j + 1]) {
        std::swap(seq[j], seq[j + 1]);
        sign = -sign;
      }
  for (std::size_t j = 0; j + 1 < seq.size(); ++j)
    if (seq[j] == seq[j + 1]) return 0;
  return sign;
}

F random_form(std::mt19937_64& rng) {
  F out;
  const int n = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int i = 0; i < n; ++i) out += random_term(rng);
  return out;
}

int parity(const F& homogeneous) { return degree(homogeneous.terms().begin()->first) % 2; }

}  // namespace

TEST_CASE("wedge examples") {
  CHECK(wedge(g(kY1), g(kY1)).is_zero());
  CHECK(wedge(g(kSigma), g(kSigmaBar)) == -wedge(g(kSigmaBar), g(kSigma)));
  CHECK_FALSE(wedge(g(kSigma), g(kSigmaBar)).is_zero());
  CHECK(wedge(g(kWS), g(kW1)).is_zero());
  CHECK(wedge(g(kOSBar), g(kW2)).is_zero());
  CHECK_FALSE(wedge(g(kW1), g(kW1)).is_zero());
}

TEST_CASE("normalize examples") {
  CHECK(wedge(g(kDu), g(kWS), g(kWS)).is_zero());
  CHECK(wedge(g(kOS), g(kW2)).is_zero());
  const F x = wedge(g(kSigma), g(kSigmaBar), g(kY1), g(kY2));
  CHECK(x.terms().size() == 1);
  CHECK(normalize(x) == x);
  CHECK(x.to_string() == "sigma^sigmabar^y1^y2");
}

TEST_CASE("d examples") {
  CHECK(alg.d(g(kY1)) == g(kW1));
  CHECK(alg.d(alg.d(g(kY1))).is_zero());
  CHECK(alg.d(holomorphic_volume()).is_zero());
  CHECK(alg.d(g(kE)) == wedge(g(kE), g(kDu)));
  CHECK(alg.d(F::gen(kE, -2)) == Coeff(-2) * wedge(F::gen(kE, -2), g(kDu)));

  const F uu = wedge(g(kY1), g(kYp1)) + wedge(g(kY2), g(kYp2));
  const F expected = wedge(g(kW1), g(kYp1)) + wedge(g(kW2), g(kYp2)) +
                     Coeff::t() * (wedge(g(kW1), g(kY1)) + wedge(g(kW2), g(kY2)));
  CHECK(alg.d(uu) == expected);
}

TEST_CASE("wedge sign matches the permutation oracle") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const F a = random_term(rng);
    const F b = random_term(rng);
    const auto& [ma, ca] = *a.terms().begin();
    const auto& [mb, cb] = *b.terms().begin();
    Monomial sum{};
    for (std::size_t k = 0; k < kGenCount; ++k) sum[k] = ma[k] + mb[k];
    const int sign = sorting_sign(ma, mb);
    const F expected = sign == 0 ? F{} : F::term(sign > 0 ? ca * cb : -(ca * cb), sum);
    CHECK(wedge(a, b) == expected);
  }
}

TEST_CASE("graded commutativity, associativity and Leibniz on random forms") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const F a = random_term(rng);
    const F b = random_term(rng);
    const F c = random_form(rng);
    const int pa = parity(a);
    const int pb = parity(b);
    const F ab = wedge(a, b);
    CHECK(ab == (pa * pb % 2 == 0 ? wedge(b, a) : -wedge(b, a)));
    CHECK(wedge(ab, c) == wedge(a, wedge(b, c)));
    const F lhs = alg.d(ab);
    const F rhs = wedge(alg.d(a), b) + (pa == 0 ? wedge(a, alg.d(b)) : -wedge(a, alg.d(b)));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("d squares to zero on random mixed-degree forms") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) CHECK(alg.d(alg.d(random_form(rng))).is_zero());
}

TEST_CASE("builtin identities all hold") {
  for (auto name : kIdentities) {
    const auto r = verify_identity(name);
    INFO(name, " witness: ", r.witness.to_string());
    CHECK(r.pass);
    CHECK(r.witness.is_zero());
  }
  const auto suite = verify_suite(alg, 4);
  REQUIRE(suite.size() == kIdentities.size());
  for (std::size_t i = 0; i < suite.size(); ++i) CHECK(suite[i].identity == kIdentities[i]);
  CHECK_THROWS_AS(verify_identity("no_such_identity"), UnknownIdentity);
}

TEST_CASE("dc_omega expression") {
  CHECK(dc_omega().to_string() == "dcu^wS^E - 1/2*t*y2^w2 - 1/2*t*y1^w1");
  CHECK(h_difference() == (Coeff(Rational(1, 2)) * Coeff::t()) * (wedge(g(kW1), g(kY1)) + wedge(g(kW2), g(kY2))) +
                              Coeff(Rational(1, 2)) * (wedge(g(kW1), g(kYp1)) + wedge(g(kW2), g(kYp2))));
}

TEST_CASE("patched dual structure equation gives the t sum witness") {
  FormAlgebra patched = alg;
  patched.set_structure(kYp1, Coeff::t() * g(kW1));
  patched.set_structure(kYp2, Coeff::t() * g(kW2));
  const auto r = verify_identity("duality_dF", patched);
  CHECK_FALSE(r.pass);
  CHECK(r.witness == Coeff::t() * (wedge(g(kW1), g(kY1)) + wedge(g(kW2), g(kY2))));
  const auto j = to_json(r);
  CHECK(j["pass"] == false);
  CHECK(j["witness"].is_string());
}

TEST_CASE("single sign mutations") {
  const auto muts = single_sign_mutations();
  CHECK(muts.size() == 11);
  const auto report = mutation_report(alg, 4);
  REQUIRE(report.size() == muts.size());
  for (const auto& o : report) {
    const Gen x = o.mutation.generator;
    const bool connection = x == kY1 || x == kY2 || x == kYp1 || x == kYp2;
    if (connection) {
      INFO(o.mutation.label);
      CHECK(o.broken == std::vector<std::string>{"duality_dF"});
    }
    CHECK(to_json(o)["detected"] == !o.broken.empty());
  }
  // The mutated algebra differs only in the chosen term.
  const auto mutated = apply(alg, muts.front());
  CHECK(mutated.structure(muts.front().generator) != alg.structure(muts.front().generator));
}

TEST_CASE("generator lookup") {
  CHECK(generator_by_name("yp2") == kYp2);
  CHECK_THROWS_AS(generator_by_name("zz"), std::invalid_argument);
  CHECK_THROWS_AS(F::term(1, Monomial{2}), std::invalid_argument);
}
