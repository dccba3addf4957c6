#include <doctest.h>

#include "hsys/lattice.hpp"

#include <numeric>
#include <random>

using namespace hsys;
using namespace hsys::lattice;

namespace {

LatticeClass random_class(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  std::array<Integer, kRank> c;
  for (auto& z : c) z = dist(rng);
  return LatticeClass(c);
}

// Block-by-block evaluation of the form, independent of the 22x22 matrix.
Integer block_pairing(const LatticeClass& a, const LatticeClass& b) {
  Integer s = 0;
  for (std::size_t k = 0; k < 3; ++k) s += a[2 * k] * b[2 * k + 1] + a[2 * k + 1] * b[2 * k];
  const std::array<std::pair<int, int>, 7> edges{{{1, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {2, 4}}};
  for (std::size_t off : {6u, 14u}) {
    for (std::size_t i = 0; i < 8; ++i) s -= 2 * a[off + i] * b[off + i];
    for (auto [p, q] : edges) s += a[off + p - 1] * b[off + q - 1] + a[off + q - 1] * b[off + p - 1];
  }
  return s;
}

Integer gcd_all(const std::vector<Integer>& xs) {
  Integer g = 0;
  for (const auto& x : xs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

}  // namespace

TEST_CASE("intersection examples") {
  const auto e1 = LatticeClass::basis("e1");
  const auto f1 = LatticeClass::basis("f1");
  CHECK(intersect(e1, f1) == 1);
  CHECK(intersect(e1 - f1, e1 - f1) == -2);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) CHECK(intersect(LatticeClass{}, random_class(rng, -9, 9)) == 0);
}

TEST_CASE("intersection matches block formula; symmetric and even") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_class(rng, -9, 9);
    const auto b = random_class(rng, -9, 9);
    const Integer ab = intersect(a, b);
    CHECK(ab == intersect(b, a));
    CHECK(ab == block_pairing(a, b));
    CHECK(mpz_even_p(intersect(a, a).get_mpz_t()));
  }
}

TEST_CASE("bilinearity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_class(rng, -9, 9);
    const auto b = random_class(rng, -9, 9);
    const auto c = random_class(rng, -9, 9);
    const Integer s = static_cast<long>(rng() % 7) - 3;
    CHECK(intersect(a + s * b, c) == intersect(a, c) + s * intersect(b, c));
  }
}

TEST_CASE("standard form is even unimodular of signature (3,19)") {
  const auto rep = inspect(GramMatrix::standard());
  CHECK(rep.symmetric);
  CHECK(rep.even);
  CHECK(rep.det == -1);
  CHECK(rep.positive == 3);
  CHECK(rep.negative == 19);
  CHECK(determinant(e8_negative()) == 1);
}

TEST_CASE("asd admissibility") {
  const auto e1 = LatticeClass::basis("e1");
  const auto f1 = LatticeClass::basis("f1");
  CHECK(asd_admissible(e1 - f1) == Integer(1));
  CHECK(asd_admissible(LatticeClass{}) == Integer(0));
  CHECK_FALSE(asd_admissible(e1 + f1).has_value());
  // Nonzero isotropic classes cannot carry a nonzero ASD form.
  CHECK_FALSE(asd_admissible(e1).has_value());
  CHECK(asd_admissible(LatticeClass::basis("a1")) == Integer(1));

  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_class(rng, -2, 2);
    const Integer q = intersect(a, a);
    const auto k = asd_admissible(a);
    CHECK(k.has_value() == (q < 0 || a.is_zero()));
    if (k) CHECK(q == -2 * *k);
  }
}

TEST_CASE("smith normal form examples") {
  auto s = smith_normal_form(IntMatrix{{2, 0}, {0, 3}});
  CHECK(s.factors == std::vector<Integer>{1, 6});
  CHECK(s.rank == 2);
  CHECK(verify_smith(IntMatrix{{2, 0}, {0, 3}}, s));

  s = smith_normal_form(IntMatrix::identity(2));
  CHECK(s.factors == std::vector<Integer>{1, 1});

  s = smith_normal_form(IntMatrix{{0, 0}, {0, 0}});
  CHECK(s.factors.empty());
  CHECK(s.rank == 0);

  const IntMatrix m{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  s = smith_normal_form(m);
  CHECK(s.factors == std::vector<Integer>{2, 6, 12});
  CHECK(verify_smith(m, s));
}

TEST_CASE("smith normal form against gcd of minors (2 x n)") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> val(-12, 12);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + trial % 6;
    IntMatrix m(2, n);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = val(rng);
    const auto s = smith_normal_form(m);
    REQUIRE(verify_smith(m, s));

    std::vector<Integer> entries;
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < n; ++c) entries.push_back(m(r, c));
    std::vector<Integer> minors;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) minors.push_back(abs(m(0, i) * m(1, j) - m(0, j) * m(1, i)));

    const Integer g1 = gcd_all(entries);
    const Integer g2 = gcd_all(minors);
    const std::size_t expected_rank = g1 == 0 ? 0 : (g2 == 0 ? 1 : 2);
    CHECK(s.rank == expected_rank);
    if (expected_rank >= 1) CHECK(s.factors[0] == g1);
    if (expected_rank == 2) CHECK(s.factors[0] * s.factors[1] == g2);
  }
}

TEST_CASE("smith transforms on random square and wide matrices") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> val(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + trial % 4;
    const std::size_t cols = 1 + (trial / 4) % 5;
    IntMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = val(rng);
    CHECK(verify_smith(m, smith_normal_form(m)));
  }
}

TEST_CASE("class expressions and JSON") {
  const auto a = LatticeClass::parse("2e1 - f1 + 3*a4 - b8");
  CHECK(a[0] == 2);
  CHECK(a[1] == -1);
  CHECK(a[9] == 3);
  CHECK(a[21] == -1);
  CHECK(LatticeClass::parse(a.to_expr()) == a);
  CHECK(LatticeClass::parse("0").is_zero());
  CHECK_THROWS_AS(LatticeClass::parse("e4"), std::invalid_argument);
  CHECK_THROWS_AS(LatticeClass::parse("2e1 f1"), std::invalid_argument);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto c = random_class(rng, -9, 9);
    CHECK(class_from_json(to_json(c)) == c);
    CHECK(LatticeClass::parse(c.to_expr()) == c);
  }
  CHECK_THROWS_AS(class_from_json(Json::array({1, 2, 3})), ParseError);
}

TEST_CASE("exact scaling reports the fractional coordinate") {
  const auto k = LatticeClass::parse("e1-f1");
  std::size_t bad = 99;
  CHECK_FALSE(scale_exact(Rational(1, 2), k, &bad).has_value());
  CHECK(bad == 0);
  CHECK(scale_exact(Rational(-2), k) == Integer(-2) * k);
}
