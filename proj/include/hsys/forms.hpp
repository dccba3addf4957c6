#pragma once

// Graded-commutative exterior algebra on the invariant generators of the
// torus fibration X -> S, with coefficients in Q(i)[t, 1/t, alpha] and a
// derivation d defined by structure equations.

#include "hsys/exact.hpp"
#include "hsys/json_io.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hsys::forms {

struct Generator {
  std::string_view name;
  int degree;
  int base_degree;  ///< degree counted toward the 4-dimensional base

  bool odd() const { return degree % 2 != 0; }
};

enum Gen : std::size_t {
  kSigma,
  kSigmaBar,
  kY1,   ///< connection components
  kY2,
  kYp1,  ///< dual connection components
  kYp2,
  kDu,
  kDcu,
  kWS,   ///< Kahler form of the surface
  kOS,   ///< holomorphic volume form
  kOSBar,
  kW1,   ///< curvature components, anti-self-dual
  kW2,
  kDdcu,
  kCS,   ///< Chern-Simons symbol, shared by both sides of the duality
  kFF,   ///< dCS
  kE,    ///< e^u, degree 0 and invertible
  kGenCount
};

const std::array<Generator, kGenCount>& generators();
/// Throws std::invalid_argument for an unknown name.
Gen generator_by_name(std::string_view name);

/// a + b i with rational parts.
struct Complex {
  Rational re;
  Rational im;

  bool is_zero() const { return re == 0 && im == 0; }
  friend bool operator==(const Complex&, const Complex&) = default;
};

/// Element of Q(i)[t, 1/t, alpha].
class Coeff {
 public:
  using Key = std::pair<int, int>;  ///< (power of t, power of alpha)

  Coeff() = default;
  Coeff(long n);  // NOLINT(google-explicit-constructor)
  Coeff(const Rational& q);  // NOLINT(google-explicit-constructor)
  static Coeff i();
  static Coeff t(int power = 1);
  static Coeff alpha(int power = 1);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, Complex>& terms() const { return terms_; }
  std::string to_string() const;

  Coeff& operator+=(const Coeff& o);
  friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
  friend Coeff operator-(const Coeff& a);
  friend Coeff operator-(const Coeff& a, const Coeff& b) { return a + (-b); }
  friend Coeff operator*(const Coeff& a, const Coeff& b);
  friend bool operator==(const Coeff&, const Coeff&) = default;

 private:
  void add(const Key& k, const Complex& c);
  std::map<Key, Complex> terms_;
};

/// Exponent vector over the generators: odd entries are 0 or 1, E may be
/// negative, the rest are nonnegative.
using Monomial = std::array<int, kGenCount>;

int degree(const Monomial& m);
int base_degree(const Monomial& m);
/// True when a vanishing relation applies: base degree above 4, or w_S,
/// Omega_S or its conjugate wedged with w1 or w2.
bool vanishes(const Monomial& m);
std::string to_string(const Monomial& m);

/// Normalized linear combination of monomials.
class InvariantForm {
 public:
  InvariantForm() = default;
  InvariantForm(const Coeff& c);  // NOLINT(google-explicit-constructor)
  static InvariantForm gen(Gen g, int power = 1);
  static InvariantForm term(const Coeff& c, const Monomial& m);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Coeff>& terms() const { return terms_; }
  std::string to_string() const;

  InvariantForm& operator+=(const InvariantForm& o);
  friend InvariantForm operator+(InvariantForm a, const InvariantForm& b) { return a += b; }
  friend InvariantForm operator-(const InvariantForm& a);
  friend InvariantForm operator-(const InvariantForm& a, const InvariantForm& b) { return a + (-b); }
  friend InvariantForm operator*(const Coeff& c, const InvariantForm& a);
  friend bool operator==(const InvariantForm&, const InvariantForm&) = default;

 private:
  void add(const Monomial& m, const Coeff& c);
  std::map<Monomial, Coeff> terms_;
};

InvariantForm wedge(const InvariantForm& a, const InvariantForm& b);
template <class... Rest>
InvariantForm wedge(const InvariantForm& a, const InvariantForm& b, const Rest&... rest) {
  return wedge(wedge(a, b), rest...);
}
/// Drops vanishing monomials and zero coefficients.
InvariantForm normalize(const InvariantForm& a);

/// The exterior derivative determined by a table of structure equations.
class FormAlgebra {
 public:
  /// dsigma = w1 + i w2, dsigmabar = w1 - i w2, dy_j = w_j, dyp_j = -t w_j,
  /// dE = E du, d(dcu) = ddcu, dCS = FF, all other generators closed.
  static FormAlgebra standard();

  const InvariantForm& structure(Gen g) const { return d_[g]; }
  void set_structure(Gen g, InvariantForm dg) { d_[g] = std::move(dg); }

  /// Leibniz extension of the structure equations.
  InvariantForm d(const InvariantForm& a) const;

 private:
  std::array<InvariantForm, kGenCount> d_;
};

/// Random monomial with a random nonzero rational coefficient.
InvariantForm random_term(std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Identity suite

class UnknownIdentity : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::array<std::string_view, 5> kIdentities{"d2_zero", "omega_closed", "conf_balanced", "dc_omega",
                                                             "duality_dF"};

struct IdentityResult {
  std::string identity;
  bool pass = false;
  InvariantForm witness;  ///< LHS - RHS in normal form
  std::string detail;
};

/// Omega = Omega_S ^ sigma.
InvariantForm holomorphic_volume();
/// e^u w_S + (i t / 2) sigma ^ sigmabar.
InvariantForm hermitian_form();
/// d^c of the hermitian form, as the closed expression
/// dcu ^ E w_S - (t/2) sum_j w_j ^ y_j.
InvariantForm dc_omega();
/// The same expression on the dual side: curvature -t w_j, size 1/t.
InvariantForm dc_omega_dual();
/// q*H - q'*H' with H = -d^c omega + CS and H' = -d^c omega' + CS.
InvariantForm h_difference();
/// F = (1/2) sum_j y_j ^ yp_j.
InvariantForm correspondence_form();

IdentityResult verify_identity(std::string_view name, const FormAlgebra& alg = FormAlgebra::standard(),
                               std::uint64_t seed = 0);
std::vector<IdentityResult> verify_suite(const FormAlgebra& alg = FormAlgebra::standard(), unsigned threads = 1,
                                         std::uint64_t seed = 0);

Json to_json(const IdentityResult& r);

/// Negation of one term of one structure equation.
struct Mutation {
  Gen generator = kSigma;
  Monomial monomial{};
  std::string label;
};

std::vector<Mutation> single_sign_mutations(const FormAlgebra& alg = FormAlgebra::standard());
FormAlgebra apply(const FormAlgebra& alg, const Mutation& m);

struct MutationOutcome {
  Mutation mutation;
  std::vector<std::string> broken;  ///< identities that fail under the mutation
};

std::vector<MutationOutcome> mutation_report(const FormAlgebra& alg = FormAlgebra::standard(), unsigned threads = 1);
Json to_json(const MutationOutcome& m);

}  // namespace hsys::forms
