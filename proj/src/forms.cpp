#include "hsys/forms.hpp"

#include "hsys/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace hsys::forms {

using hsys::to_string;

const std::array<Generator, kGenCount>& generators() {
  static const std::array<Generator, kGenCount> table{{
      {"sigma", 1, 0},
      {"sigmabar", 1, 0},
      {"y1", 1, 0},
      {"y2", 1, 0},
      {"yp1", 1, 0},
      {"yp2", 1, 0},
      {"du", 1, 1},
      {"dcu", 1, 1},
      {"wS", 2, 2},
      {"OS", 2, 2},
      {"OSbar", 2, 2},
      {"w1", 2, 2},
      {"w2", 2, 2},
      {"ddcu", 2, 2},
      {"CS", 3, 3},
      {"FF", 4, 4},
      {"E", 0, 0},
  }};
  return table;
}

Gen generator_by_name(std::string_view name) {
  const auto& g = generators();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i].name == name) return static_cast<Gen>(i);
  throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Coefficients

namespace {

Complex mul(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

std::string complex_string(const Complex& c) {
  if (c.im == 0) return to_string(c.re);
  std::string im = c.im == 1 ? "i" : c.im == -1 ? "-i" : to_string(c.im) + "*i";
  if (c.re == 0) return im;
  return "(" + to_string(c.re) + (c.im > 0 ? " + " : " - ") +
         (abs(c.im) == 1 ? std::string("i") : to_string(Rational(abs(c.im))) + "*i") + ")";
}

}  // namespace

Coeff::Coeff(long n) {
  if (n != 0) terms_[{0, 0}] = Complex{Rational(n), Rational(0)};
}

Coeff::Coeff(const Rational& q) {
  if (q != 0) terms_[{0, 0}] = Complex{q, Rational(0)};
}

Coeff Coeff::i() {
  Coeff c;
  c.terms_[{0, 0}] = Complex{Rational(0), Rational(1)};
  return c;
}

Coeff Coeff::t(int power) {
  Coeff c;
  c.terms_[{power, 0}] = Complex{Rational(1), Rational(0)};
  return c;
}

Coeff Coeff::alpha(int power) {
  if (power < 0) throw std::invalid_argument("alpha appears with nonnegative powers only");
  Coeff c;
  c.terms_[{0, power}] = Complex{Rational(1), Rational(0)};
  return c;
}

void Coeff::add(const Key& k, const Complex& c) {
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_.emplace(k, c);
    return;
  }
  it->second.re += c.re;
  it->second.im += c.im;
  if (it->second.is_zero()) terms_.erase(it);
}

Coeff& Coeff::operator+=(const Coeff& o) {
  for (const auto& [k, c] : o.terms_) add(k, c);
  return *this;
}

Coeff operator-(const Coeff& a) {
  Coeff r = a;
  for (auto& [k, c] : r.terms_) {
    c.re = -c.re;
    c.im = -c.im;
  }
  return r;
}

Coeff operator*(const Coeff& a, const Coeff& b) {
  Coeff r;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) r.add({ka.first + kb.first, ka.second + kb.second}, mul(ca, cb));
  return r;
}

std::string Coeff::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<std::string> parts;
  for (const auto& [k, c] : terms_) {
    std::string s;
    const bool unit = c.im == 0 && (c.re == 1 || c.re == -1);
    if (!unit || (k.first == 0 && k.second == 0)) s = complex_string(c);
    else if (c.re == -1) s = "-";
    auto append = [&](const std::string& sym) {
      if (!s.empty() && s != "-") s += "*";
      s += sym;
    };
    if (k.first == 1) append("t");
    else if (k.first != 0) append("t^" + std::to_string(k.first));
    if (k.second == 1) append("alpha");
    else if (k.second != 0) append("alpha^" + std::to_string(k.second));
    parts.push_back(s);
  }
  if (parts.size() == 1) return parts[0];
  std::string out = "(" + parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " + " + parts[i];
  return out + ")";
}

// ---------------------------------------------------------------------------
// Monomials

int degree(const Monomial& m) {
  int d = 0;
  for (std::size_t i = 0; i < kGenCount; ++i) d += m[i] * generators()[i].degree;
  return d;
}

int base_degree(const Monomial& m) {
  int d = 0;
  for (std::size_t i = 0; i < kGenCount; ++i) d += m[i] * generators()[i].base_degree;
  return d;
}

bool vanishes(const Monomial& m) {
  if (base_degree(m) > 4) return true;
  const bool curvature = m[kW1] != 0 || m[kW2] != 0;
  return curvature && (m[kWS] != 0 || m[kOS] != 0 || m[kOSBar] != 0);
}

std::string to_string(const Monomial& m) {
  std::string out;
  for (std::size_t i = 0; i < kGenCount; ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "^";
    out += generators()[i].name;
    if (m[i] != 1) out += "**" + std::to_string(m[i]);
  }
  return out.empty() ? "1" : out;
}

namespace {

/// Product of two monomials in canonical order; sign 0 when an odd
/// generator repeats.
int multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  int swaps = 0;
  int odd_after = 0;  // odd generators of a with index above the current one
  for (std::size_t i = 0; i < kGenCount; ++i)
    if (generators()[i].odd()) odd_after += a[i];
  for (std::size_t i = 0; i < kGenCount; ++i) {
    if (generators()[i].odd()) {
      odd_after -= a[i];
      if (a[i] && b[i]) return 0;
      if (b[i]) swaps += odd_after;
    }
    out[i] = a[i] + b[i];
  }
  return swaps % 2 == 0 ? 1 : -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Forms

InvariantForm::InvariantForm(const Coeff& c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

InvariantForm InvariantForm::gen(Gen g, int power) {
  Monomial m{};
  m[g] = power;
  return term(Coeff(1), m);
}

InvariantForm InvariantForm::term(const Coeff& c, const Monomial& m) {
  for (std::size_t i = 0; i < kGenCount; ++i) {
    const auto& g = generators()[i];
    if (g.odd() && (m[i] < 0 || m[i] > 1)) throw std::invalid_argument("odd generator exponent must be 0 or 1");
    if (i != kE && m[i] < 0) throw std::invalid_argument("negative exponent on " + std::string(g.name));
  }
  InvariantForm f;
  f.add(m, c);
  return f;
}

void InvariantForm::add(const Monomial& m, const Coeff& c) {
  if (c.is_zero() || vanishes(m)) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

InvariantForm& InvariantForm::operator+=(const InvariantForm& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

InvariantForm operator-(const InvariantForm& a) {
  InvariantForm r;
  for (const auto& [m, c] : a.terms_) r.add(m, -c);
  return r;
}

InvariantForm operator*(const Coeff& k, const InvariantForm& a) {
  InvariantForm r;
  for (const auto& [m, c] : a.terms_) r.add(m, k * c);
  return r;
}

InvariantForm wedge(const InvariantForm& a, const InvariantForm& b) {
  InvariantForm r;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      Monomial m{};
      const int sign = multiply(ma, mb, m);
      if (sign != 0) r += InvariantForm::term(sign > 0 ? ca * cb : -(ca * cb), m);
    }
  return r;
}

InvariantForm normalize(const InvariantForm& a) {
  InvariantForm r;
  for (const auto& [m, c] : a.terms()) r += InvariantForm::term(c, m);
  return r;
}

std::string InvariantForm::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    std::string coeff = c.to_string();
    std::string mono = forms::to_string(m);
    std::string piece;
    if (mono == "1") piece = coeff;
    else if (coeff == "1") piece = mono;
    else if (coeff == "-1") piece = "-" + mono;
    else piece = coeff + "*" + mono;
    if (out.empty()) out = piece;
    else if (piece[0] == '-') out += " - " + piece.substr(1);
    else out += " + " + piece;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivation

FormAlgebra FormAlgebra::standard() {
  using F = InvariantForm;
  FormAlgebra a;
  a.d_[kSigma] = F::gen(kW1) + Coeff::i() * F::gen(kW2);
  a.d_[kSigmaBar] = F::gen(kW1) - Coeff::i() * F::gen(kW2);
  a.d_[kY1] = F::gen(kW1);
  a.d_[kY2] = F::gen(kW2);
  a.d_[kYp1] = -Coeff::t() * F::gen(kW1);
  a.d_[kYp2] = -Coeff::t() * F::gen(kW2);
  a.d_[kE] = wedge(F::gen(kE), F::gen(kDu));
  a.d_[kDcu] = F::gen(kDdcu);
  a.d_[kCS] = F::gen(kFF);
  return a;
}

InvariantForm FormAlgebra::d(const InvariantForm& a) const {
  InvariantForm out;
  for (const auto& [m, c] : a.terms()) {
    int prefix_degree = 0;
    for (std::size_t k = 0; k < kGenCount; ++k) {
      const int n = m[k];
      if (n == 0) continue;
      const auto& g = generators()[k];
      Monomial prefix{}, suffix{};
      for (std::size_t i = 0; i < k; ++i) prefix[i] = m[i];
      for (std::size_t i = k + 1; i < kGenCount; ++i) suffix[i] = m[i];
      // d(g^n) = n g^(n-1) dg for even g; odd g appears at most once.
      InvariantForm dg = d_[k];
      if (!g.odd() && n != 1) dg = Coeff(static_cast<long>(n)) * wedge(InvariantForm::gen(static_cast<Gen>(k), n - 1), dg);
      const Coeff sign = prefix_degree % 2 == 0 ? c : -c;
      out += sign * wedge(InvariantForm::term(1, prefix), dg, InvariantForm::term(1, suffix));
      prefix_degree += n * g.degree;
    }
  }
  return out;
}

InvariantForm random_term(std::mt19937_64& rng) {
  Monomial m{};
  std::uniform_int_distribution<int> coin(0, 2);
  do {
    for (std::size_t i = 0; i < kGenCount; ++i) {
      const auto& g = generators()[i];
      if (i == kE) m[i] = std::uniform_int_distribution<int>(-2, 2)(rng);
      else if (g.odd()) m[i] = coin(rng) == 0 ? 1 : 0;
      else m[i] = coin(rng) == 0 ? std::uniform_int_distribution<int>(1, 2)(rng) : 0;
    }
    // Keep the base part small so the sample is not dominated by truncation.
    while (base_degree(m) > 4) {
      std::size_t i = std::uniform_int_distribution<std::size_t>(0, kGenCount - 1)(rng);
      if (generators()[i].base_degree > 0 && m[i] > 0) --m[i];
    }
  } while (vanishes(m));
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4), tpow(-2, 2);
  int p = 0;
  while (p == 0) p = num(rng);
  Coeff c = Coeff(make_rational(p, den(rng))) * Coeff::t(tpow(rng));
  if (coin(rng) == 0) c = c * Coeff::i();
  return InvariantForm::term(c, m);
}

// ---------------------------------------------------------------------------
// Identity suite

namespace {

using F = InvariantForm;

F pairing_with(Gen first, Gen second) {
  return wedge(F::gen(kW1), F::gen(first)) + wedge(F::gen(kW2), F::gen(second));
}

IdentityResult result(std::string name, F lhs_minus_rhs, std::string detail) {
  IdentityResult r;
  r.identity = std::move(name);
  r.witness = normalize(lhs_minus_rhs);
  r.pass = r.witness.is_zero();
  r.detail = std::move(detail);
  return r;
}

IdentityResult check_d2(const FormAlgebra& alg, std::uint64_t seed) {
  for (std::size_t g = 0; g < kGenCount; ++g) {
    F dd = alg.d(alg.d(F::gen(static_cast<Gen>(g))));
    if (!dd.is_zero())
      return result("d2_zero", dd, "d(d(" + std::string(generators()[g].name) + "))");
  }
  std::mt19937_64 rng(seed);
  constexpr int kSample = 200;
  for (int i = 0; i < kSample; ++i) {
    F x = random_term(rng);
    F dd = alg.d(alg.d(x));
    if (!dd.is_zero()) return result("d2_zero", dd, "d(d(" + x.to_string() + "))");
  }
  return result("d2_zero", F{}, "all generators and " + std::to_string(kSample) + " random monomials");
}

}  // namespace

F holomorphic_volume() { return wedge(F::gen(kOS), F::gen(kSigma)); }

F hermitian_form() {
  return wedge(F::gen(kE), F::gen(kWS)) +
         (Coeff(Rational(1, 2)) * Coeff::i() * Coeff::t()) * wedge(F::gen(kSigma), F::gen(kSigmaBar));
}

F dc_omega() {
  return wedge(F::gen(kDcu), F::gen(kE), F::gen(kWS)) -
         (Coeff(Rational(1, 2)) * Coeff::t()) * pairing_with(kY1, kY2);
}

F dc_omega_dual() {
  // Curvature of the dual connection is -t w_j and the dual size is 1/t.
  const Coeff t_dual = Coeff::t(-1);
  const F curvature_pairing = -Coeff::t() * pairing_with(kYp1, kYp2);
  return wedge(F::gen(kDcu), F::gen(kE), F::gen(kWS)) - (Coeff(Rational(1, 2)) * t_dual) * curvature_pairing;
}

F h_difference() {
  const F h = -dc_omega() + F::gen(kCS);
  const F h_dual = -dc_omega_dual() + F::gen(kCS);
  return h - h_dual;
}

F correspondence_form() {
  return Coeff(Rational(1, 2)) * (wedge(F::gen(kY1), F::gen(kYp1)) + wedge(F::gen(kY2), F::gen(kYp2)));
}

IdentityResult verify_identity(std::string_view name, const FormAlgebra& alg, std::uint64_t seed) {
  if (name == "d2_zero") return check_d2(alg, seed);
  if (name == "omega_closed") return result("omega_closed", alg.d(holomorphic_volume()), "d(OS^sigma)");
  if (name == "conf_balanced") {
    const F x = wedge(F::gen(kE), F::gen(kWS, 2)) +
                (Coeff::i() * Coeff::t()) * wedge(F::gen(kWS), F::gen(kSigma), F::gen(kSigmaBar));
    return result("conf_balanced", alg.d(x), "d(E wS^2 + i t wS^sigma^sigmabar)");
  }
  if (name == "dc_omega") {
    const F rhs = (Coeff(Rational(1, 2)) * Coeff::t()) * pairing_with(kY1, kY2) +
                  Coeff(Rational(1, 2)) * pairing_with(kYp1, kYp2);
    return result("dc_omega", h_difference() - rhs, "q*H - q'*H' = (t/2)(w, y) + (1/2)(w, yp)");
  }
  if (name == "duality_dF") {
    return result("duality_dF", h_difference() - alg.d(correspondence_form()), "q*H - q'*H' = dF");
  }
  throw UnknownIdentity("unknown identity '" + std::string(name) + "'");
}

std::vector<IdentityResult> verify_suite(const FormAlgebra& alg, unsigned threads, std::uint64_t seed) {
  std::vector<IdentityResult> out(kIdentities.size());
  parallel_for_index(kIdentities.size(), threads, [&](std::size_t i) { out[i] = verify_identity(kIdentities[i], alg, seed); });
  return out;
}

Json to_json(const IdentityResult& r) {
  Json j;
  j["identity"] = r.identity;
  j["pass"] = r.pass;
  j["witness"] = r.pass ? Json(nullptr) : Json(r.witness.to_string());
  j["detail"] = r.detail;
  return j;
}

// ---------------------------------------------------------------------------
// Mutations

std::vector<Mutation> single_sign_mutations(const FormAlgebra& alg) {
  std::vector<Mutation> out;
  for (std::size_t g = 0; g < kGenCount; ++g) {
    for (const auto& [m, c] : alg.structure(static_cast<Gen>(g)).terms()) {
      const F term = F::term(c, m);
      out.push_back({static_cast<Gen>(g), m,
                     "d(" + std::string(generators()[g].name) + "): flip " + term.to_string()});
    }
  }
  return out;
}

FormAlgebra apply(const FormAlgebra& alg, const Mutation& mu) {
  FormAlgebra out = alg;
  const F& eq = alg.structure(mu.generator);
  auto it = eq.terms().find(mu.monomial);
  if (it == eq.terms().end()) throw std::invalid_argument("mutation does not match a structure-equation term");
  const F term = F::term(it->second, it->first);
  out.set_structure(mu.generator, eq - Coeff(2) * term);
  return out;
}

std::vector<MutationOutcome> mutation_report(const FormAlgebra& alg, unsigned threads) {
  const auto mutations = single_sign_mutations(alg);
  std::vector<MutationOutcome> out(mutations.size());
  parallel_for_index(mutations.size(), threads, [&](std::size_t i) {
    out[i].mutation = mutations[i];
    for (const auto& r : verify_suite(apply(alg, mutations[i])))
      if (!r.pass) out[i].broken.push_back(r.identity);
  });
  return out;
}

Json to_json(const MutationOutcome& m) {
  Json j;
  j["mutation"] = m.mutation.label;
  j["broken"] = m.broken;
  j["detected"] = !m.broken.empty();
  return j;
}

}  // namespace hsys::forms
