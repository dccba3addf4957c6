#include "hsys/lattice.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <utility>

namespace hsys::lattice {

namespace {

constexpr std::size_t kE8Offset1 = 6;
constexpr std::size_t kE8Offset2 = 14;

// Bourbaki E8 edges, 1-based node labels.
constexpr std::array<std::pair<int, int>, 7> kE8Edges{{{1, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {2, 4}}};

std::optional<std::size_t> index_of_label(std::string_view label) {
  if (label.size() < 2) return std::nullopt;
  const char kind = label[0];
  int n = 0;
  for (std::size_t i = 1; i < label.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(label[i]))) return std::nullopt;
    n = n * 10 + (label[i] - '0');
    if (n > 99) return std::nullopt;
  }
  switch (kind) {
    case 'e':
      if (n >= 1 && n <= 3) return static_cast<std::size_t>(2 * (n - 1));
      break;
    case 'f':
      if (n >= 1 && n <= 3) return static_cast<std::size_t>(2 * (n - 1) + 1);
      break;
    case 'a':
      if (n >= 1 && n <= 8) return kE8Offset1 + static_cast<std::size_t>(n - 1);
      break;
    case 'b':
      if (n >= 1 && n <= 8) return kE8Offset2 + static_cast<std::size_t>(n - 1);
      break;
    default:
      break;
  }
  return std::nullopt;
}

}  // namespace

std::string basis_label(std::size_t i) {
  if (i < 6) return std::string(1, (i % 2 == 0) ? 'e' : 'f') + std::to_string(i / 2 + 1);
  if (i < kE8Offset2) return "a" + std::to_string(i - kE8Offset1 + 1);
  if (i < kRank) return "b" + std::to_string(i - kE8Offset2 + 1);
  throw std::out_of_range("basis index " + std::to_string(i));
}

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    for (long v : row) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
  IntMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(swap, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = v;
      }
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

// ---------------------------------------------------------------------------
// LatticeClass

LatticeClass LatticeClass::basis(std::size_t index) {
  if (index >= kRank) throw std::out_of_range("basis index " + std::to_string(index));
  LatticeClass c;
  c.coords_[index] = 1;
  return c;
}

LatticeClass LatticeClass::basis(std::string_view label) {
  auto idx = index_of_label(label);
  if (!idx) throw std::invalid_argument("unknown basis label '" + std::string(label) + "'");
  return basis(*idx);
}

LatticeClass LatticeClass::parse(std::string_view expr) {
  std::string s;
  for (char ch : expr)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty class expression");
  if (s == "0") return {};

  LatticeClass out;
  std::size_t pos = 0;
  bool first = true;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = (s[pos] == '-') ? -1 : 1;
      ++pos;
    } else if (!first) {
      throw std::invalid_argument("expected '+' or '-' in '" + s + "'");
    }
    first = false;
    std::size_t digits = pos;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    Integer coef = 1;
    if (digits > pos) coef = Integer(s.substr(pos, digits - pos), 10);
    pos = digits;
    if (pos < s.size() && s[pos] == '*') ++pos;
    std::size_t end = pos;
    if (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
    while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
    auto idx = index_of_label(std::string_view(s).substr(pos, end - pos));
    if (!idx) throw std::invalid_argument("bad term in class expression '" + s + "'");
    out.coords_[*idx] += sign * coef;
    pos = end;
  }
  return out;
}

bool LatticeClass::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Integer& z) { return z == 0; });
}

bool LatticeClass::is_primitive() const {
  Integer g = 0;
  for (const auto& z : coords_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
  return g == 1;
}

std::string LatticeClass::to_expr() const {
  std::string out;
  for (std::size_t i = 0; i < kRank; ++i) {
    const Integer& z = coords_[i];
    if (z == 0) continue;
    if (z < 0) {
      out += "-";
    } else if (!out.empty()) {
      out += "+";
    }
    Integer mag = abs(z);
    if (mag != 1) out += mag.get_str();
    out += basis_label(i);
  }
  return out.empty() ? "0" : out;
}

LatticeClass operator+(const LatticeClass& a, const LatticeClass& b) {
  LatticeClass c;
  for (std::size_t i = 0; i < kRank; ++i) c.coords_[i] = a.coords_[i] + b.coords_[i];
  return c;
}

LatticeClass operator-(const LatticeClass& a, const LatticeClass& b) {
  LatticeClass c;
  for (std::size_t i = 0; i < kRank; ++i) c.coords_[i] = a.coords_[i] - b.coords_[i];
  return c;
}

LatticeClass operator-(const LatticeClass& a) {
  LatticeClass c;
  for (std::size_t i = 0; i < kRank; ++i) c.coords_[i] = -a.coords_[i];
  return c;
}

LatticeClass operator*(const Integer& s, const LatticeClass& a) {
  LatticeClass c;
  for (std::size_t i = 0; i < kRank; ++i) c.coords_[i] = s * a.coords_[i];
  return c;
}

bool operator<(const LatticeClass& a, const LatticeClass& b) {
  for (std::size_t i = 0; i < kRank; ++i) {
    const int c = cmp(a.coords_[i], b.coords_[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

std::optional<LatticeClass> scale_exact(const Rational& s, const LatticeClass& a, std::size_t* bad_index) {
  std::array<Integer, kRank> out;
  for (std::size_t i = 0; i < kRank; ++i) {
    Rational v = s * Rational(a[i]);
    if (!is_integral(v)) {
      if (bad_index) *bad_index = i;
      return std::nullopt;
    }
    out[i] = v.get_num();
  }
  return LatticeClass(out);
}

// ---------------------------------------------------------------------------
// GramMatrix

IntMatrix e8_negative() {
  IntMatrix m(8, 8);
  for (std::size_t i = 0; i < 8; ++i) m(i, i) = -2;
  for (auto [a, b] : kE8Edges) {
    m(a - 1, b - 1) = 1;
    m(b - 1, a - 1) = 1;
  }
  return m;
}

GramMatrix::GramMatrix(IntMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != kRank || entries_.cols() != kRank)
    throw std::invalid_argument("Gram matrix must be 22x22");
}

namespace {

GramMatrix build_standard() {
  IntMatrix g(kRank, kRank);
  for (std::size_t b = 0; b < 3; ++b) {
    g(2 * b, 2 * b + 1) = 1;
    g(2 * b + 1, 2 * b) = 1;
  }
  const IntMatrix e8 = e8_negative();
  for (std::size_t off : {kE8Offset1, kE8Offset2})
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) g(off + i, off + j) = e8(i, j);
  GramMatrix gram(std::move(g));

  const GramReport rep = inspect(gram);
  if (!rep.symmetric || !rep.even || rep.det != -1 || rep.positive != 3 || rep.negative != 19)
    throw std::logic_error("standard K3 lattice failed its self-check");
  return gram;
}

}  // namespace

const GramMatrix& GramMatrix::standard() {
  static const GramMatrix g = build_standard();
  return g;
}

Integer GramMatrix::pair(const LatticeClass& a, const LatticeClass& b) const {
  Integer sum = 0;
  for (std::size_t i = 0; i < kRank; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < kRank; ++j) {
      const Integer& gij = entries_(i, j);
      if (gij != 0 && b[j] != 0) sum += a[i] * gij * b[j];
    }
  }
  return sum;
}

std::array<Integer, kRank> GramMatrix::apply(const LatticeClass& a) const {
  std::array<Integer, kRank> out;
  for (std::size_t i = 0; i < kRank; ++i) {
    Integer s = 0;
    for (std::size_t j = 0; j < kRank; ++j)
      if (entries_(i, j) != 0 && a[j] != 0) s += entries_(i, j) * a[j];
    out[i] = s;
  }
  return out;
}

GramMatrix GramMatrix::change_basis(const IntMatrix& basis) const {
  return GramMatrix(basis.transposed() * entries_ * basis);
}

GramReport inspect(const GramMatrix& g) {
  const IntMatrix& m = g.entries();
  GramReport rep;
  rep.symmetric = (m == m.transposed());
  rep.even = true;
  for (std::size_t i = 0; i < kRank; ++i)
    if (!mpz_even_p(m(i, i).get_mpz_t())) rep.even = false;
  rep.det = determinant(m);

  // Float shadow for the inertia; entries are tiny so the conversion is exact.
  Eigen::MatrixXd f(kRank, kRank);
  for (std::size_t i = 0; i < kRank; ++i)
    for (std::size_t j = 0; j < kRank; ++j) f(i, j) = m(i, j).get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(f, Eigen::EigenvaluesOnly);
  for (double ev : solver.eigenvalues()) {
    if (ev > 1e-9) ++rep.positive;
    if (ev < -1e-9) ++rep.negative;
  }
  return rep;
}

Integer intersect(const LatticeClass& a, const LatticeClass& b) { return GramMatrix::standard().pair(a, b); }

std::optional<Integer> asd_admissible(const LatticeClass& a) {
  if (a.is_zero()) return Integer(0);
  const Integer q = self_intersection(a);
  if (q >= 0) return std::nullopt;
  return Integer(-q / 2);
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

struct SmithWork {
  IntMatrix a;
  IntMatrix left;
  IntMatrix right;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(i, c), a(j, c));
    for (std::size_t c = 0; c < left.cols(); ++c) std::swap(left(i, c), left(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
    for (std::size_t r = 0; r < right.rows(); ++r) std::swap(right(r, i), right(r, j));
  }
  // row_dst -= q * row_src
  void sub_row(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t c = 0; c < a.cols(); ++c) a(dst, c) -= q * a(src, c);
    for (std::size_t c = 0; c < left.cols(); ++c) left(dst, c) -= q * left(src, c);
  }
  void sub_col(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t r = 0; r < a.rows(); ++r) a(r, dst) -= q * a(r, src);
    for (std::size_t r = 0; r < right.rows(); ++r) right(r, dst) -= q * right(r, src);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) = -a(i, c);
    for (std::size_t c = 0; c < left.cols(); ++c) left(i, c) = -left(i, c);
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  SmithWork w{m, IntMatrix::identity(m.rows()), IntMatrix::identity(m.cols())};
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::size_t t = 0;

  while (t < std::min(rows, cols)) {
    // Smallest nonzero magnitude in the trailing block becomes the pivot.
    bool found = false;
    std::size_t pr = t;
    std::size_t pc = t;
    for (std::size_t r = t; r < rows; ++r)
      for (std::size_t c = t; c < cols; ++c)
        if (w.a(r, c) != 0 && (!found || mpz_cmpabs(w.a(r, c).get_mpz_t(), w.a(pr, pc).get_mpz_t()) < 0)) {
          found = true;
          pr = r;
          pc = c;
        }
    if (!found) break;
    w.swap_rows(t, pr);
    w.swap_cols(t, pc);

    bool clean = true;
    for (std::size_t r = t + 1; r < rows; ++r) {
      if (w.a(r, t) == 0) continue;
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), w.a(r, t).get_mpz_t(), w.a(t, t).get_mpz_t());
      w.sub_row(r, t, q);
      if (w.a(r, t) != 0) clean = false;
    }
    for (std::size_t c = t + 1; c < cols; ++c) {
      if (w.a(t, c) == 0) continue;
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), w.a(t, c).get_mpz_t(), w.a(t, t).get_mpz_t());
      w.sub_col(c, t, q);
      if (w.a(t, c) != 0) clean = false;
    }
    if (!clean) continue;  // a smaller remainder now exists; re-pivot

    // Divisibility: fold an offending row into the pivot row and retry.
    bool divides = true;
    for (std::size_t r = t + 1; r < rows && divides; ++r)
      for (std::size_t c = t + 1; c < cols; ++c)
        if (!mpz_divisible_p(w.a(r, c).get_mpz_t(), w.a(t, t).get_mpz_t())) {
          w.sub_row(t, r, Integer(-1));
          divides = false;
          break;
        }
    if (!divides) continue;

    if (w.a(t, t) < 0) w.negate_row(t);
    ++t;
  }

  SmithForm out;
  out.rank = t;
  for (std::size_t i = 0; i < t; ++i) out.factors.push_back(w.a(i, i));
  out.left = std::move(w.left);
  out.right = std::move(w.right);
  return out;
}

bool verify_smith(const IntMatrix& m, const SmithForm& s) {
  if (s.left.rows() != m.rows() || s.right.cols() != m.cols()) return false;
  if (abs(determinant(s.left)) != 1 || abs(determinant(s.right)) != 1) return false;
  const IntMatrix d = s.left * m * s.right;
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c) {
      Integer expected = (r == c && r < s.factors.size()) ? s.factors[r] : Integer(0);
      if (d(r, c) != expected) return false;
    }
  for (std::size_t i = 0; i < s.factors.size(); ++i) {
    if (s.factors[i] <= 0) return false;
    if (i + 1 < s.factors.size() && !mpz_divisible_p(s.factors[i + 1].get_mpz_t(), s.factors[i].get_mpz_t()))
      return false;
  }
  return s.rank == s.factors.size();
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const LatticeClass& a) {
  Json arr = Json::array();
  for (const auto& z : a.coords()) arr.push_back(integer_to_json(z));
  return arr;
}

LatticeClass class_from_json(const Json& j) {
  if (j.is_string()) {
    try {
      return LatticeClass::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  if (!j.is_array() || j.size() != kRank)
    throw ParseError("lattice class must be an array of 22 integers or an expression string");
  std::array<Integer, kRank> coords;
  for (std::size_t i = 0; i < kRank; ++i) coords[i] = integer_from_json(j[i]);
  return LatticeClass(coords);
}

}  // namespace hsys::lattice
