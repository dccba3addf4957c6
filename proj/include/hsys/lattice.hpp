#pragma once

// Second cohomology lattice of a K3 surface, II(3,19) = U^3 + E8(-1)^2.
//
// Basis order (fixed, used by every serialized artifact):
//
//   index  0..5   e1 f1 e2 f2 e3 f3     three hyperbolic planes U, Q(e,f) = 1
//   index  6..13  a1 .. a8              first E8(-1) block
//   index 14..21  b1 .. b8              second E8(-1) block
//
// E8 node labels follow Bourbaki: nodes 1-3-4-5-6-7-8 form a chain and node
// 2 hangs off node 4. E8(-1) is the negated Cartan matrix, so simple roots
// square to -2 and adjacent roots pair to +1.

#include "hsys/exact.hpp"
#include "hsys/json_io.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsys::lattice {

inline constexpr std::size_t kRank = 22;

/// Label of basis vector i ("e1", "f3", "a5", "b8", ...).
std::string basis_label(std::size_t i);

/// Dense integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntMatrix transposed() const;
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// Exact determinant (fraction-free Bareiss elimination).
Integer determinant(const IntMatrix& m);

/// An element of H^2(S, Z) in the fixed basis.
class LatticeClass {
 public:
  LatticeClass() = default;
  explicit LatticeClass(const std::array<Integer, kRank>& coords) : coords_(coords) {}

  /// Basis vector with the given label.
  static LatticeClass basis(std::string_view label);
  static LatticeClass basis(std::size_t index);

  /// Parses expressions such as "e1-f1", "2a3 + b1 - 3f2" or "0".
  static LatticeClass parse(std::string_view expr);

  const std::array<Integer, kRank>& coords() const { return coords_; }
  const Integer& operator[](std::size_t i) const { return coords_[i]; }

  bool is_zero() const;
  /// gcd of the coordinates is 1.
  bool is_primitive() const;

  /// Compact expression form, inverse of parse().
  std::string to_expr() const;

  friend LatticeClass operator+(const LatticeClass& a, const LatticeClass& b);
  friend LatticeClass operator-(const LatticeClass& a, const LatticeClass& b);
  friend LatticeClass operator-(const LatticeClass& a);
  friend LatticeClass operator*(const Integer& s, const LatticeClass& a);
  friend bool operator==(const LatticeClass& a, const LatticeClass& b) { return a.coords_ == b.coords_; }
  /// Lexicographic order on coordinates.
  friend bool operator<(const LatticeClass& a, const LatticeClass& b);

 private:
  std::array<Integer, kRank> coords_{};
};

/// Scales a class by a rational, succeeding only when the result is integral.
/// On failure returns nullopt and, when `bad_index` is given, the first
/// coordinate index that came out fractional.
std::optional<LatticeClass> scale_exact(const Rational& s, const LatticeClass& a,
                                        std::size_t* bad_index = nullptr);

/// Symmetric integer bilinear form on Z^22.
class GramMatrix {
 public:
  /// U + U + U + E8(-1) + E8(-1); validated once on first use.
  static const GramMatrix& standard();

  /// Arbitrary symmetric form (used for basis-change experiments).
  explicit GramMatrix(IntMatrix entries);

  const IntMatrix& entries() const { return entries_; }

  Integer pair(const LatticeClass& a, const LatticeClass& b) const;
  /// Row vector (G a)^T.
  std::array<Integer, kRank> apply(const LatticeClass& a) const;

  /// The same form written in the basis given by the columns of `basis`:
  /// basis^T G basis.
  GramMatrix change_basis(const IntMatrix& basis) const;

 private:
  IntMatrix entries_;
};

/// Result of the structural self-check of the standard form.
struct GramReport {
  bool symmetric = false;
  bool even = false;
  Integer det;
  int positive = 0;
  int negative = 0;
};
GramReport inspect(const GramMatrix& g);

/// The negated E8 Cartan matrix in Bourbaki labeling.
IntMatrix e8_negative();

/// Q(a, b) with respect to the standard form.
Integer intersect(const LatticeClass& a, const LatticeClass& b);
inline Integer self_intersection(const LatticeClass& a) { return intersect(a, a); }

/// k >= 0 with Q(a) = -2k when `a` can carry an anti-self-dual
/// representative at the level of the lattice: a = 0 (k = 0) or Q(a) < 0.
/// Nonzero classes with Q(a) >= 0 return nullopt.
std::optional<Integer> asd_admissible(const LatticeClass& a);

/// Smith normal form with transformation matrices: left * M * right equals
/// the rows x cols diagonal matrix carrying `factors` then zeros.
struct SmithForm {
  std::vector<Integer> factors;  ///< nonzero invariant factors, d1 | d2 | ...
  std::size_t rank = 0;
  IntMatrix left;
  IntMatrix right;
};
SmithForm smith_normal_form(const IntMatrix& m);

/// Checks left * M * right against the factors, divisibility of the chain,
/// and |det| = 1 of both transforms.
bool verify_smith(const IntMatrix& m, const SmithForm& s);

Json to_json(const LatticeClass& a);
/// Accepts a 22-integer array or an expression string.
LatticeClass class_from_json(const Json& j);

}  // namespace hsys::lattice
