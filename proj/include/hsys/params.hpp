#pragma once

#include "hsys/lattice.hpp"

namespace hsys::anomaly {

/// Input tuple (k1, k2, t, alpha, r) of a solution.
///
/// t is the dimensionless fiber size, alpha the string constant, r the rank
/// of the gauge bundle W. Construction enforces t > 0, alpha != 0, r >= 1.
class SolutionParams {
 public:
  SolutionParams(lattice::LatticeClass kappa1, lattice::LatticeClass kappa2, Rational t, Rational alpha,
                 Integer r);

  const lattice::LatticeClass& kappa1() const { return kappa1_; }
  const lattice::LatticeClass& kappa2() const { return kappa2_; }
  const Rational& t() const { return t_; }
  const Rational& alpha() const { return alpha_; }
  const Integer& r() const { return r_; }

  friend bool operator==(const SolutionParams&, const SolutionParams&) = default;

 private:
  lattice::LatticeClass kappa1_;
  lattice::LatticeClass kappa2_;
  Rational t_;
  Rational alpha_;
  Integer r_;
};

Json to_json(const SolutionParams& p);
/// {"kappa1", "kappa2", "t", "alpha", "r"}; throws ParseError on bad input.
SolutionParams params_from_json(const Json& j);

}  // namespace hsys::anomaly
