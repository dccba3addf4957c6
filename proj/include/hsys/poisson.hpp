#pragma once

// Spectral solver for the reduced Bianchi identity
//
//   -2 Lap(e^u) = alpha (dR - dF) - t (rho1 + rho2)
//
// on a flat periodic torus of dimension 2 or 4, standing in for the surface.
// Lap is the nonpositive Laplacian: Lap cos(2 pi x / L) = -(2 pi / L)^2 cos.
// Reports label the geometry "proxy".

#include "hsys/exact.hpp"
#include "hsys/json_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsys::poisson {

class PoissonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean of the source exceeds the solvability tolerance.
class NonSolvable : public PoissonError {
 public:
  using PoissonError::PoissonError;
};

/// v = v0 + gauge_mean is not positive everywhere.
class NonPositive : public PoissonError {
 public:
  NonPositive(const std::string& what, double minimal_gauge) : PoissonError(what), minimal_gauge_(minimal_gauge) {}
  /// Every gauge_mean strictly above this value succeeds.
  double minimal_gauge() const { return minimal_gauge_; }

 private:
  double minimal_gauge_;
};

/// Bump widths under four grid spacings.
class GridTooCoarse : public PoissonError {
 public:
  using PoissonError::PoissonError;
};

/// Periodic box; every dim is a power of two, dimension is 2 or 4.
class Grid {
 public:
  Grid(std::vector<std::size_t> dims, std::vector<double> lengths);
  static Grid cube(std::size_t dimension, std::size_t points, double length);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::size_t dimension() const { return dims_.size(); }
  std::size_t size() const;
  double spacing(std::size_t axis) const { return lengths_[axis] / static_cast<double>(dims_[axis]); }
  double cell_volume() const;
  double volume() const;
  /// Coordinates of a flat index; axis 0 varies slowest.
  std::vector<double> point(std::size_t index) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> lengths_;
};

/// Real samples in row-major order, axis 0 slowest.
struct GridField {
  Grid grid;
  std::vector<double> values;
  std::string name;

  GridField(Grid g, std::string n = "field");
  GridField(Grid g, std::vector<double> v, std::string n);

  double sup_norm() const;
  double mean() const;
  double integral() const;
  double min() const;
  bool finite() const;
};

/// Sidecar JSON header at `path` + ".json", raw f64-le samples at `path`.
void write_field(const GridField& f, const std::filesystem::path& path);
GridField read_field(const std::filesystem::path& path);

struct Bump {
  std::vector<double> center;
  double width = 0;  ///< same physical width on every axis
};

/// Inputs for synthetic curvature densities.
struct SourceSpec {
  Integer k1;    ///< -Q(k1) / 2
  Integer k2;
  Integer c2W;
  Rational alpha;
  Rational t;
  std::uint64_t seed = 0;
  std::size_t bumps_per_field = 2;
  double width_fraction = 0.15;   ///< generated widths, as a fraction of the shortest period
  std::vector<Bump> bumps;        ///< explicit bumps for every field; overrides generation
  bool violating = false;         ///< skip the anomaly consistency check

  /// c2W - 24 - (t / alpha)(-2 k1 - 2 k2); zero for consistent data.
  Rational anomaly_defect() const;
  /// Throws std::invalid_argument on inconsistent or malformed data.
  void validate() const;
};

Json to_json(const SourceSpec& s);
SourceSpec source_spec_from_json(const Json& j);

struct Sources {
  GridField rho1;
  GridField rho2;
  GridField dR;
  GridField dF;
  /// Exact multiplier applied to rho1, rho2 at assembly time.
  Rational density_scale{1};
};

/// Nonnegative periodic bumps rescaled so that the discrete integrals are
/// 16 pi^2 k_j, 8 pi^2 * 24 and 8 pi^2 c2W.
Sources synthesize_sources(const SourceSpec& spec, const Grid& grid);

/// f = alpha (dR - dF) - (t * density_scale)(rho1 + rho2), with the
/// rational prefactor reduced exactly before conversion.
GridField assemble(const Sources& s, const SourceSpec& spec);

inline constexpr double kMeanFloor = 1e-300;

/// |mean f| <= tol (max|f| + floor).
bool solvability_check(const GridField& f, double tol);

/// Lap f, computed with FFTs.
GridField laplacian(const GridField& f);

struct ResidualReport {
  double residual_sup = 0;  ///< sup |-2 Lap(e^u) - f|
  double f_sup = 0;
  double relative = 0;
  double min_v = 0;
  double gauge_mean = 0;
  double mean_f = 0;
  std::string geometry = "proxy";
};

Json to_json(const ResidualReport& r);

struct SolveResult {
  GridField u;
  GridField v;  ///< e^u
  ResidualReport report;
};

struct SolveOptions {
  double gauge_mean = 1.0;
  double solvability_tol = 1e-12;
};

/// Mean-zero solution of -2 Lap v0 = f.
GridField solve_mean_zero(const GridField& f);
/// -min(v0): every gauge_mean strictly above it keeps v positive.
double minimal_gauge(const GridField& f);
/// u = log(v0 + gauge_mean). Throws NonSolvable, NonPositive.
SolveResult solve(const GridField& f, const SolveOptions& opts = {});
/// Residual of u against f, recomputed spectrally.
ResidualReport residual(const GridField& u, const GridField& f);

enum class Forcing { Analytic, Spectral };

struct ManufacturedProblem {
  GridField u_star;
  GridField f;
  double gauge_mean;
};

/// u* = amplitude sin(2 pi x0 / L0) with f = -2 Lap(e^{u*}), either in
/// closed form or by spectral differentiation of the samples.
ManufacturedProblem manufactured(const Grid& grid, double amplitude = 0.1, Forcing forcing = Forcing::Analytic);

struct TransportReport {
  Rational t;
  Rational t_dual;
  Integer k1_dual;
  Integer k2_dual;
  Rational rho_prefactor;       ///< t * density_scale on the original side
  Rational rho_prefactor_dual;  ///< t' * t^2
  double max_f_difference = 0;
  bool bitwise_equal = false;
  ResidualReport dual_residual;
  bool dual_residual_ok = false;
  double mutated_difference = 0;  ///< without the t^2 density scaling
  bool mutation_detected = false;  ///< always false at t = 1, where the control is a no-op

  bool ok() const { return bitwise_equal && dual_residual_ok; }
};

/// Builds the dual data for (k, t) -> (-t k, 1/t) and checks that u solves it.
TransportReport duality_transport(const GridField& u, const SourceSpec& spec, const Grid& grid,
                                  double residual_tol = 1e-8);

Json to_json(const TransportReport& r);

}  // namespace hsys::poisson
