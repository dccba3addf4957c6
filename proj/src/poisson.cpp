#include "hsys/poisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

namespace hsys::poisson {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Grid and fields

Grid::Grid(std::vector<std::size_t> dims, std::vector<double> lengths)
    : dims_(std::move(dims)), lengths_(std::move(lengths)) {
  if (dims_.size() != 2 && dims_.size() != 4) throw std::invalid_argument("grid dimension must be 2 or 4");
  if (lengths_.size() != dims_.size()) throw std::invalid_argument("need one length per axis");
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (!power_of_two(dims_[a]))
      throw std::invalid_argument("axis " + std::to_string(a) + ": point count must be a power of two >= 2");
    if (!(lengths_[a] > 0) || !std::isfinite(lengths_[a]))
      throw std::invalid_argument("axis " + std::to_string(a) + ": length must be positive");
  }
}

Grid Grid::cube(std::size_t dimension, std::size_t points, double length) {
  return Grid(std::vector<std::size_t>(dimension, points), std::vector<double>(dimension, length));
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (auto d : dims_) n *= d;
  return n;
}

double Grid::cell_volume() const {
  double v = 1;
  for (std::size_t a = 0; a < dims_.size(); ++a) v *= spacing(a);
  return v;
}

double Grid::volume() const {
  double v = 1;
  for (double l : lengths_) v *= l;
  return v;
}

std::vector<double> Grid::point(std::size_t index) const {
  std::vector<double> x(dims_.size());
  for (std::size_t a = dims_.size(); a-- > 0;) {
    x[a] = static_cast<double>(index % dims_[a]) * spacing(a);
    index /= dims_[a];
  }
  return x;
}

GridField::GridField(Grid g, std::string n) : grid(std::move(g)), values(grid.size(), 0.0), name(std::move(n)) {}

GridField::GridField(Grid g, std::vector<double> v, std::string n)
    : grid(std::move(g)), values(std::move(v)), name(std::move(n)) {
  if (values.size() != grid.size()) throw std::invalid_argument("field size does not match grid");
}

double GridField::sup_norm() const {
  double m = 0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double GridField::mean() const {
  double s = 0;
  for (double x : values) s += x;
  return s / static_cast<double>(values.size());
}

double GridField::integral() const { return mean() * grid.volume(); }

double GridField::min() const { return *std::min_element(values.begin(), values.end()); }

bool GridField::finite() const {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

namespace {

std::uint64_t byteswap64(std::uint64_t x) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

std::filesystem::path header_path(const std::filesystem::path& p) {
  auto h = p;
  h += ".json";
  return h;
}

}  // namespace

void write_field(const GridField& f, const std::filesystem::path& path) {
  Json h;
  h["dims"] = f.grid.dims();
  h["lengths"] = f.grid.lengths();
  h["axis_order"] = "row-major, axis 0 slowest";
  h["dtype"] = "f64-le";
  h["field_name"] = f.name;
  std::ofstream hj(header_path(path));
  if (!hj) throw std::runtime_error("cannot write " + header_path(path).string());
  hj << h.dump(2) << "\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (double x : f.values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
}

GridField read_field(const std::filesystem::path& path) {
  std::ifstream hj(header_path(path));
  if (!hj) throw ParseError("missing field header " + header_path(path).string());
  Json h;
  try {
    h = Json::parse(hj);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed field header: ") + e.what());
  }
  if (require(h, "dtype") != "f64-le") throw ParseError("unsupported dtype " + h["dtype"].dump());
  Grid grid(require(h, "dims").get<std::vector<std::size_t>>(), require(h, "lengths").get<std::vector<double>>());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("missing field data " + path.string());
  std::vector<double> values(grid.size());
  for (auto& x : values) {
    char buf[8];
    if (!in.read(buf, 8)) throw ParseError("field data shorter than header dims");
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
    x = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("field data longer than header dims");
  return GridField(std::move(grid), std::move(values), h.value("field_name", std::string("field")));
}

// ---------------------------------------------------------------------------
// Sources

Rational SourceSpec::anomaly_defect() const {
  Rational d = Rational(c2W) - 24 - (t / alpha) * Rational(-2 * k1 - 2 * k2);
  d.canonicalize();
  return d;
}

void SourceSpec::validate() const {
  if (k1 < 0 || k2 < 0) throw std::invalid_argument("k1, k2 must be nonnegative");
  if (t <= 0) throw std::invalid_argument("t must be positive");
  if (alpha == 0) throw std::invalid_argument("alpha must be nonzero");
  if (bumps.empty() && bumps_per_field == 0) throw std::invalid_argument("bumps_per_field must be positive");
  if (bumps.empty() && !(width_fraction > 0)) throw std::invalid_argument("width_fraction must be positive");
  for (const auto& b : bumps)
    if (!(b.width > 0)) throw std::invalid_argument("bump widths must be positive");
  if (!violating && anomaly_defect() != 0)
    throw std::invalid_argument("inconsistent source data: c2W - 24 - (t/alpha)(-2k1 - 2k2) = " +
                                to_string(anomaly_defect()));
}

Json to_json(const SourceSpec& s) {
  Json j;
  j["k1"] = integer_to_json(s.k1);
  j["k2"] = integer_to_json(s.k2);
  j["c2W"] = integer_to_json(s.c2W);
  j["alpha"] = rational_to_json(s.alpha);
  j["t"] = rational_to_json(s.t);
  j["seed"] = s.seed;
  j["bumps_per_field"] = s.bumps_per_field;
  j["width_fraction"] = s.width_fraction;
  Json bumps = Json::array();
  for (const auto& b : s.bumps) bumps.push_back(Json{{"center", b.center}, {"width", b.width}});
  j["bumps"] = std::move(bumps);
  j["violating"] = s.violating;
  return j;
}

SourceSpec source_spec_from_json(const Json& j) {
  SourceSpec s;
  try {
    s.k1 = integer_from_json(require(j, "k1"));
    s.k2 = integer_from_json(require(j, "k2"));
    s.c2W = integer_from_json(require(j, "c2W"));
    s.alpha = rational_from_json(require(j, "alpha"));
    s.t = rational_from_json(require(j, "t"));
    s.seed = j.value("seed", std::uint64_t{0});
    s.bumps_per_field = j.value("bumps_per_field", std::size_t{2});
    s.width_fraction = j.value("width_fraction", 0.15);
    if (j.contains("bumps"))
      for (const auto& b : j["bumps"])
        s.bumps.push_back(Bump{require(b, "center").get<std::vector<double>>(), require(b, "width").get<double>()});
    s.violating = j.value("violating", false);
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
  return s;
}

namespace {

std::vector<Bump> field_bumps(const SourceSpec& spec, const Grid& grid, std::mt19937_64& rng) {
  if (!spec.bumps.empty()) return spec.bumps;
  const double shortest = *std::min_element(grid.lengths().begin(), grid.lengths().end());
  std::vector<Bump> out(spec.bumps_per_field);
  for (auto& b : out) {
    b.width = spec.width_fraction * shortest;
    for (std::size_t a = 0; a < grid.dimension(); ++a)
      b.center.push_back(std::uniform_real_distribution<double>(0.0, grid.lengths()[a])(rng));
  }
  return out;
}

/// Sum of periodic von Mises bumps, each close to a Gaussian of the given
/// width near its center.
GridField bump_field(const Grid& grid, const std::vector<Bump>& bumps, const std::string& name) {
  for (const auto& b : bumps) {
    if (b.center.size() != grid.dimension()) throw std::invalid_argument("bump center dimension mismatch");
    for (std::size_t a = 0; a < grid.dimension(); ++a)
      if (b.width < 4 * grid.spacing(a))
        throw GridTooCoarse("bump width " + std::to_string(b.width) + " is under 4 grid spacings on axis " +
                            std::to_string(a) + " (spacing " + std::to_string(grid.spacing(a)) + ")");
  }
  GridField f(grid, name);
  const std::size_t d = grid.dimension();
  for (const auto& b : bumps) {
    // Separable: precompute per-axis factors.
    std::vector<std::vector<double>> factor(d);
    for (std::size_t a = 0; a < d; ++a) {
      const double l = grid.lengths()[a];
      const double kappa = std::pow(l / (2 * kPi * b.width), 2);
      factor[a].resize(grid.dims()[a]);
      for (std::size_t i = 0; i < grid.dims()[a]; ++i) {
        const double x = static_cast<double>(i) * grid.spacing(a);
        factor[a][i] = std::exp(kappa * (std::cos(2 * kPi * (x - b.center[a]) / l) - 1));
      }
    }
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t n = 0; n < f.values.size(); ++n) {
      double v = 1;
      for (std::size_t a = 0; a < d; ++a) v *= factor[a][idx[a]];
      f.values[n] += v;
      for (std::size_t a = d; a-- > 0;) {
        if (++idx[a] < grid.dims()[a]) break;
        idx[a] = 0;
      }
    }
  }
  return f;
}

void scale_to(GridField& f, double target) {
  if (target == 0) {
    std::fill(f.values.begin(), f.values.end(), 0.0);
    return;
  }
  const double s = target / f.integral();
  for (double& x : f.values) x *= s;
}

double to_double(const Integer& z) { return z.get_d(); }

}  // namespace

Sources synthesize_sources(const SourceSpec& spec, const Grid& grid) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const double cw = 8 * kPi * kPi;
  const auto b1 = field_bumps(spec, grid, rng);
  const auto b2 = field_bumps(spec, grid, rng);
  const auto br = field_bumps(spec, grid, rng);
  const auto bf = field_bumps(spec, grid, rng);
  Sources s{bump_field(grid, b1, "rho1"), bump_field(grid, b2, "rho2"), bump_field(grid, br, "dR"),
            bump_field(grid, bf, "dF"), Rational(1)};
  scale_to(s.rho1, 2 * cw * to_double(spec.k1));
  scale_to(s.rho2, 2 * cw * to_double(spec.k2));
  scale_to(s.dR, cw * 24);
  scale_to(s.dF, cw * to_double(spec.c2W));
  return s;
}

GridField assemble(const Sources& s, const SourceSpec& spec) {
  Rational prefactor = spec.t * s.density_scale;
  prefactor.canonicalize();
  const double c = prefactor.get_d();
  const double a = spec.alpha.get_d();
  GridField f(s.dR.grid, "f");
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = a * (s.dR.values[i] - s.dF.values[i]) - c * (s.rho1.values[i] + s.rho2.values[i]);
  return f;
}

bool solvability_check(const GridField& f, double tol) {
  return std::abs(f.mean()) <= tol * (f.sup_norm() + kMeanFloor);
}

// ---------------------------------------------------------------------------
// Spectral operators

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

/// Multiplies the Fourier coefficients of f by symbol(|k|^2).
template <class Symbol>
GridField apply_symbol(const GridField& f, Symbol symbol, std::string name) {
  const Grid& g = f.grid;
  const int rank = static_cast<int>(g.dimension());
  std::vector<int> n(g.dims().begin(), g.dims().end());
  const std::size_t total = g.size();
  const std::size_t last = g.dims().back();
  const std::size_t half = last / 2 + 1;
  const std::size_t spectral = total / last * half;

  std::unique_ptr<double, FftwFree> real(static_cast<double*>(fftw_malloc(sizeof(double) * total)));
  std::unique_ptr<fftw_complex, FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spectral)));
  if (!real || !spec) throw std::bad_alloc();

  fftw_plan forward, backward;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    forward = fftw_plan_dft_r2c(rank, n.data(), real.get(), spec.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r(rank, n.data(), spec.get(), real.get(), FFTW_ESTIMATE);
  }
  std::copy(f.values.begin(), f.values.end(), real.get());
  fftw_execute(forward);

  std::vector<double> k2_axis_factor(g.dimension());
  for (std::size_t a = 0; a < g.dimension(); ++a) k2_axis_factor[a] = std::pow(2 * kPi / g.lengths()[a], 2);
  std::vector<std::size_t> idx(g.dimension(), 0);
  std::vector<std::size_t> sdims(g.dims());
  sdims.back() = half;
  const double norm = 1.0 / static_cast<double>(total);
  for (std::size_t s = 0; s < spectral; ++s) {
    double k2 = 0;
    for (std::size_t a = 0; a < g.dimension(); ++a) {
      const std::size_t na = g.dims()[a];
      const double m = idx[a] <= na / 2 ? static_cast<double>(idx[a]) : static_cast<double>(idx[a]) - static_cast<double>(na);
      k2 += m * m * k2_axis_factor[a];
    }
    const double mult = symbol(k2) * norm;
    spec.get()[s][0] *= mult;
    spec.get()[s][1] *= mult;
    for (std::size_t a = g.dimension(); a-- > 0;) {
      if (++idx[a] < sdims[a]) break;
      idx[a] = 0;
    }
  }
  fftw_execute(backward);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  return GridField(g, std::vector<double>(real.get(), real.get() + total), std::move(name));
}

}  // namespace

GridField laplacian(const GridField& f) {
  return apply_symbol(f, [](double k2) { return -k2; }, "laplacian(" + f.name + ")");
}

GridField solve_mean_zero(const GridField& f) {
  return apply_symbol(f, [](double k2) { return k2 == 0 ? 0.0 : 1.0 / (2 * k2); }, "v0");
}

ResidualReport residual(const GridField& u, const GridField& f) {
  if (!(u.grid == f.grid)) throw std::invalid_argument("u and f live on different grids");
  GridField v(u.grid, "v");
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = std::exp(u.values[i]);
  const GridField lap = laplacian(v);
  ResidualReport r;
  for (std::size_t i = 0; i < v.values.size(); ++i)
    r.residual_sup = std::max(r.residual_sup, std::abs(-2 * lap.values[i] - f.values[i]));
  r.f_sup = f.sup_norm();
  r.relative = r.f_sup > 0 ? r.residual_sup / r.f_sup : r.residual_sup;
  r.min_v = v.min();
  r.gauge_mean = v.mean();
  r.mean_f = f.mean();
  return r;
}

double minimal_gauge(const GridField& f) { return -solve_mean_zero(f).min(); }

SolveResult solve(const GridField& f, const SolveOptions& opts) {
  if (!f.finite()) throw std::invalid_argument("source has non-finite values");
  if (!(opts.gauge_mean > 0)) throw std::invalid_argument("gauge_mean must be positive");
  if (!solvability_check(f, opts.solvability_tol))
    throw NonSolvable("source mean " + std::to_string(f.mean()) + " exceeds tolerance " +
                      std::to_string(opts.solvability_tol) + " relative to max|f| = " + std::to_string(f.sup_norm()));
  GridField v = solve_mean_zero(f);
  v.name = "v";
  const double v0_min = v.min();
  for (double& x : v.values) x += opts.gauge_mean;
  if (v.min() <= 0) {
    const double minimal = -v0_min;
    throw NonPositive("min(v) = " + std::to_string(v.min()) + " <= 0; gauge_mean must exceed " +
                          std::to_string(minimal),
                      minimal);
  }
  GridField u(f.grid, "u");
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = std::log(v.values[i]);
  SolveResult out{std::move(u), std::move(v), {}};
  out.report = residual(out.u, f);
  out.report.gauge_mean = opts.gauge_mean;
  return out;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["residual_sup"] = r.residual_sup;
  j["f_sup"] = r.f_sup;
  j["relative"] = r.relative;
  j["min_v"] = r.min_v;
  j["gauge_mean"] = r.gauge_mean;
  j["mean_f"] = r.mean_f;
  j["geometry"] = r.geometry;
  return j;
}

ManufacturedProblem manufactured(const Grid& grid, double amplitude, Forcing forcing) {
  GridField u_star(grid, "u_star");
  GridField v_star(grid, "v_star");
  GridField f(grid, "f");
  const double l = grid.lengths()[0];
  const double k = 2 * kPi / l;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i)[0];
    const double s = std::sin(k * x);
    const double c = std::cos(k * x);
    u_star.values[i] = amplitude * s;
    v_star.values[i] = std::exp(u_star.values[i]);
    // -2 d^2/dx^2 exp(a sin kx) = -2 k^2 e^{a sin kx} (a^2 cos^2 kx - a sin kx)
    f.values[i] = -2 * k * k * v_star.values[i] * (amplitude * amplitude * c * c - amplitude * s);
  }
  if (forcing == Forcing::Spectral) {
    const GridField lap = laplacian(v_star);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = -2 * lap.values[i];
  }
  return ManufacturedProblem{std::move(u_star), std::move(f), v_star.mean()};
}

// ---------------------------------------------------------------------------
// Duality transport

TransportReport duality_transport(const GridField& u, const SourceSpec& spec, const Grid& grid, double residual_tol) {
  spec.validate();
  TransportReport r;
  r.t = spec.t;
  r.t_dual = 1 / spec.t;
  const Rational t2 = spec.t * spec.t;
  const Rational k1d = t2 * Rational(spec.k1);
  const Rational k2d = t2 * Rational(spec.k2);
  if (!is_integral(k1d) || !is_integral(k2d))
    throw std::invalid_argument("t^2 k is not integral; the dual classes are not integral");
  r.k1_dual = k1d.get_num();
  r.k2_dual = k2d.get_num();

  SourceSpec dual = spec;
  dual.t = r.t_dual;
  dual.k1 = r.k1_dual;
  dual.k2 = r.k2_dual;
  dual.validate();

  const Sources original = synthesize_sources(spec, grid);
  Sources transported = original;
  transported.density_scale = t2;

  r.rho_prefactor = spec.t * original.density_scale;
  r.rho_prefactor_dual = dual.t * transported.density_scale;
  r.rho_prefactor.canonicalize();
  r.rho_prefactor_dual.canonicalize();

  const GridField f = assemble(original, spec);
  const GridField fd = assemble(transported, dual);
  r.bitwise_equal = std::memcmp(f.values.data(), fd.values.data(), sizeof(double) * f.values.size()) == 0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    r.max_f_difference = std::max(r.max_f_difference, std::abs(f.values[i] - fd.values[i]));

  r.dual_residual = residual(u, fd);
  r.dual_residual_ok = r.dual_residual.relative <= residual_tol;

  // Negative control: the dual side without the t^2 density scaling.
  const GridField fm = assemble(original, dual);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    r.mutated_difference = std::max(r.mutated_difference, std::abs(f.values[i] - fm.values[i]));
  r.mutation_detected = r.mutated_difference > 0;
  return r;
}

Json to_json(const TransportReport& r) {
  Json j;
  j["t"] = rational_to_json(r.t);
  j["t_dual"] = rational_to_json(r.t_dual);
  j["k1_dual"] = integer_to_json(r.k1_dual);
  j["k2_dual"] = integer_to_json(r.k2_dual);
  j["rho_prefactor"] = rational_to_json(r.rho_prefactor);
  j["rho_prefactor_dual"] = rational_to_json(r.rho_prefactor_dual);
  j["max_f_difference"] = r.max_f_difference;
  j["bitwise_equal"] = r.bitwise_equal;
  j["dual_residual"] = to_json(r.dual_residual);
  j["dual_residual_ok"] = r.dual_residual_ok;
  j["mutated_difference"] = r.mutated_difference;
  j["mutation_detected"] = r.mutation_detected;
  j["geometry"] = "proxy";
  return j;
}

}  // namespace hsys::poisson
