#include "hsys/cli.hpp"

#include "hsys/forms.hpp"
#include "hsys/parallel.hpp"
#include "hsys/poisson.hpp"
#include "hsys/tduality.hpp"
#include "hsys/version.hpp"

#include <CLI11.hpp>
#include <toml.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace hsys::cli {

using lattice::LatticeClass;

std::vector<std::size_t> block_indices(const std::string& block) {
  if (block == "U1") return {0, 1};
  if (block == "U2") return {2, 3};
  if (block == "U3") return {4, 5};
  std::vector<std::size_t> out;
  if (block == "E8a")
    for (std::size_t i = 6; i < 14; ++i) out.push_back(i);
  else if (block == "E8b")
    for (std::size_t i = 14; i < 22; ++i) out.push_back(i);
  else
    throw std::invalid_argument("unknown block '" + block + "' (expected U1, U2, U3, E8a, E8b)");
  return out;
}

void RunConfig::validate() const {
  if (search.box < 0) throw std::invalid_argument("search.box must be nonnegative");
  if (search.r_min < 1) throw std::invalid_argument("search.r range must start at 1 or above");
  if (!(search.max_cells > 0) || !std::isfinite(search.max_cells))
    throw std::invalid_argument("search.max_cells must be positive and finite");
  for (const auto& b : search.blocks) (void)block_indices(b);
  for (const auto& t : search.t)
    if (t <= 0) throw std::invalid_argument("search.t values must be positive");
  for (const auto& a : search.alpha)
    if (a == 0) throw std::invalid_argument("search.alpha values must be nonzero");
  if (!(tolerances.solvability > 0) || !(tolerances.residual > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!std::isfinite(tolerances.solvability) || !std::isfinite(tolerances.residual))
    throw std::invalid_argument("tolerances must be finite");
  if (orbit_max_nodes < 1) throw std::invalid_argument("orbit.max_nodes must be at least 1");
  if (denominator_bound < 1) throw std::invalid_argument("orbit.denominator_bound must be at least 1");
  (void)poisson::Grid(grid.dims, grid.lengths);
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

Rational toml_rational(const toml::node& n, const std::string& where) {
  if (auto i = n.value_exact<std::int64_t>()) return Rational(static_cast<long>(*i));
  if (auto s = n.value_exact<std::string>()) {
    try {
      return parse_rational(*s);
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected an integer or a \"p/q\" string");
}

template <class T>
std::vector<T> toml_list(const toml::node_view<const toml::node>& v, const std::string& where) {
  std::vector<T> out;
  const auto* arr = v.as_array();
  if (!arr) throw ParseError(where + ": expected an array");
  for (const auto& n : *arr) {
    auto x = n.template value<T>();
    if (!x) throw ParseError(where + ": wrong element type");
    out.push_back(*x);
  }
  return out;
}

std::vector<LatticeClass> toml_classes(const toml::node_view<const toml::node>& v, const std::string& where) {
  std::vector<LatticeClass> out;
  for (const auto& s : toml_list<std::string>(v, where)) {
    try {
      out.push_back(LatticeClass::parse(s));
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

template <class T>
T toml_scalar(const toml::node_view<const toml::node>& v, T fallback, const std::string& where) {
  if (!v) return fallback;
  auto x = v.template value<T>();
  if (!x) throw ParseError(where + ": wrong type");
  return *x;
}

}  // namespace

RunConfig parse_config(const std::string& toml_text) {
  toml::table tbl;
  try {
    tbl = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at line " << e.source().begin.line;
    throw ParseError(os.str());
  }
  const toml::table& t = tbl;
  RunConfig c;
  c.seed = static_cast<std::uint64_t>(toml_scalar<std::int64_t>(t["seed"], 0, "seed"));
  c.threads = static_cast<unsigned>(toml_scalar<std::int64_t>(t["threads"], 1, "threads"));
  c.out = toml_scalar<std::string>(t["out"], ".", "out");

  if (auto s = t["search"]) {
    auto& b = c.search;
    if (s["blocks"]) b.blocks = toml_list<std::string>(s["blocks"], "search.blocks");
    b.box = static_cast<long>(toml_scalar<std::int64_t>(s["box"], b.box, "search.box"));
    if (s["kappa1"]) b.kappa1 = toml_classes(s["kappa1"], "search.kappa1");
    if (s["kappa2"]) b.kappa2 = toml_classes(s["kappa2"], "search.kappa2");
    for (const char* key : {"t", "alpha"}) {
      if (!s[key]) continue;
      const auto* arr = s[key].as_array();
      if (!arr) throw ParseError(std::string("search.") + key + ": expected an array");
      std::vector<Rational> vals;
      for (const auto& n : *arr) vals.push_back(toml_rational(n, std::string("search.") + key));
      (std::string(key) == "t" ? b.t : b.alpha) = std::move(vals);
    }
    if (s["r"]) {
      const auto r = toml_list<std::int64_t>(s["r"], "search.r");
      if (r.size() != 2) throw ParseError("search.r: expected [min, max]");
      b.r_min = static_cast<long>(r[0]);
      b.r_max = static_cast<long>(r[1]);
    }
    b.max_cells = toml_scalar<double>(s["max_cells"], b.max_cells, "search.max_cells");
  }
  if (auto g = t["grid"]) {
    if (g["dims"]) {
      c.grid.dims.clear();
      for (auto d : toml_list<std::int64_t>(g["dims"], "grid.dims")) {
        if (d <= 0) throw ParseError("grid.dims must be positive");
        c.grid.dims.push_back(static_cast<std::size_t>(d));
      }
    }
    if (g["lengths"]) c.grid.lengths = toml_list<double>(g["lengths"], "grid.lengths");
  }
  if (auto tol = t["tolerances"]) {
    c.tolerances.solvability = toml_scalar<double>(tol["solvability"], c.tolerances.solvability, "tolerances.solvability");
    c.tolerances.residual = toml_scalar<double>(tol["residual"], c.tolerances.residual, "tolerances.residual");
  }
  if (auto o = t["orbit"]) {
    c.orbit_max_nodes = static_cast<std::size_t>(
        toml_scalar<std::int64_t>(o["max_nodes"], static_cast<std::int64_t>(c.orbit_max_nodes), "orbit.max_nodes"));
    c.denominator_bound =
        static_cast<long>(toml_scalar<std::int64_t>(o["denominator_bound"], c.denominator_bound, "orbit.denominator_bound"));
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Search

std::vector<LatticeClass> search_classes(const SearchBounds& b, int which) {
  const auto& explicit_list = which == 1 ? b.kappa1 : b.kappa2;
  if (!explicit_list.empty()) return explicit_list;
  std::vector<std::size_t> coords;
  for (const auto& blk : b.blocks)
    for (auto i : block_indices(blk)) coords.push_back(i);
  std::vector<LatticeClass> out;
  std::vector<long> digit(coords.size(), -b.box);
  while (true) {
    std::array<Integer, lattice::kRank> a{};
    for (std::size_t k = 0; k < coords.size(); ++k) a[coords[k]] = digit[k];
    out.emplace_back(a);
    std::size_t k = coords.size();
    while (k > 0 && digit[k - 1] == b.box) digit[--k] = -b.box;
    if (k == 0) break;
    ++digit[k - 1];
  }
  return out;
}

double cell_count(const SearchBounds& b) {
  auto classes = [&](int which) {
    const auto& l = which == 1 ? b.kappa1 : b.kappa2;
    if (!l.empty()) return static_cast<double>(l.size());
    double n = 0;
    for (const auto& blk : b.blocks) n += static_cast<double>(block_indices(blk).size());
    return std::pow(2.0 * static_cast<double>(b.box) + 1.0, n);
  };
  const double rs = b.r_max >= b.r_min ? static_cast<double>(b.r_max - b.r_min + 1) : 0.0;
  return classes(1) * classes(2) * static_cast<double>(b.t.size()) * static_cast<double>(b.alpha.size()) * rs;
}

SearchResult run_search(const SearchBounds& b, unsigned threads) {
  const double cells = cell_count(b);
  if (cells > b.max_cells) {
    std::ostringstream os;
    os << "search box has " << cells << " cells, above max_cells = " << b.max_cells;
    throw std::invalid_argument(os.str());
  }
  SearchResult res;
  if (cells == 0) return res;
  const auto k1s = search_classes(b, 1);
  const auto k2s = search_classes(b, 2);
  const std::size_t nr = static_cast<std::size_t>(b.r_max - b.r_min + 1);
  const std::size_t n = k1s.size() * k2s.size() * b.t.size() * b.alpha.size() * nr;
  std::vector<std::optional<anomaly::SolutionCertificate>> slots(n);
  parallel_for_index(n, threads, [&](std::size_t i) {
    std::size_t rest = i;
    const long r = b.r_min + static_cast<long>(rest % nr);
    rest /= nr;
    const auto& alpha = b.alpha[rest % b.alpha.size()];
    rest /= b.alpha.size();
    const auto& t = b.t[rest % b.t.size()];
    rest /= b.t.size();
    const auto& k2 = k2s[rest % k2s.size()];
    rest /= k2s.size();
    const auto& k1 = k1s[rest];
    auto cert = anomaly::build_certificate(anomaly::SolutionParams(k1, k2, t, alpha, r));
    if (cert.valid()) slots[i] = std::move(cert);
  });
  res.evaluated = n;
  for (auto& s : slots) {
    if (!s) continue;
    ++res.summary[SummaryKey{s->c2W, to_long(s->params.r()), s->pi1.to_string()}];
    res.valid.push_back(std::move(*s));
  }
  return res;
}

Json archive_json(const SearchResult& r, const RunConfig& cfg) {
  Json j;
  j["version"] = std::string(kVersion);
  Json bounds;
  bounds["blocks"] = cfg.search.blocks;
  bounds["box"] = cfg.search.box;
  Json k1 = Json::array(), k2 = Json::array(), ts = Json::array(), as = Json::array();
  for (const auto& k : cfg.search.kappa1) k1.push_back(k.to_expr());
  for (const auto& k : cfg.search.kappa2) k2.push_back(k.to_expr());
  for (const auto& t : cfg.search.t) ts.push_back(to_string(t));
  for (const auto& a : cfg.search.alpha) as.push_back(to_string(a));
  bounds["kappa1"] = std::move(k1);
  bounds["kappa2"] = std::move(k2);
  bounds["t"] = std::move(ts);
  bounds["alpha"] = std::move(as);
  bounds["r"] = {cfg.search.r_min, cfg.search.r_max};
  j["search"] = std::move(bounds);
  j["seed"] = cfg.seed;
  j["evaluated"] = r.evaluated;
  j["valid_count"] = r.valid.size();
  Json summary = Json::array();
  for (const auto& [k, n] : r.summary)
    summary.push_back(Json{{"c2W", rational_to_json(k.c2W)}, {"r", k.r}, {"pi1", k.pi1}, {"count", n}});
  j["summary"] = std::move(summary);
  Json certs = Json::array();
  for (const auto& c : r.valid) certs.push_back(anomaly::to_json(c));
  j["certificates"] = std::move(certs);
  return j;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool json = false;
};

class DomainFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

struct Context {
  Globals g;
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;

  std::filesystem::path out_dir() const { return g.out.empty() ? cfg.out : std::filesystem::path(g.out); }
  unsigned threads() const { return std::max(1u, g.threads.value_or(cfg.threads)); }
  std::uint64_t seed() const { return g.seed.value_or(cfg.seed); }
};

Json with_version(Json j) {
  j["version"] = std::string(kVersion);
  return j;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_check(Context& ctx, const std::string& params_file) {
  const auto params = anomaly::params_from_json(read_json(params_file));
  const auto cert = anomaly::build_certificate(params);
  const Json j = anomaly::to_json(cert);
  write_json(ctx.out_dir() / "certificate.json", j);
  if (ctx.g.json) {
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << std::left << std::setw(12) << "check" << std::setw(6) << "ok"
            << "detail\n";
    for (const auto& c : cert.checks)
      ctx.out << std::setw(12) << c.name << std::setw(6) << (c.ok ? "pass" : "FAIL") << c.detail << "\n";
    ctx.out << "c2(W) = " << to_string(cert.c2W) << ", pi1 = " << cert.pi1.to_string() << ", b2 = " << cert.h2rank
            << ", valid = " << yes_no(cert.valid()) << "\n";
  }
  return cert.valid() ? kExitOk : kExitDomain;
}

int cmd_search(Context& ctx) {
  if (ctx.g.config.empty()) throw ParseError("search needs --config");
  const auto res = run_search(ctx.cfg.search, ctx.threads());
  RunConfig effective = ctx.cfg;
  effective.seed = ctx.seed();
  const Json archive = archive_json(res, effective);
  write_json(ctx.out_dir() / "certificates.json", archive);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  write_json(ctx.out_dir() / "certificates.meta.json", Json{{"timestamp", ts.str()}, {"version", std::string(kVersion)}});
  if (ctx.g.json) {
    ctx.out << Json{{"evaluated", res.evaluated}, {"valid_count", res.valid.size()}, {"summary", archive["summary"]}}.dump(2)
            << "\n";
  } else {
    ctx.out << "evaluated " << res.evaluated << " cells, " << res.valid.size() << " valid\n";
    ctx.out << std::left << std::setw(8) << "c2(W)" << std::setw(6) << "r" << std::setw(16) << "pi1"
            << "count\n";
    for (const auto& [k, n] : res.summary)
      ctx.out << std::setw(8) << to_string(k.c2W) << std::setw(6) << k.r << std::setw(16) << k.pi1 << n << "\n";
  }
  return kExitOk;
}

int cmd_dualize(Context& ctx, const std::string& params_file) {
  const auto p = anomaly::params_from_json(read_json(params_file));
  const auto d = tduality::dualize(p);
  const auto report = tduality::invariance_report(tduality::ExtendedParams(p), tduality::ExtendedParams(d));
  const Json dual = with_version(anomaly::to_json(d));
  const Json rep = with_version(tduality::to_json(report));
  write_json(ctx.out_dir() / "dual_params.json", dual);
  write_json(ctx.out_dir() / "invariance.json", rep);
  if (ctx.g.json) {
    ctx.out << Json{{"dual", dual}, {"invariance", rep}}.dump(2) << "\n";
  } else {
    ctx.out << "kappa1' = " << d.kappa1().to_expr() << "\nkappa2' = " << d.kappa2().to_expr()
            << "\nt' = " << to_string(d.t()) << "\n";
    ctx.out << "alpha equal: " << yes_no(report.alpha.equal) << ", c2 " << to_string(report.c2.before) << " -> "
            << to_string(report.c2.after) << "\n";
    for (int j = 0; j < 2; ++j)
      ctx.out << "circle " << j + 1 << ": tQ " << to_string(report.circles[j].tq.before) << " -> "
              << to_string(report.circles[j].tq.after) << "\n";
    ctx.out << "all invariants equal: " << yes_no(report.all_equal) << "\n";
  }
  return report.all_equal ? kExitOk : kExitDomain;
}

int cmd_orbit(Context& ctx, const std::string& params_file, std::optional<std::size_t> max_nodes,
              std::optional<long> bound) {
  const auto p = tduality::extended_from_json(read_json(params_file));
  const auto g = tduality::orbit(p, max_nodes.value_or(ctx.cfg.orbit_max_nodes),
                                 Integer(bound.value_or(ctx.cfg.denominator_bound)), ctx.threads());
  const Json j = tduality::to_json(g);
  write_json(ctx.out_dir() / "orbit.json", j);
  write_text(ctx.out_dir() / "orbit.dot", tduality::to_dot(g));
  if (ctx.g.json) {
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << g.nodes.size() << " nodes, " << g.edges.size() << " edges"
            << (g.truncated ? " (truncated)" : "") << "\n";
    ctx.out << std::left << std::setw(6) << "node" << std::setw(8) << "t1" << std::setw(8) << "t2" << std::setw(8)
            << "c2" << std::setw(14) << "pi1"
            << "valid\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const auto& n = g.nodes[i];
      ctx.out << std::setw(6) << i << std::setw(8) << to_string(n.params.t1()) << std::setw(8)
              << to_string(n.params.t2()) << std::setw(8) << to_string(n.c2) << std::setw(14) << n.pi1.to_string()
              << yes_no(n.valid) << "\n";
    }
  }
  return kExitOk;
}

struct SolveArgs {
  std::string spec_file;
  bool manufactured = false;
  double amplitude = 0.1;
  std::optional<double> gauge;
  bool transport = false;
};

int cmd_solve(Context& ctx, const SolveArgs& a) {
  const poisson::Grid grid(ctx.cfg.grid.dims, ctx.cfg.grid.lengths);
  const auto dir = ctx.out_dir();
  Json report;
  report["version"] = std::string(kVersion);
  report["grid"] = Json{{"dims", grid.dims()}, {"lengths", grid.lengths()}};
  bool ok = true;
  if (a.manufactured) {
    const auto m = poisson::manufactured(grid, a.amplitude);
    // The closed-form forcing has a discrete mean only at the aliasing level.
    const auto r = poisson::solve(m.f, {m.gauge_mean, 1e-6});
    double err = 0;
    for (std::size_t i = 0; i < m.u_star.values.size(); ++i)
      err = std::max(err, std::abs(r.u.values[i] - m.u_star.values[i]));
    ok = err <= ctx.cfg.tolerances.residual;
    report["mode"] = "manufactured";
    report["amplitude"] = a.amplitude;
    report["max_error"] = err;
    report["residual"] = poisson::to_json(r.report);
    poisson::write_field(r.u, dir / "u.bin");
  } else {
    if (a.spec_file.empty()) throw ParseError("solve needs a source spec file or --manufactured");
    auto spec = poisson::source_spec_from_json(read_json(a.spec_file));
    if (ctx.g.seed) spec.seed = *ctx.g.seed;
    const auto f = poisson::assemble(poisson::synthesize_sources(spec, grid), spec);
    report["mode"] = "sources";
    report["spec"] = poisson::to_json(spec);
    report["mean_f"] = f.mean();
    if (!poisson::solvability_check(f, ctx.cfg.tolerances.solvability))
      throw poisson::NonSolvable("source violates the solvability condition: mean(f) = " + std::to_string(f.mean()) +
                                 ", anomaly defect " + to_string(spec.anomaly_defect()));
    const double gauge = a.gauge.value_or(poisson::minimal_gauge(f) + 1.0);
    const auto r = poisson::solve(f, {gauge, ctx.cfg.tolerances.solvability});
    ok = r.report.relative <= ctx.cfg.tolerances.residual;
    report["residual"] = poisson::to_json(r.report);
    poisson::write_field(r.u, dir / "u.bin");
    if (a.transport) {
      const auto tr = poisson::duality_transport(r.u, spec, grid, ctx.cfg.tolerances.residual);
      report["transport"] = poisson::to_json(tr);
      ok = ok && tr.ok();
    }
  }
  report["ok"] = ok;
  write_json(dir / "solve_report.json", report);
  if (ctx.g.json) {
    ctx.out << report.dump(2) << "\n";
  } else {
    ctx.out << "mode: " << report["mode"].get<std::string>() << " (proxy geometry)\n";
    if (report.contains("max_error")) ctx.out << "max |u - u*| = " << report["max_error"].get<double>() << "\n";
    const auto& res = report["residual"];
    ctx.out << "residual sup = " << res["residual_sup"].get<double>() << " (relative "
            << res["relative"].get<double>() << "), min v = " << res["min_v"].get<double>() << "\n";
    if (report.contains("transport")) {
      const auto& tr = report["transport"];
      ctx.out << "transport: f' == f bitwise: " << yes_no(tr["bitwise_equal"].get<bool>())
              << ", dual residual ok: " << yes_no(tr["dual_residual_ok"].get<bool>())
              << ", negative control detected: " << yes_no(tr["mutation_detected"].get<bool>()) << "\n";
    }
    ctx.out << "ok: " << yes_no(ok) << "\n";
  }
  return ok ? kExitOk : kExitDomain;
}

int cmd_verify_forms(Context& ctx, bool mutations) {
  const auto results = forms::verify_suite(forms::FormAlgebra::standard(), ctx.threads(), ctx.seed());
  Json j;
  j["version"] = std::string(kVersion);
  Json items = Json::array();
  bool all = true;
  for (const auto& r : results) {
    items.push_back(forms::to_json(r));
    all = all && r.pass;
  }
  j["identities"] = std::move(items);
  std::vector<forms::MutationOutcome> outcomes;
  if (mutations) {
    outcomes = forms::mutation_report(forms::FormAlgebra::standard(), ctx.threads());
    Json ms = Json::array();
    for (const auto& o : outcomes) ms.push_back(forms::to_json(o));
    j["mutations"] = std::move(ms);
  }
  write_json(ctx.out_dir() / "forms_report.json", j);
  if (ctx.g.json) {
    ctx.out << j.dump(2) << "\n";
  } else {
    std::size_t passed = 0;
    ctx.out << std::left << std::setw(16) << "identity" << "result\n";
    for (const auto& r : results) {
      passed += r.pass;
      ctx.out << std::setw(16) << r.identity << (r.pass ? "pass" : "FAIL: " + r.witness.to_string()) << "\n";
    }
    ctx.out << passed << "/" << results.size() << " pass\n";
    if (mutations) {
      std::size_t detected = 0;
      for (const auto& o : outcomes) {
        detected += !o.broken.empty();
        std::string broken;
        for (const auto& b : o.broken) broken += (broken.empty() ? "" : ",") + b;
        ctx.out << std::setw(36) << o.mutation.label << (broken.empty() ? "undetected" : broken) << "\n";
      }
      ctx.out << detected << "/" << outcomes.size() << " mutations detected\n";
    }
  }
  return all ? kExitOk : kExitDomain;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterotic solution certificates, T-duality and the reduced Bianchi identity", "hsys"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "TOML run configuration");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "machine-readable output");

  std::string params_file;
  auto* check = app.add_subcommand("check", "certify solution parameters");
  check->add_option("params", params_file, "parameter JSON")->required();

  auto* search = app.add_subcommand("search", "enumerate a parameter box");

  auto* dualize = app.add_subcommand("dualize", "apply the T-duality map");
  dualize->add_option("params", params_file, "parameter JSON")->required();

  std::optional<std::size_t> max_nodes;
  std::optional<long> bound;
  auto* orbit = app.add_subcommand("orbit", "enumerate the duality orbit");
  orbit->add_option("params", params_file, "parameter JSON (t or t1, t2)")->required();
  orbit->add_option("--max-nodes", max_nodes, "node cap")->check(CLI::PositiveNumber);
  orbit->add_option("--denominator-bound", bound, "largest fiber-size denominator")->check(CLI::PositiveNumber);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve the Laplace equation on the proxy torus");
  solve->add_option("spec", sa.spec_file, "source spec JSON");
  solve->add_flag("--manufactured", sa.manufactured, "run the manufactured-solution case");
  solve->add_option("--amplitude", sa.amplitude, "manufactured amplitude");
  solve->add_option("--gauge", sa.gauge, "mean of e^u")->check(CLI::PositiveNumber);
  solve->add_flag("--transport", sa.transport, "also run the duality transport check");

  bool mutations = false;
  auto* verify = app.add_subcommand("verify-forms", "run the symbolic identity suite");
  verify->add_flag("--mutations", mutations, "also run the sign-mutation sweep");

  for (auto* sub : {check, search, dualize, orbit, solve, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Context ctx{g, g.config.empty() ? RunConfig{} : load_config(g.config), out, err};
    if (*check) return cmd_check(ctx, params_file);
    if (*search) return cmd_search(ctx);
    if (*dualize) return cmd_dualize(ctx, params_file);
    if (*orbit) return cmd_orbit(ctx, params_file, max_nodes, bound);
    if (*solve) return cmd_solve(ctx, sa);
    if (*verify) return cmd_verify_forms(ctx, mutations);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tduality::DualityError& e) {
    err << "duality precondition failed: " << e.what() << "\n";
    return kExitDomain;
  } catch (const poisson::PoissonError& e) {
    err << "solver: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hsys"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hsys::cli
