#include "hsys/tduality.hpp"

#include "hsys/parallel.hpp"
#include "hsys/version.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace hsys::tduality {

using hsys::to_string;
using lattice::LatticeClass;

ExtendedParams::ExtendedParams(LatticeClass kappa1, LatticeClass kappa2, Rational t1, Rational t2, Rational alpha,
                               Integer r)
    : kappa1_(std::move(kappa1)),
      kappa2_(std::move(kappa2)),
      t1_(std::move(t1)),
      t2_(std::move(t2)),
      alpha_(std::move(alpha)),
      r_(std::move(r)) {
  t1_.canonicalize();
  t2_.canonicalize();
  alpha_.canonicalize();
  if (t1_ <= 0 || t2_ <= 0) throw std::invalid_argument("fiber sizes t1, t2 must be positive");
  if (alpha_ == 0) throw std::invalid_argument("alpha must be nonzero");
  if (r_ < 1) throw std::invalid_argument("rank r must be at least 1, got " + r_.get_str());
}

ExtendedParams::ExtendedParams(const anomaly::SolutionParams& p)
    : ExtendedParams(p.kappa1(), p.kappa2(), p.t(), p.t(), p.alpha(), p.r()) {}

std::optional<anomaly::SolutionParams> ExtendedParams::reduce() const {
  if (t1_ != t2_) return std::nullopt;
  return anomaly::SolutionParams(kappa1_, kappa2_, t1_, alpha_, r_);
}

Json to_json(const ExtendedParams& p) {
  Json j;
  j["kappa1"] = lattice::to_json(p.kappa1());
  j["kappa2"] = lattice::to_json(p.kappa2());
  j["t1"] = rational_to_json(p.t1());
  j["t2"] = rational_to_json(p.t2());
  j["alpha"] = rational_to_json(p.alpha());
  j["r"] = integer_to_json(p.r());
  return j;
}

ExtendedParams extended_from_json(const Json& j) {
  auto k1 = lattice::class_from_json(require(j, "kappa1"));
  auto k2 = lattice::class_from_json(require(j, "kappa2"));
  Rational t1, t2;
  if (j.contains("t1") || j.contains("t2")) {
    t1 = rational_from_json(require(j, "t1"));
    t2 = rational_from_json(require(j, "t2"));
  } else {
    t1 = t2 = rational_from_json(require(j, "t"));
  }
  auto alpha = rational_from_json(require(j, "alpha"));
  auto r = integer_from_json(require(j, "r"));
  try {
    return ExtendedParams(std::move(k1), std::move(k2), t1, t2, std::move(alpha), std::move(r));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

namespace {

Rational weighted_q(const ExtendedParams& p) {
  return p.t1() * Rational(lattice::self_intersection(p.kappa1())) +
         p.t2() * Rational(lattice::self_intersection(p.kappa2()));
}

LatticeClass dual_class(const Rational& t, const LatticeClass& kappa, const char* which) {
  std::size_t bad = 0;
  auto scaled = lattice::scale_exact(-t, kappa, &bad);
  if (!scaled) {
    const Rational v = t * Rational(kappa[bad]);
    throw DualityError(std::string(which) + " coordinate " + lattice::basis_label(bad) + " (index " +
                       std::to_string(bad) + "): t * " + kappa[bad].get_str() + " = " + to_string(v) +
                       " is not an integer");
  }
  return *scaled;
}

}  // namespace

Rational generalized_c2(const ExtendedParams& p) {
  Rational c2 = Rational(anomaly::kC2Surface) + weighted_q(p) / p.alpha();
  c2.canonicalize();
  return c2;
}

anomaly::SolutionParams dualize(const anomaly::SolutionParams& p) {
  LatticeClass k1 = dual_class(p.t(), p.kappa1(), "kappa1");
  LatticeClass k2 = dual_class(p.t(), p.kappa2(), "kappa2");
  const auto cert = anomaly::build_certificate(p);
  if (!cert.valid()) {
    std::string failed;
    for (const auto& c : cert.checks)
      if (!c.ok) failed += (failed.empty() ? "" : ", ") + c.name;
    throw DualityError("parameters do not pass the certificate (failed: " + failed + ")");
  }
  Rational t_dual = 1 / p.t();
  return anomaly::SolutionParams(std::move(k1), std::move(k2), t_dual, p.alpha(), p.r());
}

ExtendedParams dualize_circle(const ExtendedParams& p, int circle) {
  if (circle != 1 && circle != 2) throw std::invalid_argument("circle must be 1 or 2");
  const char* which = circle == 1 ? "kappa1" : "kappa2";
  LatticeClass k = dual_class(p.t(circle), p.kappa(circle), which);
  Rational t_dual = 1 / p.t(circle);
  if (circle == 1) return ExtendedParams(std::move(k), p.kappa2(), t_dual, p.t2(), p.alpha(), p.r());
  return ExtendedParams(p.kappa1(), std::move(k), p.t1(), t_dual, p.alpha(), p.r());
}

// ---------------------------------------------------------------------------
// Certificates

bool ExtendedCertificate::valid() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
}

ExtendedCertificate certify(const ExtendedParams& p) {
  if (auto reduced = p.reduce()) {
    auto base = anomaly::build_certificate(*reduced);
    return ExtendedCertificate{p,          base.k1,     base.k2,         base.c2W,        base.checks,
                               base.pi1,   base.h2rank, base.scope, base.notes,      base.version};
  }
  Rational integ = weighted_q(p) / p.alpha();
  integ.canonicalize();
  const Rational c2 = Rational(anomaly::kC2Surface) + integ;
  auto bundle = anomaly::evaluate_checks(p.kappa1(), p.kappa2(), integ, c2, p.r());
  auto notes = anomaly::standard_notes(p.kappa1(), p.kappa2());
  notes.emplace_back("extension: per-circle sizes with c2(W) = 24 + (t1 Q(k1) + t2 Q(k2)) / alpha");
  return ExtendedCertificate{p,
                             std::move(bundle.k1),
                             std::move(bundle.k2),
                             c2,
                             std::move(bundle.checks),
                             topology::pi1(p.kappa1(), p.kappa2()),
                             topology::h2_rank(p.kappa1(), p.kappa2()),
                             "extension",
                             std::move(notes),
                             std::string(kVersion)};
}

Json to_json(const ExtendedCertificate& c) {
  Json j;
  j["params"] = to_json(c.params);
  j["k1"] = c.k1 ? integer_to_json(*c.k1) : Json(nullptr);
  j["k2"] = c.k2 ? integer_to_json(*c.k2) : Json(nullptr);
  j["c2W"] = rational_to_json(c.c2);
  Json checks = Json::array();
  for (const auto& rec : c.checks) checks.push_back(Json{{"name", rec.name}, {"ok", rec.ok}, {"detail", rec.detail}});
  j["checks"] = std::move(checks);
  j["pi1"] = topology::to_json(c.pi1);
  j["h2rank"] = c.h2rank;
  j["valid"] = c.valid();
  j["scope"] = c.scope;
  j["notes"] = c.notes;
  j["version"] = c.version;
  return j;
}

// ---------------------------------------------------------------------------
// Orbits

std::string to_string(Step s) {
  switch (s) {
    case Step::Circle1:
      return "1";
    case Step::Circle2:
      return "2";
    case Step::Both:
      return "both";
  }
  return "?";
}

ExtendedParams canonicalize(const ExtendedParams& p) {
  int sign = 0;
  for (const LatticeClass* k : {&p.kappa1(), &p.kappa2()}) {
    for (const auto& z : k->coords()) {
      if (z != 0) {
        sign = z > 0 ? 1 : -1;
        break;
      }
    }
    if (sign != 0) break;
  }
  if (sign >= 0) return p;
  return ExtendedParams(-p.kappa1(), -p.kappa2(), p.t1(), p.t2(), p.alpha(), p.r());
}

std::string canonical_key(const ExtendedParams& p) {
  const ExtendedParams c = canonicalize(p);
  std::ostringstream os;
  os << "k1=" << c.kappa1().to_expr() << ";k2=" << c.kappa2().to_expr() << ";t1=" << to_string(c.t1())
     << ";t2=" << to_string(c.t2()) << ";alpha=" << to_string(c.alpha()) << ";r=" << c.r().get_str();
  return os.str();
}

std::optional<ExtendedParams> try_step(const ExtendedParams& p, Step step, const Integer& denominator_bound) {
  auto within = [&](const ExtendedParams& q) {
    return q.t1().get_den() <= denominator_bound && q.t2().get_den() <= denominator_bound;
  };
  try {
    std::optional<ExtendedParams> out;
    switch (step) {
      case Step::Circle1:
        out = dualize_circle(p, 1);
        break;
      case Step::Circle2:
        out = dualize_circle(p, 2);
        break;
      case Step::Both:
        out = dualize_circle(dualize_circle(p, 1), 2);
        break;
    }
    if (!within(*out)) return std::nullopt;
    return out;
  } catch (const DualityError&) {
    return std::nullopt;
  }
}

OrbitGraph orbit(const ExtendedParams& p, std::size_t max_nodes, const Integer& denominator_bound,
                 unsigned threads) {
  if (max_nodes < 1) throw std::invalid_argument("max_nodes must be at least 1");
  constexpr std::array<Step, 3> kSteps{Step::Circle1, Step::Circle2, Step::Both};

  std::vector<ExtendedParams> found{canonicalize(p)};
  std::vector<std::string> keys{canonical_key(p)};
  std::map<std::string, std::size_t> index{{keys[0], 0}};
  std::set<std::tuple<std::size_t, std::size_t, int>> edge_set;
  bool truncated = false;

  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    // Neighbor computation is independent per frontier node.
    std::vector<std::array<std::optional<ExtendedParams>, 3>> next_params(frontier.size());
    parallel_for_index(frontier.size(), threads, [&](std::size_t i) {
      for (std::size_t s = 0; s < kSteps.size(); ++s) {
        auto q = try_step(found[frontier[i]], kSteps[s], denominator_bound);
        if (q) next_params[i][s] = canonicalize(*q);
      }
    });

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const std::size_t from = frontier[i];
      for (std::size_t s = 0; s < kSteps.size(); ++s) {
        if (!next_params[i][s]) continue;
        const std::string key = canonical_key(*next_params[i][s]);
        if (key == keys[from]) continue;
        auto it = index.find(key);
        if (it == index.end()) {
          if (found.size() >= max_nodes) {
            truncated = true;
            continue;
          }
          it = index.emplace(key, found.size()).first;
          found.push_back(*next_params[i][s]);
          keys.push_back(key);
          next.push_back(it->second);
        }
        edge_set.emplace(from, it->second, static_cast<int>(s));
      }
    }
    frontier = std::move(next);
  }

  // Output order: sort by canonical key.
  std::vector<std::size_t> order(found.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<std::size_t> rank(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  OrbitGraph g;
  g.truncated = truncated;
  g.max_nodes = max_nodes;
  g.denominator_bound = denominator_bound;
  g.root = rank[0];
  g.nodes.reserve(found.size());
  for (std::size_t i : order) g.nodes.push_back(OrbitNode{found[i], keys[i], {}, Rational(0), false});
  parallel_for_index(g.nodes.size(), threads, [&](std::size_t i) {
    auto& n = g.nodes[i];
    const auto cert = certify(n.params);
    n.pi1 = cert.pi1;
    n.c2 = cert.c2;
    n.valid = cert.valid();
  });
  for (const auto& [from, to, s] : edge_set) g.edges.push_back({rank[from], rank[to], kSteps[s]});
  std::sort(g.edges.begin(), g.edges.end(), [](const OrbitEdge& a, const OrbitEdge& b) {
    return std::tie(a.from, a.to, a.step) < std::tie(b.from, b.to, b.step);
  });
  return g;
}

std::string to_dot(const OrbitGraph& g) {
  std::ostringstream os;
  os << "digraph orbit {\n";
  os << "  // max_nodes=" << g.max_nodes << " denominator_bound=" << g.denominator_bound.get_str()
     << " truncated=" << (g.truncated ? "true" : "false") << "\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    os << "  n" << i << " [label=\"k1=" << n.params.kappa1().to_expr() << "\\nk2=" << n.params.kappa2().to_expr()
       << "\\nt1=" << to_string(n.params.t1()) << " t2=" << to_string(n.params.t2()) << "\\nc2=" << to_string(n.c2)
       << " pi1=" << n.pi1.to_string() << "\"";
    if (i == g.root) os << ", shape=box";
    os << "];\n";
  }
  for (const auto& e : g.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << to_string(e.step) << "\"];\n";
  os << "}\n";
  return os.str();
}

Json to_json(const OrbitGraph& g) {
  Json j;
  j["version"] = std::string(kVersion);
  j["root"] = g.root;
  j["truncated"] = g.truncated;
  j["max_nodes"] = g.max_nodes;
  j["denominator_bound"] = integer_to_json(g.denominator_bound);
  Json nodes = Json::array();
  for (const auto& n : g.nodes) {
    Json nj;
    nj["key"] = n.key;
    nj["params"] = to_json(n.params);
    nj["c2"] = rational_to_json(n.c2);
    nj["pi1"] = topology::to_json(n.pi1);
    nj["valid"] = n.valid;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  Json adj = Json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    Json out = Json::array();
    for (const auto& e : g.edges)
      if (e.from == i) out.push_back(Json{{"to", e.to}, {"step", to_string(e.step)}});
    adj.push_back(std::move(out));
  }
  j["adjacency"] = std::move(adj);
  return j;
}

// ---------------------------------------------------------------------------
// Invariance audit

namespace {

Comparison compare(const Rational& a, const Rational& b) { return {a, b, a == b}; }

Json to_json(const Comparison& c) {
  return Json{{"before", rational_to_json(c.before)}, {"after", rational_to_json(c.after)}, {"equal", c.equal}};
}

}  // namespace

InvarianceReport invariance_report(const ExtendedParams& before, const ExtendedParams& after) {
  InvarianceReport r;
  r.alpha = compare(before.alpha(), after.alpha());
  r.c2 = compare(generalized_c2(before), generalized_c2(after));
  bool all = r.alpha.equal && r.c2.equal;
  for (int j = 1; j <= 2; ++j) {
    CircleAudit& a = r.circles[j - 1];
    a.q_before = lattice::self_intersection(before.kappa(j));
    a.q_after = lattice::self_intersection(after.kappa(j));
    a.tq = compare(before.t(j) * Rational(a.q_before), after.t(j) * Rational(a.q_after));
    const auto expected = lattice::scale_exact(-before.t(j), before.kappa(j));
    a.dualized = expected && *expected == after.kappa(j) && after.t(j) == 1 / before.t(j);
    if (a.dualized) a.q_scaling = Rational(a.q_after) == before.t(j) * before.t(j) * Rational(a.q_before);
    all = all && a.tq.equal;
  }
  r.all_equal = all;
  return r;
}

Json to_json(const InvarianceReport& r) {
  Json j;
  j["alpha"] = to_json(r.alpha);
  j["c2"] = to_json(r.c2);
  Json circles = Json::array();
  for (const auto& a : r.circles) {
    Json c;
    c["tQ"] = to_json(a.tq);
    c["Q_before"] = integer_to_json(a.q_before);
    c["Q_after"] = integer_to_json(a.q_after);
    c["dualized"] = a.dualized;
    c["Q_scaling"] = a.q_scaling ? Json(*a.q_scaling) : Json(nullptr);
    circles.push_back(std::move(c));
  }
  j["circles"] = std::move(circles);
  j["all_equal"] = r.all_equal;
  return j;
}

}  // namespace hsys::tduality
