#pragma once

// Command-line front end: TOML run configuration, subcommands and the
// parameter search.

#include "hsys/anomaly.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace hsys::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Named coordinate blocks of the lattice: U1, U2, U3, E8a, E8b.
std::vector<std::size_t> block_indices(const std::string& block);

struct SearchBounds {
  std::vector<std::string> blocks{"U1"};
  long box = 1;  ///< coordinates range over [-box, box] inside the blocks
  /// Explicit class lists; when nonempty they replace the box for that class.
  std::vector<lattice::LatticeClass> kappa1;
  std::vector<lattice::LatticeClass> kappa2;
  std::vector<Rational> t{Rational(1)};
  std::vector<Rational> alpha{Rational(2)};
  long r_min = 1;
  long r_max = 24;
  double max_cells = 1e6;
};

struct GridSettings {
  std::vector<std::size_t> dims{32, 32, 32, 32};
  std::vector<double> lengths{1.0, 1.0, 1.0, 1.0};
};

struct Tolerances {
  double solvability = 1e-12;
  double residual = 1e-8;
};

struct RunConfig {
  SearchBounds search;
  GridSettings grid;
  Tolerances tolerances;
  std::filesystem::path out{"."};
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t orbit_max_nodes = 256;
  long denominator_bound = 8;

  /// Throws std::invalid_argument on non-finite bounds or nonpositive tolerances.
  void validate() const;
};

/// Throws ParseError on malformed TOML or invalid values.
RunConfig parse_config(const std::string& toml_text);
RunConfig load_config(const std::filesystem::path& path);

/// The class lists a search enumerates.
std::vector<lattice::LatticeClass> search_classes(const SearchBounds& b, int which);
/// Number of cells, as a double so oversized boxes do not overflow.
double cell_count(const SearchBounds& b);

struct SummaryKey {
  Rational c2W;
  long r;
  std::string pi1;

  friend bool operator<(const SummaryKey& a, const SummaryKey& b) {
    return std::tie(a.c2W, a.r, a.pi1) < std::tie(b.c2W, b.r, b.pi1);
  }
};

struct SearchResult {
  std::size_t evaluated = 0;
  std::vector<anomaly::SolutionCertificate> valid;  ///< enumeration order
  std::map<SummaryKey, std::size_t> summary;
};

/// Enumerates kappa1 x kappa2 x t x alpha x r. Throws std::invalid_argument
/// when the cell count exceeds max_cells.
SearchResult run_search(const SearchBounds& b, unsigned threads);
Json archive_json(const SearchResult& r, const RunConfig& cfg);

/// Runs the command line; output and diagnostics go to the given streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hsys::cli
