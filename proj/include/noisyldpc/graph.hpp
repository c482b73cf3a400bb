#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "noisyldpc/degree.hpp"

namespace noisyldpc {

struct Edge {
  int var = 0;
  int check = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Bipartite variable/check graph. Edges are stored sorted by (var, check)
/// and the position in that order is the stable edge index used for
/// message storage. Parallel edges are representable (a raw configuration
/// model draw can contain them) until remove_four_cycles() cleans them up.
class TannerGraph {
 public:
  TannerGraph() = default;
  TannerGraph(int n_vars, int n_checks, std::vector<Edge> edges);

  int n_vars() const { return n_vars_; }
  int n_checks() const { return n_checks_; }
  std::size_t n_edges() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  /// Edge indices incident to a variable / check node.
  std::span<const int> var_edges(int v) const;
  std::span<const int> check_edges(int c) const;

  int var_degree(int v) const { return static_cast<int>(var_edges(v).size()); }
  int check_degree(int c) const { return static_cast<int>(check_edges(c).size()); }
  int max_var_degree() const;
  int max_check_degree() const;

  bool operator==(const TannerGraph& other) const {
    return n_vars_ == other.n_vars_ && n_checks_ == other.n_checks_ && edges_ == other.edges_;
  }

 private:
  int n_vars_ = 0;
  int n_checks_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> var_offsets_;
  std::vector<int> check_offsets_;
  std::vector<int> var_edge_ids_;
  std::vector<int> check_edge_ids_;
};

/// Node counts per degree by largest-remainder apportionment of `total`
/// nodes over the node-perspective fractions of `poly`.
std::vector<int> apportion_nodes(const EdgePolynomial& poly, int total);

/// Random socket-permutation realization of `dist` with n variable nodes.
/// Deterministic for a fixed seed. The result may contain parallel edges
/// and 4-cycles.
TannerGraph construct(const DegreeDistribution& dist, int n, std::uint64_t seed);

struct CleanupReport {
  TannerGraph graph;
  int passes = 0;
  std::size_t swaps = 0;
  std::size_t residual_four_cycles = 0;
  std::size_t residual_multi_edges = 0;

  /// False when the pass budget ran out with conflicts left (a warning, not an error).
  bool complete() const { return residual_four_cycles == 0 && residual_multi_edges == 0; }
};

/// Degree-preserving edge swaps until no parallel edges and no 4-cycles remain
/// or max_passes sweeps over the variables have been made.
CleanupReport remove_four_cycles(const TannerGraph& g, int max_passes, std::uint64_t seed);

/// Number of 4-cycles: sum over variable pairs of C(shared checks, 2),
/// counting distinct shared checks only.
std::size_t count_four_cycles(const TannerGraph& g);
std::size_t count_multi_edges(const TannerGraph& g);

/// Parity of every check is even over the hard bits of its neighbours.
bool syndrome_ok(const TannerGraph& g, std::span<const std::uint8_t> hard_bits);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// MacKay alist text: "N K", max degrees, degree lists, then 1-indexed
/// zero-padded column and row adjacency lists.
std::string to_alist(const TannerGraph& g);
TannerGraph from_alist(std::string_view text);

}  // namespace noisyldpc
