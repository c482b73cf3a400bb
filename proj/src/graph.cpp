#include "noisyldpc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/random/uniform_int_distribution.hpp>

#include "noisyldpc/rng.hpp"

namespace noisyldpc {

TannerGraph::TannerGraph(int n_vars, int n_checks, std::vector<Edge> edges)
    : n_vars_(n_vars), n_checks_(n_checks), edges_(std::move(edges)) {
  if (n_vars < 0 || n_checks < 0) throw std::invalid_argument("negative node count");
  for (const auto& e : edges_) {
    if (e.var < 0 || e.var >= n_vars || e.check < 0 || e.check >= n_checks)
      throw std::invalid_argument("edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());

  var_offsets_.assign(n_vars_ + 1, 0);
  check_offsets_.assign(n_checks_ + 1, 0);
  for (const auto& e : edges_) {
    ++var_offsets_[e.var + 1];
    ++check_offsets_[e.check + 1];
  }
  std::partial_sum(var_offsets_.begin(), var_offsets_.end(), var_offsets_.begin());
  std::partial_sum(check_offsets_.begin(), check_offsets_.end(), check_offsets_.begin());

  // Sorted by variable, so a variable's edges are a contiguous id range.
  var_edge_ids_.resize(edges_.size());
  std::iota(var_edge_ids_.begin(), var_edge_ids_.end(), 0);

  check_edge_ids_.resize(edges_.size());
  std::vector<int> fill(check_offsets_.begin(), check_offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) check_edge_ids_[fill[edges_[i].check]++] = static_cast<int>(i);
}

std::span<const int> TannerGraph::var_edges(int v) const {
  return std::span<const int>(var_edge_ids_).subspan(var_offsets_[v], var_offsets_[v + 1] - var_offsets_[v]);
}

std::span<const int> TannerGraph::check_edges(int c) const {
  return std::span<const int>(check_edge_ids_).subspan(check_offsets_[c], check_offsets_[c + 1] - check_offsets_[c]);
}

int TannerGraph::max_var_degree() const {
  int d = 0;
  for (int v = 0; v < n_vars_; ++v) d = std::max(d, var_degree(v));
  return d;
}

int TannerGraph::max_check_degree() const {
  int d = 0;
  for (int c = 0; c < n_checks_; ++c) d = std::max(d, check_degree(c));
  return d;
}

std::vector<int> apportion_nodes(const EdgePolynomial& poly, int total) {
  const auto nodes = node_perspective(poly);
  std::vector<int> counts(nodes.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double quota = nodes[i].fraction * total;
    counts[i] = static_cast<int>(std::floor(quota));
    assigned += counts[i];
    remainders.emplace_back(quota - counts[i], i);
  }
  // Largest remainder first; ties go to the lower degree.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

TannerGraph construct(const DegreeDistribution& dist, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("block length must be positive");
  if (const auto problems = validate(dist); !problems.empty())
    throw std::invalid_argument("invalid degree distribution: " + problems.front());

  const auto& lambda = dist.lambda();
  const auto& rho = dist.rho();

  std::vector<int> var_degree;
  var_degree.reserve(n);
  const auto var_counts = apportion_nodes(lambda, n);
  for (std::size_t i = 0; i < lambda.size(); ++i) var_degree.insert(var_degree.end(), var_counts[i], lambda[i].degree);
  const long var_sockets = std::accumulate(var_degree.begin(), var_degree.end(), 0L);

  const int k = static_cast<int>(std::lround(n * integral(rho) / integral(lambda)));
  if (k < 1) throw std::invalid_argument("block length too small: no check nodes");
  std::vector<int> check_degree;
  check_degree.reserve(k);
  const auto check_counts = apportion_nodes(rho, k);
  for (std::size_t i = 0; i < rho.size(); ++i) check_degree.insert(check_degree.end(), check_counts[i], rho[i].degree);

  // Repair the socket mismatch left by rounding with +-1 degree changes on
  // distinct check nodes, preferring moves between two listed degrees.
  long diff = var_sockets - std::accumulate(check_degree.begin(), check_degree.end(), 0L);
  if (std::labs(diff) > k) throw std::invalid_argument("infeasible rounding: socket counts differ by more than K");
  const int lo = rho.front().degree;
  const int hi = rho.back().degree;
  std::vector<char> touched(k, 0);
  for (int pass = 0; pass < 2 && diff != 0; ++pass) {
    for (int c = 0; c < k && diff != 0; ++c) {
      if (touched[c]) continue;
      const bool in_range = diff > 0 ? check_degree[c] < hi : check_degree[c] > lo;
      if (pass == 0 && !in_range) continue;
      if (diff < 0 && check_degree[c] <= 2) continue;
      check_degree[c] += diff > 0 ? 1 : -1;
      diff += diff > 0 ? -1 : 1;
      touched[c] = 1;
    }
  }
  if (diff != 0) throw std::invalid_argument("infeasible rounding: cannot balance edge sockets");

  std::vector<int> var_sockets_list;
  std::vector<int> check_sockets_list;
  var_sockets_list.reserve(var_sockets);
  check_sockets_list.reserve(var_sockets);
  for (int v = 0; v < n; ++v) var_sockets_list.insert(var_sockets_list.end(), var_degree[v], v);
  for (int c = 0; c < k; ++c) check_sockets_list.insert(check_sockets_list.end(), check_degree[c], c);

  Rng rng(seed, {0x6772617068ULL});
  // Fisher-Yates with a portable integer distribution.
  for (std::size_t i = check_sockets_list.size(); i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(check_sockets_list[i - 1], check_sockets_list[pick(rng.engine())]);
  }

  std::vector<Edge> edges(var_sockets_list.size());
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = {var_sockets_list[i], check_sockets_list[i]};
  return TannerGraph(n, k, std::move(edges));
}

namespace {

/// Mutable adjacency used while swapping edges.
struct Adjacency {
  std::vector<std::vector<int>> var_checks;
  std::vector<std::vector<int>> check_vars;
  std::vector<Edge> edges;
  std::vector<int> stamp;
  int epoch = 0;

  explicit Adjacency(const TannerGraph& g)
      : var_checks(g.n_vars()), check_vars(g.n_checks()), edges(g.edges().begin(), g.edges().end()),
        stamp(std::max(g.n_vars(), g.n_checks()), -1) {
    for (const auto& e : edges) {
      var_checks[e.var].push_back(e.check);
      check_vars[e.check].push_back(e.var);
    }
  }

  /// A check of v that closes a 4-cycle or repeats, or -1 if v is clean.
  int conflict(int v) {
    ++epoch;
    std::vector<int>& seen = stamp;
    for (int c : var_checks[v]) {
      for (int w : check_vars[c]) {
        if (w == v) continue;
        if (seen[w] == epoch) return c;
        seen[w] = epoch;
      }
    }
    // Parallel edges: a check listed twice.
    ++epoch;
    for (int c : var_checks[v]) {
      if (seen[c] == epoch) return c;
      seen[c] = epoch;
    }
    return -1;
  }

  static void replace_one(std::vector<int>& list, int from, int to) {
    *std::find(list.begin(), list.end(), from) = to;
  }

  void swap_edges(std::size_t a, std::size_t b) {
    Edge& ea = edges[a];
    Edge& eb = edges[b];
    replace_one(var_checks[ea.var], ea.check, eb.check);
    replace_one(var_checks[eb.var], eb.check, ea.check);
    replace_one(check_vars[ea.check], ea.var, eb.var);
    replace_one(check_vars[eb.check], eb.var, ea.var);
    std::swap(ea.check, eb.check);
  }

  bool adjacent(int v, int c) const {
    const auto& l = var_checks[v];
    return std::find(l.begin(), l.end(), c) != l.end();
  }
};

}  // namespace

CleanupReport remove_four_cycles(const TannerGraph& g, int max_passes, std::uint64_t seed) {
  Adjacency adj(g);
  Rng rng(seed, {0x6379636c6573ULL});
  const std::size_t n_edges = adj.edges.size();
  CleanupReport report;
  if (n_edges < 2) {
    report.graph = g;
    return report;
  }
  boost::random::uniform_int_distribution<std::size_t> pick(0, n_edges - 1);

  // Edge ids per variable so a conflicting (v, c) maps back to an edge.
  std::vector<std::vector<std::size_t>> var_edge_list(g.n_vars());
  for (std::size_t e = 0; e < n_edges; ++e) var_edge_list[adj.edges[e].var].push_back(e);

  constexpr int kCandidates = 200;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool any_conflict = false;
    for (int v = 0; v < g.n_vars(); ++v) {
      for (int guard = 0; guard < 4 * static_cast<int>(adj.var_checks[v].size()) + 4; ++guard) {
        const int c = adj.conflict(v);
        if (c < 0) break;
        any_conflict = true;
        std::size_t ea = n_edges;
        for (std::size_t e : var_edge_list[v])
          if (adj.edges[e].check == c) ea = e;
        bool fixed = false;
        for (int t = 0; t < kCandidates && !fixed; ++t) {
          const std::size_t eb = pick(rng.engine());
          const Edge other = adj.edges[eb];
          if (other.var == v || other.check == c) continue;
          if (adj.adjacent(v, other.check) || adj.adjacent(other.var, c)) continue;
          adj.swap_edges(ea, eb);
          if (adj.conflict(v) < 0 && adj.conflict(other.var) < 0) {
            fixed = true;
            ++report.swaps;
          } else {
            adj.swap_edges(ea, eb);
          }
        }
        if (!fixed) break;
      }
    }
    report.passes = pass + 1;
    if (!any_conflict) break;
  }

  report.graph = TannerGraph(g.n_vars(), g.n_checks(), adj.edges);
  report.residual_four_cycles = count_four_cycles(report.graph);
  report.residual_multi_edges = count_multi_edges(report.graph);
  return report;
}

std::size_t count_four_cycles(const TannerGraph& g) {
  std::vector<int> shared(g.n_vars(), 0);
  std::vector<int> touched;
  std::size_t cycles = 0;
  for (int v = 0; v < g.n_vars(); ++v) {
    std::vector<int> checks;
    for (int e : g.var_edges(v)) checks.push_back(g.edge(e).check);
    std::sort(checks.begin(), checks.end());
    checks.erase(std::unique(checks.begin(), checks.end()), checks.end());
    touched.clear();
    for (int c : checks) {
      std::vector<int> vars;
      for (int e : g.check_edges(c)) vars.push_back(g.edge(e).var);
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      for (int w : vars) {
        if (w <= v) continue;
        if (shared[w]++ == 0) touched.push_back(w);
      }
    }
    for (int w : touched) {
      const std::size_t s = shared[w];
      cycles += s * (s - 1) / 2;
      shared[w] = 0;
    }
  }
  return cycles;
}

std::size_t count_multi_edges(const TannerGraph& g) {
  std::size_t dup = 0;
  const auto edges = g.edges();
  for (std::size_t i = 1; i < edges.size(); ++i) dup += edges[i] == edges[i - 1] ? 1 : 0;
  return dup;
}

bool syndrome_ok(const TannerGraph& g, std::span<const std::uint8_t> hard_bits) {
  if (hard_bits.size() != static_cast<std::size_t>(g.n_vars()))
    throw std::invalid_argument("syndrome_ok: bit vector length does not match graph");
  for (int c = 0; c < g.n_checks(); ++c) {
    unsigned parity = 0;
    for (int e : g.check_edges(c)) parity ^= hard_bits[g.edge(e).var] & 1u;
    if (parity) return false;
  }
  return true;
}

std::string to_alist(const TannerGraph& g) {
  std::ostringstream os;
  const int max_col = g.max_var_degree();
  const int max_row = g.max_check_degree();
  os << g.n_vars() << ' ' << g.n_checks() << '\n' << max_col << ' ' << max_row << '\n';
  for (int v = 0; v < g.n_vars(); ++v) os << (v ? " " : "") << g.var_degree(v);
  os << '\n';
  for (int c = 0; c < g.n_checks(); ++c) os << (c ? " " : "") << g.check_degree(c);
  os << '\n';
  for (int v = 0; v < g.n_vars(); ++v) {
    int written = 0;
    for (int e : g.var_edges(v)) os << (written++ ? " " : "") << g.edge(e).check + 1;
    for (; written < max_col; ++written) os << (written ? " " : "") << 0;
    os << '\n';
  }
  for (int c = 0; c < g.n_checks(); ++c) {
    int written = 0;
    for (int e : g.check_edges(c)) os << (written++ ? " " : "") << g.edge(e).var + 1;
    for (; written < max_row; ++written) os << (written ? " " : "") << 0;
    os << '\n';
  }
  return os.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next non-blank line parsed as integers.
  std::vector<long> next(const char* what) {
    while (pos_ < text_.size()) {
      const auto end = text_.find('\n', pos_);
      const auto line = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
      pos_ = end == std::string_view::npos ? text_.size() : end + 1;
      ++line_;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      std::vector<long> values;
      std::istringstream is{std::string(line)};
      std::string tok;
      while (is >> tok) {
        std::size_t used = 0;
        long value = 0;
        try {
          value = std::stol(tok, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != tok.size()) throw ParseError(line_, std::string("non-integer token '") + tok + "' in " + what);
        values.push_back(value);
      }
      return values;
    }
    throw ParseError(line_ + 1, std::string("unexpected end of file, expected ") + what);
  }

  int line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

}  // namespace

TannerGraph from_alist(std::string_view text) {
  LineReader in(text);
  auto header = in.next("header 'N K'");
  if (header.size() != 2 || header[0] < 1 || header[1] < 1)
    throw ParseError(in.line(), "header must be two positive integers 'N K'");
  const int n = static_cast<int>(header[0]);
  const int k = static_cast<int>(header[1]);

  auto maxima = in.next("max degree line");
  if (maxima.size() != 2 || maxima[0] < 0 || maxima[1] < 0)
    throw ParseError(in.line(), "max degree line must hold two non-negative integers");

  auto col_deg = in.next("column degree list");
  if (static_cast<int>(col_deg.size()) != n) throw ParseError(in.line(), "column degree list must have N entries");
  const int col_line = in.line();
  auto row_deg = in.next("row degree list");
  if (static_cast<int>(row_deg.size()) != k) throw ParseError(in.line(), "row degree list must have K entries");
  const int row_line = in.line();
  for (long d : col_deg)
    if (d < 0 || d > maxima[0]) throw ParseError(col_line, "column degree exceeds declared maximum");
  for (long d : row_deg)
    if (d < 0 || d > maxima[1]) throw ParseError(row_line, "row degree exceeds declared maximum");

  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v) {
    auto entries = in.next("column adjacency line");
    long nonzero = 0;
    for (long c : entries) {
      if (c == 0) continue;
      if (c < 1 || c > k) throw ParseError(in.line(), "check index out of range");
      edges.push_back({v, static_cast<int>(c - 1)});
      ++nonzero;
    }
    if (nonzero != col_deg[v]) throw ParseError(in.line(), "column adjacency disagrees with its degree");
  }

  std::vector<Edge> from_rows;
  for (int c = 0; c < k; ++c) {
    auto entries = in.next("row adjacency line");
    long nonzero = 0;
    for (long v : entries) {
      if (v == 0) continue;
      if (v < 1 || v > n) throw ParseError(in.line(), "variable index out of range");
      from_rows.push_back({static_cast<int>(v - 1), c});
      ++nonzero;
    }
    if (nonzero != row_deg[c]) throw ParseError(in.line(), "row adjacency disagrees with its degree");
  }

  std::sort(edges.begin(), edges.end());
  std::sort(from_rows.begin(), from_rows.end());
  if (edges != from_rows) throw ParseError(in.line(), "row and column adjacency lists describe different graphs");
  return TannerGraph(n, k, std::move(edges));
}

}  // namespace noisyldpc
