#pragma once

// Slow, obviously-correct reference implementations used to check the
// library. Nothing here calls into ipcfusion except to build inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ipcfusion/cooccur.hpp"

namespace oracle {

struct SimpleGraph {
  int n = 0;
  std::vector<std::vector<char>> adj;  // dense, symmetric

  explicit SimpleGraph(int nodes) : n(nodes), adj(nodes, std::vector<char>(nodes, 0)) {}
  void link(int a, int b) { adj[a][b] = adj[b][a] = 1; }
  int edge_count() const {
    int e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) e += adj[i][j];
    return e;
  }
  std::vector<ipcfusion::Edge> edges() const {
    std::vector<ipcfusion::Edge> out;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (adj[i][j]) out.push_back({static_cast<ipcfusion::NodeId>(i), static_cast<ipcfusion::NodeId>(j), 1});
    return out;
  }
  ipcfusion::BinaryAdjacency binary() const {
    const auto e = edges();
    return ipcfusion::BinaryAdjacency(static_cast<std::size_t>(n), e);
  }
};

inline SimpleGraph random_graph(std::mt19937_64& rng, int n, double p) {
  SimpleGraph g(n);
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) g.link(i, j);
  return g;
}

inline SimpleGraph complete_graph(int n) {
  SimpleGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.link(i, j);
  return g;
}

constexpr int kUnreachable = -1;

// One BFS per source over the dense matrix.
inline std::vector<std::vector<int>> all_pairs_distances(const SimpleGraph& g) {
  std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, kUnreachable));
  for (int s = 0; s < g.n; ++s) {
    std::vector<int> queue{s};
    d[s][s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int w = 0; w < g.n; ++w) {
        if (g.adj[v][w] && d[s][w] == kUnreachable) {
          d[s][w] = d[s][v] + 1;
          queue.push_back(w);
        }
      }
    }
  }
  return d;
}

// Lists every shortest s-t path explicitly.
inline std::vector<std::vector<int>> shortest_paths(const SimpleGraph& g, const std::vector<std::vector<int>>& d,
                                                    int s, int t) {
  std::vector<std::vector<int>> paths;
  if (d[s][t] == kUnreachable) return paths;
  std::vector<int> path{s};
  std::function<void(int)> walk = [&](int v) {
    if (v == t) {
      paths.push_back(path);
      return;
    }
    for (int w = 0; w < g.n; ++w) {
      if (g.adj[v][w] && d[s][w] == d[s][v] + 1 && d[w][t] == d[v][t] - 1) {
        path.push_back(w);
        walk(w);
        path.pop_back();
      }
    }
  };
  walk(s);
  return paths;
}

inline std::vector<double> degree(const SimpleGraph& g, bool normalized) {
  std::vector<double> out(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) out[i] += g.adj[i][j];
    if (normalized && g.n > 1) out[i] /= (g.n - 1);
  }
  return out;
}

// Sum over unordered pairs {s,t} not containing v of the share of shortest
// s-t paths passing through v. Normalized by the pair count (n-1)(n-2)/2.
inline std::vector<double> betweenness(const SimpleGraph& g, bool normalized) {
  const auto d = all_pairs_distances(g);
  std::vector<double> out(g.n, 0.0);
  for (int s = 0; s < g.n; ++s) {
    for (int t = s + 1; t < g.n; ++t) {
      const auto paths = shortest_paths(g, d, s, t);
      if (paths.empty()) continue;
      std::vector<int> through(g.n, 0);
      for (const auto& p : paths)
        for (std::size_t k = 1; k + 1 < p.size(); ++k) ++through[p[k]];
      for (int v = 0; v < g.n; ++v) out[v] += static_cast<double>(through[v]) / static_cast<double>(paths.size());
    }
  }
  if (normalized) {
    const double pairs = g.n > 2 ? (g.n - 1.0) * (g.n - 2.0) / 2.0 : 0.0;
    for (auto& v : out) v = pairs > 0 ? v / pairs : 0.0;
  }
  return out;
}

// Raw: 1 / sum of distances to reachable nodes. Normalized: the
// Wasserman-Faust form ((r)/(n-1)) * (r / sum) with r reachable others.
inline std::vector<double> closeness(const SimpleGraph& g, bool normalized) {
  const auto d = all_pairs_distances(g);
  std::vector<double> out(g.n, 0.0);
  for (int v = 0; v < g.n; ++v) {
    int reach = 0;
    int sum = 0;
    for (int w = 0; w < g.n; ++w) {
      if (w != v && d[v][w] != kUnreachable) {
        ++reach;
        sum += d[v][w];
      }
    }
    if (reach == 0) continue;
    out[v] = normalized ? (static_cast<double>(reach) / sum) * (static_cast<double>(reach) / (g.n - 1)) : 1.0 / sum;
  }
  return out;
}

inline std::vector<double> clustering(const SimpleGraph& g) {
  std::vector<double> out(g.n, 0.0);
  for (int v = 0; v < g.n; ++v) {
    std::vector<int> nb;
    for (int w = 0; w < g.n; ++w)
      if (g.adj[v][w]) nb.push_back(w);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    int links = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) links += g.adj[nb[i]][nb[j]];
    out[v] = links / (k * (k - 1) / 2.0);
  }
  return out;
}

// A code with its expected truncations written out by hand rather than
// derived through the library.
struct PoolCode {
  std::string text;
  std::string section;
  std::string cls;
  std::string subclass;  // empty when the code is coarser than a subclass
  std::string main_group;
};

inline const std::vector<PoolCode>& code_pool() {
  static const std::vector<PoolCode> pool{
      {"G06F 17/30", "G", "G06", "G06F", "G06F17"},
      {"G06F 9/44", "G", "G06", "G06F", "G06F9"},
      {"G06F17/10", "G", "G06", "G06F", "G06F17"},
      {"G06N 3/04", "G", "G06", "G06N", "G06N3"},
      {"G06N 3/08", "G", "G06", "G06N", "G06N3"},
      {"G06N20/00", "G", "G06", "G06N", "G06N20"},
      {"G06K 9/62", "G", "G06", "G06K", "G06K9"},
      {"G06T 7/00", "G", "G06", "G06T", "G06T7"},
      {"G16H 50/20", "G", "G16", "G16H", "G16H50"},
      {"H04L 29/06", "H", "H04", "H04L", "H04L29"},
      {"H04W 4/02", "H", "H04", "H04W", "H04W4"},
      {"A61B 5/00", "A", "A61", "A61B", "A61B5"},
      {"B60W 30/09", "B", "B60", "B60W", "B60W30"},
      {"C12Q 1/68", "C", "C12", "C12Q", "C12Q1"},
      {"G06F", "G", "G06", "G06F", ""},
      {"H04", "H", "H04", "", ""},
  };
  return pool;
}

struct OracleCorpus {
  std::vector<ipcfusion::PatentRecord> records;
  std::vector<std::vector<int>> picks;  // pool indices per patent, repeats allowed
};

inline OracleCorpus random_corpus(std::mt19937_64& rng, int max_patents) {
  const auto& pool = code_pool();
  std::uniform_int_distribution<int> count(1, max_patents);
  std::uniform_int_distribution<int> codes(1, 5);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
  std::uniform_int_distribution<int> year(2012, 2021);
  OracleCorpus out;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    ipcfusion::PatentRecord r;
    r.patent_id = "P" + std::to_string(i);
    r.date.year = year(rng);
    std::vector<int> picks;
    const int k = codes(rng);
    for (int j = 0; j < k; ++j) {
      const int p = pick(rng);
      picks.push_back(p);
      r.codes.push_back(ipcfusion::parse_ipc(pool[p].text));
    }
    out.records.push_back(std::move(r));
    out.picks.push_back(std::move(picks));
  }
  return out;
}

inline std::string pool_label(const PoolCode& c, ipcfusion::IpcLevel level) {
  switch (level) {
    case ipcfusion::IpcLevel::Section: return c.section;
    case ipcfusion::IpcLevel::Class: return c.cls;
    case ipcfusion::IpcLevel::Subclass: return c.subclass;
    case ipcfusion::IpcLevel::MainGroup: return c.main_group;
    default: return {};
  }
}

struct PairCounts {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, int> edges;
};

// Every unordered pair of distinct labels inside each patent, counted once
// per patent.
inline PairCounts enumerate_pairs(const OracleCorpus& corpus, ipcfusion::IpcLevel level) {
  PairCounts out;
  for (const auto& picks : corpus.picks) {
    std::set<std::string> labels;
    for (int p : picks) {
      const auto l = pool_label(code_pool()[p], level);
      if (!l.empty()) labels.insert(l);
    }
    out.nodes.insert(labels.begin(), labels.end());
    const std::vector<std::string> v(labels.begin(), labels.end());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) ++out.edges[{v[i], v[j]}];
  }
  return out;
}

struct FusionCounts {
  long total = 0;
  std::map<std::string, long> unique_by_segment;
  long distinct = 0;
};

inline FusionCounts count_fusion(const OracleCorpus& corpus, ipcfusion::IpcLevel segment, ipcfusion::IpcLevel counting,
                                 bool dedup = true) {
  FusionCounts out;
  std::set<std::string> distinct;
  for (const auto& picks : corpus.picks) {
    std::vector<std::string> labels;
    for (int p : picks) {
      const auto l = pool_label(code_pool()[p], counting);
      if (!l.empty()) labels.push_back(l);
    }
    if (dedup) {
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    }
    out.total += static_cast<long>(labels.size());
    distinct.insert(labels.begin(), labels.end());
  }
  for (const auto& l : distinct) {
    for (const auto& c : code_pool()) {
      if (pool_label(c, counting) == l) {
        ++out.unique_by_segment[pool_label(c, segment)];
        break;
      }
    }
  }
  out.distinct = static_cast<long>(distinct.size());
  return out;
}

// Smallest t with f(t) >= target for increasing f, by plain bisection.
inline double bisect_increasing(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

inline double gompertz(double L, double a, double b, double t) { return L * std::exp(-a * std::exp(-b * t)); }
inline double logistic(double L, double a, double b, double t) { return L / (1.0 + a * std::exp(-b * t)); }

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

}  // namespace oracle
