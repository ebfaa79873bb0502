#include "ipcfusion/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "ipcfusion/error.hpp"
#include "ipcfusion/parallel.hpp"

namespace ipcfusion {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Breadth-first distances from `source`; returns the visit order.
struct Bfs {
  std::vector<std::size_t> dist;
  std::vector<NodeId> order;

  explicit Bfs(std::size_t n) : dist(n, kUnreached) { order.reserve(n); }

  void run(const BinaryAdjacency& adj, NodeId source) {
    for (NodeId v : order) dist[v] = kUnreached;
    order.clear();
    dist[source] = 0;
    order.push_back(source);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId v = order[head];
      for (NodeId w : adj.neighbors(v)) {
        if (dist[w] == kUnreached) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
      }
    }
  }
};

CentralityTable make_table(const CooccurrenceGraph& graph, Measure measure, bool normalized,
                           const std::vector<double>& values) {
  CentralityTable table{measure, normalized, {}};
  table.entries.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) table.entries.push_back({graph.labels()[i], values[i]});
  return table;
}

std::vector<const CentralityEntry*> ranked_order(const CentralityTable& table) {
  std::vector<const CentralityEntry*> order;
  order.reserve(table.entries.size());
  for (const auto& e : table.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const CentralityEntry* x, const CentralityEntry* y) {
    if (x->value != y->value) return x->value > y->value;
    return x->node < y->node;
  });
  return order;
}

}  // namespace

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::Degree: return "degree";
    case Measure::WeightedDegree: return "weighted_degree";
    case Measure::Betweenness: return "betweenness";
    case Measure::Closeness: return "closeness";
    case Measure::Clustering: return "clustering";
  }
  return "unknown";
}

Measure parse_measure(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "degree") return Measure::Degree;
  if (key == "weighted_degree") return Measure::WeightedDegree;
  if (key == "betweenness") return Measure::Betweenness;
  if (key == "closeness") return Measure::Closeness;
  if (key == "clustering") return Measure::Clustering;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown measure '{}'", text));
}

bool default_normalized(Measure measure) {
  switch (measure) {
    case Measure::Degree:
    case Measure::WeightedDegree: return false;
    case Measure::Betweenness:
    case Measure::Closeness:
    case Measure::Clustering: return true;
  }
  return false;
}

std::optional<double> CentralityTable::value(std::string_view node) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), node,
                                   [](const CentralityEntry& e, std::string_view n) { return e.node < n; });
  if (it == entries.end() || it->node != node) return std::nullopt;
  return it->value;
}

std::vector<double> degree_scores(const BinaryAdjacency& adj, bool normalized) {
  const std::size_t n = adj.node_count();
  std::vector<double> out(n);
  for (NodeId i = 0; i < n; ++i) {
    out[i] = static_cast<double>(adj.degree(i));
    if (normalized && n >= 2) out[i] /= static_cast<double>(n - 1);
  }
  return out;
}

std::vector<double> betweenness_scores(const BinaryAdjacency& adj, bool normalized, unsigned threads) {
  const std::size_t n = adj.node_count();
  std::vector<double> total(n, 0.0);
  if (n < 3) return total;

  const std::size_t block = std::max<std::size_t>(32, (n + 63) / 64);
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<std::vector<double>> partial(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    auto& acc = partial[b];
    acc.assign(n, 0.0);
    Bfs bfs(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<double> delta(n, 0.0);
    const std::size_t end = std::min(n, (b + 1) * block);
    for (std::size_t s = b * block; s < end; ++s) {
      bfs.run(adj, static_cast<NodeId>(s));
      for (NodeId v : bfs.order) {
        sigma[v] = 0.0;
        delta[v] = 0.0;
      }
      sigma[s] = 1.0;
      for (NodeId v : bfs.order) {
        for (NodeId w : adj.neighbors(v)) {
          if (bfs.dist[w] == bfs.dist[v] + 1) sigma[w] += sigma[v];
        }
      }
      for (auto it = bfs.order.rbegin(); it != bfs.order.rend(); ++it) {
        const NodeId w = *it;
        const double coeff = (1.0 + delta[w]) / sigma[w];
        for (NodeId v : adj.neighbors(w)) {
          if (bfs.dist[v] + 1 == bfs.dist[w]) delta[v] += sigma[v] * coeff;
        }
        if (w != s) acc[w] += delta[w];
      }
    }
  });

  for (const auto& acc : partial) {
    for (std::size_t i = 0; i < n; ++i) total[i] += acc[i];
  }
  // Each unordered pair was visited from both endpoints.
  const double scale = normalized ? 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2)) : 0.5;
  for (auto& v : total) v *= scale;
  return total;
}

std::vector<double> closeness_scores(const BinaryAdjacency& adj, bool normalized, unsigned threads) {
  const std::size_t n = adj.node_count();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    Bfs bfs(n);
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      bfs.run(adj, static_cast<NodeId>(i));
      const std::size_t reached = bfs.order.size();
      if (reached < 2) continue;
      std::size_t sum = 0;
      for (NodeId v : bfs.order) sum += bfs.dist[v];
      const double others = static_cast<double>(reached - 1);
      out[i] = normalized ? (others / static_cast<double>(sum)) * (others / static_cast<double>(n - 1))
                          : 1.0 / static_cast<double>(sum);
    }
  });
  return out;
}

std::vector<double> clustering_scores(const BinaryAdjacency& adj) {
  const std::size_t n = adj.node_count();
  std::vector<double> out(n, 0.0);
  std::vector<char> mark(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    const auto nbrs = adj.neighbors(i);
    const std::size_t k = nbrs.size();
    if (k < 2) continue;
    for (NodeId u : nbrs) mark[u] = 1;
    std::size_t links = 0;  // each neighbour-neighbour edge is seen twice
    for (NodeId u : nbrs) {
      for (NodeId w : adj.neighbors(u)) links += mark[w];
    }
    for (NodeId u : nbrs) mark[u] = 0;
    out[i] = static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  return out;
}

CentralityTable degree_centrality(const CooccurrenceGraph& graph, bool normalized) {
  return make_table(graph, Measure::Degree, normalized, degree_scores(graph.adjacency(), normalized));
}

CentralityTable weighted_degree(const CooccurrenceGraph& graph) {
  std::vector<double> sums(graph.node_count(), 0.0);
  for (const auto& e : graph.edges()) {
    sums[e.a] += e.weight;
    sums[e.b] += e.weight;
  }
  return make_table(graph, Measure::WeightedDegree, false, sums);
}

CentralityTable betweenness_centrality(const CooccurrenceGraph& graph, bool normalized, unsigned threads) {
  return make_table(graph, Measure::Betweenness, normalized,
                    betweenness_scores(graph.adjacency(), normalized, threads));
}

CentralityTable closeness_centrality(const CooccurrenceGraph& graph, bool normalized, unsigned threads) {
  return make_table(graph, Measure::Closeness, normalized, closeness_scores(graph.adjacency(), normalized, threads));
}

CentralityTable clustering_coefficient(const CooccurrenceGraph& graph) {
  return make_table(graph, Measure::Clustering, true, clustering_scores(graph.adjacency()));
}

CentralityTable compute_measure(const CooccurrenceGraph& graph, Measure measure, std::optional<bool> normalized,
                                unsigned threads) {
  const bool norm = normalized.value_or(default_normalized(measure));
  switch (measure) {
    case Measure::Degree: return degree_centrality(graph, norm);
    case Measure::WeightedDegree: return weighted_degree(graph);
    case Measure::Betweenness: return betweenness_centrality(graph, norm, threads);
    case Measure::Closeness: return closeness_centrality(graph, norm, threads);
    case Measure::Clustering: return clustering_coefficient(graph);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown measure");
}

RankedList rank_top(const CentralityTable& table, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "top-k must be >= 1");
  RankedList list{table.measure, table.normalized, {}};
  const auto order = ranked_order(table);
  const std::size_t count = std::min(k, order.size());
  for (std::size_t i = 0; i < count; ++i) list.rows.push_back({i + 1, order[i]->node, order[i]->value});
  return list;
}

RankedList rank_all(const CentralityTable& table) {
  return rank_top(table, std::max<std::size_t>(1, table.entries.size()));
}

std::string table_to_csv(const CentralityTable& table) {
  std::string out = "node,value\n";
  for (const auto* e : ranked_order(table)) out += fmt::format("{},{}\n", e->node, e->value);
  return out;
}

std::string ranked_to_json(const RankedList& list) {
  nlohmann::ordered_json doc;
  doc["measure"] = to_string(list.measure);
  doc["normalized"] = list.normalized;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : list.rows) {
    doc["rows"].push_back({{"rank", row.rank}, {"node", row.node}, {"value", row.value}});
  }
  return doc.dump(2) + "\n";
}

std::string table_to_json(const CentralityTable& table) { return ranked_to_json(rank_all(table)); }

}  // namespace ipcfusion
