#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipcfusion/cooccur.hpp"

namespace ipcfusion {

enum class Measure { Degree, WeightedDegree, Betweenness, Closeness, Clustering };

std::string_view to_string(Measure measure);
/// "degree", "weighted-degree"/"weighted_degree", "betweenness", "closeness",
/// "clustering". Throws Error{InvalidArgument}.
Measure parse_measure(std::string_view text);

/// Whether a measure is normalised when the caller does not say.
/// Degree is raw (neighbour counts); betweenness and closeness are
/// normalised; clustering is inherently in [0,1].
bool default_normalized(Measure measure);

struct CentralityEntry {
  std::string node;
  double value = 0.0;

  bool operator==(const CentralityEntry&) const = default;
};

/// One value per node, in the graph's (lexicographic) node order.
struct CentralityTable {
  Measure measure = Measure::Degree;
  bool normalized = false;
  std::vector<CentralityEntry> entries;

  std::optional<double> value(std::string_view node) const;
  bool operator==(const CentralityTable&) const = default;
};

struct RankedRow {
  std::size_t rank = 0;
  std::string node;
  double value = 0.0;

  bool operator==(const RankedRow&) const = default;
};

struct RankedList {
  Measure measure = Measure::Degree;
  bool normalized = false;
  std::vector<RankedRow> rows;

  bool operator==(const RankedList&) const = default;
};

// Kernels over a bare adjacency; values are indexed by node id.

std::vector<double> degree_scores(const BinaryAdjacency& adj, bool normalized);
/// Exact Brandes accumulation on the unweighted graph, unordered pairs.
/// Sources are reduced in fixed blocks whose size depends only on the node
/// count, so the result is bit-identical for every `threads` value.
std::vector<double> betweenness_scores(const BinaryAdjacency& adj, bool normalized, unsigned threads = 1);
/// Normalised: (r-1)/sum_d * (r-1)/(n-1) where r is the size of the node's
/// component. Raw: 1/sum_d over reachable nodes. Isolated nodes score 0.
std::vector<double> closeness_scores(const BinaryAdjacency& adj, bool normalized, unsigned threads = 1);
/// Local clustering coefficient; 0 for degree < 2.
std::vector<double> clustering_scores(const BinaryAdjacency& adj);

// Graph-level operations.

CentralityTable degree_centrality(const CooccurrenceGraph& graph, bool normalized = false);
CentralityTable weighted_degree(const CooccurrenceGraph& graph);
CentralityTable betweenness_centrality(const CooccurrenceGraph& graph, bool normalized = true, unsigned threads = 1);
CentralityTable closeness_centrality(const CooccurrenceGraph& graph, bool normalized = true, unsigned threads = 1);
CentralityTable clustering_coefficient(const CooccurrenceGraph& graph);

/// Dispatches on `measure`; `normalized` falls back to default_normalized.
CentralityTable compute_measure(const CooccurrenceGraph& graph, Measure measure,
                                std::optional<bool> normalized = std::nullopt, unsigned threads = 1);

/// Top-k by descending value with lexicographic tie-break. Throws
/// Error{InvalidArgument} for k == 0.
RankedList rank_top(const CentralityTable& table, std::size_t k);
/// Every node in ranked order.
RankedList rank_all(const CentralityTable& table);

/// "node,value" header then one row per node in ranked order.
std::string table_to_csv(const CentralityTable& table);
/// {"measure", "normalized", "rows": [{"rank","node","value"}...]} in ranked order.
std::string table_to_json(const CentralityTable& table);
std::string ranked_to_json(const RankedList& list);

}  // namespace ipcfusion
