#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipcfusion/corpus.hpp"
#include "ipcfusion/ipc.hpp"

namespace ipcfusion {

using NodeId = std::uint32_t;

/// Undirected edge between node indices a < b.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  std::uint32_t weight = 0;

  auto operator<=>(const Edge&) const = default;
};

struct LabeledEdge {
  IpcCode a;
  IpcCode b;
  std::uint32_t weight = 0;
};

/// Symmetric 0/1 adjacency in compressed sparse row form; neighbor lists are
/// sorted and the diagonal is always zero.
class BinaryAdjacency {
 public:
  BinaryAdjacency() = default;
  BinaryAdjacency(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  std::span<const NodeId> neighbors(NodeId node) const {
    return {targets_.data() + offsets_[node], targets_.data() + offsets_[node + 1]};
  }
  std::size_t degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }
  /// G_ij: 1 when i and j co-occur at least once, else 0.
  int operator()(NodeId i, NodeId j) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Weighted IPC co-occurrence network at a single IPC level. Nodes are kept
/// in lexicographic label order and node ids index that order; edges are
/// unique, sorted by (a, b) and carry the number of patents containing both
/// endpoints.
class CooccurrenceGraph {
 public:
  CooccurrenceGraph() = default;
  /// Validates and canonicalises an arbitrary node/edge description: every
  /// code must be at `level`, edges must join distinct known nodes, weights
  /// must be >= 1 and each unordered pair may appear only once. Throws
  /// Error{InvalidArgument}.
  CooccurrenceGraph(IpcLevel level, std::vector<IpcCode> nodes, const std::vector<LabeledEdge>& edges,
                    std::size_t patent_count);

  IpcLevel level() const noexcept { return level_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const std::vector<IpcCode>& nodes() const noexcept { return nodes_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const BinaryAdjacency& adjacency() const noexcept { return adjacency_; }
  /// Patents that contributed at least one node.
  std::size_t patent_count() const noexcept { return patent_count_; }
  /// Patents dropped because none of their codes reach `level`.
  std::size_t skipped_records() const noexcept { return skipped_records_; }

  std::optional<NodeId> find(std::string_view label) const;
  /// 0 when there is no edge.
  std::uint32_t weight(NodeId i, NodeId j) const;

  bool operator==(const CooccurrenceGraph& other) const {
    return level_ == other.level_ && nodes_ == other.nodes_ && edges_ == other.edges_ &&
           patent_count_ == other.patent_count_ && skipped_records_ == other.skipped_records_;
  }

 private:
  friend CooccurrenceGraph build_cooccurrence(const PatentCorpus&, IpcLevel, unsigned);

  struct Trusted {};
  CooccurrenceGraph(Trusted, IpcLevel level, std::vector<IpcCode> nodes, std::vector<Edge> edges,
                    std::size_t patent_count, std::size_t skipped);

  IpcLevel level_ = IpcLevel::Subclass;
  std::vector<IpcCode> nodes_;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  BinaryAdjacency adjacency_;
  std::size_t patent_count_ = 0;
  std::size_t skipped_records_ = 0;
};

/// Truncates each patent's codes to `level`, deduplicates them within the
/// patent and adds 1 to every unordered pair. Codes coarser than `level`
/// are ignored; a patent left with no code is skipped and counted.
/// The result does not depend on `threads`. Throws Error{EmptyCorpus}.
CooccurrenceGraph build_cooccurrence(const PatentCorpus& corpus, IpcLevel level, unsigned threads = 1);

BinaryAdjacency binary_adjacency(const CooccurrenceGraph& graph);

/// "node_a\tnode_b\tweight\n" per edge, node_a < node_b, lines sorted.
std::string export_edges(const CooccurrenceGraph& graph);

/// Inverse of export_edges. Only edge endpoints become nodes and
/// patent_count is set to the largest weight (the tightest bound the edge
/// list carries). Throws Error{InvalidArgument} on a malformed line.
CooccurrenceGraph import_edges(std::string_view tsv, IpcLevel level);

}  // namespace ipcfusion
