#include "ipcfusion/cooccur.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "ipcfusion/error.hpp"
#include "ipcfusion/parallel.hpp"

namespace ipcfusion {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

// Nodes sorted by label with labels precomputed.
void sort_by_label(std::vector<IpcCode>& nodes, std::vector<std::string>& labels) {
  std::vector<std::pair<std::string, IpcCode>> keyed;
  keyed.reserve(nodes.size());
  for (const auto& n : nodes) keyed.emplace_back(format_ipc(n), n);
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  nodes.clear();
  labels.clear();
  for (auto& [label, code] : keyed) {
    labels.push_back(std::move(label));
    nodes.push_back(code);
  }
}

}  // namespace

BinaryAdjacency::BinaryAdjacency(std::size_t node_count, std::span<const Edge> edges) {
  offsets_.assign(node_count + 1, 0);
  for (const auto& e : edges) {
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
  }
  for (std::size_t i = 0; i < node_count; ++i) offsets_[i + 1] += offsets_[i];
  targets_.resize(offsets_.back());
  auto cursor = offsets_;
  for (const auto& e : edges) {
    targets_[cursor[e.a]++] = e.b;
    targets_[cursor[e.b]++] = e.a;
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

int BinaryAdjacency::operator()(NodeId i, NodeId j) const {
  const auto n = neighbors(i);
  return std::binary_search(n.begin(), n.end(), j) ? 1 : 0;
}

CooccurrenceGraph::CooccurrenceGraph(Trusted, IpcLevel level, std::vector<IpcCode> nodes, std::vector<Edge> edges,
                                     std::size_t patent_count, std::size_t skipped)
    : level_(level),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      patent_count_(patent_count),
      skipped_records_(skipped) {
  labels_.reserve(nodes_.size());
  for (const auto& n : nodes_) labels_.push_back(format_ipc(n));
  adjacency_ = BinaryAdjacency(nodes_.size(), edges_);
}

CooccurrenceGraph::CooccurrenceGraph(IpcLevel level, std::vector<IpcCode> nodes,
                                     const std::vector<LabeledEdge>& edges, std::size_t patent_count)
    : level_(level), nodes_(std::move(nodes)), patent_count_(patent_count) {
  for (const auto& n : nodes_) {
    if (n.level() != level) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("node '{}' is not at level {}", format_ipc(n), to_string(level)));
    }
  }
  sort_by_label(nodes_, labels_);
  for (std::size_t i = 1; i < labels_.size(); ++i) {
    if (labels_[i] == labels_[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("duplicate node '{}'", labels_[i]));
    }
  }
  for (const auto& e : edges) {
    auto a = find(format_ipc(e.a));
    auto b = find(format_ipc(e.b));
    if (!a || !b) throw Error(ErrorKind::InvalidArgument, "edge endpoint is not a node");
    if (*a == *b) throw Error(ErrorKind::InvalidArgument, fmt::format("self-loop on '{}'", labels_[*a]));
    if (e.weight == 0) throw Error(ErrorKind::InvalidArgument, "edge weight must be >= 1");
    if (*a > *b) std::swap(*a, *b);
    edges_.push_back({*a, *b, e.weight});
  }
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("duplicate edge {}-{}", labels_[edges_[i].a], labels_[edges_[i].b]));
    }
  }
  adjacency_ = BinaryAdjacency(nodes_.size(), edges_);
}

std::optional<NodeId> CooccurrenceGraph::find(std::string_view label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<NodeId>(it - labels_.begin());
}

std::uint32_t CooccurrenceGraph::weight(NodeId i, NodeId j) const {
  if (i > j) std::swap(i, j);
  const Edge probe{i, j, 0};
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), probe,
                                   [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return (it != edges_.end() && it->a == i && it->b == j) ? it->weight : 0;
}

CooccurrenceGraph build_cooccurrence(const PatentCorpus& corpus, IpcLevel level, unsigned threads) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a co-occurrence graph from an empty corpus");

  // Per-patent truncated code sets, deduplicated within each patent.
  std::vector<std::vector<IpcCode>> per_patent;
  per_patent.reserve(corpus.size());
  std::map<IpcCode, NodeId> index;
  std::size_t skipped = 0;
  for (const auto& record : corpus.records()) {
    std::vector<IpcCode> codes;
    for (const auto& c : record.codes) {
      if (auto t = try_truncate(c, level)) codes.push_back(*t);
    }
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    if (codes.empty()) {
      ++skipped;
      continue;
    }
    for (const auto& c : codes) index.emplace(c, 0);
    per_patent.push_back(std::move(codes));
  }

  std::vector<IpcCode> nodes;
  std::vector<std::string> labels;
  for (const auto& [code, _] : index) nodes.push_back(code);
  sort_by_label(nodes, labels);
  for (NodeId i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;

  // Integer weights make the merge order irrelevant to the result.
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (per_patent.size() + kChunk - 1) / kChunk;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    auto& counts = partial[chunk];
    const std::size_t end = std::min(per_patent.size(), (chunk + 1) * kChunk);
    std::vector<NodeId> ids;
    for (std::size_t p = chunk * kChunk; p < end; ++p) {
      ids.clear();
      for (const auto& c : per_patent[p]) ids.push_back(index.at(c));
      std::sort(ids.begin(), ids.end());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) ++counts[pair_key(ids[i], ids[j])];
      }
    }
  });
  std::unordered_map<std::uint64_t, std::uint32_t> merged;
  for (const auto& counts : partial) {
    for (const auto& [key, w] : counts) merged[key] += w;
  }
  std::vector<Edge> edges;
  edges.reserve(merged.size());
  for (const auto& [key, w] : merged) {
    edges.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xFFFFFFFFu), w});
  }
  std::sort(edges.begin(), edges.end());
  return CooccurrenceGraph(CooccurrenceGraph::Trusted{}, level, std::move(nodes), std::move(edges),
                           per_patent.size(), skipped);
}

BinaryAdjacency binary_adjacency(const CooccurrenceGraph& graph) { return graph.adjacency(); }

std::string export_edges(const CooccurrenceGraph& graph) {
  std::vector<std::string> lines;
  lines.reserve(graph.edges().size());
  const auto& labels = graph.labels();
  for (const auto& e : graph.edges()) lines.push_back(fmt::format("{}\t{}\t{}\n", labels[e.a], labels[e.b], e.weight));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

CooccurrenceGraph import_edges(std::string_view tsv, IpcLevel level) {
  std::map<std::string, IpcCode> nodes;
  std::vector<LabeledEdge> edges;
  std::uint32_t max_weight = 0;
  std::size_t line_no = 0;
  while (!tsv.empty()) {
    ++line_no;
    const std::size_t end = std::min(tsv.find('\n'), tsv.size());
    std::string_view line = tsv.substr(0, end);
    tsv.remove_prefix(std::min(end + 1, tsv.size()));
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("edge line {}: expected three tab-separated fields", line_no));
    }
    const auto weight_text = line.substr(t2 + 1);
    std::uint32_t weight = 0;
    const auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
    if (ec != std::errc{} || ptr != weight_text.data() + weight_text.size()) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("edge line {}: bad weight '{}'", line_no, weight_text));
    }
    IpcCode a, b;
    try {
      a = parse_ipc(line.substr(0, t1));
      b = parse_ipc(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("edge line {}: {}", line_no, e.what()));
    }
    nodes.emplace(format_ipc(a), a);
    nodes.emplace(format_ipc(b), b);
    edges.push_back({a, b, weight});
    max_weight = std::max(max_weight, weight);
  }
  std::vector<IpcCode> node_list;
  for (const auto& [_, code] : nodes) node_list.push_back(code);
  return CooccurrenceGraph(level, std::move(node_list), edges, max_weight);
}

}  // namespace ipcfusion
