#include <doctest.h>

#include <random>

#include "ipcfusion/cooccur.hpp"
#include "ipcfusion/error.hpp"
#include "oracles.hpp"

using namespace ipcfusion;

namespace {

PatentRecord rec(std::string id, std::vector<std::string> codes) {
  PatentRecord r;
  r.patent_id = std::move(id);
  r.date.year = 2015;
  for (const auto& c : codes) r.codes.push_back(parse_ipc(c));
  return r;
}

PatentCorpus p1p2p3() {
  return PatentCorpus({rec("P1", {"G06F", "H04L"}), rec("P2", {"G06F", "H04L"}), rec("P3", {"G06F", "G06N"})});
}

std::uint32_t w(const CooccurrenceGraph& g, std::string_view a, std::string_view b) {
  return g.weight(*g.find(a), *g.find(b));
}

}  // namespace

TEST_CASE("within-patent duplicates collapse to one node") {
  const auto g = build_cooccurrence(PatentCorpus({rec("P", {"G06F17/30", "G06F9/44"})}), IpcLevel::Subclass);
  CHECK(g.labels() == std::vector<std::string>{"G06F"});
  CHECK(g.edges().empty());
  CHECK(g.patent_count() == 1);
}

TEST_CASE("hand-enumerated three-patent graph") {
  const auto g = build_cooccurrence(p1p2p3(), IpcLevel::Subclass);
  CHECK(g.labels() == std::vector<std::string>{"G06F", "G06N", "H04L"});
  CHECK(g.edges().size() == 2);
  CHECK(w(g, "G06F", "H04L") == 2);
  CHECK(w(g, "G06F", "G06N") == 1);
  CHECK(w(g, "G06N", "H04L") == 0);
}

TEST_CASE("one patent at section level is a triangle") {
  const auto g = build_cooccurrence(PatentCorpus({rec("P", {"A01B", "B60W", "C12Q"})}), IpcLevel::Section);
  CHECK(g.labels() == std::vector<std::string>{"A", "B", "C"});
  CHECK(g.edges().size() == 3);
  for (const auto& e : g.edges()) CHECK(e.weight == 1);
}

TEST_CASE("codes coarser than the level are skipped") {
  const auto g = build_cooccurrence(PatentCorpus({rec("P1", {"G06", "H04L"}), rec("P2", {"G"})}), IpcLevel::Subclass);
  CHECK(g.labels() == std::vector<std::string>{"H04L"});
  CHECK(g.skipped_records() == 1);
  CHECK_THROWS_AS(build_cooccurrence(PatentCorpus(), IpcLevel::Subclass), Error);
}

TEST_CASE("binary adjacency thresholds weights and is symmetric") {
  const auto g = build_cooccurrence(PatentCorpus({rec("P1", {"G06F", "H04L"}), rec("P2", {"G06F", "H04L"}),
                                                  rec("P3", {"G06F", "H04L"}), rec("P4", {"G06F", "H04L"}),
                                                  rec("P5", {"G06F", "H04L"}), rec("P6", {"G06N"})}),
                                     IpcLevel::Subclass);
  CHECK(w(g, "G06F", "H04L") == 5);
  const auto& adj = g.adjacency();
  CHECK(adj(*g.find("G06F"), *g.find("H04L")) == 1);
  CHECK(adj(*g.find("G06F"), *g.find("G06N")) == 0);

  const auto h = build_cooccurrence(p1p2p3(), IpcLevel::Subclass);
  const auto bin = binary_adjacency(h);
  for (NodeId i = 0; i < h.node_count(); ++i) {
    CHECK(bin(i, i) == 0);
    for (NodeId j = 0; j < h.node_count(); ++j) {
      CHECK(bin(i, j) == bin(j, i));
      CHECK(bin(i, j) == (h.weight(i, j) > 0 ? 1 : 0));
    }
  }
}

TEST_CASE("edge export") {
  CHECK(export_edges(CooccurrenceGraph()).empty());
  const auto g = build_cooccurrence(p1p2p3(), IpcLevel::Subclass);
  CHECK(export_edges(g) == "G06F\tG06N\t1\nG06F\tH04L\t2\n");
}

TEST_CASE("edge export round-trips") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto oc = oracle::random_corpus(rng, 20);
    const auto g = build_cooccurrence(PatentCorpus(oc.records), IpcLevel::Subclass);
    if (g.edges().empty()) continue;
    const auto back = import_edges(export_edges(g), IpcLevel::Subclass);
    CHECK(back.edges().size() == g.edges().size());
    for (const auto& e : g.edges()) {
      const auto a = back.find(g.labels()[e.a]);
      const auto b = back.find(g.labels()[e.b]);
      REQUIRE(a);
      REQUIRE(b);
      CHECK(back.weight(*a, *b) == e.weight);
    }
    CHECK(export_edges(back) == export_edges(g));
  }
}

TEST_CASE("import rejects bad lines") {
  CHECK_THROWS_AS(import_edges("G06F\tG06N\n", IpcLevel::Subclass), Error);
  CHECK_THROWS_AS(import_edges("G06F\tG06N\t0\n", IpcLevel::Subclass), Error);
  CHECK_THROWS_AS(import_edges("G06F\tG06F\t1\n", IpcLevel::Subclass), Error);
  CHECK_THROWS_AS(import_edges("G06F\tG06\t1\n", IpcLevel::Subclass), Error);
}

TEST_CASE("validating constructor") {
  const std::vector<IpcCode> nodes{parse_ipc("H04L"), parse_ipc("G06F")};
  const CooccurrenceGraph g(IpcLevel::Subclass, nodes, {{parse_ipc("H04L"), parse_ipc("G06F"), 3}}, 3);
  CHECK(g.labels() == std::vector<std::string>{"G06F", "H04L"});
  CHECK(g.weight(0, 1) == 3);
  CHECK_THROWS_AS(CooccurrenceGraph(IpcLevel::Subclass, nodes,
                                    {{parse_ipc("H04L"), parse_ipc("G06F"), 1}, {parse_ipc("G06F"), parse_ipc("H04L"), 1}},
                                    1),
                  Error);
  CHECK_THROWS_AS(CooccurrenceGraph(IpcLevel::Subclass, nodes, {{parse_ipc("H04L"), parse_ipc("G06N"), 1}}, 1), Error);
  CHECK_THROWS_AS(CooccurrenceGraph(IpcLevel::Class, nodes, {}, 1), Error);
}

TEST_CASE("graph is independent of thread count and record order") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto oc = oracle::random_corpus(rng, 20);
    const auto g1 = build_cooccurrence(PatentCorpus(oc.records), IpcLevel::MainGroup, 1);
    const auto g4 = build_cooccurrence(PatentCorpus(oc.records), IpcLevel::MainGroup, 4);
    std::reverse(oc.records.begin(), oc.records.end());
    const auto gr = build_cooccurrence(PatentCorpus(oc.records), IpcLevel::MainGroup, 2);
    CHECK(g1 == g4);
    CHECK(g1 == gr);
  }
}
