#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "ipcfusion/cooccur.hpp"
#include "ipcfusion/error.hpp"
#include "ipcfusion/report.hpp"

using namespace ipcfusion;

namespace {

PatentRecord rec(std::string id, int year, std::vector<std::string> codes) {
  PatentRecord r;
  r.patent_id = std::move(id);
  r.date.year = year;
  for (const auto& c : codes) r.codes.push_back(parse_ipc(c));
  return r;
}

TimeSeries demo_series() {
  return TimeSeries({{2012, 52}, {2013, 120}, {2014, 230}, {2015, 390}, {2016, 600}, {2017, 850}, {2018, 1130},
                     {2019, 1420}, {2020, 1700}, {2021, 1960}, {2022, 2190}});
}

GrowthFit demo_fit() {
  GrowthFit f;
  f.model = GrowthModel::Gompertz;
  f.params = {4200.0, 4.4, 0.19};
  f.t0_year = 2012;
  f.first_year = 2012;
  f.last_year = 2022;
  return f;
}

std::string render(const SvgOptions& opts = {}) {
  std::ostringstream out;
  render_scurve_svg(demo_series(), demo_fit(), out, opts);
  return out.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("growing co-occurrence gives an increasing degree vector") {
  // G06K9 gains partners in every window and keeps the earlier ones.
  std::vector<PatentRecord> records;
  const std::vector<std::string> partners{"A01B1", "B60W30", "C12Q1", "E21B41", "F16H61", "H04L29", "H04W4", "A61B5"};
  const std::vector<int> starts{2012, 2015, 2018, 2020};
  int id = 0;
  for (std::size_t w = 0; w < starts.size(); ++w) {
    for (std::size_t p = 0; p <= 2 * w; ++p) {
      records.push_back(rec("R" + std::to_string(id++), starts[w], {"G06K9/62", partners[p]}));
    }
  }
  const auto report = window_evolution(PatentCorpus(records), WindowSpec::defaults(), IpcLevel::MainGroup, 3,
                                       Measure::Degree);
  const auto* x = report.find("G06K9");
  REQUIRE(x);
  REQUIRE(x->values.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(x->values[i] > x->values[i - 1]);
  for (bool p : x->present) CHECK(p);
}

TEST_CASE("one window is a single ranking") {
  const PatentCorpus c({rec("A", 2013, {"G06F", "H04L"}), rec("B", 2014, {"G06F", "G06N"}),
                        rec("C", 2015, {"G06N", "H04L", "A61B"})});
  const auto report = window_evolution(c, WindowSpec({2012, 2022}), IpcLevel::Subclass, 2, Measure::Betweenness);
  REQUIRE(report.windows.size() == 1);
  const auto direct = rank_top(compute_measure(build_cooccurrence(c, IpcLevel::Subclass), Measure::Betweenness), 2);
  CHECK(report.windows[0].top == direct);
  CHECK(report.normalized);
}

TEST_CASE("empty windows and absent nodes") {
  const PatentCorpus c({rec("A", 2012, {"G06F", "H04L"}), rec("B", 2021, {"G06N", "A61B"}), rec("C", 2030, {"G06N"})});
  const auto report = window_evolution(c, WindowSpec::defaults(), IpcLevel::Subclass, 5, Measure::Degree);
  CHECK(report.excluded == 1);
  REQUIRE(report.windows.size() == 4);
  CHECK(report.windows[1].empty);
  CHECK(report.windows[1].top.rows.empty());
  const auto* g06f = report.find("G06F");
  REQUIRE(g06f);
  CHECK(g06f->present == std::vector<bool>{true, false, false, false});
  CHECK(g06f->values[3] == 0.0);
  const auto j = nlohmann::json::parse(evolution_to_json(report));
  CHECK(j["windows"].size() == 4);
  CHECK(j["windows"][0]["label"] == "2012-2014");
  CHECK(j["windows"][0]["last_year"] == 2014);
  CHECK_THROWS_AS(window_evolution(c, WindowSpec::defaults(), IpcLevel::Subclass, 0, Measure::Degree), Error);
}

TEST_CASE("evolution is independent of thread count") {
  std::vector<PatentRecord> records;
  const std::vector<std::string> codes{"G06F", "G06N", "H04L", "G06K", "G06T", "A61B", "G16H", "B60W"};
  for (int i = 0; i < 200; ++i) {
    records.push_back(rec("P" + std::to_string(i), 2012 + i % 10, {codes[i % 8], codes[(i * 3 + 1) % 8]}));
  }
  const PatentCorpus c(records);
  const auto one = evolution_to_json(
      window_evolution(c, WindowSpec::defaults(), IpcLevel::Subclass, 4, Measure::Closeness, std::nullopt, 1));
  const auto many = evolution_to_json(
      window_evolution(c, WindowSpec::defaults(), IpcLevel::Subclass, 4, Measure::Closeness, std::nullopt, 4));
  CHECK(one == many);
}

TEST_CASE("svg matches the golden file") {
  const std::string svg = render();
  CHECK(render() == svg);
  const std::string path = std::string(IPCFUSION_FIXTURES) + "/scurve_golden.svg";
  if (std::getenv("IPCFUSION_UPDATE_GOLDEN")) std::ofstream(path, std::ios::binary) << svg;
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  const std::string golden{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  CHECK(svg == golden);
}

TEST_CASE("svg is well-formed xml with one root") {
  std::istringstream in(render());
  boost::property_tree::ptree tree;
  CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
  CHECK(tree.size() == 1);
  CHECK(tree.begin()->first == "svg");
  CHECK(count(render(), "<circle") == demo_series().size() + 1);
}

TEST_CASE("curve covers only the observed span when not extended") {
  SvgOptions opts;
  opts.extend_to_saturation = false;
  const std::string svg = render(opts);
  const auto start = svg.find("points=\"");
  REQUIRE(start != std::string::npos);
  const auto end = svg.find('"', start + 8);
  const std::string points = svg.substr(start + 8, end - start - 8);
  CHECK(count(points, ",") == demo_series().size());
  const std::string extended = render();
  const auto s2 = extended.find("points=\"");
  CHECK(count(extended.substr(s2, extended.find('"', s2 + 8) - s2), ",") > demo_series().size());
}

TEST_CASE("svg stream failure") {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  try {
    render_scurve_svg(demo_series(), demo_fit(), out);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SinkWriteFailure);
  }
}

TEST_CASE("text tables") {
  RankedList list{Measure::Degree, false, {{1, "G06F", 2}, {2, "H04L", 1}}};
  const auto text = format_ranked(list);
  CHECK(text.find("G06F") < text.find("H04L"));
  FusionTable t;
  t.total_assignments = 4;
  t.rows = {{"G", 2, 0.5, true}, {"D", 0, 0.0, false}};
  CHECK(format_fusion(t).find("Not found") != std::string::npos);
  IngestReport r;
  r.rows_read = 4;
  r.accepted = 3;
  r.bad_date = 1;
  CHECK(format_ingest_report(r).find("bad") != std::string::npos);
  const auto j = nlohmann::json::parse(ingest_report_to_json(r, 3, std::pair{2012, 2014}));
  CHECK(j["accepted"] == 3);
}
