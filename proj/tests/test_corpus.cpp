#include <doctest.h>

#include <map>
#include <sstream>

#include "ipcfusion/corpus.hpp"
#include "ipcfusion/error.hpp"

using namespace ipcfusion;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidArgument;
}

const char* kHeader = "patent_id,date,ipc_codes\n";

PatentRecord rec(std::string id, int year, std::vector<std::string> codes) {
  PatentRecord r;
  r.patent_id = std::move(id);
  r.date.year = year;
  for (const auto& c : codes) r.codes.push_back(parse_ipc(c));
  return r;
}

}  // namespace

TEST_CASE("bad date row is rejected and counted") {
  const std::string csv = std::string(kHeader) +
                          "IN-1,2012-03-01,G06F 17/30\n"
                          "IN-2,13/45/2012,G06N 3/04\n"
                          "IN-3,2013-07-15,H04L 29/06\n"
                          "IN-4,2014,G06K 9/62\n";
  const auto r = load_corpus(csv, InputFormat::Csv);
  CHECK(r.corpus.size() == 3);
  CHECK(r.report.bad_date == 1);
  CHECK(r.report.rows_read == 4);
  CHECK(r.report.accepted == 3);
  CHECK(r.report.rejected() == 1);
}

TEST_CASE("partially valid code list is salvaged") {
  const auto r = load_corpus(std::string(kHeader) + "IN-1,2012-01-01,G06F;XYZ\n", InputFormat::Csv);
  REQUIRE(r.corpus.size() == 1);
  CHECK(r.corpus.records()[0].codes.size() == 1);
  CHECK(r.report.bad_code == 1);
  CHECK(r.report.rejected() == 0);
}

TEST_CASE("duplicate ids keep the first row") {
  const auto r = load_corpus(std::string(kHeader) +
                                 "IN-1,2012-01-01,G06F\n"
                                 "IN-1,2013-01-01,H04L\n",
                             InputFormat::Csv);
  REQUIRE(r.corpus.size() == 1);
  CHECK(r.corpus.records()[0].date.year == 2012);
  CHECK(r.report.duplicate_id == 1);
}

TEST_CASE("rows with nothing usable") {
  const auto r = load_corpus(std::string(kHeader) +
                                 ",2012-01-01,G06F\n"
                                 "IN-2,2012-02-30,G06F\n"
                                 "IN-3,2012-01-01,XYZ;123\n"
                                 "IN-4,2012-01-01,\n"
                                 "IN-5,2012-01-01\n",
                             InputFormat::Csv);
  CHECK(r.corpus.empty());
  CHECK(r.report.missing_id == 1);
  CHECK(r.report.bad_date == 1);
  CHECK(r.report.no_valid_code == 2);
  CHECK(r.report.bad_code == 2);
  CHECK(r.report.malformed_row == 1);
}

TEST_CASE("quoted csv fields") {
  const auto r = load_corpus(std::string(kHeader) + "\"IN,1\",2012-05-05,\"G06F 17/30; G06N 3/04\"\r\n", InputFormat::Csv);
  REQUIRE(r.corpus.size() == 1);
  CHECK(r.corpus.records()[0].patent_id == "IN,1");
  CHECK(r.corpus.records()[0].codes.size() == 2);
}

TEST_CASE("unreadable sources") {
  CHECK(kind_of([] { load_corpus("id,when,codes\nX,2012,G06F\n", InputFormat::Csv); }) ==
        ErrorKind::UnreadableSource);
  CHECK(kind_of([] { load_corpus(std::string(kHeader) + "\"IN-1,2012,G06F\n", InputFormat::Csv); }) ==
        ErrorKind::UnreadableSource);
  CHECK(kind_of([] { load_corpus(std::string(kHeader) + "IN-1,2012,G06F\xff\n", InputFormat::Csv); }) ==
        ErrorKind::UnreadableSource);
  CHECK(kind_of([] { load_corpus_file("/nonexistent/file.csv", InputFormat::Csv); }) == ErrorKind::UnreadableSource);
}

TEST_CASE("utf-8 byte order mark is ignored") {
  const auto r = load_corpus("\xEF\xBB\xBF" + std::string(kHeader) + "IN-1,2012,G06F\n", InputFormat::Csv);
  CHECK(r.corpus.size() == 1);
}

TEST_CASE("jsonl input") {
  const std::string jsonl =
      "{\"patent_id\":\"IN-1\",\"date\":\"2012-03-01\",\"ipc_codes\":[\"G06F 17/30\",\"G06N 3/04\"]}\n"
      "\n"
      "{\"patent_id\":\"IN-2\",\"date\":\"2013\",\"ipc_codes\":[\"H04L\", 7]}\n"
      "not json\n"
      "[1,2]\n"
      "{\"patent_id\":\"IN-3\",\"date\":\"2013\",\"ipc_codes\":\"G06F\"}\n";
  const auto r = load_corpus(jsonl, InputFormat::Jsonl);
  CHECK(r.corpus.size() == 2);
  CHECK(r.report.malformed_row == 3);
  CHECK(r.report.bad_code == 1);
  std::istringstream in(jsonl);
  CHECK(load_corpus(in, InputFormat::Jsonl).corpus == r.corpus);
}

TEST_CASE("format names") {
  CHECK(infer_format("x/y.jsonl") == InputFormat::Jsonl);
  CHECK(infer_format("x/y.ndjson") == InputFormat::Jsonl);
  CHECK(infer_format("x/y.csv") == InputFormat::Csv);
  CHECK(parse_format("JSONL") == InputFormat::Jsonl);
  CHECK(kind_of([] { parse_format("xml"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("dates") {
  CHECK(parse_date("2020-02-29").has_value());
  CHECK_FALSE(parse_date("2021-02-29").has_value());
  CHECK(parse_date("2019")->year == 2019);
  CHECK(parse_date("2019")->month == 0);
  CHECK_FALSE(parse_date("19-01-01").has_value());
  CHECK_FALSE(parse_date("2019-1-1").has_value());
}

TEST_CASE("corpus invariants") {
  CHECK(kind_of([] { PatentCorpus({rec("A", 2012, {"G06F"}), rec("A", 2013, {"G06N"})}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { PatentCorpus({rec("", 2012, {"G06F"})}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { PatentCorpus({rec("A", 2012, {})}); }) == ErrorKind::InvalidArgument);
  const PatentCorpus c({rec("A", 2014, {"G06F"}), rec("B", 2012, {"G06N"})});
  CHECK(c.span() == std::pair{2012, 2014});
  CHECK_FALSE(PatentCorpus().span().has_value());
}

TEST_CASE("default windows partition 2012-2021") {
  const auto spec = WindowSpec::defaults();
  REQUIRE(spec.window_count() == 4);
  CHECK(spec.label(0) == "2012-2014");
  CHECK(spec.label(1) == "2015-2017");
  CHECK(spec.label(2) == "2018-2019");
  CHECK(spec.label(3) == "2020-2021");

  std::vector<PatentRecord> records;
  for (int y = 2012; y <= 2021; ++y) records.push_back(rec("P" + std::to_string(y), y, {"G06F"}));
  const auto slices = slice_windows(PatentCorpus(records), spec);
  CHECK(slices.excluded == 0);
  // Every year lands in exactly one window, and windows are contiguous.
  std::map<int, int> hits;
  for (const auto& w : slices.windows)
    for (const auto& r : w.corpus.records()) {
      ++hits[r.date.year];
      CHECK(r.date.year >= w.begin_year);
      CHECK(r.date.year < w.end_year);
    }
  CHECK(hits.size() == 10);
  for (const auto& [year, n] : hits) CHECK(n == 1);
  CHECK(slices.windows[0].corpus.size() == 3);
  CHECK(slices.windows[3].corpus.size() == 2);
}

TEST_CASE("out-of-range records are excluded") {
  const PatentCorpus c({rec("A", 2011, {"G06F"}), rec("B", 2012, {"G06F"}), rec("C", 2022, {"G06N"})});
  const auto slices = slice_windows(c, WindowSpec::defaults());
  CHECK(slices.excluded == 2);
}

TEST_CASE("a single window is the identity partition") {
  const PatentCorpus c({rec("A", 2011, {"G06F"}), rec("B", 2012, {"G06F"}), rec("C", 2021, {"G06N"})});
  const auto slices = slice_windows(c, WindowSpec({2012, 2022}));
  REQUIRE(slices.windows.size() == 1);
  CHECK(slices.windows[0].corpus == PatentCorpus({rec("B", 2012, {"G06F"}), rec("C", 2021, {"G06N"})}));
  CHECK(slices.excluded == 1);
}

TEST_CASE("window spec validation") {
  CHECK(kind_of([] { WindowSpec({2012}); }) == ErrorKind::EmptySpec);
  CHECK(kind_of([] { WindowSpec({2012, 2012}); }) == ErrorKind::EmptySpec);
  CHECK(kind_of([] { WindowSpec({2015, 2012}); }) == ErrorKind::EmptySpec);
  CHECK(WindowSpec({2018, 2019}).label(0) == "2018");
}

TEST_CASE("annual counts fill gaps") {
  const PatentCorpus c({rec("A", 2012, {"G06F"}), rec("B", 2012, {"G06N"}), rec("C", 2014, {"H04L"})});
  const auto inc = annual_counts(c, CountMode::Incremental);
  CHECK(inc.points() == std::vector<SeriesPoint>{{2012, 2}, {2013, 0}, {2014, 1}});
  const auto cum = annual_counts(c, CountMode::Cumulative);
  // Prefix sums of the incremental series.
  double running = 0;
  REQUIRE(cum.size() == inc.size());
  for (std::size_t i = 0; i < inc.size(); ++i) {
    running += inc[i].value;
    CHECK(cum[i].year == inc[i].year);
    CHECK(cum[i].value == running);
  }
  CHECK(cum.points() == std::vector<SeriesPoint>{{2012, 2}, {2013, 2}, {2014, 3}});
  CHECK(kind_of([] { annual_counts(PatentCorpus(), CountMode::Cumulative); }) == ErrorKind::EmptyCorpus);
}

TEST_CASE("time series invariants") {
  CHECK(kind_of([] { TimeSeries({{2012, 1}, {2012, 2}}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { TimeSeries({{2012, -1}}); }) == ErrorKind::InvalidArgument);
}
