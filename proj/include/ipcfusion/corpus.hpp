#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ipcfusion/ipc.hpp"

namespace ipcfusion {

/// Calendar date of a record. Month and day are 0 when the source gave a
/// bare year; only the year participates in analyses.
struct PatentDate {
  int year = 0;
  std::uint8_t month = 0;
  std::uint8_t day = 0;

  auto operator<=>(const PatentDate&) const = default;
};

/// Accepts "YYYY-MM-DD" (a real calendar date) or "YYYY".
std::optional<PatentDate> parse_date(std::string_view text);

struct PatentRecord {
  std::string patent_id;
  PatentDate date;
  std::vector<IpcCode> codes;

  int year() const noexcept { return date.year; }
  bool operator==(const PatentRecord&) const = default;
};

/// Immutable, validated set of patent records: every record has at least
/// one code and ids are unique.
class PatentCorpus {
 public:
  PatentCorpus() = default;
  /// Throws Error{InvalidArgument} on an empty id, an empty code list or a
  /// duplicate id.
  explicit PatentCorpus(std::vector<PatentRecord> records);

  const std::vector<PatentRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  /// (min_year, max_year); nullopt for an empty corpus.
  std::optional<std::pair<int, int>> span() const noexcept { return span_; }

  bool operator==(const PatentCorpus& other) const { return records_ == other.records_; }

 private:
  std::vector<PatentRecord> records_;
  std::optional<std::pair<int, int>> span_;
};

enum class InputFormat { Csv, Jsonl };

std::string_view to_string(InputFormat format);
/// "csv" or "jsonl" (case-insensitive); Error{InvalidArgument} otherwise.
InputFormat parse_format(std::string_view text);
/// ".jsonl"/".ndjson" map to Jsonl, anything else to Csv.
InputFormat infer_format(const std::filesystem::path& path);

/// Per-reason counts of what ingestion dropped. A rejected row is counted
/// under exactly one of missing_id, bad_date, no_valid_code, malformed_row
/// or duplicate_id; bad_code counts individual dropped codes.
struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t accepted = 0;
  std::size_t missing_id = 0;
  std::size_t bad_date = 0;
  std::size_t bad_code = 0;
  std::size_t no_valid_code = 0;
  std::size_t malformed_row = 0;
  std::size_t duplicate_id = 0;

  std::size_t rejected() const noexcept {
    return missing_id + bad_date + no_valid_code + malformed_row + duplicate_id;
  }
  bool operator==(const IngestReport&) const = default;
};

struct LoadResult {
  PatentCorpus corpus;
  IngestReport report;
};

/// Parses a whole CSV or JSONL document. Row-level problems are counted in
/// the report; container-level problems (invalid UTF-8, wrong CSV header,
/// unterminated quote) throw Error{UnreadableSource}.
LoadResult load_corpus(std::string_view bytes, InputFormat format);
LoadResult load_corpus(std::istream& in, InputFormat format);
/// Throws Error{UnreadableSource} if the file cannot be opened.
LoadResult load_corpus_file(const std::filesystem::path& path, InputFormat format);

/// Half-open year windows [b0,b1), [b1,b2), ...
class WindowSpec {
 public:
  /// Throws Error{EmptySpec} unless there are >= 2 strictly increasing years.
  explicit WindowSpec(std::vector<int> boundaries);

  /// 2012-2014, 2015-2017, 2018-2019, 2020-2021. A convention, not a fact
  /// about any particular dataset.
  static WindowSpec defaults();

  const std::vector<int>& boundaries() const noexcept { return boundaries_; }
  std::size_t window_count() const noexcept { return boundaries_.size() - 1; }
  /// "2012-2014" for [2012,2015); "2018" for a single-year window.
  std::string label(std::size_t window) const;

 private:
  std::vector<int> boundaries_;
};

struct CorpusWindow {
  std::string label;
  int begin_year = 0;
  int end_year = 0;  // exclusive
  PatentCorpus corpus;
};

struct WindowSlices {
  std::vector<CorpusWindow> windows;
  std::size_t excluded = 0;
};

WindowSlices slice_windows(const PatentCorpus& corpus, const WindowSpec& spec);

struct SeriesPoint {
  int year = 0;
  double value = 0.0;

  bool operator==(const SeriesPoint&) const = default;
};

/// Yearly observations with strictly increasing years and finite,
/// non-negative values.
class TimeSeries {
 public:
  TimeSeries() = default;
  /// Throws Error{InvalidArgument} if the invariants do not hold.
  explicit TimeSeries(std::vector<SeriesPoint> points);

  const std::vector<SeriesPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const SeriesPoint& operator[](std::size_t i) const { return points_[i]; }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<SeriesPoint> points_;
};

enum class CountMode { Incremental, Cumulative };

std::string_view to_string(CountMode mode);
CountMode parse_count_mode(std::string_view text);

/// Patents per year over the corpus span, zero-filling gap years; the
/// cumulative mode is the running sum. Throws Error{EmptyCorpus}.
TimeSeries annual_counts(const PatentCorpus& corpus, CountMode mode);

}  // namespace ipcfusion
