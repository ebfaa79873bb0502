#include "ipcfusion/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "ipcfusion/error.hpp"

namespace ipcfusion {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Offset of the first invalid byte, or npos when the buffer is valid UTF-8.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

// RFC 4180 record reader. Records end at an unquoted LF (a preceding CR is
// dropped). Throws UnreadableSource on an unterminated quoted field.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {}

  bool next(std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    line = line_;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && field.empty() && !was_quoted) {
        quoted = was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n') {
        ++line_;
        if (!field.empty() && field.back() == '\r' && !was_quoted) field.pop_back();
        fields.push_back(std::move(field));
        return true;
      } else if (c == '\r' && was_quoted) {
        // CR after a closing quote belongs to the line terminator.
      } else {
        field.push_back(c);
      }
    }
    if (quoted) {
      throw Error(ErrorKind::UnreadableSource, fmt::format("unterminated quoted field starting on line {}", line));
    }
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

// Shared per-row validation used by both formats.
class RowSink {
 public:
  void add(std::string_view id, std::optional<std::string_view> date_text,
           const std::vector<std::string>& raw_codes) {
    ++report_.rows_read;
    const std::string_view trimmed_id = trim(id);
    if (trimmed_id.empty()) {
      ++report_.missing_id;
      return;
    }
    const auto date = date_text ? parse_date(*date_text) : std::nullopt;
    if (!date) {
      ++report_.bad_date;
      return;
    }
    PatentRecord record{std::string(trimmed_id), *date, {}};
    for (const auto& raw : raw_codes) {
      if (trim(raw).empty()) continue;
      if (auto code = try_parse_ipc(raw)) {
        record.codes.push_back(*code);
      } else {
        ++report_.bad_code;
      }
    }
    if (record.codes.empty()) {
      ++report_.no_valid_code;
      return;
    }
    if (!seen_.insert(record.patent_id).second) {
      ++report_.duplicate_id;
      return;
    }
    records_.push_back(std::move(record));
    ++report_.accepted;
  }

  void malformed() {
    ++report_.rows_read;
    ++report_.malformed_row;
  }

  LoadResult finish() && { return LoadResult{PatentCorpus(std::move(records_)), report_}; }

 private:
  std::vector<PatentRecord> records_;
  std::unordered_set<std::string> seen_;
  IngestReport report_;
};

std::vector<std::string> split_codes(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(';', start), list.size());
    out.emplace_back(list.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

bool blank(std::string_view line) { return trim(line).empty(); }

LoadResult load_csv(std::string_view text) {
  CsvReader reader(text);
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) {
    throw Error(ErrorKind::UnreadableSource, "missing CSV header row");
  }
  const std::vector<std::string> expected{"patent_id", "date", "ipc_codes"};
  if (fields != expected) {
    throw Error(ErrorKind::UnreadableSource,
                fmt::format("CSV header must be 'patent_id,date,ipc_codes', got '{}'", fmt::join(fields, ",")));
  }
  RowSink sink;
  while (reader.next(fields, line)) {
    if (fields.size() == 1 && blank(fields[0])) continue;
    if (fields.size() != 3) {
      sink.malformed();
      continue;
    }
    sink.add(fields[0], std::string_view(fields[1]), split_codes(fields[2]));
  }
  return std::move(sink).finish();
}

LoadResult load_jsonl(std::string_view text) {
  RowSink sink;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (blank(line)) continue;

    const auto row = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (row.is_discarded() || !row.is_object()) {
      sink.malformed();
      continue;
    }
    const auto codes_it = row.find("ipc_codes");
    if (codes_it == row.end() || !codes_it->is_array()) {
      sink.malformed();
      continue;
    }
    std::vector<std::string> codes;
    std::size_t non_string = 0;
    for (const auto& c : *codes_it) {
      if (c.is_string()) {
        codes.push_back(c.get<std::string>());
      } else {
        ++non_string;
      }
    }
    // Non-string entries are malformed codes; "#" never parses as IPC.
    codes.insert(codes.end(), non_string, "#");

    std::string id;
    if (const auto it = row.find("patent_id"); it != row.end() && it->is_string()) id = it->get<std::string>();
    std::optional<std::string> date;
    if (const auto it = row.find("date"); it != row.end() && it->is_string()) date = it->get<std::string>();
    sink.add(id, date ? std::optional<std::string_view>(*date) : std::nullopt, codes);
  }
  return std::move(sink).finish();
}

}  // namespace

std::optional<PatentDate> parse_date(std::string_view text) {
  text = trim(text);
  const auto digits = [&](std::size_t from, std::size_t count) {
    int v = 0;
    for (std::size_t i = from; i < from + count; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return -1;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text.size() == 4) {
    const int year = digits(0, 4);
    if (year < 0) return std::nullopt;
    return PatentDate{year, 0, 0};
  }
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const int year = digits(0, 4);
  const int month = digits(5, 2);
  const int day = digits(8, 2);
  if (year < 0 || month < 0 || day < 0) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  return PatentDate{year, static_cast<std::uint8_t>(month), static_cast<std::uint8_t>(day)};
}

PatentCorpus::PatentCorpus(std::vector<PatentRecord> records) : records_(std::move(records)) {
  std::unordered_set<std::string> ids;
  for (const auto& r : records_) {
    if (r.patent_id.empty()) throw Error(ErrorKind::InvalidArgument, "patent record with empty id");
    if (r.codes.empty()) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("patent '{}' has no IPC codes", r.patent_id));
    }
    if (!ids.insert(r.patent_id).second) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("duplicate patent id '{}'", r.patent_id));
    }
    if (!span_) {
      span_ = std::pair{r.year(), r.year()};
    } else {
      span_->first = std::min(span_->first, r.year());
      span_->second = std::max(span_->second, r.year());
    }
  }
}

std::string_view to_string(InputFormat format) { return format == InputFormat::Csv ? "csv" : "jsonl"; }

InputFormat parse_format(std::string_view text) {
  const auto key = lower(trim(text));
  if (key == "csv") return InputFormat::Csv;
  if (key == "jsonl") return InputFormat::Jsonl;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown input format '{}'", text));
}

InputFormat infer_format(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  return (ext == ".jsonl" || ext == ".ndjson") ? InputFormat::Jsonl : InputFormat::Csv;
}

LoadResult load_corpus(std::string_view bytes, InputFormat format) {
  if (const auto bad = find_invalid_utf8(bytes); bad != std::string_view::npos) {
    throw Error(ErrorKind::UnreadableSource, fmt::format("invalid UTF-8 at byte offset {}", bad));
  }
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  return format == InputFormat::Csv ? load_csv(bytes) : load_jsonl(bytes);
}

LoadResult load_corpus(std::istream& in, InputFormat format) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw Error(ErrorKind::UnreadableSource, "stream read failure");
  return load_corpus(std::string_view(bytes), format);
}

LoadResult load_corpus_file(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::UnreadableSource, fmt::format("cannot open '{}'", path.string()));
  return load_corpus(in, format);
}

WindowSpec::WindowSpec(std::vector<int> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) throw Error(ErrorKind::EmptySpec, "window spec needs at least two boundaries");
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= boundaries_[i - 1]) {
      throw Error(ErrorKind::EmptySpec, "window boundaries must be strictly increasing");
    }
  }
}

WindowSpec WindowSpec::defaults() { return WindowSpec({2012, 2015, 2018, 2020, 2022}); }

std::string WindowSpec::label(std::size_t window) const {
  const int first = boundaries_.at(window);
  const int last = boundaries_.at(window + 1) - 1;
  return first == last ? fmt::format("{}", first) : fmt::format("{}-{}", first, last);
}

WindowSlices slice_windows(const PatentCorpus& corpus, const WindowSpec& spec) {
  const auto& bounds = spec.boundaries();
  std::vector<std::vector<PatentRecord>> buckets(spec.window_count());
  WindowSlices out;
  for (const auto& r : corpus.records()) {
    const auto it = std::upper_bound(bounds.begin(), bounds.end(), r.year());
    if (it == bounds.begin() || it == bounds.end()) {
      ++out.excluded;
      continue;
    }
    buckets[static_cast<std::size_t>(it - bounds.begin()) - 1].push_back(r);
  }
  for (std::size_t w = 0; w < buckets.size(); ++w) {
    out.windows.push_back(CorpusWindow{spec.label(w), bounds[w], bounds[w + 1], PatentCorpus(std::move(buckets[w]))});
  }
  return out;
}

TimeSeries::TimeSeries(std::vector<SeriesPoint> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.value) || p.value < 0.0) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("series value for {} must be finite and >= 0", p.year));
    }
    if (i > 0 && p.year <= points_[i - 1].year) {
      throw Error(ErrorKind::InvalidArgument, "series years must be strictly increasing");
    }
  }
}

std::string_view to_string(CountMode mode) { return mode == CountMode::Incremental ? "incremental" : "cumulative"; }

CountMode parse_count_mode(std::string_view text) {
  const auto key = lower(trim(text));
  if (key == "incremental" || key == "annual") return CountMode::Incremental;
  if (key == "cumulative") return CountMode::Cumulative;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown count mode '{}'", text));
}

TimeSeries annual_counts(const PatentCorpus& corpus, CountMode mode) {
  const auto span = corpus.span();
  if (!span) throw Error(ErrorKind::EmptyCorpus, "cannot count an empty corpus");
  std::vector<SeriesPoint> points;
  for (int y = span->first; y <= span->second; ++y) points.push_back({y, 0.0});
  for (const auto& r : corpus.records()) points[static_cast<std::size_t>(r.year() - span->first)].value += 1.0;
  if (mode == CountMode::Cumulative) {
    for (std::size_t i = 1; i < points.size(); ++i) points[i].value += points[i - 1].value;
  }
  return TimeSeries(std::move(points));
}

}  // namespace ipcfusion
