#include "ipcfusion/fusion.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "ipcfusion/error.hpp"

namespace ipcfusion {

std::string_view to_string(TotalMode mode) { return mode == TotalMode::Deduplicated ? "deduplicated" : "raw"; }

const FusionRow* FusionTable::find(std::string_view segment) const {
  const auto it = std::find_if(rows.begin(), rows.end(), [&](const FusionRow& r) { return r.segment == segment; });
  return it == rows.end() ? nullptr : &*it;
}

std::size_t FusionTable::distinct_codes() const {
  std::size_t sum = 0;
  for (const auto& r : rows) sum += r.unique;
  return sum;
}

FusionTable degree_of_fusion(const PatentCorpus& corpus, IpcLevel segment_level, IpcLevel counting_level,
                             const FusionOptions& options) {
  if (segment_level > counting_level) {
    throw Error(ErrorKind::LevelOrderViolation,
                fmt::format("segment level {} is finer than counting level {}", to_string(segment_level),
                            to_string(counting_level)));
  }
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot measure fusion on an empty corpus");

  FusionTable table;
  table.segment_level = segment_level;
  table.counting_level = counting_level;
  table.total_mode = options.total_mode;

  std::set<IpcCode> distinct;
  for (const auto& record : corpus.records()) {
    std::vector<IpcCode> codes;
    for (const auto& c : record.codes) {
      if (auto t = try_truncate(c, counting_level)) codes.push_back(*t);
    }
    if (codes.empty()) {
      ++table.skipped_records;
      continue;
    }
    const std::size_t raw = codes.size();
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    table.total_assignments += options.total_mode == TotalMode::Raw ? raw : codes.size();
    distinct.insert(codes.begin(), codes.end());
  }
  if (table.total_assignments == 0) {
    throw Error(ErrorKind::EmptyCorpus, fmt::format("no code reaches the {} level", to_string(counting_level)));
  }

  std::map<std::string, std::size_t> unique;
  for (const auto& code : distinct) ++unique[format_ipc(truncate(code, segment_level))];
  if (options.include_absent_sections && segment_level == IpcLevel::Section) {
    for (char s = 'A'; s <= 'H'; ++s) unique.try_emplace(std::string(1, s), 0);
  }

  const auto total = static_cast<double>(table.total_assignments);
  for (const auto& [segment, count] : unique) {
    table.rows.push_back({segment, count, static_cast<double>(count) / total, count > 0});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const FusionRow& x, const FusionRow& y) {
    return x.degree_of_fusion > y.degree_of_fusion;
  });
  return table;
}

std::string fusion_to_csv(const FusionTable& table) {
  std::string out = "segment,unique,total,degree_of_fusion\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{},{}\n", r.segment, r.unique, table.total_assignments, r.degree_of_fusion);
  }
  return out;
}

std::string fusion_to_json(const FusionTable& table) {
  nlohmann::ordered_json doc;
  doc["segment_level"] = to_string(table.segment_level);
  doc["counting_level"] = to_string(table.counting_level);
  doc["total_mode"] = to_string(table.total_mode);
  doc["total"] = table.total_assignments;
  doc["distinct_codes"] = table.distinct_codes();
  doc["skipped_records"] = table.skipped_records;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    doc["rows"].push_back(
        {{"segment", r.segment}, {"unique", r.unique}, {"degree_of_fusion", r.degree_of_fusion}, {"found", r.found}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace ipcfusion
