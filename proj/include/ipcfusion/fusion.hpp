#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipcfusion/corpus.hpp"
#include "ipcfusion/ipc.hpp"

namespace ipcfusion {

/// How the denominator counts codes: once per (patent, code) after
/// truncation, or every raw code occurrence.
enum class TotalMode { Deduplicated, Raw };

std::string_view to_string(TotalMode mode);

struct FusionOptions {
  TotalMode total_mode = TotalMode::Deduplicated;
  /// Adds a zero row for every section A..H absent from the corpus. Only
  /// meaningful when segments are sections.
  bool include_absent_sections = false;
};

struct FusionRow {
  std::string segment;
  std::size_t unique = 0;
  double degree_of_fusion = 0.0;
  bool found = true;

  bool operator==(const FusionRow&) const = default;
};

/// Degree of fusion per segment: unique codes in the segment over all code
/// assignments in the corpus. Rows are sorted by descending ratio, then by
/// segment label.
struct FusionTable {
  IpcLevel segment_level = IpcLevel::Section;
  IpcLevel counting_level = IpcLevel::Subclass;
  TotalMode total_mode = TotalMode::Deduplicated;
  std::size_t total_assignments = 0;
  /// Patents with no code at the counting level.
  std::size_t skipped_records = 0;
  std::vector<FusionRow> rows;

  const FusionRow* find(std::string_view segment) const;
  /// Distinct codes at the counting level (sum of unique counts).
  std::size_t distinct_codes() const;

  bool operator==(const FusionTable&) const = default;
};

/// Throws Error{LevelOrderViolation} if segment_level is finer than
/// counting_level and Error{EmptyCorpus} if no code reaches counting_level.
FusionTable degree_of_fusion(const PatentCorpus& corpus, IpcLevel segment_level, IpcLevel counting_level,
                             const FusionOptions& options = {});

/// "segment,unique,total,degree_of_fusion"; absent segments have ratio 0.
std::string fusion_to_csv(const FusionTable& table);
std::string fusion_to_json(const FusionTable& table);

}  // namespace ipcfusion
