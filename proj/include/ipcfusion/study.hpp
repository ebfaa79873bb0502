#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipcfusion/corpus.hpp"
#include "ipcfusion/fusion.hpp"
#include "ipcfusion/ipc.hpp"
#include "ipcfusion/lifecycle.hpp"
#include "ipcfusion/metrics.hpp"

namespace ipcfusion {

/// Everything an end-to-end run needs. Config files use one `key = value`
/// per line (TOML subset: quoted or bare strings, integers, booleans,
/// integer arrays, `#` comments); see apply_setting for the keys.
struct StudyConfig {
  std::filesystem::path input;
  std::optional<InputFormat> format;  // inferred from the input extension when unset
  IpcLevel analysis_level = IpcLevel::Subclass;
  IpcLevel counting_level = IpcLevel::Subclass;
  std::vector<int> windows{2012, 2015, 2018, 2020, 2022};
  std::size_t top_k = 10;
  bool normalize_degree = false;
  bool normalize_betweenness = true;
  bool normalize_closeness = true;
  Measure evolution_measure = Measure::Degree;
  std::optional<GrowthModel> model;  // unset: fit both and select
  CountMode count_mode = CountMode::Cumulative;
  int horizon_years = 40;
  std::optional<int> assess_year;  // defaults to the last observed year
  TotalMode total_mode = TotalMode::Deduplicated;
  std::filesystem::path output_dir = "study_out";
  unsigned threads = 0;  // 0: all hardware threads

  /// Throws Error{InvalidConfig} when a value is out of range.
  void validate() const;
};

/// Sets one key. Keys: input, format, level, counting_level, windows, top,
/// normalize_degree, normalize_betweenness, normalize_closeness,
/// evolution_measure, model (gompertz|logistic|auto), count_mode, horizon,
/// assess_year, total_mode, out, threads. Throws Error{InvalidConfig}.
void apply_setting(StudyConfig& config, std::string_view key, std::string_view value);

/// Parses a config document on top of `base`. Throws Error{InvalidConfig}
/// with the offending line number.
StudyConfig parse_study_config(std::string_view text, StudyConfig base = {});
/// As parse_study_config; a relative `input` set in the file is resolved
/// against the file's directory.
StudyConfig load_study_config(const std::filesystem::path& path, StudyConfig base = {});

struct ArtifactFile {
  std::string path;  // relative to the output directory, '/'-separated
  std::string sha256;
};

/// A logical output (one table, one chart) and the files that carry it.
struct StudyArtifact {
  std::string name;
  std::vector<ArtifactFile> files;
};

struct StudyBundle {
  std::filesystem::path output_dir;
  std::vector<StudyArtifact> artifacts;
  std::string manifest_json;
  /// Set when the growth curve could not be fitted; the lifecycle stage then
  /// writes only fit.json describing why.
  std::optional<std::string> lifecycle_skipped;
};

std::string sha256_hex(std::string_view bytes);

/// Runs every stage and writes the output tree:
///   centrality/{degree,betweenness,closeness,clustering}.{csv,json}
///   fusion/{section,class,subclass}.{csv,json}
///   lifecycle/{fit.json,forecast.csv,scurve.svg}
///   evolution/evolution.json
///   manifest.json
/// Errors are rethrown as StageError naming the failing stage. Output bytes
/// do not depend on config.threads.
StudyBundle run_study(const PatentCorpus& corpus, const StudyConfig& config);

}  // namespace ipcfusion
