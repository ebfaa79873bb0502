#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ipcfusion/corpus.hpp"
#include "ipcfusion/fusion.hpp"
#include "ipcfusion/lifecycle.hpp"
#include "ipcfusion/metrics.hpp"

namespace ipcfusion {

struct EvolutionWindow {
  std::string label;
  int begin_year = 0;
  int end_year = 0;  // exclusive
  std::size_t patent_count = 0;
  /// No patents (or no codes at the level) fell in this window.
  bool empty = false;
  RankedList top;
  CentralityTable table;
};

/// Per-window values for one node that made some window's top-k. `present`
/// is false where the node is not in that window's graph (value is then 0).
struct TrackedNode {
  std::string node;
  std::vector<double> values;
  std::vector<bool> present;
};

struct EvolutionReport {
  Measure measure = Measure::Degree;
  bool normalized = false;
  IpcLevel level = IpcLevel::Subclass;
  std::size_t k = 0;
  std::size_t excluded = 0;
  std::vector<EvolutionWindow> windows;
  /// Union of every window's top-k, sorted by label.
  std::vector<TrackedNode> tracked;

  const TrackedNode* find(std::string_view node) const;
};

/// Slices the corpus, builds one co-occurrence graph per window and ranks
/// `measure` in each. Empty windows are reported, not fatal.
EvolutionReport window_evolution(const PatentCorpus& corpus, const WindowSpec& spec, IpcLevel level, std::size_t k,
                                 Measure measure, std::optional<bool> normalized = std::nullopt,
                                 unsigned threads = 1);

std::string evolution_to_json(const EvolutionReport& report);

struct SvgOptions {
  /// Draw the fitted curve past the data up to the 99%-of-L year. When false
  /// the curve covers the observed span only.
  bool extend_to_saturation = true;
  /// Cap on how far past the last observation the curve may extend.
  int max_extension_years = 100;
  int width = 800;
  int height = 500;
};

/// Standalone SVG of observed points, the fitted curve and its inflection.
/// Output is byte-identical for identical inputs. Throws
/// Error{SinkWriteFailure} if the stream fails.
void render_scurve_svg(const TimeSeries& series, const GrowthFit& fit, std::ostream& out,
                       const SvgOptions& options = {});

// Aligned plain-text tables for terminals.
std::string format_ingest_report(const IngestReport& report);
std::string format_ranked(const RankedList& list);
std::string format_fusion(const FusionTable& table);
std::string format_fit(const GrowthFit& fit, const MaturityAssessment& maturity);
std::string format_evolution(const EvolutionReport& report);
std::string ingest_report_to_json(const IngestReport& report, std::size_t corpus_size,
                                  std::optional<std::pair<int, int>> span);

}  // namespace ipcfusion
