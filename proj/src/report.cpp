#include "ipcfusion/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "ipcfusion/cooccur.hpp"
#include "ipcfusion/error.hpp"
#include "ipcfusion/parallel.hpp"

namespace ipcfusion {

const TrackedNode* EvolutionReport::find(std::string_view node) const {
  const auto it = std::find_if(tracked.begin(), tracked.end(), [&](const TrackedNode& t) { return t.node == node; });
  return it == tracked.end() ? nullptr : &*it;
}

EvolutionReport window_evolution(const PatentCorpus& corpus, const WindowSpec& spec, IpcLevel level, std::size_t k,
                                 Measure measure, std::optional<bool> normalized, unsigned threads) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "top-k must be >= 1");
  const bool norm = normalized.value_or(default_normalized(measure));
  auto slices = slice_windows(corpus, spec);

  EvolutionReport report;
  report.measure = measure;
  report.normalized = norm;
  report.level = level;
  report.k = k;
  report.excluded = slices.excluded;
  report.windows.resize(slices.windows.size());

  parallel_for(slices.windows.size(), threads, [&](std::size_t w) {
    const auto& slice = slices.windows[w];
    auto& out = report.windows[w];
    out.label = slice.label;
    out.begin_year = slice.begin_year;
    out.end_year = slice.end_year;
    out.patent_count = slice.corpus.size();
    out.top = RankedList{measure, norm, {}};
    out.table = CentralityTable{measure, norm, {}};
    if (slice.corpus.empty()) {
      out.empty = true;
      return;
    }
    const auto graph = build_cooccurrence(slice.corpus, level);
    if (graph.node_count() == 0) {
      out.empty = true;
      return;
    }
    out.table = compute_measure(graph, measure, norm);
    out.top = rank_top(out.table, k);
  });

  std::map<std::string, TrackedNode> tracked;
  for (const auto& w : report.windows) {
    for (const auto& row : w.top.rows) tracked.try_emplace(row.node, TrackedNode{row.node, {}, {}});
  }
  for (auto& [node, t] : tracked) {
    for (const auto& w : report.windows) {
      const auto v = w.table.value(node);
      t.values.push_back(v.value_or(0.0));
      t.present.push_back(v.has_value());
    }
    report.tracked.push_back(std::move(t));
  }
  return report;
}

std::string evolution_to_json(const EvolutionReport& report) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["measure"] = to_string(report.measure);
  doc["normalized"] = report.normalized;
  doc["level"] = to_string(report.level);
  doc["top"] = report.k;
  doc["excluded_records"] = report.excluded;
  doc["windows"] = json::array();
  for (const auto& w : report.windows) {
    json rows = json::array();
    for (const auto& r : w.top.rows) rows.push_back({{"rank", r.rank}, {"node", r.node}, {"value", r.value}});
    doc["windows"].push_back({{"label", w.label},
                              {"begin_year", w.begin_year},
                              {"last_year", w.end_year - 1},
                              {"patents", w.patent_count},
                              {"empty", w.empty},
                              {"rows", rows}});
  }
  doc["tracked"] = json::array();
  for (const auto& t : report.tracked) {
    json present = json::array();
    for (bool p : t.present) present.push_back(p);
    doc["tracked"].push_back({{"node", t.node}, {"values", t.values}, {"present", present}});
  }
  return doc.dump(2) + "\n";
}

namespace {

// Round step (1, 2, 5 x 10^k) giving at most `max_ticks` intervals.
double nice_step(double span, int max_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / max_ticks;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * magnitude >= raw) return m * magnitude;
  }
  return 10.0 * magnitude;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void render_scurve_svg(const TimeSeries& series, const GrowthFit& fit, std::ostream& out, const SvgOptions& options) {
  if (series.empty()) throw Error(ErrorKind::InvalidArgument, "cannot plot an empty series");

  const int first = series[0].year;
  const int last = series[series.size() - 1].year;
  int end = last;
  if (options.extend_to_saturation) {
    const double sat = year_reaching(fit, 0.99);
    if (std::isfinite(sat)) {
      end = std::clamp(static_cast<int>(std::ceil(sat)), last, last + options.max_extension_years);
    }
  }

  double y_top = 0.0;
  for (const auto& pt : series.points()) y_top = std::max(y_top, pt.value);
  for (int year = first; year <= end; ++year) y_top = std::max(y_top, fit.predict(year));
  y_top = y_top > 0.0 ? y_top * 1.05 : 1.0;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;
  const double x_span = std::max(1, end - first);
  const auto px = [&](double year) { return left + (year - first) / x_span * plot_w; };
  const auto py = [&](double value) { return top + plot_h - value / y_top * plot_h; };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
      options.width, options.height);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", options.width,
                     options.height);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     left + plot_w / 2, escape_xml(fmt::format("Cumulative patents and fitted {} curve",
                                                               to_string(fit.model))));

  // Axes and ticks.
  svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", left, top + plot_h,
                     left + plot_w);
  svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", left, top, top + plot_h);
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const int x_step = std::max(1, static_cast<int>(nice_step(end - first, 10)));
  for (int year = first; year <= end; year += x_step) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(year),
                       top + plot_h + 16, year);
  }
  const double y_step = nice_step(y_top, 5);
  for (int i = 0; i * y_step <= y_top; ++i) {
    const double v = i * y_step;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", left - 6, py(v) + 4, v);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Year</text>\n", left + plot_w / 2,
                     top + plot_h + 38.0);
  svg += fmt::format("<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">"
                     "Cumulative patents</text>\n",
                     top + plot_h / 2);
  svg += "</g>\n";

  // Fitted curve, sampled yearly.
  std::string points;
  for (int year = first; year <= end; ++year) {
    if (!points.empty()) points.push_back(' ');
    points += fmt::format("{:.2f},{:.2f}", px(year), py(fit.predict(year)));
  }
  svg += fmt::format("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>\n", points);

  // Observations.
  svg += "<g fill=\"#d62728\">\n";
  for (const auto& pt : series.points()) {
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\"/>\n", px(pt.year), py(pt.value));
  }
  svg += "</g>\n";

  // Inflection marker.
  const double inflection = fit.t0_year + fit.inflection_t();
  if (std::isfinite(inflection) && inflection >= first && inflection <= end) {
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
        px(inflection), top, top + plot_h);
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n",
                       px(inflection), py(fit.predict(inflection)));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">"
                       "inflection {:.1f}</text>\n",
                       px(inflection) + 6, top + 14, inflection);
  }
  svg += "</svg>\n";

  out << svg;
  out.flush();
  if (!out) throw Error(ErrorKind::SinkWriteFailure, "failed writing SVG output");
}

std::string format_ingest_report(const IngestReport& r) {
  std::string out;
  out += fmt::format("{:<16}{:>8}\n", "rows read", r.rows_read);
  out += fmt::format("{:<16}{:>8}\n", "accepted", r.accepted);
  out += fmt::format("{:<16}{:>8}\n", "missing id", r.missing_id);
  out += fmt::format("{:<16}{:>8}\n", "bad date", r.bad_date);
  out += fmt::format("{:<16}{:>8}\n", "bad code", r.bad_code);
  out += fmt::format("{:<16}{:>8}\n", "no valid code", r.no_valid_code);
  out += fmt::format("{:<16}{:>8}\n", "malformed row", r.malformed_row);
  out += fmt::format("{:<16}{:>8}\n", "duplicate id", r.duplicate_id);
  return out;
}

std::string ingest_report_to_json(const IngestReport& r, std::size_t corpus_size,
                                  std::optional<std::pair<int, int>> span) {
  nlohmann::ordered_json doc;
  doc["rows_read"] = r.rows_read;
  doc["accepted"] = r.accepted;
  doc["missing_id"] = r.missing_id;
  doc["bad_date"] = r.bad_date;
  doc["bad_code"] = r.bad_code;
  doc["no_valid_code"] = r.no_valid_code;
  doc["malformed_row"] = r.malformed_row;
  doc["duplicate_id"] = r.duplicate_id;
  doc["corpus_size"] = corpus_size;
  if (span) {
    doc["first_year"] = span->first;
    doc["last_year"] = span->second;
  }
  return doc.dump(2) + "\n";
}

std::string format_ranked(const RankedList& list) {
  std::size_t width = 4;
  for (const auto& r : list.rows) width = std::max(width, r.node.size());
  std::string out = fmt::format("{:>4}  {:<{}}  {}\n", "rank", "node", width, to_string(list.measure));
  for (const auto& r : list.rows) out += fmt::format("{:>4}  {:<{}}  {:.6g}\n", r.rank, r.node, width, r.value);
  return out;
}

std::string format_fusion(const FusionTable& t) {
  std::string out = fmt::format("degree of fusion by {} (counting {}, total {} {})\n", to_string(t.segment_level),
                                to_string(t.counting_level), t.total_assignments, to_string(t.total_mode));
  std::size_t width = 7;
  for (const auto& r : t.rows) width = std::max(width, r.segment.size());
  out += fmt::format("{:<{}}  {:>7}  {}\n", "segment", width, "unique", "D_F");
  for (const auto& r : t.rows) {
    if (r.found) {
      out += fmt::format("{:<{}}  {:>7}  {:.4g}\n", r.segment, width, r.unique, r.degree_of_fusion);
    } else {
      out += fmt::format("{:<{}}  {:>7}  Not found\n", r.segment, width, r.unique);
    }
  }
  return out;
}

std::string format_fit(const GrowthFit& fit, const MaturityAssessment& m) {
  std::string out;
  out += fmt::format("model            {}\n", to_string(fit.model));
  out += fmt::format("L                {:.6g}\n", fit.params.L);
  out += fmt::format("a                {:.6g}\n", fit.params.a);
  out += fmt::format("b                {:.6g}\n", fit.params.b);
  out += fmt::format("t0 year          {}\n", fit.t0_year);
  out += fmt::format("r2               {:.6f}\n", fit.metrics.r_squared);
  out += fmt::format("rmse             {:.6g}\n", fit.metrics.rmse);
  out += fit.metrics.mape ? fmt::format("mape             {:.4f}%\n", *fit.metrics.mape)
                          : std::string("mape             n/a\n");
  out += fmt::format("phase            {} ({:.1f}% of L)\n", to_string(m.phase), 100.0 * m.fraction_of_L);
  out += fmt::format("inflection year  {:.2f}\n", m.inflection_year);
  out += fmt::format("saturation year  {:.2f}\n", m.saturation_year);
  out += fmt::format("converged        {}\n", fit.converged ? "yes" : "no (best iterate)");
  return out;
}

std::string format_evolution(const EvolutionReport& report) {
  std::size_t width = 4;
  for (const auto& t : report.tracked) width = std::max(width, t.node.size());
  std::string out = fmt::format("{:<{}}", "node", width);
  for (const auto& w : report.windows) out += fmt::format("  {:>10}", w.label);
  out += '\n';
  for (const auto& t : report.tracked) {
    out += fmt::format("{:<{}}", t.node, width);
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      out += t.present[i] ? fmt::format("  {:>10.6g}", t.values[i]) : fmt::format("  {:>10}", "-");
    }
    out += '\n';
  }
  return out;
}

}  // namespace ipcfusion
