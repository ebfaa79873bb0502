#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ipcfusion/cooccur.hpp"
#include "ipcfusion/corpus.hpp"
#include "ipcfusion/error.hpp"
#include "ipcfusion/fusion.hpp"
#include "ipcfusion/lifecycle.hpp"
#include "ipcfusion/metrics.hpp"
#include "ipcfusion/report.hpp"
#include "ipcfusion/study.hpp"

namespace fs = std::filesystem;
using namespace ipcfusion;

namespace {

const std::vector<std::string> kLevels{"section", "class", "subclass", "main-group", "subgroup"};
const std::vector<std::string> kMeasures{"degree", "weighted_degree", "betweenness", "closeness", "clustering"};

struct Common {
  std::string input;
  std::string format;
  std::string level = "subclass";
  std::string out;
  bool json = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool input_required = true) {
  auto* in = cmd->add_option("--input", c.input, "Patent records (.csv, .jsonl)");
  if (input_required) in->required();
  cmd->add_option("--format", c.format, "Input format; inferred from the extension when omitted")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--level", c.level, "IPC level for the network")->check(CLI::IsMember(kLevels));
  cmd->add_option("--out", c.out, "Write files to this directory instead of stdout");
  cmd->add_flag("--json", c.json, "Machine-readable output");
  cmd->add_option("--threads", c.threads, "Worker threads (0: all cores)")->envname("IPC_FUSION_THREADS");
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

PatentCorpus load(const Common& c) {
  return stage("ingest", [&] {
    const auto format = c.format.empty() ? infer_format(c.input) : parse_format(c.format);
    auto result = load_corpus_file(c.input, format);
    if (result.report.rejected() > 0) {
      std::cerr << fmt::format("note: {} of {} rows rejected\n", result.report.rejected(), result.report.rows_read);
    }
    if (result.corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "no usable patents in input");
    return std::move(result.corpus);
  });
}

void write_out(const fs::path& dir, const std::string& name, std::string_view bytes) {
  stage("output", [&] {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::SinkWriteFailure, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) throw Error(ErrorKind::SinkWriteFailure, fmt::format("cannot write '{}'", (dir / name).string()));
    return 0;
  });
}

std::string graph_to_json(const CooccurrenceGraph& g) {
  nlohmann::ordered_json doc;
  doc["level"] = to_string(g.level());
  doc["patents"] = g.patent_count();
  doc["nodes"] = g.labels();
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"a", g.labels()[e.a]}, {"b", g.labels()[e.b]}, {"weight", e.weight}});
  }
  return doc.dump(2) + "\n";
}

std::string one_line(std::string text) {
  for (char& ch : text) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IPC co-occurrence networks, technology fusion and S-curve lifecycle fitting", "ipcfusion"};
  app.require_subcommand(1);

  Common ingest_c, graph_c, cent_c, fusion_c, tlc_c, evo_c, study_c;

  auto* ingest = app.add_subcommand("ingest", "Validate input and report rejected rows");
  add_common(ingest, ingest_c);

  auto* graph = app.add_subcommand("graph", "Build the co-occurrence network and export weighted edges");
  add_common(graph, graph_c);

  auto* cent = app.add_subcommand("centrality", "Rank nodes by a centrality measure");
  add_common(cent, cent_c);
  std::string measure = "degree";
  std::size_t top = 10;
  bool normalize = false, raw = false;
  cent->add_option("--measure", measure, "Measure")->check(CLI::IsMember(kMeasures));
  cent->add_option("--top", top, "Rows to report")->check(CLI::PositiveNumber);
  auto* norm_flag = cent->add_flag("--normalize", normalize, "Force normalized values");
  cent->add_flag("--raw", raw, "Force raw values")->excludes(norm_flag);

  auto* fusion = app.add_subcommand("fusion", "Degree of fusion per segment");
  add_common(fusion, fusion_c);
  std::string seg_level = "section", count_level = "subclass";
  bool raw_total = false, include_absent = false;
  fusion->add_option("--segment-level", seg_level, "Level segments are grouped by")->check(CLI::IsMember(kLevels));
  fusion->add_option("--counting-level", count_level, "Level codes are counted at")->check(CLI::IsMember(kLevels));
  fusion->add_flag("--raw-total", raw_total, "Count every assignment in the total, repeats included");
  fusion->add_flag("--include-absent", include_absent, "List sections A-H with no patents");

  auto* tlc = app.add_subcommand("tlc", "Fit a growth curve to annual counts and assess maturity");
  add_common(tlc, tlc_c);
  std::string model = "auto", count_mode = "cumulative";
  int horizon = 40;
  std::optional<int> assess_year;
  tlc->add_option("--model", model, "Growth model")->check(CLI::IsMember({"gompertz", "logistic", "auto"}));
  tlc->add_option("--horizon", horizon, "Forecast years past the first observation")->check(CLI::PositiveNumber);
  tlc->add_option("--count-mode", count_mode, "Series to fit")->check(CLI::IsMember({"cumulative", "incremental"}));
  tlc->add_option("--assess-year", assess_year, "Year to classify; defaults to the last observed year");

  auto* evo = app.add_subcommand("evolution", "Track top-ranked nodes across time windows");
  add_common(evo, evo_c);
  std::vector<int> windows{2012, 2015, 2018, 2020, 2022};
  std::size_t evo_top = 10;
  std::string evo_measure = "degree";
  evo->add_option("--windows", windows, "Window boundaries y1,y2,... (half-open)")->delimiter(',');
  evo->add_option("--top", evo_top, "Nodes per window")->check(CLI::PositiveNumber);
  evo->add_option("--measure", evo_measure, "Measure")->check(CLI::IsMember(kMeasures));

  auto* study = app.add_subcommand("study", "Run every stage and write the output tree with a manifest");
  add_common(study, study_c, false);
  std::string config_path;
  study->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  std::string study_windows;
  std::optional<std::size_t> study_top;
  study->add_option("--windows", study_windows, "Window boundaries y1,y2,...");
  study->add_option("--top", study_top, "Top-k for rankings")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*ingest) {
      auto result = stage("ingest", [&] {
        const auto format = ingest_c.format.empty() ? infer_format(ingest_c.input) : parse_format(ingest_c.format);
        return load_corpus_file(ingest_c.input, format);
      });
      if (ingest_c.json) {
        std::cout << ingest_report_to_json(result.report, result.corpus.size(), result.corpus.span());
      } else {
        std::cout << format_ingest_report(result.report);
      }
      if (result.corpus.empty()) throw StageError("ingest", ErrorKind::EmptyCorpus, "no usable patents in input");
    } else if (*graph) {
      const auto corpus = load(graph_c);
      const auto g = stage("graph", [&] { return build_cooccurrence(corpus, parse_level(graph_c.level), graph_c.threads); });
      const auto bytes = graph_c.json ? graph_to_json(g) : export_edges(g);
      if (!graph_c.out.empty()) {
        write_out(graph_c.out, graph_c.json ? "edges.json" : "edges.tsv", bytes);
      } else {
        std::cout << bytes;
      }
    } else if (*cent) {
      const auto corpus = load(cent_c);
      const auto g = stage("graph", [&] { return build_cooccurrence(corpus, parse_level(cent_c.level), cent_c.threads); });
      std::optional<bool> normalized;
      if (normalize) normalized = true;
      if (raw) normalized = false;
      const auto m = parse_measure(measure);
      const auto table = stage("centrality", [&] { return compute_measure(g, m, normalized, cent_c.threads); });
      const auto ranked = rank_top(table, top);
      if (!cent_c.out.empty()) {
        write_out(cent_c.out, measure + ".csv", table_to_csv(table));
        write_out(cent_c.out, measure + ".json", ranked_to_json(ranked));
      } else {
        std::cout << (cent_c.json ? ranked_to_json(ranked) : format_ranked(ranked));
      }
    } else if (*fusion) {
      const auto corpus = load(fusion_c);
      FusionOptions opts;
      opts.total_mode = raw_total ? TotalMode::Raw : TotalMode::Deduplicated;
      opts.include_absent_sections = include_absent;
      const auto table = stage("fusion", [&] {
        return degree_of_fusion(corpus, parse_level(seg_level), parse_level(count_level), opts);
      });
      if (!fusion_c.out.empty()) {
        write_out(fusion_c.out, seg_level + ".csv", fusion_to_csv(table));
        write_out(fusion_c.out, seg_level + ".json", fusion_to_json(table));
      } else {
        std::cout << (fusion_c.json ? fusion_to_json(table) : format_fusion(table));
      }
    } else if (*tlc) {
      const auto corpus = load(tlc_c);
      stage("lifecycle", [&] {
        const auto series = annual_counts(corpus, parse_count_mode(count_mode));
        std::vector<GrowthFit> fits;
        if (model == "auto") {
          fits.push_back(fit_gompertz(series));
          fits.push_back(fit_logistic(series));
        } else {
          fits.push_back(fit_growth(parse_model(model), series));
        }
        const auto fit = select_model(fits);
        const double at = assess_year ? *assess_year : fit.last_year;
        const auto maturity = maturity_phase(fit, at);
        const auto fit_json = fit_to_json(fit, maturity, at);
        if (!tlc_c.out.empty()) {
          write_out(tlc_c.out, "fit.json", fit_json);
          write_out(tlc_c.out, "forecast.csv", forecast_to_csv(forecast(fit, horizon)));
          std::ostringstream svg;
          render_scurve_svg(series, fit, svg);
          write_out(tlc_c.out, "scurve.svg", svg.str());
        } else {
          std::cout << (tlc_c.json ? fit_json : format_fit(fit, maturity));
        }
        return 0;
      });
    } else if (*evo) {
      const auto corpus = load(evo_c);
      const auto report = stage("evolution", [&] {
        return window_evolution(corpus, WindowSpec(windows), parse_level(evo_c.level), evo_top,
                                parse_measure(evo_measure), std::nullopt, evo_c.threads);
      });
      if (!evo_c.out.empty()) {
        write_out(evo_c.out, "evolution.json", evolution_to_json(report));
      } else {
        std::cout << (evo_c.json ? evolution_to_json(report) : format_evolution(report));
      }
    } else if (*study) {
      auto config = stage("config", [&] {
        StudyConfig c;
        if (!config_path.empty()) c = load_study_config(config_path);
        if (*study->get_option("--input")) apply_setting(c, "input", study_c.input);
        if (*study->get_option("--format")) apply_setting(c, "format", study_c.format);
        if (*study->get_option("--level")) apply_setting(c, "level", study_c.level);
        if (*study->get_option("--out")) apply_setting(c, "out", study_c.out);
        if (study->get_option("--threads")->count() > 0 || std::getenv("IPC_FUSION_THREADS")) {
          c.threads = study_c.threads;
        }
        if (!study_windows.empty()) apply_setting(c, "windows", study_windows);
        if (study_top) c.top_k = *study_top;
        if (c.input.empty()) throw Error(ErrorKind::InvalidConfig, "no input given (--input or input = ...)");
        c.validate();
        return c;
      });
      Common source;
      source.input = config.input.string();
      if (config.format) source.format = std::string(to_string(*config.format));
      const auto corpus = load(source);
      const auto bundle = run_study(corpus, config);
      if (study_c.json) {
        std::cout << bundle.manifest_json;
      } else {
        for (const auto& a : bundle.artifacts) {
          for (const auto& f : a.files) std::cout << (bundle.output_dir / f.path).string() << "\n";
        }
        std::cout << (bundle.output_dir / "manifest.json").string() << "\n";
      }
      if (bundle.lifecycle_skipped) std::cerr << "note: lifecycle fit skipped: " << *bundle.lifecycle_skipped << "\n";
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.stage() << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << app.get_subcommands().front()->get_name() << ": " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
