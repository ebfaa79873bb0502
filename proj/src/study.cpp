#include <algorithm>
#include <array>
#include <iterator>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "ipcfusion/cooccur.hpp"
#include "ipcfusion/error.hpp"
#include "ipcfusion/parallel.hpp"
#include "ipcfusion/report.hpp"
#include "ipcfusion/study.hpp"

namespace ipcfusion {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error(ErrorKind::SinkWriteFailure, "sha256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

// Collects artifacts in memory so nothing is written until every stage ran.
class Outputs {
 public:
  void add(std::string artifact, std::string path, std::string bytes) {
    auto it = std::find_if(order_.begin(), order_.end(), [&](const auto& a) { return a.name == artifact; });
    if (it == order_.end()) {
      order_.push_back({std::move(artifact), {}});
      it = std::prev(order_.end());
    }
    it->files.push_back({path, sha256_hex(bytes)});
    files_.emplace_back(std::move(path), std::move(bytes));
  }

  const std::vector<StudyArtifact>& artifacts() const { return order_; }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::vector<StudyArtifact> order_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <typename F>
auto stage(std::string_view name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(std::string(name), e);
  }
}

nlohmann::ordered_json config_echo(const StudyConfig& c) {
  nlohmann::ordered_json j;
  j["level"] = to_string(c.analysis_level);
  j["counting_level"] = to_string(c.counting_level);
  j["windows"] = c.windows;
  j["top"] = c.top_k;
  j["normalize_degree"] = c.normalize_degree;
  j["normalize_betweenness"] = c.normalize_betweenness;
  j["normalize_closeness"] = c.normalize_closeness;
  j["evolution_measure"] = to_string(c.evolution_measure);
  j["model"] = c.model ? std::string(to_string(*c.model)) : std::string("auto");
  j["count_mode"] = to_string(c.count_mode);
  j["horizon"] = c.horizon_years;
  j["assess_year"] = c.assess_year ? nlohmann::ordered_json(*c.assess_year) : nlohmann::ordered_json(nullptr);
  j["total_mode"] = to_string(c.total_mode);
  return j;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::SinkWriteFailure, fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorKind::SinkWriteFailure, fmt::format("cannot write '{}'", path.string()));
}

}  // namespace

StudyBundle run_study(const PatentCorpus& corpus, const StudyConfig& config) {
  stage("config", [&] {
    config.validate();
    return 0;
  });
  if (corpus.empty()) throw StageError("ingest", ErrorKind::EmptyCorpus, "corpus has no usable patents");
  const unsigned threads = resolve_threads(config.threads);

  StudyBundle bundle;
  bundle.output_dir = config.output_dir;
  Outputs out;

  const auto graph = stage("graph", [&] { return build_cooccurrence(corpus, config.analysis_level, threads); });

  stage("centrality", [&] {
    const std::array<std::pair<Measure, bool>, 4> measures{{
        {Measure::Degree, config.normalize_degree},
        {Measure::Betweenness, config.normalize_betweenness},
        {Measure::Closeness, config.normalize_closeness},
        {Measure::Clustering, true},
    }};
    for (const auto& [measure, normalized] : measures) {
      const auto table = compute_measure(graph, measure, normalized, threads);
      const std::string name(to_string(measure));
      out.add("centrality/" + name, "centrality/" + name + ".csv", table_to_csv(table));
      out.add("centrality/" + name, "centrality/" + name + ".json", ranked_to_json(rank_top(table, config.top_k)));
    }
    return 0;
  });

  stage("fusion", [&] {
    for (const auto level : {IpcLevel::Section, IpcLevel::Class, IpcLevel::Subclass}) {
      FusionOptions opts;
      opts.total_mode = config.total_mode;
      opts.include_absent_sections = level == IpcLevel::Section;
      const auto table = degree_of_fusion(corpus, level, config.counting_level, opts);
      const std::string name(to_string(level));
      out.add("fusion/" + name, "fusion/" + name + ".csv", fusion_to_csv(table));
      out.add("fusion/" + name, "fusion/" + name + ".json", fusion_to_json(table));
    }
    return 0;
  });

  stage("lifecycle", [&] {
    const auto series = annual_counts(corpus, config.count_mode);
    try {
      std::vector<GrowthFit> fits;
      if (config.model) {
        fits.push_back(fit_growth(*config.model, series));
      } else {
        fits.push_back(fit_gompertz(series));
        fits.push_back(fit_logistic(series));
      }
      const auto fit = select_model(fits);
      const double assessed = config.assess_year ? *config.assess_year : fit.last_year;
      const auto maturity = maturity_phase(fit, assessed);
      out.add("lifecycle/fit", "lifecycle/fit.json", fit_to_json(fit, maturity, assessed));
      out.add("lifecycle/forecast", "lifecycle/forecast.csv", forecast_to_csv(forecast(fit, config.horizon_years)));
      std::ostringstream svg;
      render_scurve_svg(series, fit, svg);
      out.add("lifecycle/scurve", "lifecycle/scurve.svg", svg.str());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientData && e.kind() != ErrorKind::DegenerateSeries) throw;
      bundle.lifecycle_skipped = e.what();
      nlohmann::ordered_json doc;
      doc["skipped"] = true;
      doc["reason"] = to_string(e.kind());
      doc["detail"] = e.what();
      doc["n_points"] = series.size();
      out.add("lifecycle/fit", "lifecycle/fit.json", doc.dump(2) + "\n");
    }
    return 0;
  });

  stage("evolution", [&] {
    const auto report = window_evolution(corpus, WindowSpec(config.windows), config.analysis_level, config.top_k,
                                         config.evolution_measure, std::nullopt, threads);
    out.add("evolution", "evolution/evolution.json", evolution_to_json(report));
    return 0;
  });

  bundle.artifacts = out.artifacts();
  nlohmann::ordered_json manifest;
  manifest["patents"] = corpus.size();
  const auto span = corpus.span();
  manifest["span"] = span ? nlohmann::ordered_json{span->first, span->second} : nlohmann::ordered_json(nullptr);
  manifest["config"] = config_echo(config);
  manifest["artifact_count"] = bundle.artifacts.size();
  auto& list = manifest["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : bundle.artifacts) {
    nlohmann::ordered_json entry;
    entry["name"] = a.name;
    auto& files = entry["files"] = nlohmann::ordered_json::array();
    for (const auto& f : a.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}});
    list.push_back(std::move(entry));
  }
  manifest["lifecycle_skipped"] =
      bundle.lifecycle_skipped ? nlohmann::ordered_json(*bundle.lifecycle_skipped) : nlohmann::ordered_json(nullptr);
  bundle.manifest_json = manifest.dump(2) + "\n";

  stage("output", [&] {
    for (const auto& [path, bytes] : out.files()) write_file(config.output_dir / path, bytes);
    write_file(config.output_dir / "manifest.json", bundle.manifest_json);
    return 0;
  });
  return bundle;
}

}  // namespace ipcfusion
