#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "ipcfusion/error.hpp"
#include "ipcfusion/study.hpp"

namespace ipcfusion {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void invalid(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorKind::InvalidConfig, fmt::format("{} = '{}': {}", key, value, why));
}

long long parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) invalid(key, text, "expected an integer");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  std::string v;
  for (char c : trim(text)) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  invalid(key, text, "expected true or false");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') invalid(key, text, "unterminated array");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<int> out;
  while (!text.empty()) {
    const std::size_t comma = std::min(text.find(','), text.size());
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(static_cast<int>(parse_int(key, item)));
    text.remove_prefix(std::min(comma + 1, text.size()));
  }
  return out;
}

// Converts domain parse errors into config errors tagged with the key.
template <typename F>
auto as_config(std::string_view key, std::string_view value, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    invalid(key, value, e.what());
  }
}

// Strips a trailing comment and surrounding quotes.
std::string_view unquote(std::string_view raw, std::size_t line_no) {
  raw = trim(raw);
  if (!raw.empty() && raw.front() == '"') {
    const auto close = raw.find('"', 1);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("line {}: unterminated string", line_no));
    }
    const auto rest = trim(raw.substr(close + 1));
    if (!rest.empty() && rest.front() != '#') {
      throw Error(ErrorKind::InvalidConfig, fmt::format("line {}: trailing text after string", line_no));
    }
    return raw.substr(1, close - 1);
  }
  if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = trim(raw.substr(0, hash));
  return raw;
}

}  // namespace

void StudyConfig::validate() const {
  if (top_k == 0) throw Error(ErrorKind::InvalidConfig, "top must be >= 1");
  if (horizon_years < 1) throw Error(ErrorKind::InvalidConfig, "horizon must be >= 1");
  if (counting_level < IpcLevel::Subclass) {
    throw Error(ErrorKind::InvalidConfig, "counting_level must be subclass or finer for the subclass fusion table");
  }
  try {
    WindowSpec spec(windows);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("windows: {}", e.what()));
  }
}

void apply_setting(StudyConfig& c, std::string_view key_in, std::string_view value_in) {
  const auto key = trim(key_in);
  const auto value = trim(value_in);
  if (key == "input") {
    c.input = std::string(value);
  } else if (key == "format") {
    c.format = as_config(key, value, [&] { return parse_format(value); });
  } else if (key == "level") {
    c.analysis_level = as_config(key, value, [&] { return parse_level(value); });
  } else if (key == "counting_level") {
    c.counting_level = as_config(key, value, [&] { return parse_level(value); });
  } else if (key == "windows") {
    c.windows = parse_int_list(key, value);
  } else if (key == "top") {
    const auto k = parse_int(key, value);
    if (k < 1) invalid(key, value, "must be >= 1");
    c.top_k = static_cast<std::size_t>(k);
  } else if (key == "normalize_degree") {
    c.normalize_degree = parse_bool(key, value);
  } else if (key == "normalize_betweenness") {
    c.normalize_betweenness = parse_bool(key, value);
  } else if (key == "normalize_closeness") {
    c.normalize_closeness = parse_bool(key, value);
  } else if (key == "evolution_measure") {
    c.evolution_measure = as_config(key, value, [&] { return parse_measure(value); });
  } else if (key == "model") {
    if (value == "auto") {
      c.model.reset();
    } else {
      c.model = as_config(key, value, [&] { return parse_model(value); });
    }
  } else if (key == "count_mode") {
    c.count_mode = as_config(key, value, [&] { return parse_count_mode(value); });
  } else if (key == "horizon") {
    c.horizon_years = static_cast<int>(parse_int(key, value));
  } else if (key == "assess_year") {
    c.assess_year = static_cast<int>(parse_int(key, value));
  } else if (key == "total_mode") {
    if (value == "deduplicated") {
      c.total_mode = TotalMode::Deduplicated;
    } else if (value == "raw") {
      c.total_mode = TotalMode::Raw;
    } else {
      invalid(key, value, "expected deduplicated or raw");
    }
  } else if (key == "out") {
    c.output_dir = std::string(value);
  } else if (key == "threads") {
    const auto t = parse_int(key, value);
    if (t < 0) invalid(key, value, "must be >= 0");
    c.threads = static_cast<unsigned>(t);
  } else {
    throw Error(ErrorKind::InvalidConfig, fmt::format("unknown setting '{}'", key));
  }
}

StudyConfig parse_study_config(std::string_view text, StudyConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t end = std::min(text.find('\n'), text.size());
    const auto line = trim(text.substr(0, end));
    text.remove_prefix(std::min(end + 1, text.size()));
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("line {}: expected 'key = value'", line_no));
    }
    try {
      apply_setting(base, line.substr(0, eq), unquote(line.substr(eq + 1), line_no));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return base;
}

StudyConfig load_study_config(const std::filesystem::path& path, StudyConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidConfig, fmt::format("cannot open config '{}'", path.string()));
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto inherited = base.input;
  auto config = parse_study_config(text, std::move(base));
  // An input named by the file is relative to the file, not the caller.
  if (config.input != inherited && config.input.is_relative()) config.input = path.parent_path() / config.input;
  return config;
}

}  // namespace ipcfusion
