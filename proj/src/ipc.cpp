#include "ipcfusion/ipc.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "ipcfusion/error.hpp"

namespace ipcfusion {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Reads a run of decimal digits starting at pos; returns the digit count.
std::size_t digit_run(std::string_view s, std::size_t pos) {
  std::size_t n = 0;
  while (pos + n < s.size() && is_digit(s[pos + n])) ++n;
  return n;
}

std::uint32_t to_number(std::string_view digits) {
  std::uint32_t value = 0;
  for (char c : digits) value = value * 10 + static_cast<std::uint32_t>(c - '0');
  return value;
}

// Parser core; returns an error reason or empty on success.
std::string parse_into(std::string_view raw, IpcCode& out) {
  std::string_view s = trim(raw);
  if (s.empty()) return "empty symbol";

  const char section = upper(s[0]);
  if (!is_alpha(s[0])) return fmt::format("section '{}' is not a letter", s[0]);
  if (section < 'A' || section > 'H') return fmt::format("section '{}' outside A..H", section);
  out = IpcCode{};
  out.section = section;
  if (s.size() == 1) return {};

  const std::size_t class_len = digit_run(s, 1);
  if (class_len != 2) return "class must be exactly two digits";
  out.class_number = static_cast<std::uint8_t>(to_number(s.substr(1, 2)));
  if (s.size() == 3) return {};

  if (!is_alpha(s[3])) return fmt::format("subclass '{}' is not a letter", s[3]);
  out.subclass = upper(s[3]);
  std::size_t pos = 4;
  while (pos < s.size() && is_space(s[pos])) ++pos;
  if (pos == s.size()) return {};

  const std::size_t group_len = digit_run(s, pos);
  if (group_len == 0) return fmt::format("unexpected '{}' after subclass", s[pos]);
  if (group_len > 9) return "main group exceeds 9999";
  const std::uint32_t group = to_number(s.substr(pos, group_len));
  if (group == 0 || group > 9999) return "main group must be in 1..9999";
  out.main_group = static_cast<std::uint16_t>(group);
  pos += group_len;
  if (pos == s.size()) return {};

  if (s[pos] != '/') return fmt::format("unexpected '{}' after main group", s[pos]);
  ++pos;
  const std::size_t sub_len = digit_run(s, pos);
  if (sub_len == 0) return "empty subgroup after '/'";
  if (sub_len > 6) return "subgroup longer than six digits";
  if (pos + sub_len != s.size()) return fmt::format("unexpected '{}' after subgroup", s[pos + sub_len]);
  out.subgroup = IpcSubgroup{to_number(s.substr(pos, sub_len)), static_cast<std::uint8_t>(sub_len)};
  return {};
}

}  // namespace

std::string_view to_string(IpcLevel level) {
  switch (level) {
    case IpcLevel::Section: return "section";
    case IpcLevel::Class: return "class";
    case IpcLevel::Subclass: return "subclass";
    case IpcLevel::MainGroup: return "main-group";
    case IpcLevel::Subgroup: return "subgroup";
  }
  return "unknown";
}

IpcLevel parse_level(std::string_view text) {
  std::string key;
  for (char c : trim(text)) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "section") return IpcLevel::Section;
  if (key == "class") return IpcLevel::Class;
  if (key == "subclass") return IpcLevel::Subclass;
  if (key == "maingroup" || key == "group") return IpcLevel::MainGroup;
  if (key == "subgroup") return IpcLevel::Subgroup;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown IPC level '{}'", text));
}

IpcLevel IpcCode::level() const noexcept {
  if (subgroup) return IpcLevel::Subgroup;
  if (main_group) return IpcLevel::MainGroup;
  if (subclass) return IpcLevel::Subclass;
  if (class_number) return IpcLevel::Class;
  return IpcLevel::Section;
}

IpcCode parse_ipc(std::string_view raw) {
  IpcCode code;
  if (auto reason = parse_into(raw, code); !reason.empty()) {
    throw Error(ErrorKind::MalformedIpc, fmt::format("malformed IPC '{}': {}", raw, reason));
  }
  return code;
}

std::optional<IpcCode> try_parse_ipc(std::string_view raw) noexcept {
  try {
    IpcCode code;
    if (parse_into(raw, code).empty()) return code;
  } catch (...) {
  }
  return std::nullopt;
}

std::optional<IpcCode> try_truncate(const IpcCode& code, IpcLevel level) noexcept {
  if (level > code.level()) return std::nullopt;
  IpcCode out;
  out.section = code.section;
  if (level >= IpcLevel::Class) out.class_number = code.class_number;
  if (level >= IpcLevel::Subclass) out.subclass = code.subclass;
  if (level >= IpcLevel::MainGroup) out.main_group = code.main_group;
  if (level >= IpcLevel::Subgroup) out.subgroup = code.subgroup;
  return out;
}

IpcCode truncate(const IpcCode& code, IpcLevel level) {
  if (auto out = try_truncate(code, level)) return *out;
  throw Error(ErrorKind::LevelUnavailable,
              fmt::format("'{}' has no {} component", format_ipc(code), to_string(level)));
}

std::string format_ipc(const IpcCode& code) {
  std::string out(1, code.section);
  if (!code.class_number) return out;
  out += fmt::format("{:02d}", static_cast<int>(*code.class_number));
  if (!code.subclass) return out;
  out.push_back(*code.subclass);
  if (!code.main_group) return out;
  out += fmt::format("{}", *code.main_group);
  if (!code.subgroup) return out;
  out += fmt::format("/{:0{}d}", code.subgroup->value, static_cast<int>(code.subgroup->digits));
  return out;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedIpc: return "MalformedIpc";
    case ErrorKind::LevelUnavailable: return "LevelUnavailable";
    case ErrorKind::UnreadableSource: return "UnreadableSource";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::LevelOrderViolation: return "LevelOrderViolation";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::AllZeroActuals: return "AllZeroActuals";
    case ErrorKind::SinkWriteFailure: return "SinkWriteFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace ipcfusion
