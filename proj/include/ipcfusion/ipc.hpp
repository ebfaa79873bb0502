#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ipcfusion {

/// The five levels of the IPC hierarchy, ordered coarse to fine.
enum class IpcLevel : std::uint8_t { Section = 0, Class, Subclass, MainGroup, Subgroup };

std::string_view to_string(IpcLevel level);
/// Accepts "section", "class", "subclass", "main-group"/"maingroup"/"group",
/// "subgroup" (case-insensitive). Throws Error{InvalidArgument} otherwise.
IpcLevel parse_level(std::string_view text);

/// Subgroup digits are kept as written ("30" and "300" are distinct), so the
/// digit count travels with the value.
struct IpcSubgroup {
  std::uint32_t value = 0;
  std::uint8_t digits = 1;

  auto operator<=>(const IpcSubgroup&) const = default;
};

/// A structurally valid IPC symbol. Populated fields always form a
/// contiguous prefix of the hierarchy; level() is the deepest one.
struct IpcCode {
  char section = 'A';
  std::optional<std::uint8_t> class_number;  // 0..99, printed as two digits
  std::optional<char> subclass;              // 'A'..'Z'
  std::optional<std::uint16_t> main_group;   // 1..9999
  std::optional<IpcSubgroup> subgroup;

  IpcLevel level() const noexcept;

  auto operator<=>(const IpcCode&) const = default;
};

/// Parses "G", "G06", "G06F", "G06F17", "G06F17/30". Surrounding whitespace
/// and whitespace between subclass and main group are ignored; letters are
/// upcased. Throws Error{MalformedIpc} on anything else.
IpcCode parse_ipc(std::string_view raw);

/// Non-throwing variant of parse_ipc.
std::optional<IpcCode> try_parse_ipc(std::string_view raw) noexcept;

/// Prefix of `code` at exactly `level`. Throws Error{LevelUnavailable} when
/// the code is coarser than `level`.
IpcCode truncate(const IpcCode& code, IpcLevel level);

/// Same as truncate, returning nullopt instead of throwing.
std::optional<IpcCode> try_truncate(const IpcCode& code, IpcLevel level) noexcept;

std::string format_ipc(const IpcCode& code);

}  // namespace ipcfusion
