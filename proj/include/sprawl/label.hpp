#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace sprawl {

/// Binary sprawl outcome: N (absent or low-intensity) or Y (present).
enum class Label : std::uint8_t { N = 0, Y = 1 };

constexpr char to_char(Label label) noexcept { return label == Label::Y ? 'Y' : 'N'; }

constexpr std::string_view to_string(Label label) noexcept { return label == Label::Y ? "Y" : "N"; }

constexpr std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "Y" || text == "y" || text == "YES" || text == "Yes" || text == "yes") return Label::Y;
  if (text == "N" || text == "n" || text == "NO" || text == "No" || text == "no") return Label::N;
  return std::nullopt;
}

}  // namespace sprawl
