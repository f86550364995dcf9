#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace asilcheck {

/// Automotive safety integrity level. The enumerator order is the risk
/// order, so the built-in comparisons and std::max do the right thing.
enum class AsilLevel : std::uint8_t { QM = 0, A = 1, B = 2, C = 3, D = 4 };

inline constexpr std::array<AsilLevel, 5> kAllAsilLevels = {
    AsilLevel::QM, AsilLevel::A, AsilLevel::B, AsilLevel::C, AsilLevel::D};

constexpr std::string_view to_string(AsilLevel level) noexcept {
  switch (level) {
    case AsilLevel::QM: return "QM";
    case AsilLevel::A: return "A";
    case AsilLevel::B: return "B";
    case AsilLevel::C: return "C";
    case AsilLevel::D: return "D";
  }
  return "QM";
}

constexpr std::optional<AsilLevel> parse_asil(std::string_view text) noexcept {
  for (AsilLevel level : kAllAsilLevels) {
    if (to_string(level) == text) {
      return level;
    }
  }
  return std::nullopt;
}

constexpr bool at_least(AsilLevel level, AsilLevel floor) noexcept { return level >= floor; }

/// "B(D)" notation for a decomposed level that remembers its origin.
inline std::string decomposed_notation(AsilLevel effective, std::optional<AsilLevel> origin) {
  std::string out{to_string(effective)};
  if (origin) {
    out += '(';
    out += to_string(*origin);
    out += ')';
  }
  return out;
}

template <class Range>
AsilLevel max_asil(const Range& levels) {
  AsilLevel out = AsilLevel::QM;
  for (AsilLevel level : levels) {
    out = std::max(out, level);
  }
  return out;
}

}  // namespace asilcheck
