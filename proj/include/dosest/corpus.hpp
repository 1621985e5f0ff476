#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace dosest::corpus {

struct Entry {
  std::string_view name;
  std::string_view text;
};

/// Built-in scenarios, sorted by name.
[[nodiscard]] std::span<const Entry> entries();
[[nodiscard]] std::optional<Entry> find(std::string_view name);

}  // namespace dosest::corpus
