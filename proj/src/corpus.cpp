#include "dosest/corpus.hpp"

#include <algorithm>

namespace dosest::corpus {

namespace detail {
extern const Entry kEntries[];
extern const std::size_t kCount;
}  // namespace detail

std::span<const Entry> entries() { return {detail::kEntries, detail::kCount}; }

std::optional<Entry> find(std::string_view name) {
  const auto all = entries();
  auto it = std::find_if(all.begin(), all.end(), [&](const Entry& e) { return e.name == name; });
  if (it == all.end()) return std::nullopt;
  return *it;
}

}  // namespace dosest::corpus
