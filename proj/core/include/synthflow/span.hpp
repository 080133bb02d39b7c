#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace synthflow {

/// Half-open character range [start, end). Offsets count Unicode code
/// points into the document text, the same convention standoff files use.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool valid() const { return start < end; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  auto operator<=>(const Span&) const = default;
};

/// Renders "12 15", or "12 15;20 24" for fragment lists.
std::string to_string(const Span& span);
std::string to_string(const std::vector<Span>& spans);

}  // namespace synthflow
