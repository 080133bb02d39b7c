#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "synthflow/span.hpp"

namespace synthflow {

/// Number of code points in a UTF-8 string.
std::size_t cp_length(std::string_view text);

/// Decodes the code point whose first byte is at byte_pos. Malformed
/// bytes decode as U+FFFD with length 1 so indexing never gets stuck.
char32_t decode_cp(std::string_view text, std::size_t byte_pos,
                   std::size_t* byte_len = nullptr);

void append_cp(std::string& out, char32_t cp);

/// Code-point to byte-offset index over one UTF-8 string. Lets span
/// arithmetic stay in character units while storage stays UTF-8.
class Utf8Index {
 public:
  explicit Utf8Index(std::string_view text);

  std::size_t cp_count() const { return offsets_.size() - 1; }

  /// Byte offset of code point cp; cp == cp_count() maps to text size.
  std::size_t byte_of(std::size_t cp) const { return offsets_[cp]; }

  /// Code-point index of the character covering a byte offset.
  std::size_t cp_of(std::size_t byte) const;

  /// Substring covered by a code-point span.
  std::string_view slice(std::string_view text, const Span& span) const;

 private:
  std::vector<std::uint32_t> offsets_;
};

}  // namespace synthflow
