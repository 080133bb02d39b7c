#include "synthflow/span.hpp"

namespace synthflow {

std::string to_string(const Span& span) {
  return std::to_string(span.start) + " " + std::to_string(span.end);
}

std::string to_string(const std::vector<Span>& spans) {
  std::string out;
  for (const Span& s : spans) {
    if (!out.empty()) out += ';';
    out += to_string(s);
  }
  return out;
}

}  // namespace synthflow
