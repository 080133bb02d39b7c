#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "synthflow/document.hpp"
#include "synthflow/standoff.hpp"

namespace testsupport {

inline std::filesystem::path fixture_dir() {
  return std::filesystem::path(SYNTHFLOW_FIXTURE_DIR);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline synthflow::AnnotatedDocument load_fixture(const std::string& corpus,
                                                 const std::string& doc_id) {
  auto base = fixture_dir() / corpus / doc_id;
  return synthflow::parse_document(doc_id,
                                   read_file(base.replace_extension(".txt")),
                                   read_file(base.replace_extension(".ann")));
}

inline const synthflow::Entity& entity_by_text(
    const synthflow::AnnotatedDocument& doc, const std::string& text) {
  const synthflow::Entity* found = nullptr;
  for (const synthflow::Entity& e : doc.entities) {
    if (e.text == text) {
      if (found) throw std::runtime_error("ambiguous entity text: " + text);
      found = &e;
    }
  }
  if (!found) throw std::runtime_error("no entity with text: " + text);
  return *found;
}

}  // namespace testsupport
