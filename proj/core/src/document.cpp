#include "synthflow/document.hpp"

#include <algorithm>
#include <unordered_set>

#include "synthflow/utf8.hpp"

namespace synthflow {

const Entity* AnnotatedDocument::find_entity(std::string_view id) const {
  for (const Entity& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string surface_text(std::string_view text, const Utf8Index& index,
                         const std::vector<Span>& spans) {
  std::string out;
  for (const Span& s : spans) {
    if (!out.empty()) out += ' ';
    out += index.slice(text, s);
  }
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

std::vector<std::string> validate(const AnnotatedDocument& doc) {
  std::vector<std::string> problems;
  Utf8Index index(doc.text);
  const std::size_t text_len = index.cp_count();

  std::unordered_set<std::string> entity_ids;
  for (const Entity& e : doc.entities) {
    if (!entity_ids.insert(e.id).second) {
      problems.push_back("duplicate entity id " + e.id);
    }
    if (e.spans.empty()) {
      problems.push_back("entity " + e.id + " has no spans");
      continue;
    }
    for (const Span& s : e.spans) {
      if (!s.valid()) {
        problems.push_back("entity " + e.id + " span " + to_string(s) +
                           " is empty or reversed");
      } else if (s.end > text_len) {
        problems.push_back("entity " + e.id + " span " + to_string(s) +
                           " exceeds text length " + std::to_string(text_len));
      }
    }
    for (std::size_t i = 1; i < e.spans.size(); ++i) {
      if (e.spans[i].start < e.spans[i - 1].end) {
        problems.push_back("entity " + e.id +
                           " spans are unsorted or overlapping");
        break;
      }
    }
    bool in_bounds = std::all_of(e.spans.begin(), e.spans.end(), [&](const Span& s) {
      return s.valid() && s.end <= text_len;
    });
    if (in_bounds && surface_text(doc.text, index, e.spans) != e.text) {
      problems.push_back("entity " + e.id + " surface text \"" + e.text +
                         "\" does not match offsets");
    }
  }

  std::unordered_set<std::string> relation_ids;
  for (const Relation& r : doc.relations) {
    if (!relation_ids.insert(r.id).second) {
      problems.push_back("duplicate relation id " + r.id);
    }
    if (r.from == r.to) {
      problems.push_back("relation " + r.id + " is a self-loop");
    }
    if (entity_ids.count(r.from) == 0) {
      problems.push_back("relation " + r.id + " references missing entity " +
                         r.from);
    }
    if (entity_ids.count(r.to) == 0) {
      problems.push_back("relation " + r.id + " references missing entity " +
                         r.to);
    }
  }
  return problems;
}

}  // namespace synthflow
