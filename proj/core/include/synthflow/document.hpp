#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "synthflow/labels.hpp"
#include "synthflow/span.hpp"

namespace synthflow {

class Utf8Index;

/// A labeled text span, possibly discontinuous. Fragments are sorted,
/// non-overlapping, and `text` is the covered surface string with
/// fragments joined by a single space.
struct Entity {
  std::string id;  // document-unique, e.g. "T4"
  VertexLabel label = VertexLabel::kMaterialOthers;
  std::vector<Span> spans;
  std::string text;

  const Span& first_span() const { return spans.front(); }
};

/// Directed labeled edge between two entities. Canonical directions:
/// Next runs with the process (material -> consuming operation,
/// operation -> later operation, final operation -> final material),
/// Condition runs host -> property, Coreference later mention -> earlier.
struct Relation {
  std::string id;  // document-unique, e.g. "R2"
  EdgeLabel label = EdgeLabel::kNext;
  std::string from;  // entity id
  std::string to;    // entity id
};

/// One annotated experimental section: raw text plus its entity and
/// relation layers. Immutable by convention once built.
struct AnnotatedDocument {
  std::string doc_id;
  std::string text;  // UTF-8
  std::vector<Entity> entities;
  std::vector<Relation> relations;

  const Entity* find_entity(std::string_view id) const;
};

/// Surface string covered by the fragments, '\n' replaced by ' ' and
/// fragments joined by single spaces (the standoff convention).
std::string surface_text(std::string_view text, const Utf8Index& index,
                         const std::vector<Span>& spans);

/// Internal-consistency check: span bounds and ordering, unique ids,
/// resolvable relation endpoints, no self-loops, surface/offset match.
/// Returns one message per violation; empty means consistent.
std::vector<std::string> validate(const AnnotatedDocument& doc);

}  // namespace synthflow
