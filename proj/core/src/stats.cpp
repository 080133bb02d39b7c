#include "synthflow/stats.hpp"

#include <cmath>

#include "synthflow/textprep.hpp"

namespace synthflow {

namespace {

long long rounded_mean(std::size_t total, std::size_t count) {
  if (count == 0) return 0;
  return std::llround(static_cast<double>(total) /
                      static_cast<double>(count));
}

}  // namespace

long long CorpusStats::avg_sentences_per_doc() const {
  return rounded_mean(sentences, documents);
}

long long CorpusStats::avg_tokens_per_doc() const {
  return rounded_mean(tokens, documents);
}

long long CorpusStats::avg_entities_per_doc() const {
  return rounded_mean(entities, documents);
}

CorpusStats corpus_stats(std::span<const AnnotatedDocument> docs) {
  CorpusStats stats;
  stats.documents = docs.size();
  for (const AnnotatedDocument& doc : docs) {
    TokenizedText prepared = analyze(doc.text);
    stats.tokens += prepared.tokens.size();
    stats.sentences += prepared.sentences.boundaries.size();
    stats.entities += doc.entities.size();
    stats.relations += doc.relations.size();
    for (const Entity& e : doc.entities) ++stats.vertex_counts[e.label];
    for (const Relation& r : doc.relations) ++stats.edge_counts[r.label];
  }
  return stats;
}

}  // namespace synthflow
