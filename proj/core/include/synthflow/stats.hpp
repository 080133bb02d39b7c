#pragma once

#include <map>
#include <span>

#include "synthflow/document.hpp"

namespace synthflow {

/// Corpus-level counts. Averages are integer-rounded per-document
/// means, matching the usual reporting style for corpus tables.
struct CorpusStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::map<VertexLabel, std::size_t> vertex_counts;
  std::map<EdgeLabel, std::size_t> edge_counts;

  long long avg_sentences_per_doc() const;
  long long avg_tokens_per_doc() const;
  long long avg_entities_per_doc() const;
};

CorpusStats corpus_stats(std::span<const AnnotatedDocument> docs);

}  // namespace synthflow
