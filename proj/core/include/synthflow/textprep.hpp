#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synthflow/document.hpp"
#include "synthflow/span.hpp"

namespace synthflow {

/// One token of the document. Spans are code-point offsets into the
/// tokenized text; sentence_index is filled by split_sentences.
struct Token {
  Span span;
  std::size_t index = 0;
  std::size_t sentence_index = 0;
  std::string text;
};

/// Sentence extents, one span per sentence, sorted and non-overlapping.
/// Every token falls inside exactly one boundary span.
struct SentenceMap {
  std::vector<Span> boundaries;

  std::size_t size() const { return boundaries.size(); }
};

/// Character rewrite table. One rule per line, pattern TAB replacement,
/// '#'-prefixed lines are comments. Rules are tried in order at each
/// position; the shipped default unifies degree-Celsius spelling, exotic
/// spaces, dash variants, and curly quotes.
struct NormalizationTable {
  std::vector<std::pair<std::string, std::string>> rules;

  static const NormalizationTable& defaults();
  static NormalizationTable parse(std::string_view config_text);
  static NormalizationTable load(std::istream& in);
};

/// Projects spans between original and normalized text. Spans cutting
/// into a rewritten region are widened to cover the whole region, so a
/// round trip always covers the source characters.
class OffsetMap {
 public:
  struct Segment {
    Span orig;
    Span norm;
    bool rewritten = false;
  };

  OffsetMap() = default;
  explicit OffsetMap(std::vector<Segment> segments);

  Span to_normalized(const Span& span) const;
  Span to_original(const Span& span) const;
  bool is_identity() const;
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Segment> segments_;
};

struct NormalizeResult {
  std::string text;
  OffsetMap offsets;
};

/// Applies the rewrite table left to right. Idempotent with the default
/// table: no replacement output matches any pattern.
NormalizeResult normalize(
    std::string_view text,
    const NormalizationTable& table = NormalizationTable::defaults());

/// Whitespace tokenizer that splits off leading and trailing
/// ( ) [ ] , ; : . as separate tokens and keeps everything internal
/// (hyphens, subscripts, formula characters) attached.
std::vector<Token> tokenize(std::string_view text);

/// Sentence-final abbreviations, stored with the trailing period
/// ("Fig.", "al."). Plain text config, one entry per line.
struct AbbreviationList {
  std::set<std::string> entries;

  bool matches(std::string_view token_before_period) const;
  static const AbbreviationList& defaults();
  static AbbreviationList parse(std::string_view config_text);
  static AbbreviationList load(std::istream& in);
};

/// Breaks after sentence-final . ! ? followed by whitespace and an
/// uppercase or digit-initial token, except after known abbreviations or
/// inside parentheses. Assigns Token::sentence_index in place.
SentenceMap split_sentences(
    std::string_view text, std::vector<Token>& tokens,
    const AbbreviationList& abbreviations = AbbreviationList::defaults());

/// Fully prepared text: tokens plus sentence extents.
struct TokenizedText {
  std::string text;
  std::vector<Token> tokens;
  SentenceMap sentences;
};

TokenizedText analyze(
    std::string_view normalized_text,
    const AbbreviationList& abbreviations = AbbreviationList::defaults());

class OverlappingEntities : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inclusive token index range covered by an entity's first fragment,
/// snapped outward to whole tokens. Throws std::invalid_argument when
/// the fragment covers no token.
struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
  bool overlaps(const TokenRange& other) const {
    return first <= other.last && other.first <= last;
  }
};

TokenRange token_range(const Entity& entity, const std::vector<Token>& tokens);

/// Tokens strictly between two disjoint ranges; 0 when adjacent.
std::size_t token_distance(const TokenRange& a, const TokenRange& b);

/// Distance between two entities on the token line. Symmetric. Throws
/// OverlappingEntities when the covering token ranges intersect.
std::size_t token_distance(const Entity& a, const Entity& b,
                           const std::vector<Token>& tokens);

/// Rebuilds a document over normalized text: spans are projected through
/// the offset map and surface strings re-extracted.
AnnotatedDocument normalize_document(
    const AnnotatedDocument& doc,
    const NormalizationTable& table = NormalizationTable::defaults());

}  // namespace synthflow
