#include "synthflow/textprep.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "synthflow/utf8.hpp"

namespace synthflow {

namespace {

// Default rewrite rules: degC unification plus whitespace, dash, and
// quote hygiene. Same format as the loadable config file.
constexpr std::string_view kDefaultNormalizationRules =
    "# pattern<TAB>replacement, applied in order\n"
    "°C\tdegC\n"
    " \t \n"
    " \t \n"
    " \t \n"
    " \t \n"
    "−\t-\n"
    "–\t-\n"
    "“\t\"\n"
    "”\t\"\n"
    "‘\t'\n"
    "’\t'\n";

constexpr std::string_view kDefaultAbbreviations =
    "# sentence-internal abbreviations, trailing period included\n"
    "Fig.\nFigs.\nEq.\nEqs.\nRef.\nRefs.\nTab.\nTabs.\n"
    "al.\netc.\ne.g.\ni.e.\nvs.\ncf.\nca.\nwt.\nat.\napprox.\n"
    "No.\nno.\nDr.\nProf.\nSt.\n";

bool is_ws(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\v' || cp == U'\f';
}

bool is_split_punct(char32_t cp) {
  switch (cp) {
    case U'(': case U')': case U'[': case U']':
    case U',': case U';': case U':': case U'.':
      return true;
    default:
      return false;
  }
}

bool is_upper_or_digit(char32_t cp) {
  return (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9');
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

std::string read_all(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

const NormalizationTable& NormalizationTable::defaults() {
  static const NormalizationTable table = parse(kDefaultNormalizationRules);
  return table;
}

NormalizationTable NormalizationTable::parse(std::string_view config_text) {
  NormalizationTable table;
  for (std::string_view line : split_lines(config_text)) {
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw std::runtime_error("normalization rule needs pattern<TAB>replacement: \"" +
                               std::string(line) + "\"");
    }
    table.rules.emplace_back(std::string(line.substr(0, tab)),
                             std::string(line.substr(tab + 1)));
  }
  return table;
}

NormalizationTable NormalizationTable::load(std::istream& in) {
  return parse(read_all(in));
}

OffsetMap::OffsetMap(std::vector<Segment> segments)
    : segments_(std::move(segments)) {}

bool OffsetMap::is_identity() const {
  return std::none_of(segments_.begin(), segments_.end(),
                      [](const Segment& s) { return s.rewritten; });
}

namespace {

// Segment containing position pos on the chosen side; segments tile the
// text so the lookup only fails for out-of-range input.
template <typename SideOf>
const OffsetMap::Segment* segment_at(const std::vector<OffsetMap::Segment>& segments,
                                     std::size_t pos, SideOf side) {
  auto it = std::upper_bound(
      segments.begin(), segments.end(), pos,
      [&](std::size_t p, const OffsetMap::Segment& s) { return p < side(s).start; });
  while (it != segments.begin()) {
    --it;
    const Span& span = side(*it);
    if (pos < span.end) return &*it;
    if (span.start <= pos && span.start == span.end) continue;  // empty side
    break;
  }
  return nullptr;
}

}  // namespace

Span OffsetMap::to_normalized(const Span& span) const {
  if (segments_.empty()) return {0, 0};
  auto orig_side = [](const Segment& s) -> const Span& { return s.orig; };
  const Segment* first = segment_at(segments_, span.start, orig_side);
  const Segment* last = segment_at(segments_, span.end - 1, orig_side);
  if (!first || !last) throw std::out_of_range("span outside offset map");
  Span out;
  out.start = first->rewritten
                  ? first->norm.start
                  : first->norm.start + (span.start - first->orig.start);
  out.end = last->rewritten
                ? last->norm.end
                : last->norm.start + (span.end - 1 - last->orig.start) + 1;
  return out;
}

Span OffsetMap::to_original(const Span& span) const {
  if (segments_.empty()) return {0, 0};
  auto norm_side = [](const Segment& s) -> const Span& { return s.norm; };
  const Segment* first = segment_at(segments_, span.start, norm_side);
  const Segment* last = segment_at(segments_, span.end - 1, norm_side);
  if (!first || !last) throw std::out_of_range("span outside offset map");
  Span out;
  out.start = first->rewritten
                  ? first->orig.start
                  : first->orig.start + (span.start - first->norm.start);
  out.end = last->rewritten
                ? last->orig.end
                : last->orig.start + (span.end - 1 - last->norm.start) + 1;
  return out;
}

NormalizeResult normalize(std::string_view text, const NormalizationTable& table) {
  NormalizeResult result;
  result.text.reserve(text.size());
  std::vector<OffsetMap::Segment> segments;
  std::size_t orig_cp = 0;
  std::size_t norm_cp = 0;
  std::size_t byte = 0;
  while (byte < text.size()) {
    const std::pair<std::string, std::string>* hit = nullptr;
    for (const auto& rule : table.rules) {
      if (text.substr(byte, rule.first.size()) == rule.first) {
        hit = &rule;
        break;
      }
    }
    if (hit) {
      const std::size_t pattern_cps = cp_length(hit->first);
      const std::size_t replacement_cps = cp_length(hit->second);
      result.text += hit->second;
      segments.push_back({{orig_cp, orig_cp + pattern_cps},
                          {norm_cp, norm_cp + replacement_cps},
                          true});
      orig_cp += pattern_cps;
      norm_cp += replacement_cps;
      byte += hit->first.size();
    } else {
      std::size_t len = 1;
      decode_cp(text, byte, &len);
      result.text.append(text.substr(byte, len));
      if (!segments.empty() && !segments.back().rewritten) {
        segments.back().orig.end += 1;
        segments.back().norm.end += 1;
      } else {
        segments.push_back({{orig_cp, orig_cp + 1}, {norm_cp, norm_cp + 1}, false});
      }
      orig_cp += 1;
      norm_cp += 1;
      byte += len;
    }
  }
  result.offsets = OffsetMap(std::move(segments));
  return result;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<char32_t> cps;
  std::vector<std::size_t> cp_byte;
  cps.reserve(text.size());
  for (std::size_t byte = 0; byte < text.size();) {
    std::size_t len = 1;
    char32_t cp = decode_cp(text, byte, &len);
    cps.push_back(cp);
    cp_byte.push_back(byte);
    byte += len;
  }
  cp_byte.push_back(text.size());

  std::vector<Token> tokens;
  auto emit = [&](std::size_t from, std::size_t to) {
    Token token;
    token.span = {from, to};
    token.index = tokens.size();
    token.text.assign(text.substr(cp_byte[from], cp_byte[to] - cp_byte[from]));
    tokens.push_back(std::move(token));
  };

  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    if (is_ws(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !is_ws(cps[j])) ++j;
    // [i, j) is one whitespace-delimited run; peel punctuation at both ends.
    std::size_t begin = i;
    std::size_t end = j;
    while (begin < end && is_split_punct(cps[begin])) {
      emit(begin, begin + 1);
      ++begin;
    }
    std::size_t core_end = end;
    while (core_end > begin && is_split_punct(cps[core_end - 1])) --core_end;
    if (core_end > begin) emit(begin, core_end);
    for (std::size_t k = core_end; k < end; ++k) emit(k, k + 1);
    i = j;
  }
  return tokens;
}

const AbbreviationList& AbbreviationList::defaults() {
  static const AbbreviationList list = parse(kDefaultAbbreviations);
  return list;
}

AbbreviationList AbbreviationList::parse(std::string_view config_text) {
  AbbreviationList list;
  for (std::string_view line : split_lines(config_text)) {
    if (line.empty() || line.front() == '#') continue;
    std::string entry(line);
    if (entry.back() != '.') entry += '.';
    list.entries.insert(std::move(entry));
  }
  return list;
}

AbbreviationList AbbreviationList::load(std::istream& in) {
  return parse(read_all(in));
}

bool AbbreviationList::matches(std::string_view token_before_period) const {
  return entries.count(std::string(token_before_period) + ".") > 0;
}

SentenceMap split_sentences(std::string_view /*text*/, std::vector<Token>& tokens,
                            const AbbreviationList& abbreviations) {
  SentenceMap map;
  if (tokens.empty()) return map;

  std::vector<bool> break_after(tokens.size(), false);
  long paren_depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i].text;
    if (t == "(") ++paren_depth;
    if (t == ")" && paren_depth > 0) --paren_depth;
    if (i + 1 == tokens.size()) break;

    const bool final_period = t == ".";
    const bool final_bang = !final_period && (t.back() == '!' || t.back() == '?');
    if (!final_period && !final_bang) continue;
    if (paren_depth > 0) continue;
    // Needs a whitespace gap and an uppercase- or digit-initial follower.
    const Token& next = tokens[i + 1];
    if (next.span.start <= tokens[i].span.end) continue;
    if (!is_upper_or_digit(decode_cp(next.text, 0))) continue;
    if (final_period && i > 0) {
      const Token& prev = tokens[i - 1];
      if (prev.span.end == tokens[i].span.start &&
          abbreviations.matches(prev.text)) {
        continue;
      }
    }
    break_after[i] = true;
  }

  std::size_t sentence = 0;
  std::size_t sentence_start_token = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    tokens[i].sentence_index = sentence;
    const bool last = i + 1 == tokens.size();
    if (break_after[i] || last) {
      map.boundaries.push_back(
          {tokens[sentence_start_token].span.start, tokens[i].span.end});
      sentence_start_token = i + 1;
      if (!last) ++sentence;
    }
  }
  return map;
}

TokenizedText analyze(std::string_view normalized_text,
                      const AbbreviationList& abbreviations) {
  TokenizedText out;
  out.text.assign(normalized_text);
  out.tokens = tokenize(out.text);
  out.sentences = split_sentences(out.text, out.tokens, abbreviations);
  return out;
}

TokenRange token_range(const Entity& entity, const std::vector<Token>& tokens) {
  if (entity.spans.empty()) {
    throw std::invalid_argument("entity " + entity.id + " has no spans");
  }
  const Span& span = entity.first_span();
  // First token ending after span.start; tokens are sorted by start.
  auto it = std::partition_point(
      tokens.begin(), tokens.end(),
      [&](const Token& t) { return t.span.end <= span.start; });
  if (it == tokens.end() || it->span.start >= span.end) {
    throw std::invalid_argument("entity " + entity.id + " (" + entity.text +
                                ") covers no token");
  }
  TokenRange range;
  range.first = it->index;
  range.last = it->index;
  while (it + 1 != tokens.end() && (it + 1)->span.start < span.end) {
    ++it;
    range.last = it->index;
  }
  return range;
}

std::size_t token_distance(const TokenRange& a, const TokenRange& b) {
  if (a.overlaps(b)) {
    throw OverlappingEntities("token ranges overlap");
  }
  if (a.last < b.first) return b.first - a.last - 1;
  return a.first - b.last - 1;
}

std::size_t token_distance(const Entity& a, const Entity& b,
                           const std::vector<Token>& tokens) {
  TokenRange ra = token_range(a, tokens);
  TokenRange rb = token_range(b, tokens);
  if (ra.overlaps(rb)) {
    throw OverlappingEntities("entities " + a.id + " and " + b.id +
                              " overlap on the token line");
  }
  return token_distance(ra, rb);
}

AnnotatedDocument normalize_document(const AnnotatedDocument& doc,
                                     const NormalizationTable& table) {
  NormalizeResult normalized = normalize(doc.text, table);
  if (normalized.offsets.is_identity()) return doc;

  AnnotatedDocument out;
  out.doc_id = doc.doc_id;
  out.text = std::move(normalized.text);
  out.relations = doc.relations;
  Utf8Index index(out.text);
  out.entities.reserve(doc.entities.size());
  for (const Entity& e : doc.entities) {
    Entity projected;
    projected.id = e.id;
    projected.label = e.label;
    projected.spans.reserve(e.spans.size());
    for (const Span& s : e.spans) {
      projected.spans.push_back(normalized.offsets.to_normalized(s));
    }
    projected.text = surface_text(out.text, index, projected.spans);
    out.entities.push_back(std::move(projected));
  }
  return out;
}

}  // namespace synthflow
