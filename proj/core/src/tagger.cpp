#include "synthflow/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "synthflow/textprep.hpp"
#include "synthflow/utf8.hpp"

namespace synthflow {

namespace {

const std::set<std::string> kPatternNames = {"Time", "Temp", "Rot", "Press",
                                             "Atmosphere"};

const std::set<std::string> kFinalVerbs = {
    "obtain",     "obtains",   "obtained",     "obtaining", "prepare",
    "prepares",   "prepared",  "preparing",    "synthesize", "synthesizes",
    "synthesized", "synthesizing", "produce",  "produces",  "produced",
    "producing",  "yield",     "yields",       "yielded"};

const std::set<std::string> kAliasVerbs = {
    "denoted", "denote", "named", "labeled", "labelled",
    "termed",  "called", "abbreviated"};

const std::set<std::string> kAuxVerbs = {"was",  "were", "is",   "are",
                                         "be",   "been", "being"};

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool has_upper(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isupper(c) != 0;
  });
}

std::string trim(std::string_view line) {
  std::size_t begin = line.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  std::size_t end = line.find_last_not_of(" \t\r\n");
  return std::string(line.substr(begin, end - begin + 1));
}

std::vector<std::string> read_term_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read lexicon file " + file.string());
  }
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    std::string term = trim(line);
    if (term.empty() || term.front() == '#') continue;
    terms.push_back(std::move(term));
  }
  return terms;
}

VertexLabel property_label(const std::string& name) {
  if (name == "Time") return VertexLabel::kPropertyTime;
  if (name == "Temp") return VertexLabel::kPropertyTemp;
  if (name == "Rot") return VertexLabel::kPropertyRot;
  if (name == "Press") return VertexLabel::kPropertyPress;
  return VertexLabel::kPropertyAtmosphere;
}

struct Candidate {
  Span span;
  VertexLabel label = VertexLabel::kOperation;
  int rank = 0;  // tie-break between same-length matches, lower wins
};

constexpr std::size_t kNoPos = std::numeric_limits<std::size_t>::max();

/// Index of the token whose span covers the code point, assuming one
/// exists (matches always lie inside tokens or across adjacent ones).
std::size_t token_at(const std::vector<Token>& tokens, std::size_t cp) {
  auto it = std::partition_point(
      tokens.begin(), tokens.end(),
      [cp](const Token& t) { return t.span.end <= cp; });
  return static_cast<std::size_t>(it - tokens.begin());
}

}  // namespace

TaggerLexicon TaggerLexicon::defaults() {
  TaggerLexicon lex;
  lex.operation_verbs = {
      "mixed",     "mixing",     "milled",    "ball-milled", "milling",
      "ground",    "calcined",   "calcining", "calcination", "sintered",
      "sintering", "annealed",   "annealing", "dried",       "drying",
      "heated",    "heating",    "cooled",    "cooling",     "pressed",
      "pressing",  "stirred",    "stirring",  "washed",      "washing",
      "filtered",  "filtering",  "dispersed", "dispersing",  "quenched",
      "quenching", "melted",     "melting",   "fired",       "firing",
      "sieved",    "pelletized", "crushed",   "cast"};
  lex.solvent_names = {"deionized water", "distilled water", "ethanol",
                       "acetone",         "isopropanol",     "methanol",
                       "water",           "NMP"};
  lex.atmosphere_terms = {"Ar",     "N2",       "O2",  "H2",    "Ar/H2",
                          "air",    "argon",    "nitrogen",     "oxygen",
                          "vacuum"};
  lex.unit_patterns = {
      {"Time",
       R"(\b\d+(?:\.\d+)?\s?(?:h|hrs?|hours?|min|mins?|minutes?|sec|seconds?|days?)\b)"},
      {"Temp", R"(\b\d+(?:\.\d+)?\s?(?:degC|K)\b)"},
      {"Rot", R"(\b\d+(?:\.\d+)?\s?rpm\b)"},
      {"Press", R"(\b\d+(?:\.\d+)?\s?(?:MPa|GPa|kPa|Pa|bar|atm|Torr|psi)\b)"}};
  lex.other_patterns = {
      R"(\b\d+(?:\.\d+)?\s?%)",
      R"(\b\d+(?:\.\d+)?:\d+(?:\.\d+)?(?:\s?molar\s?ratio(?:\s?of\s?[A-Za-z]+:[A-Za-z]+)?)?)"};
  return lex;
}

TaggerLexicon TaggerLexicon::load(const std::filesystem::path& dir) {
  TaggerLexicon lex = defaults();
  auto operations = dir / "operations.txt";
  if (std::filesystem::exists(operations)) {
    lex.operation_verbs.clear();
    for (std::string& term : read_term_file(operations)) {
      lex.operation_verbs.insert(lower(term));
    }
  }
  auto solvents = dir / "solvents.txt";
  if (std::filesystem::exists(solvents)) {
    lex.solvent_names = read_term_file(solvents);
  }
  auto atmospheres = dir / "atmospheres.txt";
  if (std::filesystem::exists(atmospheres)) {
    lex.atmosphere_terms.clear();
    for (std::string& term : read_term_file(atmospheres)) {
      lex.atmosphere_terms.insert(std::move(term));
    }
  }
  auto patterns = dir / "patterns.txt";
  if (std::filesystem::exists(patterns)) {
    lex.unit_patterns.clear();
    lex.other_patterns.clear();
    for (const std::string& entry : read_term_file(patterns)) {
      std::size_t eq = entry.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("pattern line without '=': " + entry);
      }
      std::string name = trim(entry.substr(0, eq));
      std::string regex = trim(entry.substr(eq + 1));
      if (name == "Others") {
        lex.other_patterns.push_back(std::move(regex));
      } else {
        lex.unit_patterns[name] = std::move(regex);
      }
    }
  }
  lex.validate();
  return lex;
}

void TaggerLexicon::validate() const {
  auto compile = [](const std::string& pattern) {
    try {
      std::regex re(pattern);
    } catch (const std::regex_error& e) {
      throw std::invalid_argument("bad lexicon regex '" + pattern +
                                  "': " + e.what());
    }
  };
  for (const auto& [name, pattern] : unit_patterns) {
    if (!kPatternNames.contains(name)) {
      throw std::invalid_argument(
          "pattern name '" + name +
          "' is not one of Time, Temp, Rot, Press, Atmosphere");
    }
    compile(pattern);
  }
  for (const std::string& pattern : other_patterns) compile(pattern);
}

BaselineTagger::BaselineTagger(TaggerLexicon lexicon)
    : lexicon_(std::move(lexicon)) {
  lexicon_.validate();
}

std::vector<Entity> BaselineTagger::tag(const std::string& text) const {
  if (text.empty()) return {};
  TokenizedText doc = analyze(text);
  Utf8Index index(text);
  std::vector<Candidate> candidates;

  auto add_regex_matches = [&](const std::string& pattern, VertexLabel label,
                               int rank) {
    std::regex re(pattern);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
      std::size_t from = index.cp_of(static_cast<std::size_t>(it->position()));
      std::size_t to = index.cp_of(static_cast<std::size_t>(it->position()) +
                                   static_cast<std::size_t>(it->length()));
      if (to > from) candidates.push_back({{from, to}, label, rank});
    }
  };

  for (const auto& [name, pattern] : lexicon_.unit_patterns) {
    add_regex_matches(pattern, property_label(name), 0);
  }
  for (const std::string& pattern : lexicon_.other_patterns) {
    add_regex_matches(pattern, VertexLabel::kPropertyOthers, 1);
  }

  std::vector<std::string> lowered;
  lowered.reserve(doc.tokens.size());
  for (const Token& token : doc.tokens) lowered.push_back(lower(token.text));

  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (lexicon_.operation_verbs.contains(lowered[i])) {
      candidates.push_back({doc.tokens[i].span, VertexLabel::kOperation, 4});
    }
    for (const std::string& term : lexicon_.atmosphere_terms) {
      bool match = has_upper(term) ? doc.tokens[i].text == term
                                   : lowered[i] == lower(term);
      if (match) {
        candidates.push_back(
            {doc.tokens[i].span, VertexLabel::kPropertyAtmosphere, 3});
        break;
      }
    }
  }

  for (const std::string& phrase : lexicon_.solvent_names) {
    std::vector<std::string> words;
    std::istringstream split(phrase);
    for (std::string word; split >> word;) words.push_back(word);
    if (words.empty()) continue;
    for (std::size_t i = 0; i + words.size() <= doc.tokens.size(); ++i) {
      bool match = true;
      for (std::size_t w = 0; w < words.size(); ++w) {
        const std::string& want = words[w];
        match = has_upper(want) ? doc.tokens[i + w].text == want
                                : lowered[i + w] == lower(want);
        if (!match) break;
      }
      if (!match) continue;
      candidates.push_back({{doc.tokens[i].span.start,
                             doc.tokens[i + words.size() - 1].span.end},
                            VertexLabel::kMaterialSolvent, 2});
    }
  }

  // Chemical formulas, role-assigned from nearby verbs afterwards.
  std::vector<Span> formulas;
  {
    std::regex re(R"(\b(?:[A-Z][a-z]?\d*(?:\.\d+)?){2,}\b)");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
      std::size_t from = index.cp_of(static_cast<std::size_t>(it->position()));
      std::size_t to = index.cp_of(static_cast<std::size_t>(it->position()) +
                                   static_cast<std::size_t>(it->length()));
      if (to > from) formulas.push_back({from, to});
    }
  }

  std::size_t first_op_start = kNoPos;
  for (const Candidate& c : candidates) {
    if (c.label == VertexLabel::kOperation) {
      first_op_start = std::min(first_op_start, c.span.start);
    }
  }

  for (const Span& span : formulas) {
    std::size_t tf = token_at(doc.tokens, span.start);
    std::size_t tl = token_at(doc.tokens, span.end - 1);
    if (tf >= doc.tokens.size() || tl >= doc.tokens.size()) continue;
    std::size_t sentence = doc.tokens[tf].sentence_index;
    VertexLabel label = VertexLabel::kMaterialOthers;
    bool assigned = false;

    for (std::size_t back = 1; back <= 3 && back <= tf; ++back) {
      if (kAliasVerbs.contains(lowered[tf - back])) {
        label = VertexLabel::kMaterialFinal;
        assigned = true;
        break;
      }
    }
    if (!assigned) {
      for (std::size_t back = 1; back <= 2 && back <= tf; ++back) {
        if (lowered[tf - back] == "from") {
          label = VertexLabel::kMaterialStart;
          assigned = true;
          break;
        }
      }
    }
    if (!assigned) {
      // Direct object of a final-product verb, unless "from" intervenes.
      for (std::size_t back = 1; back <= 6 && back <= tf; ++back) {
        std::size_t j = tf - back;
        if (doc.tokens[j].sentence_index != sentence) break;
        if (!kFinalVerbs.contains(lowered[j])) continue;
        bool from_between = false;
        for (std::size_t k = j + 1; k < tf; ++k) {
          from_between = from_between || lowered[k] == "from";
        }
        label = from_between ? VertexLabel::kMaterialStart
                             : VertexLabel::kMaterialFinal;
        assigned = true;
        break;
      }
    }
    if (!assigned) {
      // Passive subject: a final-product verb soon after, aux before it.
      for (std::size_t ahead = 1; ahead <= 8 && tl + ahead < lowered.size();
           ++ahead) {
        std::size_t j = tl + ahead;
        if (doc.tokens[j].sentence_index != sentence) break;
        if (!kFinalVerbs.contains(lowered[j])) continue;
        bool aux = (j >= 1 && kAuxVerbs.contains(lowered[j - 1])) ||
                   (j >= 2 && kAuxVerbs.contains(lowered[j - 2]));
        if (aux) {
          label = VertexLabel::kMaterialFinal;
          assigned = true;
        }
        break;
      }
    }
    if (!assigned) {
      label = span.start < first_op_start ? VertexLabel::kMaterialStart
                                          : VertexLabel::kMaterialOthers;
    }
    candidates.push_back({span, label, 5});
  }

  // Longest match wins, leftmost on equal length, then source priority.
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.span.length() != b.span.length())
                return a.span.length() > b.span.length();
              if (a.span.start != b.span.start)
                return a.span.start < b.span.start;
              if (a.rank != b.rank) return a.rank < b.rank;
              return static_cast<int>(a.label) < static_cast<int>(b.label);
            });
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates) {
    bool clashes = false;
    for (const Candidate& k : kept) {
      if (k.span.overlaps(c.span)) {
        clashes = true;
        break;
      }
    }
    if (!clashes) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.span < b.span;
            });

  std::vector<Entity> entities;
  entities.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    Entity e;
    e.id = "T" + std::to_string(i + 1);
    e.label = kept[i].label;
    e.spans = {kept[i].span};
    e.text = surface_text(text, index, e.spans);
    entities.push_back(std::move(e));
  }
  return entities;
}

std::vector<Entity> BaselineTagger::tag_document(
    const AnnotatedDocument& doc) const {
  return tag(doc.text);
}

std::vector<Entity> GoldTagger::tag_document(
    const AnnotatedDocument& doc) const {
  if (doc.entities.empty()) {
    throw MissingAnnotations("document " + doc.doc_id +
                             " carries no entity annotations");
  }
  return doc.entities;
}

}  // namespace synthflow
