#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synthflow/document.hpp"

namespace synthflow {

/// Term lists and patterns driving the baseline tagger. Shipped defaults
/// cover common solid-state synthesis vocabulary; every field can be
/// replaced from plain-text config files.
struct TaggerLexicon {
  /// Lowercased verb forms tagged as Operation on exact token match.
  std::set<std::string> operation_verbs;
  /// Solvent phrases (may span several tokens), tagged Material-Solvent.
  std::vector<std::string> solvent_names;
  /// Atmosphere tokens, tagged Property-Atmosphere. All-lowercase
  /// entries match case-insensitively, others exactly (Ar, N2).
  std::set<std::string> atmosphere_terms;
  /// name=regex patterns for the typed property labels; names must be
  /// Time, Temp, Rot, Press or Atmosphere.
  std::map<std::string, std::string> unit_patterns;
  /// Regexes tagged Property-Others (purity, ratios, dimensions).
  std::vector<std::string> other_patterns;

  static TaggerLexicon defaults();

  /// Reads operations.txt, solvents.txt, atmospheres.txt (one term per
  /// line) and patterns.txt (name=regex lines) from the directory.
  /// Missing files keep the corresponding defaults. '#' starts a
  /// comment line.
  static TaggerLexicon load(const std::filesystem::path& dir);

  /// Throws std::invalid_argument on unknown pattern names or regexes
  /// that fail to compile.
  void validate() const;
};

class MissingAnnotations : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pluggable entity source for the extraction pipeline.
class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  virtual std::vector<Entity> tag_document(
      const AnnotatedDocument& doc) const = 0;
  virtual std::string_view name() const = 0;
};

/// Deterministic lexicon and regex tagger. Intentionally modest: it
/// exists so the pipeline runs end-to-end without a learned model, and
/// it never emits Material-Intermedium.
class BaselineTagger : public EntityTagger {
 public:
  explicit BaselineTagger(TaggerLexicon lexicon = TaggerLexicon::defaults());

  std::vector<Entity> tag(const std::string& text) const;
  std::vector<Entity> tag_document(const AnnotatedDocument& doc) const override;
  std::string_view name() const override { return "baseline"; }

  const TaggerLexicon& lexicon() const { return lexicon_; }

 private:
  TaggerLexicon lexicon_;
};

/// Passthrough that returns the entities already present on the
/// document. Throws MissingAnnotations when there are none.
class GoldTagger : public EntityTagger {
 public:
  std::vector<Entity> tag_document(const AnnotatedDocument& doc) const override;
  std::string_view name() const override { return "gold"; }
};

}  // namespace synthflow
