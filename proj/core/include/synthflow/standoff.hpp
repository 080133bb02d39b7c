#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synthflow/document.hpp"

namespace synthflow {

struct SynthesisGraph;

class StandoffError : public std::runtime_error {
 public:
  enum class Kind {
    kMalformedLine,
    kOffsetMismatch,
    kDanglingReference,
    kUnknownLabel,
  };

  StandoffError(Kind kind, std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        kind_(kind),
        line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

struct ParseOptions {
  /// Reverse Condition arguments on load, for corpora annotated with the
  /// opposite property-to-host convention.
  bool flip_condition = false;
};

/// Parses one .txt/.ann pair. T lines become entities, R lines become
/// relations; A/#/E lines are skipped with a warning. Surface strings
/// are verified against the text offsets.
AnnotatedDocument parse_document(std::string doc_id, std::string_view txt,
                                 std::string_view ann,
                                 const ParseOptions& options = {},
                                 std::vector<std::string>* warnings = nullptr);

/// Standoff emission: entities in span order, relations in id order,
/// discontinuous spans ';'-separated. A document without annotations
/// serializes to an empty .ann.
std::string serialize_annotations(const AnnotatedDocument& doc);

struct SerializedDocument {
  std::string txt;
  std::string ann;
};

SerializedDocument serialize_document(const AnnotatedDocument& doc);

struct CorpusHandle {
  std::vector<AnnotatedDocument> documents;
  std::vector<std::filesystem::path> source_paths;  // .txt path per document
  std::vector<std::string> errors;    // per-file failures (unless fail_fast)
  std::vector<std::string> warnings;
};

struct LoadOptions {
  ParseOptions parse;
  bool fail_fast = false;
};

/// Loads every .txt/.ann pair under dir (not recursive), in lexicographic
/// filename order. Per-file errors are collected into the handle, or
/// rethrown at the first failure when fail_fast is set.
CorpusHandle load_corpus(const std::filesystem::path& dir,
                         const LoadOptions& options = {});

/// Writes doc_id.txt and doc_id.ann under dir.
void save_document(const std::filesystem::path& dir,
                   const AnnotatedDocument& doc);

/// Stable-schema JSON, keys sorted, two-space indent, newline-terminated.
std::string export_json(const AnnotatedDocument& doc);
std::string export_json(const SynthesisGraph& graph);

}  // namespace synthflow
