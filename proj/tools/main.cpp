#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "synthflow/eval.hpp"
#include "synthflow/graph.hpp"
#include "synthflow/kappa.hpp"
#include "synthflow/relext.hpp"
#include "synthflow/standoff.hpp"
#include "synthflow/stats.hpp"
#include "synthflow/tagger.hpp"
#include "synthflow/textprep.hpp"

namespace fs = std::filesystem;
using namespace synthflow;

namespace {

struct Options {
  std::string input;
  std::string gold;
  std::string pred;
  std::string out;
  std::string config_dir;
  std::string tagger = "gold";
  std::string ablation = "full";
  std::string format;
  std::string bracket_chain = "link";
  bool flip_condition = false;
  bool fail_fast = false;
  bool keep_longest = false;
};

RuleConfig rule_config(const Options& opt) {
  RuleConfig config = RuleConfig::preset(opt.ablation);
  auto mode = parse_bracket_chain_mode(opt.bracket_chain);
  if (!mode) {
    throw CLI::ValidationError("--bracket-chain",
                               "must be link, skip or inline");
  }
  config.bracket_chain = *mode;
  return config;
}

LoadOptions load_options(const Options& opt) {
  LoadOptions load;
  load.parse.flip_condition = opt.flip_condition;
  load.fail_fast = opt.fail_fast;
  return load;
}

CorpusHandle load_dir(const std::string& dir, const Options& opt,
                      std::size_t& failures) {
  CorpusHandle corpus = load_corpus(dir, load_options(opt));
  for (const std::string& warning : corpus.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  for (const std::string& error : corpus.errors) {
    std::cerr << "error: " << error << "\n";
  }
  failures += corpus.errors.size();
  return corpus;
}

/// Writes one artifact per document into --out, or streams to stdout.
class Sink {
 public:
  explicit Sink(const std::string& out_dir) : dir_(out_dir) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  void write(const std::string& doc_id, const std::string& extension,
             const std::string& payload) const {
    if (dir_.empty()) {
      std::cout << payload;
      return;
    }
    fs::path target = fs::path(dir_) / (doc_id + extension);
    std::ofstream out(target, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + target.string());
    out << payload;
  }

  bool to_files() const { return !dir_.empty(); }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

/// Entity layer selection for a document, honoring --tagger.
struct EntitySource {
  const Options& opt;
  BaselineTagger baseline;
  const CorpusHandle* pred_corpus = nullptr;

  explicit EntitySource(const Options& options)
      : opt(options),
        baseline(options.config_dir.empty()
                     ? TaggerLexicon::defaults()
                     : TaggerLexicon::load(options.config_dir)) {}

  std::vector<Entity> entities_for(const AnnotatedDocument& doc) const {
    if (opt.tagger == "gold") return GoldTagger().tag_document(doc);
    if (opt.tagger == "baseline") return baseline.tag_document(doc);
    if (opt.tagger == "standoff-pred") {
      for (const AnnotatedDocument& candidate : pred_corpus->documents) {
        if (candidate.doc_id == doc.doc_id) return candidate.entities;
      }
      throw std::runtime_error("no prediction document for " + doc.doc_id);
    }
    throw CLI::ValidationError("--tagger",
                               "must be gold, baseline or standoff-pred");
  }
};

void print_diagnostics(const std::string& doc_id,
                       const ExtractionResult& result) {
  for (const Diagnostic& diag : result.diagnostics) {
    std::cerr << doc_id << ": [" << to_string(diag.code) << "] ";
    if (!diag.entity_id.empty()) std::cerr << diag.entity_id << " ";
    std::cerr << diag.message << "\n";
  }
}

int cmd_extract(const Options& opt) {
  std::size_t failures = 0;
  CorpusHandle corpus = load_dir(opt.input, opt, failures);
  RuleConfig config = rule_config(opt);
  EntitySource source(opt);
  CorpusHandle pred;
  if (opt.tagger == "standoff-pred") {
    if (opt.pred.empty()) {
      throw CLI::ValidationError("--pred",
                                 "required with --tagger standoff-pred");
    }
    pred = load_dir(opt.pred, opt, failures);
    source.pred_corpus = &pred;
  }
  Sink sink(opt.out);

  for (const AnnotatedDocument& doc : corpus.documents) {
    try {
      TokenizedText tokenized = analyze(doc.text);
      std::vector<Entity> entities = source.entities_for(doc);
      if (opt.keep_longest) {
        entities = resolve_token_overlaps(tokenized, entities);
      }
      ExtractionResult result = extract(tokenized, entities, config);
      print_diagnostics(doc.doc_id, result);
      SynthesisGraph graph = build_graph(doc.doc_id, entities, result);

      if (opt.format == "json") {
        sink.write(doc.doc_id, ".json", export_json(graph));
      } else if (opt.format == "dot") {
        sink.write(doc.doc_id, ".dot", to_dot(graph));
      } else {
        AnnotatedDocument out_doc;
        out_doc.doc_id = doc.doc_id;
        out_doc.text = doc.text;
        out_doc.entities = entities;
        for (const PredictedRelation& pr : result.relations) {
          out_doc.relations.push_back(pr.relation);
        }
        if (sink.to_files()) {
          save_document(sink.dir(), out_doc);
        } else {
          std::cout << serialize_annotations(out_doc);
        }
      }
    } catch (const std::exception& e) {
      if (opt.fail_fast) throw;
      std::cerr << "error: " << doc.doc_id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

std::string fmt(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << value;
  return out.str();
}

void print_prf_row(const std::string& name, const PRF& row) {
  std::cout << "  " << std::left << std::setw(24) << name << std::right
            << std::setw(7) << fmt(row.precision()) << std::setw(7)
            << fmt(row.recall()) << std::setw(7) << fmt(row.f1())
            << std::setw(7) << row.tp << std::setw(6) << row.fp
            << std::setw(6) << row.fn << "\n";
}

void print_macro_row(const std::string& name, const MacroScore& row) {
  std::cout << "  " << std::left << std::setw(24) << name << std::right
            << std::setw(7) << fmt(row.precision) << std::setw(7)
            << fmt(row.recall) << std::setw(7) << fmt(row.f1) << "\n";
}

void print_entity_report(const std::string& title,
                         const EntityEvalReport& report) {
  std::cout << title << "\n";
  std::cout << "  " << std::left << std::setw(24) << "label" << std::right
            << std::setw(7) << "P" << std::setw(7) << "R" << std::setw(7)
            << "F1" << std::setw(7) << "TP" << std::setw(6) << "FP"
            << std::setw(6) << "FN" << "\n";
  for (const auto& [label, row] : report.per_label) {
    print_prf_row(std::string(to_string(label)), row);
  }
  for (const auto& [group, row] : report.per_coarse) {
    print_prf_row(std::string(to_string(group)) + " (micro)", row);
  }
  print_macro_row("ALL (macro)", report.all);
}

void print_relation_report(const RelationEvalReport& report) {
  std::cout << "Relation evaluation (coreference-aware)\n";
  std::cout << "  " << std::left << std::setw(24) << "label" << std::right
            << std::setw(7) << "P" << std::setw(7) << "R" << std::setw(7)
            << "F1" << std::setw(7) << "TP" << std::setw(6) << "FP"
            << std::setw(6) << "FN" << "\n";
  print_prf_row("Condition", report.condition);
  print_prf_row("Next", report.next);
  print_macro_row("ALL (macro)", report.all);
}

nlohmann::json prf_json(const PRF& row) {
  return {{"tp", row.tp},           {"fp", row.fp},
          {"fn", row.fn},           {"precision", row.precision()},
          {"recall", row.recall()}, {"f1", row.f1()}};
}

nlohmann::json macro_json(const MacroScore& row) {
  return {{"precision", row.precision},
          {"recall", row.recall},
          {"f1", row.f1}};
}

nlohmann::json entity_report_json(const EntityEvalReport& report) {
  nlohmann::json j;
  j["per_label"] = nlohmann::json::object();
  for (const auto& [label, row] : report.per_label) {
    j["per_label"][std::string(to_string(label))] = prf_json(row);
  }
  j["per_coarse"] = nlohmann::json::object();
  for (const auto& [group, row] : report.per_coarse) {
    j["per_coarse"][std::string(to_string(group))] = prf_json(row);
  }
  j["all"] = macro_json(report.all);
  return j;
}

nlohmann::json relation_report_json(const RelationEvalReport& report) {
  nlohmann::json j;
  j["Condition"] = prf_json(report.condition);
  j["Next"] = prf_json(report.next);
  j["all"] = macro_json(report.all);
  return j;
}

int cmd_eval(const Options& opt) {
  std::size_t failures = 0;
  CorpusHandle gold = load_dir(opt.gold, opt, failures);

  std::vector<AnnotatedDocument> predictions;
  if (!opt.pred.empty()) {
    CorpusHandle pred = load_dir(opt.pred, opt, failures);
    predictions = std::move(pred.documents);
  } else {
    // Self-contained run: tag, extract, and score against the gold layer.
    RuleConfig config = rule_config(opt);
    EntitySource source(opt);
    for (const AnnotatedDocument& doc : gold.documents) {
      TokenizedText tokenized = analyze(doc.text);
      AnnotatedDocument pred_doc;
      pred_doc.doc_id = doc.doc_id;
      pred_doc.text = doc.text;
      pred_doc.entities = source.entities_for(doc);
      if (opt.keep_longest) {
        pred_doc.entities =
            resolve_token_overlaps(tokenized, pred_doc.entities);
      }
      ExtractionResult result = extract(tokenized, pred_doc.entities, config);
      print_diagnostics(doc.doc_id, result);
      for (const PredictedRelation& pr : result.relations) {
        pred_doc.relations.push_back(pr.relation);
      }
      predictions.push_back(std::move(pred_doc));
    }
  }

  EntityEvalReport fine =
      entity_prf(gold.documents, predictions, MatchSetting::kFine);
  EntityEvalReport coarse =
      entity_prf(gold.documents, predictions, MatchSetting::kCoarse);
  RelationEvalReport relations = relation_prf(gold.documents, predictions);

  if (opt.format == "json") {
    nlohmann::json j;
    j["entities_fine"] = entity_report_json(fine);
    j["entities_coarse"] = entity_report_json(coarse);
    j["relations"] = relation_report_json(relations);
    std::cout << j.dump(2) << "\n";
  } else {
    print_entity_report("Entity evaluation (fine match)", fine);
    print_entity_report("Entity evaluation (coarse match)", coarse);
    print_relation_report(relations);
  }
  return failures == 0 ? 0 : 1;
}

int cmd_agree(const Options& opt) {
  std::size_t failures = 0;
  CorpusHandle a = load_dir(opt.gold, opt, failures);
  CorpusHandle b = load_dir(opt.pred, opt, failures);
  KappaReport report = agreement_kappa(a.documents, b.documents);
  if (opt.format == "json") {
    nlohmann::json j = {{"vertices_all", report.vertices_all},
                        {"vertices_type", report.vertices_type},
                        {"edges_all", report.edges_all},
                        {"edges_type", report.edges_type}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "Inter-annotator agreement (Cohen's kappa)\n";
    std::cout << "  vertices  All " << fmt(report.vertices_all) << "  Type "
              << fmt(report.vertices_type) << "\n";
    std::cout << "  edges     All " << fmt(report.edges_all) << "  Type "
              << fmt(report.edges_type) << "\n";
  }
  return failures == 0 ? 0 : 1;
}

int cmd_stats(const Options& opt) {
  std::size_t failures = 0;
  CorpusHandle corpus = load_dir(opt.input, opt, failures);
  CorpusStats stats = corpus_stats(corpus.documents);
  if (opt.format == "json") {
    nlohmann::json j;
    j["documents"] = stats.documents;
    j["sentences"] = stats.sentences;
    j["tokens"] = stats.tokens;
    j["entities"] = stats.entities;
    j["relations"] = stats.relations;
    j["avg_sentences_per_doc"] = stats.avg_sentences_per_doc();
    j["avg_tokens_per_doc"] = stats.avg_tokens_per_doc();
    j["avg_entities_per_doc"] = stats.avg_entities_per_doc();
    j["vertex_counts"] = nlohmann::json::object();
    for (VertexLabel label : kAllVertexLabels) {
      auto it = stats.vertex_counts.find(label);
      j["vertex_counts"][std::string(to_string(label))] =
          it == stats.vertex_counts.end() ? 0 : it->second;
    }
    j["edge_counts"] = nlohmann::json::object();
    for (EdgeLabel label : kAllEdgeLabels) {
      auto it = stats.edge_counts.find(label);
      j["edge_counts"][std::string(to_string(label))] =
          it == stats.edge_counts.end() ? 0 : it->second;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "Corpus statistics\n";
    std::cout << "  documents  " << stats.documents << "\n";
    std::cout << "  sentences  " << stats.sentences << " (avg "
              << stats.avg_sentences_per_doc() << "/doc)\n";
    std::cout << "  tokens     " << stats.tokens << " (avg "
              << stats.avg_tokens_per_doc() << "/doc)\n";
    std::cout << "  entities   " << stats.entities << " (avg "
              << stats.avg_entities_per_doc() << "/doc)\n";
    std::cout << "  relations  " << stats.relations << "\n";
    std::cout << "  vertex labels\n";
    for (VertexLabel label : kAllVertexLabels) {
      auto it = stats.vertex_counts.find(label);
      std::cout << "    " << std::left << std::setw(22) << to_string(label)
                << std::right << std::setw(8)
                << (it == stats.vertex_counts.end() ? 0 : it->second) << "\n";
    }
    std::cout << "  edge labels\n";
    for (EdgeLabel label : kAllEdgeLabels) {
      auto it = stats.edge_counts.find(label);
      std::cout << "    " << std::left << std::setw(22) << to_string(label)
                << std::right << std::setw(8)
                << (it == stats.edge_counts.end() ? 0 : it->second) << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_rules_report(const Options& opt) {
  if (opt.tagger != "gold") {
    throw CLI::ValidationError(
        "--tagger", "rules-report scores rules on the gold entity layer");
  }
  std::size_t failures = 0;
  CorpusHandle corpus = load_dir(opt.gold, opt, failures);
  RuleConfig config = rule_config(opt);
  RuleStats totals;
  for (const AnnotatedDocument& doc : corpus.documents) {
    try {
      TokenizedText tokenized = analyze(doc.text);
      ExtractionResult result = extract(tokenized, doc.entities, config);
      print_diagnostics(doc.doc_id, result);
      totals += rule_stats(doc, result.relations);
    } catch (const std::exception& e) {
      if (opt.fail_fast) throw;
      std::cerr << "error: " << doc.doc_id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  if (opt.format == "json") {
    nlohmann::json j;
    j["total_edges"] = totals.total_edges;
    j["rules"] = nlohmann::json::object();
    for (Rule rule : kAllRules) {
      auto it = totals.per_rule.find(rule);
      nlohmann::json row;
      row["edges"] = it == totals.per_rule.end() ? 0 : it->second.edges;
      row["correct"] = it == totals.per_rule.end() ? 0 : it->second.correct;
      row["coverage"] = totals.coverage(rule);
      row["accuracy"] = totals.accuracy(rule);
      j["rules"][std::string(to_string(rule))] = std::move(row);
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "Rule attribution (" << totals.total_edges
              << " predicted edges)\n";
    std::cout << "  " << std::left << std::setw(8) << "rule" << std::right
              << std::setw(7) << "edges" << std::setw(10) << "coverage"
              << std::setw(10) << "accuracy" << "\n";
    for (Rule rule : kAllRules) {
      auto it = totals.per_rule.find(rule);
      std::size_t edges = it == totals.per_rule.end() ? 0 : it->second.edges;
      std::cout << "  " << std::left << std::setw(8) << to_string(rule)
                << std::right << std::setw(7) << edges << std::setw(10)
                << fmt(totals.coverage(rule)) << std::setw(10)
                << fmt(totals.accuracy(rule)) << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_export(const Options& opt) {
  std::size_t failures = 0;
  CorpusHandle corpus = load_dir(opt.input, opt, failures);
  Sink sink(opt.out);
  for (const AnnotatedDocument& doc : corpus.documents) {
    try {
      if (opt.format == "json") {
        sink.write(doc.doc_id, ".json", export_json(doc));
      } else if (opt.format == "dot") {
        sink.write(doc.doc_id, ".dot", to_dot(build_graph(doc)));
      } else {
        if (sink.to_files()) {
          save_document(sink.dir(), doc);
        } else {
          std::cout << serialize_annotations(doc);
        }
      }
    } catch (const std::exception& e) {
      if (opt.fail_fast) throw;
      std::cerr << "error: " << doc.doc_id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis flow graph extraction from annotated text"};
  app.require_subcommand(1);
  Options opt;
  int (*run)(const Options&) = nullptr;

  auto add_shared = [&opt](CLI::App* cmd) {
    cmd->add_option("--ablation", opt.ablation,
                    "Rule preset: full, no-mat-sub, no-prop-sub, no-sub")
        ->check(CLI::IsMember({"full", "no-mat-sub", "no-prop-sub", "no-sub"}));
    cmd->add_option("--bracket-chain", opt.bracket_chain,
                    "Bracketed operation handling: link, skip, inline")
        ->check(CLI::IsMember({"link", "skip", "inline"}));
    cmd->add_flag("--flip-condition", opt.flip_condition,
                  "Swap Condition arguments on load");
    cmd->add_flag("--fail-fast", opt.fail_fast,
                  "Stop at the first document error");
  };
  auto add_tagger = [&opt](CLI::App* cmd) {
    cmd->add_option("--tagger", opt.tagger,
                    "Entity source: gold, baseline, standoff-pred")
        ->check(CLI::IsMember({"gold", "baseline", "standoff-pred"}));
    cmd->add_option("--config-dir", opt.config_dir,
                    "Baseline tagger lexicon directory")
        ->check(CLI::ExistingDirectory);
    cmd->add_flag("--keep-longest", opt.keep_longest,
                  "Resolve overlapping entities by keeping the longest");
  };

  CLI::App* extract_cmd =
      app.add_subcommand("extract", "Run the extraction pipeline");
  extract_cmd->add_option("--input", opt.input, "Corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  extract_cmd->add_option("--pred", opt.pred,
                          "Prediction directory for --tagger standoff-pred")
      ->check(CLI::ExistingDirectory);
  extract_cmd->add_option("--out", opt.out, "Output directory (else stdout)");
  extract_cmd
      ->add_option("--format", opt.format, "Output format: json, dot, ann")
      ->check(CLI::IsMember({"json", "dot", "ann"}));
  add_shared(extract_cmd);
  add_tagger(extract_cmd);
  extract_cmd->callback([&] {
    if (opt.format.empty()) opt.format = "json";
    run = cmd_extract;
  });

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions");
  eval_cmd->add_option("--gold", opt.gold, "Gold corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd
      ->add_option("--pred", opt.pred,
                   "Prediction directory (omit to run the pipeline)")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--format", opt.format, "Output format: table, json")
      ->check(CLI::IsMember({"table", "json"}));
  add_shared(eval_cmd);
  add_tagger(eval_cmd);
  eval_cmd->callback([&] {
    if (opt.format.empty()) opt.format = "table";
    run = cmd_eval;
  });

  CLI::App* agree_cmd =
      app.add_subcommand("agree", "Inter-annotator agreement");
  agree_cmd->add_option("--gold", opt.gold, "First annotator directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  agree_cmd->add_option("--pred", opt.pred, "Second annotator directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  agree_cmd->add_option("--format", opt.format, "Output format: table, json")
      ->check(CLI::IsMember({"table", "json"}));
  add_shared(agree_cmd);
  agree_cmd->callback([&] {
    if (opt.format.empty()) opt.format = "table";
    run = cmd_agree;
  });

  CLI::App* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("--input", opt.input, "Corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats_cmd->add_option("--format", opt.format, "Output format: table, json")
      ->check(CLI::IsMember({"table", "json"}));
  add_shared(stats_cmd);
  stats_cmd->callback([&] {
    if (opt.format.empty()) opt.format = "table";
    run = cmd_stats;
  });

  CLI::App* rules_cmd =
      app.add_subcommand("rules-report", "Per-rule coverage and accuracy");
  rules_cmd->add_option("--gold", opt.gold, "Gold corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  rules_cmd->add_option("--format", opt.format, "Output format: table, json")
      ->check(CLI::IsMember({"table", "json"}));
  add_shared(rules_cmd);
  rules_cmd->add_option("--tagger", opt.tagger)->group("");  // gold only
  rules_cmd->callback([&] {
    if (opt.format.empty()) opt.format = "table";
    run = cmd_rules_report;
  });

  CLI::App* export_cmd =
      app.add_subcommand("export", "Re-emit annotations or gold graphs");
  export_cmd->add_option("--input", opt.input, "Corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  export_cmd->add_option("--out", opt.out, "Output directory (else stdout)");
  export_cmd
      ->add_option("--format", opt.format, "Output format: json, dot, ann")
      ->check(CLI::IsMember({"json", "dot", "ann"}));
  add_shared(export_cmd);
  export_cmd->callback([&] {
    if (opt.format.empty()) opt.format = "json";
    run = cmd_export;
  });

  CLI11_PARSE(app, argc, argv);

  try {
    return run(opt);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
