#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "synthflow/graph.hpp"
#include "synthflow/relext.hpp"
#include "synthflow/standoff.hpp"
#include "synthflow/textprep.hpp"

namespace {

using namespace synthflow;

std::string slurp(const char* name) {
  std::ifstream in(std::filesystem::path(SYNTHFLOW_FIXTURE_DIR) / "corpus" /
                   name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string& fig1_txt() {
  static const std::string text = slurp("fig1.txt");
  return text;
}

const std::string& fig1_ann() {
  static const std::string ann = slurp("fig1.ann");
  return ann;
}

const AnnotatedDocument& fig1_doc() {
  static const AnnotatedDocument doc =
      parse_document("fig1", fig1_txt(), fig1_ann());
  return doc;
}

void bm_tokenize(benchmark::State& state) {
  for (auto _ : state) {
    TokenizedText prepared = analyze(fig1_txt());
    benchmark::DoNotOptimize(prepared.tokens.size());
  }
}
BENCHMARK(bm_tokenize);

void bm_parse_standoff(benchmark::State& state) {
  for (auto _ : state) {
    AnnotatedDocument doc = parse_document("fig1", fig1_txt(), fig1_ann());
    benchmark::DoNotOptimize(doc.entities.size());
  }
}
BENCHMARK(bm_parse_standoff);

void bm_extract(benchmark::State& state) {
  const AnnotatedDocument& doc = fig1_doc();
  TokenizedText prepared = analyze(doc.text);
  for (auto _ : state) {
    ExtractionResult result = extract(prepared, doc.entities);
    benchmark::DoNotOptimize(result.relations.size());
  }
}
BENCHMARK(bm_extract);

void bm_build_graph(benchmark::State& state) {
  const AnnotatedDocument& doc = fig1_doc();
  for (auto _ : state) {
    SynthesisGraph graph = build_graph(doc);
    benchmark::DoNotOptimize(graph.nodes.size());
  }
}
BENCHMARK(bm_build_graph);

}  // namespace

BENCHMARK_MAIN();
