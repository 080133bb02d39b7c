#include "synthflow/standoff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "synthflow/graph.hpp"
#include "synthflow/utf8.hpp"

namespace synthflow {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// "R2" < "R10": compare letter prefix, then numeric suffix when both
// ids have one, otherwise fall back to plain string order.
bool natural_id_less(const std::string& a, const std::string& b) {
  auto split_id = [](const std::string& id) {
    std::size_t i = 0;
    while (i < id.size() && !std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
    std::size_t number = 0;
    bool numeric = i < id.size() && parse_size(std::string_view(id).substr(i), number);
    return std::tuple<std::string_view, bool, std::size_t>(
        std::string_view(id).substr(0, i), numeric, number);
  };
  auto [pa, na, va] = split_id(a);
  auto [pb, nb, vb] = split_id(b);
  if (pa != pb || !na || !nb) return a < b;
  if (va != vb) return va < vb;
  return a < b;
}

std::vector<Span> parse_span_list(std::string_view spec, std::size_t line_no) {
  std::vector<Span> spans;
  for (std::string_view fragment : split(spec, ';')) {
    std::vector<std::string_view> bounds = split(fragment, ' ');
    std::erase_if(bounds, [](std::string_view b) { return b.empty(); });
    Span span;
    if (bounds.size() != 2 || !parse_size(bounds[0], span.start) ||
        !parse_size(bounds[1], span.end)) {
      throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                          "bad span \"" + std::string(fragment) + "\"");
    }
    if (!span.valid()) {
      throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                          "empty or reversed span " + to_string(span));
    }
    spans.push_back(span);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start < spans[i - 1].end) {
      throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                          "overlapping fragments");
    }
  }
  return spans;
}

}  // namespace

AnnotatedDocument parse_document(std::string doc_id, std::string_view txt,
                                 std::string_view ann,
                                 const ParseOptions& options,
                                 std::vector<std::string>* warnings) {
  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text.assign(txt);
  Utf8Index index(doc.text);
  const std::size_t text_len = index.cp_count();

  struct PendingRelation {
    std::string_view body;
    std::string id;
    std::size_t line_no;
  };
  std::vector<PendingRelation> pending;
  std::unordered_set<std::string> entity_ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= ann.size()) {
    std::size_t nl = ann.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? ann.substr(pos)
                                : ann.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? ann.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const char kind = line.front();
    if (kind == 'A' || kind == '#' || kind == 'E') {
      if (warnings) {
        warnings->push_back(doc.doc_id + " line " + std::to_string(line_no) +
                            ": skipping unsupported '" + std::string(1, kind) +
                            "' annotation");
      }
      continue;
    }

    std::vector<std::string_view> fields = split(line, '\t');
    if (kind == 'T') {
      if (fields.size() < 3) {
        throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                            "text-bound line needs id, label+offsets, text");
      }
      Entity entity;
      entity.id.assign(fields[0]);
      if (!entity_ids.insert(entity.id).second) {
        throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                            "duplicate id " + entity.id);
      }
      std::string_view body = fields[1];
      std::size_t space = body.find(' ');
      if (space == std::string_view::npos) {
        throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                            "missing offsets");
      }
      std::string_view label_name = body.substr(0, space);
      auto label = parse_vertex_label(label_name);
      if (!label) {
        throw StandoffError(StandoffError::Kind::kUnknownLabel, line_no,
                            "unknown vertex label \"" + std::string(label_name) +
                                "\"");
      }
      entity.label = *label;
      entity.spans = parse_span_list(body.substr(space + 1), line_no);
      for (const Span& s : entity.spans) {
        if (s.end > text_len) {
          throw StandoffError(StandoffError::Kind::kOffsetMismatch, line_no,
                              "span " + to_string(s) + " exceeds text length " +
                                  std::to_string(text_len));
        }
      }
      // Surface field may span several tab-split pieces if the annotated
      // text itself contained tabs; stitch them back together.
      std::string surface(fields[2]);
      for (std::size_t i = 3; i < fields.size(); ++i) {
        surface += '\t';
        surface += fields[i];
      }
      std::string expected = surface_text(doc.text, index, entity.spans);
      if (surface != expected) {
        throw StandoffError(StandoffError::Kind::kOffsetMismatch, line_no,
                            "surface \"" + surface + "\" != text \"" +
                                expected + "\" at " + to_string(entity.spans));
      }
      entity.text = std::move(surface);
      doc.entities.push_back(std::move(entity));
    } else if (kind == 'R') {
      if (fields.size() < 2) {
        throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                            "relation line needs id and arguments");
      }
      pending.push_back({fields[1], std::string(fields[0]), line_no});
    } else {
      throw StandoffError(StandoffError::Kind::kMalformedLine, line_no,
                          "unsupported line kind '" + std::string(1, kind) +
                              "'");
    }
  }

  std::unordered_set<std::string> relation_ids;
  for (const PendingRelation& p : pending) {
    std::vector<std::string_view> parts = split(p.body, ' ');
    std::erase_if(parts, [](std::string_view s) { return s.empty(); });
    if (parts.size() != 3 || !parts[1].starts_with("Arg1:") ||
        !parts[2].starts_with("Arg2:")) {
      throw StandoffError(StandoffError::Kind::kMalformedLine, p.line_no,
                          "expected \"<Label> Arg1:<id> Arg2:<id>\"");
    }
    auto label = parse_edge_label(parts[0]);
    if (!label) {
      throw StandoffError(StandoffError::Kind::kUnknownLabel, p.line_no,
                          "unknown edge label \"" + std::string(parts[0]) +
                              "\"");
    }
    Relation relation;
    relation.id = p.id;
    if (!relation_ids.insert(relation.id).second) {
      throw StandoffError(StandoffError::Kind::kMalformedLine, p.line_no,
                          "duplicate id " + relation.id);
    }
    relation.label = *label;
    relation.from.assign(parts[1].substr(5));
    relation.to.assign(parts[2].substr(5));
    if (options.flip_condition && relation.label == EdgeLabel::kCondition) {
      std::swap(relation.from, relation.to);
    }
    for (const std::string& endpoint : {relation.from, relation.to}) {
      if (entity_ids.count(endpoint) == 0) {
        throw StandoffError(StandoffError::Kind::kDanglingReference, p.line_no,
                            relation.id + " references missing entity " +
                                endpoint);
      }
    }
    if (relation.from == relation.to) {
      throw StandoffError(StandoffError::Kind::kMalformedLine, p.line_no,
                          relation.id + " is a self-loop");
    }
    doc.relations.push_back(std::move(relation));
  }
  return doc;
}

std::string serialize_annotations(const AnnotatedDocument& doc) {
  std::vector<const Entity*> entities;
  entities.reserve(doc.entities.size());
  for (const Entity& e : doc.entities) entities.push_back(&e);
  std::sort(entities.begin(), entities.end(),
            [](const Entity* a, const Entity* b) {
              if (a->first_span() != b->first_span()) {
                return a->first_span() < b->first_span();
              }
              return natural_id_less(a->id, b->id);
            });

  std::vector<const Relation*> relations;
  relations.reserve(doc.relations.size());
  for (const Relation& r : doc.relations) relations.push_back(&r);
  std::sort(relations.begin(), relations.end(),
            [](const Relation* a, const Relation* b) {
              return natural_id_less(a->id, b->id);
            });

  std::string out;
  for (const Entity* e : entities) {
    std::string surface = e->text;
    std::replace(surface.begin(), surface.end(), '\n', ' ');
    out += e->id;
    out += '\t';
    out += to_string(e->label);
    out += ' ';
    out += to_string(e->spans);
    out += '\t';
    out += surface;
    out += '\n';
  }
  for (const Relation* r : relations) {
    out += r->id;
    out += '\t';
    out += to_string(r->label);
    out += " Arg1:";
    out += r->from;
    out += " Arg2:";
    out += r->to;
    out += '\n';
  }
  return out;
}

SerializedDocument serialize_document(const AnnotatedDocument& doc) {
  return {doc.text, serialize_annotations(doc)};
}

CorpusHandle load_corpus(const std::filesystem::path& dir,
                         const LoadOptions& options) {
  namespace fs = std::filesystem;
  CorpusHandle handle;
  if (!fs::is_directory(dir)) {
    std::string message = "not a directory: " + dir.string();
    if (options.fail_fast) throw std::runtime_error(message);
    handle.errors.push_back(message);
    return handle;
  }

  std::vector<fs::path> txt_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& path = entry.path();
    if (path.extension() == ".txt") {
      txt_files.push_back(path);
    } else if (path.extension() == ".ann") {
      fs::path sibling = path;
      sibling.replace_extension(".txt");
      if (!fs::exists(sibling)) {
        std::string message = path.string() + ": no sibling .txt file";
        if (options.fail_fast) throw std::runtime_error(message);
        handle.errors.push_back(message);
      }
    }
  }
  std::sort(txt_files.begin(), txt_files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  auto read_file = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };

  for (const fs::path& txt_path : txt_files) {
    fs::path ann_path = txt_path;
    ann_path.replace_extension(".ann");
    try {
      if (!fs::exists(ann_path)) {
        throw std::runtime_error("no sibling .ann file");
      }
      AnnotatedDocument doc =
          parse_document(txt_path.stem().string(), read_file(txt_path),
                         read_file(ann_path), options.parse, &handle.warnings);
      handle.documents.push_back(std::move(doc));
      handle.source_paths.push_back(txt_path);
    } catch (const std::exception& error) {
      if (options.fail_fast) throw;
      handle.errors.push_back(txt_path.string() + ": " + error.what());
    }
  }
  return handle;
}

void save_document(const std::filesystem::path& dir,
                   const AnnotatedDocument& doc) {
  std::filesystem::create_directories(dir);
  SerializedDocument serialized = serialize_document(doc);
  std::ofstream txt(dir / (doc.doc_id + ".txt"), std::ios::binary);
  txt << serialized.txt;
  std::ofstream ann(dir / (doc.doc_id + ".ann"), std::ios::binary);
  ann << serialized.ann;
}

std::string export_json(const AnnotatedDocument& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["text"] = doc.text;
  j["entities"] = nlohmann::json::array();
  for (const Entity& e : doc.entities) {
    nlohmann::json je;
    je["id"] = e.id;
    je["label"] = to_string(e.label);
    je["spans"] = nlohmann::json::array();
    for (const Span& s : e.spans) {
      je["spans"].push_back({s.start, s.end});
    }
    je["text"] = e.text;
    j["entities"].push_back(std::move(je));
  }
  j["relations"] = nlohmann::json::array();
  for (const Relation& r : doc.relations) {
    nlohmann::json jr;
    jr["id"] = r.id;
    jr["label"] = to_string(r.label);
    jr["from"] = r.from;
    jr["to"] = r.to;
    j["relations"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

std::string export_json(const SynthesisGraph& graph) {
  nlohmann::json j;
  j["doc_id"] = graph.doc_id;
  j["nodes"] = nlohmann::json::array();
  for (const GraphNode& node : graph.nodes) {
    nlohmann::json jn;
    jn["id"] = "c" + std::to_string(node.id);
    jn["label"] = to_string(node.label);
    jn["representative"] = node.representative;
    jn["members"] = node.members;
    jn["texts"] = node.texts;
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = nlohmann::json::array();
  for (const GraphEdge& edge : graph.edges) {
    nlohmann::json je;
    je["from"] = "c" + std::to_string(edge.from);
    je["to"] = "c" + std::to_string(edge.to);
    je["label"] = to_string(edge.label);
    if (edge.rule) je["rule"] = to_string(*edge.rule);
    j["edges"].push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

}  // namespace synthflow
