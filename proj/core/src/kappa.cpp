#include "synthflow/kappa.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "synthflow/span.hpp"

namespace synthflow {

namespace {

constexpr std::string_view kNone = "NONE";

struct DocView {
  /// span-set key -> fine label name.
  std::map<std::string, std::string> vertices;
  /// (from key, to key) -> edge label name.
  std::map<std::pair<std::string, std::string>, std::string> edges;
};

DocView view_of(const AnnotatedDocument& doc) {
  DocView view;
  std::unordered_map<std::string, std::string> key_of_id;
  for (const Entity& e : doc.entities) {
    std::string key = to_string(e.spans);
    view.vertices.emplace(key, std::string(to_string(e.label)));
    key_of_id.emplace(e.id, std::move(key));
  }
  for (const Relation& r : doc.relations) {
    auto from = key_of_id.find(r.from);
    auto to = key_of_id.find(r.to);
    if (from == key_of_id.end() || to == key_of_id.end()) continue;
    view.edges.emplace(std::make_pair(from->second, to->second),
                       std::string(to_string(r.label)));
  }
  return view;
}

using Pairs = std::vector<std::pair<std::string, std::string>>;

void collect_items(const DocView& a, const DocView& b, Pairs& vertices_all,
                   Pairs& vertices_type, Pairs& edges_all,
                   Pairs& edges_type) {
  std::set<std::string> vertex_union;
  std::set<std::string> vertex_both;
  for (const auto& [key, label] : a.vertices) {
    vertex_union.insert(key);
    if (b.vertices.contains(key)) vertex_both.insert(key);
  }
  for (const auto& [key, label] : b.vertices) vertex_union.insert(key);

  auto label_or_none = [](const DocView& view, const std::string& key) {
    auto it = view.vertices.find(key);
    return it == view.vertices.end() ? std::string(kNone) : it->second;
  };
  for (const std::string& key : vertex_union) {
    vertices_all.emplace_back(label_or_none(a, key), label_or_none(b, key));
  }
  for (const std::string& key : vertex_both) {
    vertices_type.emplace_back(a.vertices.at(key), b.vertices.at(key));
  }

  auto eligible = [&vertex_both](const std::pair<std::string, std::string>&
                                     endpoints) {
    return vertex_both.contains(endpoints.first) &&
           vertex_both.contains(endpoints.second);
  };
  std::set<std::pair<std::string, std::string>> pair_union;
  for (const auto& [endpoints, label] : a.edges) {
    if (eligible(endpoints)) pair_union.insert(endpoints);
  }
  for (const auto& [endpoints, label] : b.edges) {
    if (eligible(endpoints)) pair_union.insert(endpoints);
  }
  auto edge_or_none = [](const DocView& view,
                         const std::pair<std::string, std::string>& key) {
    auto it = view.edges.find(key);
    return it == view.edges.end() ? std::string(kNone) : it->second;
  };
  for (const auto& endpoints : pair_union) {
    std::string la = edge_or_none(a, endpoints);
    std::string lb = edge_or_none(b, endpoints);
    edges_all.emplace_back(la, lb);
    if (la != kNone && lb != kNone) edges_type.emplace_back(la, lb);
  }
}

double averaged_kappa(const Pairs& pairs) {
  ConfusionMatrix forward = ConfusionMatrix::from_pairs(pairs);
  return (cohen_kappa(forward) + cohen_kappa(forward.transposed())) / 2.0;
}

}  // namespace

ConfusionMatrix ConfusionMatrix::from_pairs(
    std::span<const std::pair<std::string, std::string>> pairs) {
  ConfusionMatrix matrix;
  std::set<std::string> names;
  for (const auto& [a, b] : pairs) {
    names.insert(a);
    names.insert(b);
  }
  matrix.categories.assign(names.begin(), names.end());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < matrix.categories.size(); ++i) {
    index.emplace(matrix.categories[i], i);
  }
  matrix.counts.assign(matrix.categories.size(),
                       std::vector<std::size_t>(matrix.categories.size(), 0));
  for (const auto& [a, b] : pairs) {
    ++matrix.counts[index.at(a)][index.at(b)];
  }
  return matrix;
}

ConfusionMatrix ConfusionMatrix::transposed() const {
  ConfusionMatrix out;
  out.categories = categories;
  out.counts.assign(categories.size(),
                    std::vector<std::size_t>(categories.size(), 0));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      out.counts[j][i] = counts[i][j];
    }
  }
  return out;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts) {
    for (std::size_t cell : row) sum += cell;
  }
  return sum;
}

double cohen_kappa(const ConfusionMatrix& matrix) {
  std::size_t n = matrix.total();
  if (n == 0) return 1.0;
  std::size_t k = matrix.categories.size();
  std::size_t agree = 0;
  std::vector<std::size_t> row_sum(k, 0);
  std::vector<std::size_t> col_sum(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    agree += matrix.counts[i][i];
    for (std::size_t j = 0; j < k; ++j) {
      row_sum[i] += matrix.counts[i][j];
      col_sum[j] += matrix.counts[i][j];
    }
  }
  double po = static_cast<double>(agree) / static_cast<double>(n);
  double pe = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    pe += (static_cast<double>(row_sum[i]) / n) *
          (static_cast<double>(col_sum[i]) / n);
  }
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

KappaReport agreement_kappa(std::span<const AnnotatedDocument> annotator_a,
                            std::span<const AnnotatedDocument> annotator_b) {
  std::unordered_map<std::string, const AnnotatedDocument*> b_by_id;
  for (const AnnotatedDocument& doc : annotator_b) {
    b_by_id.emplace(doc.doc_id, &doc);
  }
  Pairs vertices_all, vertices_type, edges_all, edges_type;
  std::size_t paired = 0;
  for (const AnnotatedDocument& doc : annotator_a) {
    auto it = b_by_id.find(doc.doc_id);
    if (it == b_by_id.end()) {
      throw TextMismatch("document " + doc.doc_id +
                         " missing from the second annotator");
    }
    if (doc.text != it->second->text) {
      throw TextMismatch("document " + doc.doc_id +
                         " differs in text between annotators");
    }
    ++paired;
    collect_items(view_of(doc), view_of(*it->second), vertices_all,
                  vertices_type, edges_all, edges_type);
  }
  if (paired != annotator_b.size()) {
    throw TextMismatch("second annotator has unpaired documents");
  }

  KappaReport report;
  report.vertices_all = averaged_kappa(vertices_all);
  report.vertices_type = averaged_kappa(vertices_type);
  report.edges_all = averaged_kappa(edges_all);
  report.edges_type = averaged_kappa(edges_type);
  return report;
}

}  // namespace synthflow
