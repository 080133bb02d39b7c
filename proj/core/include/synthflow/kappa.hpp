#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthflow/document.hpp"

namespace synthflow {

/// Square confusion matrix over string categories, built from paired
/// judgements. Row = first rater, column = second rater.
struct ConfusionMatrix {
  std::vector<std::string> categories;
  std::vector<std::vector<std::size_t>> counts;

  static ConfusionMatrix from_pairs(
      std::span<const std::pair<std::string, std::string>> pairs);

  ConfusionMatrix transposed() const;
  std::size_t total() const;
};

/// Cohen's kappa = (po - pe) / (1 - pe). Degenerate conventions: an
/// empty matrix scores 1.0; pe = 1 scores 1.0 when po = 1, else 0.0.
double cohen_kappa(const ConfusionMatrix& matrix);

class TextMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The four agreement scores. Vertices are identified by their exact
/// span set; All counts items marked by either annotator with NONE for
/// the silent one, Type restricts to items both annotators marked and
/// compares labels. Edge variants run over vertex pairs whose endpoints
/// both annotators marked. Each value averages the two rater orders,
/// which the transpose symmetry makes equal.
struct KappaReport {
  double vertices_all = 1.0;
  double vertices_type = 1.0;
  double edges_all = 1.0;
  double edges_type = 1.0;
};

KappaReport agreement_kappa(std::span<const AnnotatedDocument> annotator_a,
                            std::span<const AnnotatedDocument> annotator_b);

}  // namespace synthflow
