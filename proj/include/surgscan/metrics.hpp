#pragma once

// Classification metrics: confusion matrices, accuracy, macro P/R/F1, ROC-AUC.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "surgscan/core.hpp"

namespace surgscan::metrics {

/// Rows are ground truth, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> classes);

  std::size_t size() const noexcept { return classes_.size(); }
  const std::vector<std::string>& classes() const noexcept { return classes_; }

  std::uint64_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_.size() + predicted];
  }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1) {
    counts_[truth * classes_.size() + predicted] += n;
  }
  std::size_t index_of(std::string_view label) const;  // UnknownLabel

  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> classes_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::string> preds, std::span<const std::string> truths,
                          std::vector<std::string> classes);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Per-class scores; a zero denominator scores 0.
std::vector<ClassScores> per_class_prf1(const ConfusionMatrix& m);

/// Unweighted mean of per_class_prf1. Throws EmptyMatrix.
ClassScores macro_prf1(const ConfusionMatrix& m);

/// trace / total. Throws EmptyMatrix.
double accuracy(const ConfusionMatrix& m);

/// Binary AUC via the Mann-Whitney rank statistic (ties count half).
/// Throws DegenerateLabels unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const bool> positives);

/// One-vs-rest macro AUC. scores[i][k] is the score of sample i for class k.
double roc_auc_ovr(const std::vector<std::vector<double>>& scores, std::span<const std::size_t> truth);

}  // namespace surgscan::metrics
