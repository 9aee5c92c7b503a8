#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/core.hpp"

namespace surgscan::metrics {

/// One model's row in a comparison table. Training accuracy cannot be
/// recomputed from predictions and is taken as supplied.
struct MetricsRow {
  std::string model_name;
  double training_acc = 0.0;
  double testing_acc = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;

  std::array<double, 6> values() const {
    return {training_acc, testing_acc, precision, recall, f1, roc_auc};
  }
};

inline constexpr std::array<std::string_view, 6> kMetricColumns = {
    "Training Acc.", "Testing Acc.", "Precision", "Recall", "F1-Score", "ROC-AUC"};

/// For each metric column, the indices of the rows holding the maximum at
/// four-decimal display precision (ties all count).
std::array<std::vector<std::size_t>, 6> column_maxima(const std::vector<MetricsRow>& rows);

/// Fixed-width text table with four-decimal values; a trailing '*' marks each
/// column maximum. Throws InvalidArgument for empty input or values outside
/// [0,1].
std::string render_comparison(const std::vector<MetricsRow>& rows, std::string_view title);

/// CSV with header "Model,Training Acc.,Testing Acc.,Precision,Recall,F1-Score,ROC-AUC".
std::string to_csv(const std::vector<MetricsRow>& rows);
/// Accepts comma- or tab-separated input with that header.
std::vector<MetricsRow> parse_csv(std::string_view text);

}  // namespace surgscan::metrics
