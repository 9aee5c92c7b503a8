#include "surgscan/metrics.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <set>

namespace surgscan::metrics {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {
  std::set<std::string_view> seen;
  for (const auto& c : classes_) {
    if (!seen.insert(c).second) throw Error(Errc::InvalidArgument, "duplicate class '" + c + "'");
  }
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw Error(Errc::UnknownLabel, "label '" + std::string(label) + "' not in class list");
  return static_cast<std::size_t>(it - classes_.begin());
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i) t += count(i, i);
  return t;
}

ConfusionMatrix confusion(std::span<const std::string> preds, std::span<const std::string> truths,
                          std::vector<std::string> classes) {
  if (preds.size() != truths.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                          std::to_string(truths.size()) + " ground-truth labels");
  }
  ConfusionMatrix m(std::move(classes));
  for (std::size_t i = 0; i < preds.size(); ++i) m.add(m.index_of(truths[i]), m.index_of(preds[i]));
  return m;
}

namespace {

void require_nonempty(const ConfusionMatrix& m) {
  if (m.size() == 0 || m.total() == 0) throw Error(Errc::EmptyMatrix, "confusion matrix is empty");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<ClassScores> per_class_prf1(const ConfusionMatrix& m) {
  const std::size_t k = m.size();
  std::vector<ClassScores> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::uint64_t tp = m.count(c, c);
    std::uint64_t predicted = 0;
    std::uint64_t actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += m.count(o, c);
      actual += m.count(c, o);
    }
    ClassScores& s = out[c];
    s.precision = ratio(tp, predicted);
    s.recall = ratio(tp, actual);
    const double denom = s.precision + s.recall;
    s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  }
  return out;
}

ClassScores macro_prf1(const ConfusionMatrix& m) {
  require_nonempty(m);
  ClassScores mean;
  const auto per_class = per_class_prf1(m);
  for (const auto& s : per_class) {
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
  }
  const double k = static_cast<double>(per_class.size());
  mean.precision /= k;
  mean.recall /= k;
  mean.f1 /= k;
  return mean;
}

double accuracy(const ConfusionMatrix& m) {
  require_nonempty(m);
  return ratio(m.trace(), m.total());
}

double roc_auc(std::span<const double> scores, std::span<const bool> positives) {
  if (scores.size() != positives.size()) {
    throw Error(Errc::LengthMismatch, "scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (positives[order[t]]) {
        positive_rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(Errc::DegenerateLabels, "ROC-AUC needs at least one positive and one negative");
  }
  const double np = static_cast<double>(n_pos);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double roc_auc_ovr(const std::vector<std::vector<double>>& scores, std::span<const std::size_t> truth) {
  if (scores.size() != truth.size()) throw Error(Errc::LengthMismatch, "scores and labels differ in length");
  if (scores.empty()) throw Error(Errc::DegenerateLabels, "no samples");
  const std::size_t k = scores.front().size();
  if (k < 2) throw Error(Errc::DegenerateLabels, "one-vs-rest AUC needs at least two classes");
  for (const auto& row : scores) {
    if (row.size() != k) throw Error(Errc::LengthMismatch, "ragged score matrix");
  }
  double sum = 0.0;
  std::vector<double> column(scores.size());
  // vector<bool> has no contiguous storage, so the flags live in a plain array
  auto positives = std::make_unique<bool[]>(scores.size());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (truth[i] >= k) throw Error(Errc::UnknownLabel, "class index out of range");
      column[i] = scores[i][c];
      positives[i] = truth[i] == c;
    }
    sum += roc_auc(column, std::span<const bool>(positives.get(), scores.size()));
  }
  return sum / static_cast<double>(k);
}

}  // namespace surgscan::metrics
