#include "lexcnn/eval.hpp"

#include <fmt/format.h>

#include "lexcnn/error.hpp"

namespace lexcnn {

ConfusionMatrix::ConfusionMatrix(LabelScheme s)
    : scheme(s), counts(decltype(counts)::Zero(num_classes(s), num_classes(s))) {}

int argmax_class(const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  if (probabilities.size() == 0) throw UsageError("argmax of an empty vector");
  Index best = 0;
  for (Index i = 1; i < probabilities.size(); ++i) {
    if (probabilities[i] > probabilities[best]) best = i;
  }
  return static_cast<int>(best);
}

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& gold,
                          LabelScheme scheme) {
  if (predicted.size() != gold.size()) {
    throw UsageError(fmt::format("{} predictions for {} gold labels", predicted.size(), gold.size()));
  }
  ConfusionMatrix cm(scheme);
  const int k = num_classes(scheme);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= k || predicted[i] < 0 || predicted[i] >= k) {
      throw UsageError("label index out of range for the scheme");
    }
    ++cm.counts(gold[i], predicted[i]);
  }
  return cm;
}

double f1_score(const ConfusionMatrix& cm, int label) {
  const auto tp = static_cast<double>(cm.counts(label, label));
  const auto predicted = static_cast<double>(cm.counts.col(label).sum());
  const auto actual = static_cast<double>(cm.counts.row(label).sum());
  // F1 = 2TP / (2TP + FP + FN)
  const double denom = predicted + actual;
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

double avg_f1_pos_neg(const ConfusionMatrix& cm) {
  if (cm.scheme != LabelScheme::ThreeClass) throw UsageError("avg pos/neg F1 requires the 3-class scheme");
  const int pos = *label_index(cm.scheme, "positive");
  const int neg = *label_index(cm.scheme, "negative");
  return 0.5 * (f1_score(cm, pos) + f1_score(cm, neg));
}

double accuracy(const ConfusionMatrix& cm) {
  const long long total = cm.total();
  if (total == 0) throw UsageError("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

double metric_value(const ConfusionMatrix& cm, Metric metric) {
  switch (metric) {
    case Metric::AvgF1: return avg_f1_pos_neg(cm);
    case Metric::Accuracy: return accuracy(cm);
    case Metric::Auto:
      return cm.scheme == LabelScheme::ThreeClass ? avg_f1_pos_neg(cm) : accuracy(cm);
  }
  return 0.0;
}

}  // namespace lexcnn
