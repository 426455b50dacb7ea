#pragma once

#include <vector>

#include "lexcnn/config.hpp"
#include "lexcnn/corpus.hpp"
#include "lexcnn/types.hpp"

namespace lexcnn {

/// Rows are gold labels, columns predictions.
struct ConfusionMatrix {
  LabelScheme scheme = LabelScheme::ThreeClass;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;

  explicit ConfusionMatrix(LabelScheme s = LabelScheme::ThreeClass);
  long long total() const { return counts.sum(); }
};

/// Index of the largest probability; ties go to the lowest class.
int argmax_class(const Eigen::Ref<const Eigen::VectorXd>& probabilities);

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& gold,
                          LabelScheme scheme);

/// F1 of one class; 0 when precision + recall has a zero denominator.
double f1_score(const ConfusionMatrix& cm, int label);

/// Mean of the positive and negative F1 scores (3-class only).
double avg_f1_pos_neg(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);

double metric_value(const ConfusionMatrix& cm, Metric metric);

}  // namespace lexcnn
