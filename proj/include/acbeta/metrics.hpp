#pragma once

#include <span>
#include <string>

#include "acbeta/manifest.hpp"

namespace acbeta {

struct ScoredPrediction {
  std::string video_id;
  double score = 0.0;  // in [0, 1], larger means more likely fake
  Label true_label = Label::kReal;
};

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (fake, real) pairs ranked correctly, ties counting one half. Sorts once
/// and counts pairs per tie group in exact integer arithmetic.
/// Throws Error(kSingleClassTest) unless both labels are present.
double auc(std::span<const ScoredPrediction> predictions);

}  // namespace acbeta
