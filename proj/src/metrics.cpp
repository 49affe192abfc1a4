#include "acbeta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "acbeta/error.hpp"

namespace acbeta {

double auc(std::span<const ScoredPrediction> predictions) {
  std::vector<std::pair<double, bool>> ranked;  // (score, is_fake)
  ranked.reserve(predictions.size());
  std::uint64_t fakes = 0;
  for (const auto& p : predictions) {
    if (!std::isfinite(p.score)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite score for " + p.video_id);
    }
    const bool fake = p.true_label == Label::kFake;
    fakes += fake ? 1 : 0;
    ranked.emplace_back(p.score, fake);
  }
  const std::uint64_t reals = ranked.size() - fakes;
  if (fakes == 0 || reals == 0) {
    throw Error(ErrorCode::kSingleClassTest, "AUC needs both real and fake predictions");
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Twice the number of correctly ordered pairs, so half credit stays integral.
  std::uint64_t doubled = 0;
  std::uint64_t reals_below = 0;
  for (std::size_t i = 0; i < ranked.size();) {
    std::size_t j = i;
    std::uint64_t group_fakes = 0;
    std::uint64_t group_reals = 0;
    while (j < ranked.size() && ranked[j].first == ranked[i].first) {
      (ranked[j].second ? group_fakes : group_reals) += 1;
      ++j;
    }
    doubled += 2 * group_fakes * reals_below + group_fakes * group_reals;
    reals_below += group_reals;
    i = j;
  }
  return static_cast<double>(doubled) / (2.0 * static_cast<double>(fakes) * static_cast<double>(reals));
}

}  // namespace acbeta
