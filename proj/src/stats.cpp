#include "lexcnn/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lexcnn/error.hpp"

namespace lexcnn {

double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw UsageError("percentile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> scores) {
  if (scores.empty()) throw UsageError("box statistics of an empty sample");
  std::sort(scores.begin(), scores.end());
  BoxStats b;
  b.n = scores.size();
  b.median = percentile_sorted(scores, 0.5);
  b.q25 = percentile_sorted(scores, 0.25);
  b.q75 = percentile_sorted(scores, 0.75);
  const double iqr = b.q75 - b.q25;
  const double low = b.q25 - 1.5 * iqr;
  const double high = b.q75 + 1.5 * iqr;
  for (double s : scores) {
    if (s < low || s > high) b.outliers.push_back(s);
  }
  return b;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw UsageError("mean of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double population_stddev(const std::vector<double>& xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace lexcnn
