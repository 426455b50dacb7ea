#pragma once

#include <vector>

namespace lexcnn {

/// Percentile of sorted data, linear interpolation between closest ranks
/// (position p*(n-1)); p in [0,1].
double percentile_sorted(const std::vector<double>& sorted, double p);

/// Box-plot summary. Outliers lie outside [q25 - 1.5 IQR, q75 + 1.5 IQR].
struct BoxStats {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::vector<double> outliers;  // ascending
  std::size_t n = 0;
};

BoxStats box_stats(std::vector<double> scores);

double mean(const std::vector<double>& xs);

/// Population standard deviation (divides by n).
double population_stddev(const std::vector<double>& xs);

}  // namespace lexcnn
