#pragma once

// Brute-force information gain: every midpoint threshold is tried by a full
// rescan of the samples, and entropy uses log2(n) - sum c log2(c) / n.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bbofs/data.hpp"

namespace bbofs::oracle {

inline double entropy_from_counts(double a, double b) {
  const double n = a + b;
  if (n == 0.0) return 0.0;
  double s = 0.0;
  if (a > 0.0) s += a * std::log2(a);
  if (b > 0.0) s += b * std::log2(b);
  return std::log2(n) - s / n;
}

inline double brute_force_ig(const Dataset& ds, GeneIndex g) {
  std::vector<double> distinct;
  for (std::size_t s = 0; s < ds.n_samples(); ++s) distinct.push_back(ds.value(s, g));
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  double pos = 0.0, neg = 0.0;
  for (std::size_t s = 0; s < ds.n_samples(); ++s) (ds.label(s) == 1 ? pos : neg) += 1.0;
  const double h = entropy_from_counts(pos, neg);
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
    const double t = (distinct[k] + distinct[k + 1]) / 2.0;
    double lp = 0.0, ln = 0.0, rp = 0.0, rn = 0.0;
    for (std::size_t s = 0; s < ds.n_samples(); ++s) {
      const bool left = ds.value(s, g) <= t;
      const bool positive = ds.label(s) == 1;
      (left ? (positive ? lp : ln) : (positive ? rp : rn)) += 1.0;
    }
    const double n = pos + neg;
    const double cond = (lp + ln) / n * entropy_from_counts(lp, ln) +
                        (rp + rn) / n * entropy_from_counts(rp, rn);
    best = std::max(best, h - cond);
  }
  return best;
}

}  // namespace bbofs::oracle
