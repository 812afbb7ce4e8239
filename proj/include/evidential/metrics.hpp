#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "evidential/bpa.hpp"

namespace evidential {

/// The best alternative under a distribution and the full ranking
/// (probability descending, lower index first on ties).
struct DecisionReport {
  std::size_t best_index = 0;
  std::vector<std::size_t> ranking;
};

/// Error1 is the largest event-probability deviation; Error2 counts the
/// alternatives the approximation prefers over the true optimum; Error3
/// counts the alternatives truly better than the approximation's choice.
struct ErrorTriple {
  double error1 = 0.0;
  std::size_t error2 = 0;
  std::size_t error3 = 0;

  friend bool operator==(const ErrorTriple&, const ErrorTriple&) = default;
};

inline DecisionReport decide(std::span<const double> weights) {
  DecisionReport report;
  report.ranking.resize(weights.size());
  std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  if (!report.ranking.empty()) report.best_index = report.ranking.front();
  return report;
}

inline DecisionReport decide(const PignisticDist& p) { return decide(p.probs()); }

/// max over all events A of |P0(A) - Papp(A)|. For additive measures the
/// maximum is attained on the set where P0 exceeds Papp, so one pass suffices.
inline double error1(const PignisticDist& p0, const PignisticDist& papp) {
  if (!(p0.frame() == papp.frame())) throw FrameMismatch();
  double excess = 0.0;
  double deficit = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    const double d = p0[i] - papp[i];
    if (d > 0.0) excess += d; else deficit -= d;
  }
  // both sides agree up to rounding; taking the max keeps the result symmetric
  return std::min(1.0, std::max(excess, deficit));
}

struct DecisionErrors {
  std::size_t error2 = 0;
  std::size_t error3 = 0;
};

inline DecisionErrors error23(const PignisticDist& p0, const PignisticDist& papp) {
  if (!(p0.frame() == papp.frame())) throw FrameMismatch();
  const std::size_t x0 = decide(p0).best_index;
  const std::size_t xapp = decide(papp).best_index;
  DecisionErrors out;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (papp[i] > papp[x0]) ++out.error2;
    if (p0[i] > p0[xapp]) ++out.error3;
  }
  return out;
}

inline ErrorTriple evaluate(const PignisticDist& p0, const PignisticDist& papp) {
  const auto [e2, e3] = error23(p0, papp);
  return {error1(p0, papp), e2, e3};
}

/// Errors of an approximation `approx` relative to the original `original`.
inline ErrorTriple evaluate(const Bpa& original, const Bpa& approx) {
  return evaluate(pignistic(original), pignistic(approx));
}

}  // namespace evidential
