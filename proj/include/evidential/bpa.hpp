#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evidential/errors.hpp"
#include "evidential/focal_set.hpp"

namespace evidential {

namespace tolerance {
/// Allowed deviation of a total mass from one.
inline constexpr double mass = 1e-9;
/// Masses below this are dropped when a bpa is built or combined.
inline constexpr double prune = 1e-12;
/// Comparison slack for derived quantities in tests.
inline constexpr double numeric = 1e-9;
}  // namespace tolerance

struct MassEntry {
  FocalSet set;
  double mass = 0.0;

  friend bool operator==(const MassEntry&, const MassEntry&) = default;
};

/// A basic probability assignment: positive masses on nonempty subsets of a
/// frame, summing to one. Entries are kept in ascending bitset order, which is
/// also the order used whenever a bpa is written out.
class Bpa {
public:
  /// Builds a bpa from raw assignments. Duplicate sets accumulate; zero
  /// masses and, after accumulation, masses below `prune_below` are dropped.
  static Bpa assemble(Frame frame, std::vector<MassEntry> entries,
                      double prune_below = tolerance::prune) {
    const std::size_t n = frame.size();
    for (const auto& e : entries) {
      if (!std::isfinite(e.mass) || e.mass < 0.0) {
        throw InvalidParameter("mass must be a finite non-negative number, got " +
                               std::to_string(e.mass));
      }
      if (e.mass == 0.0) continue;
      if (e.set.empty()) throw EmptyFocalSet();
      if (!e.set.fits(n)) {
        throw OutOfFrame("set has members outside a frame of size " + std::to_string(n));
      }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const MassEntry& a, const MassEntry& b) { return a.set < b.set; });

    std::vector<MassEntry> merged;
    merged.reserve(entries.size());
    for (const auto& e : entries) {
      if (e.mass == 0.0) continue;
      if (!merged.empty() && merged.back().set == e.set) {
        merged.back().mass += e.mass;
      } else {
        merged.push_back(e);
      }
    }
    std::erase_if(merged, [&](const MassEntry& e) { return e.mass < prune_below; });

    double total = 0.0;
    for (const auto& e : merged) total += e.mass;
    if (std::abs(total - 1.0) > tolerance::mass) {
      throw MassNotNormalized("masses sum to " + std::to_string(total) + ", expected 1");
    }
    return Bpa{std::move(frame), std::move(merged)};
  }

  /// m(theta) = 1: total ignorance, the neutral element of Dempster's rule.
  static Bpa vacuous(Frame frame) {
    const FocalSet theta = frame.theta();
    return Bpa{std::move(frame), {{theta, 1.0}}};
  }

  const Frame& frame() const noexcept { return frame_; }
  std::span<const MassEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  double mass(FocalSet s) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const MassEntry& e, FocalSet key) { return e.set < key; });
    return (it != entries_.end() && it->set == s) ? it->mass : 0.0;
  }

  double total_mass() const noexcept {
    double total = 0.0;
    for (const auto& e : entries_) total += e.mass;
    return total;
  }

  /// Every focal element is a singleton.
  bool is_bayesian() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const MassEntry& e) { return e.set.cardinality() == 1; });
  }

  friend bool operator==(const Bpa& a, const Bpa& b) {
    return a.frame_ == b.frame_ && a.entries_ == b.entries_;
  }

private:
  Bpa(Frame frame, std::vector<MassEntry> entries)
      : frame_(std::move(frame)), entries_(std::move(entries)) {}

  Frame frame_;
  std::vector<MassEntry> entries_;
};

inline Bpa make_bpa(Frame frame, std::vector<MassEntry> assignments) {
  return Bpa::assemble(std::move(frame), std::move(assignments));
}

/// Result of Dempster's rule together with the mass that fell on the empty set.
struct Combination {
  Bpa result;
  double conflict;
};

/// Dempster's rule. Products are accumulated per intersection and normalized
/// once by the total non-conflicting mass.
inline Combination combine_with_conflict(const Bpa& m1, const Bpa& m2) {
  if (!(m1.frame() == m2.frame())) throw FrameMismatch();

  std::unordered_map<FocalSet, double, FocalSetHash> products;
  products.reserve(m1.size() * m2.size());
  double conflict = 0.0;
  double kept = 0.0;
  for (const auto& a : m1.entries()) {
    for (const auto& b : m2.entries()) {
      const double p = a.mass * b.mass;
      const FocalSet s = a.set & b.set;
      if (s.empty()) {
        conflict += p;
      } else {
        products[s] += p;
        kept += p;
      }
    }
  }
  if (kept <= tolerance::mass) throw TotalConflict();

  std::vector<MassEntry> entries;
  entries.reserve(products.size());
  for (const auto& [set, p] : products) entries.push_back({set, p / kept});
  return {Bpa::assemble(m1.frame(), std::move(entries)), conflict};
}

inline Bpa combine(const Bpa& m1, const Bpa& m2) {
  return combine_with_conflict(m1, m2).result;
}

/// Bel(A): total mass of focal elements contained in A.
inline double belief(const Bpa& m, FocalSet a) {
  if (!a.fits(m.frame().size())) throw FrameMismatch();
  double sum = 0.0;
  for (const auto& e : m.entries()) {
    if (e.set.subset_of(a)) sum += e.mass;
  }
  return sum;
}

/// Pl(A): total mass of focal elements meeting A.
inline double plausibility(const Bpa& m, FocalSet a) {
  if (!a.fits(m.frame().size())) throw FrameMismatch();
  double sum = 0.0;
  for (const auto& e : m.entries()) {
    if (e.set.intersects(a)) sum += e.mass;
  }
  return sum;
}

/// A probability vector over the elements of a frame.
class PignisticDist {
public:
  PignisticDist(Frame frame, std::vector<double> probs)
      : frame_(std::move(frame)), probs_(std::move(probs)) {
    if (probs_.size() != frame_.size()) throw FrameMismatch();
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw InvalidParameter("probabilities must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > tolerance::mass) {
      throw MassNotNormalized("probabilities sum to " + std::to_string(total));
    }
  }

  const Frame& frame() const noexcept { return frame_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_.at(i); }

  /// Probability of an arbitrary event.
  double of(FocalSet a) const {
    double sum = 0.0;
    a.for_each([&](std::size_t i) { sum += probs_.at(i); });
    return sum;
  }

private:
  Frame frame_;
  std::vector<double> probs_;
};

/// Splits the mass of every focal element evenly among its members.
inline PignisticDist pignistic(const Bpa& m) {
  std::vector<double> probs(m.frame().size(), 0.0);
  for (const auto& e : m.entries()) {
    const double share = e.mass / static_cast<double>(e.set.cardinality());
    e.set.for_each([&](std::size_t i) { probs[i] += share; });
  }
  return PignisticDist{m.frame(), std::move(probs)};
}

}  // namespace evidential
