#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "evidential/bpa.hpp"

namespace evidential {

// ---------------------------------------------------------------------------
// Method descriptions
// ---------------------------------------------------------------------------

/// Reduce to a probability distribution over singletons.
struct Bayesian {
  friend bool operator==(const Bayesian&, const Bayesian&) = default;
};

/// Keep the best focal elements while fewer than `k` are kept or the kept mass
/// is below 1 - x, never exceeding `l`; then renormalize. An empty `l` means
/// unbounded. x = 1 switches the mass clause off entirely.
struct Klx {
  std::size_t k = 1;
  std::optional<std::size_t> l;
  double x = 0.0;
  friend bool operator==(const Klx&, const Klx&) = default;
};

/// Keep the k-1 best focal elements; pool everything else on their union.
struct Summarize {
  std::size_t k = 1;
  friend bool operator==(const Summarize&, const Summarize&) = default;
};

/// Keep the k-1 best focal elements; push every other mass onto the smallest
/// kept supersets (or overlapping sets), falling back to the whole frame.
struct D1 {
  std::size_t k = 2;
  friend bool operator==(const D1&, const D1&) = default;
};

using ApproxMethod = std::variant<Bayesian, Klx, Summarize, D1>;

inline void validate(const ApproxMethod& method) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Klx>) {
          if (m.k < 1) throw InvalidParameter("klx: k must be at least 1");
          if (m.l && *m.l < m.k) throw InvalidParameter("klx: l must be at least k");
          if (!(m.x >= 0.0 && m.x <= 1.0)) throw InvalidParameter("klx: x must lie in [0, 1]");
        } else if constexpr (std::is_same_v<T, Summarize>) {
          if (m.k < 1) throw InvalidParameter("summarize: k must be at least 1");
        } else if constexpr (std::is_same_v<T, D1>) {
          if (m.k < 2) throw InvalidParameter("d1: k must be at least 2");
        }
      },
      method);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// Order used whenever the "best" focal elements are selected: mass
/// descending, then smaller sets first, then ascending bitset value.
inline bool ranks_before(const MassEntry& a, const MassEntry& b) noexcept {
  if (a.mass != b.mass) return a.mass > b.mass;
  const auto ca = a.set.cardinality();
  const auto cb = b.set.cardinality();
  if (ca != cb) return ca < cb;
  return a.set < b.set;
}

inline std::vector<MassEntry> ranked_entries(const Bpa& m) {
  std::vector<MassEntry> ranked(m.entries().begin(), m.entries().end());
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  return ranked;
}

// ---------------------------------------------------------------------------
// Bayesian approximation
// ---------------------------------------------------------------------------

inline Bpa approx_bayesian(const Bpa& m) {
  const std::size_t n = m.frame().size();
  std::vector<double> covering(n, 0.0);
  double weighted = 0.0;
  for (const auto& e : m.entries()) {
    weighted += e.mass * static_cast<double>(e.set.cardinality());
    e.set.for_each([&](std::size_t i) { covering[i] += e.mass; });
  }
  std::vector<MassEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (covering[i] > 0.0) out.push_back({FocalSet::singleton(i), covering[i] / weighted});
  }
  return Bpa::assemble(m.frame(), std::move(out), 0.0);
}

// ---------------------------------------------------------------------------
// k-l-x
// ---------------------------------------------------------------------------

inline Bpa approx_klx(const Bpa& m, std::size_t k, std::optional<std::size_t> l, double x) {
  validate(Klx{k, l, x});
  const auto ranked = ranked_entries(m);
  const std::size_t cap = l.value_or(std::numeric_limits<std::size_t>::max());

  std::vector<MassEntry> kept;
  double total = 0.0;
  std::size_t f = 0;
  while (f < ranked.size() && f < cap && (f < k || total < 1.0 - x)) {
    kept.push_back(ranked[f]);
    total += ranked[f].mass;
    ++f;
  }
  for (auto& e : kept) e.mass /= total;
  return Bpa::assemble(m.frame(), std::move(kept), 0.0);
}

inline Bpa approx_klx(const Bpa& m, const Klx& p) { return approx_klx(m, p.k, p.l, p.x); }

// ---------------------------------------------------------------------------
// Summarization
// ---------------------------------------------------------------------------

inline Bpa approx_summarize(const Bpa& m, std::size_t k) {
  validate(Summarize{k});
  if (m.size() <= k) return m;

  const auto ranked = ranked_entries(m);
  std::vector<MassEntry> out(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k - 1));
  MassEntry pooled;
  for (auto it = ranked.begin() + static_cast<std::ptrdiff_t>(k - 1); it != ranked.end(); ++it) {
    pooled.set |= it->set;
    pooled.mass += it->mass;
  }
  // may coincide with a kept set; assemble accumulates duplicates
  out.push_back(pooled);
  return Bpa::assemble(m.frame(), std::move(out), 0.0);
}

// ---------------------------------------------------------------------------
// D1
// ---------------------------------------------------------------------------

/// One mass movement made by `distribute`: `amount` taken from (part of)
/// `source` and added to `destination`.
struct Transfer {
  FocalSet source;
  FocalSet destination;
  double amount;
};

/// Working state of the D1 redistribution: the retained sets with their
/// growing masses, plus the mass collected on the whole frame.
struct D1Accumulator {
  std::vector<MassEntry> kept;
  FocalSet theta;
  double theta_mass = 0.0;
  std::vector<Transfer>* trace = nullptr;

  void add(std::size_t index, FocalSet source, double amount) {
    kept[index].mass += amount;
    if (trace) trace->push_back({source, kept[index].set, amount});
  }
  void add_theta(FocalSet source, double amount) {
    theta_mass += amount;
    if (trace) trace->push_back({source, theta, amount});
  }
};

/// Spreads `val`, the mass of `a`, over the retained sets of `acc`. `limit`
/// is the cardinality of the set whose mass is being distributed and stays
/// fixed through the recursion on uncovered remainders.
inline void distribute(FocalSet a, double val, std::size_t limit, D1Accumulator& acc) {
  const auto& kept = acc.kept;
  std::vector<std::size_t> candidates;

  // Case 1: strict supersets of A among the retained sets.
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (a.strict_subset_of(kept[i].set)) smallest = std::min(smallest, kept[i].set.cardinality());
  }
  if (smallest != std::numeric_limits<std::size_t>::max()) {
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (a.strict_subset_of(kept[i].set) && kept[i].set.cardinality() == smallest) {
        candidates.push_back(i);
      }
    }
    const double share = val / static_cast<double>(candidates.size());
    for (std::size_t i : candidates) acc.add(i, a, share);
    return;
  }

  // Case 2: retained sets at least as large as the original A that meet A.
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const FocalSet b = kept[i].set;
    if (b.cardinality() >= limit && b.intersects(a)) smallest = std::min(smallest, b.cardinality());
  }
  if (smallest == std::numeric_limits<std::size_t>::max()) {
    acc.add_theta(a, val);
    return;
  }
  FocalSet covered;
  std::size_t number = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const FocalSet b = kept[i].set;
    if (b.cardinality() == smallest && b.intersects(a)) {
      candidates.push_back(i);
      covered |= b & a;
      number += (b & a).cardinality();
    }
  }
  const double ratio = static_cast<double>(covered.cardinality()) /
                       static_cast<double>(a.cardinality());
  double handed_out = 0.0;
  for (std::size_t i : candidates) {
    const double overlap = static_cast<double>((kept[i].set & a).cardinality());
    const double share = (overlap / static_cast<double>(number)) * ratio * val;
    acc.add(i, a, share);
    handed_out += share;
  }
  if (ratio < 1.0) {
    const FocalSet rest = a - covered;
    if (!rest.empty()) distribute(rest, val - handed_out, limit, acc);
  }
}

/// D1 approximation. When `trace` is given, every mass movement is appended.
inline Bpa approx_d1(const Bpa& m, std::size_t k, std::vector<Transfer>* trace = nullptr) {
  validate(D1{k});
  if (m.size() <= k - 1) return m;

  const auto ranked = ranked_entries(m);
  const FocalSet theta = m.frame().theta();
  D1Accumulator acc;
  acc.kept.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k - 1));
  acc.theta = theta;
  acc.trace = trace;

  const bool theta_kept = std::any_of(acc.kept.begin(), acc.kept.end(),
                                      [&](const MassEntry& e) { return e.set == theta; });
  if (!theta_kept) acc.theta_mass = m.mass(theta);

  for (auto it = ranked.begin() + static_cast<std::ptrdiff_t>(k - 1); it != ranked.end(); ++it) {
    // a removed theta is already carried by theta_mass
    if (it->set == theta) continue;
    distribute(it->set, it->mass, it->set.cardinality(), acc);
  }

  std::vector<MassEntry> out = std::move(acc.kept);
  if (acc.theta_mass > 0.0) out.push_back({theta, acc.theta_mass});
  return Bpa::assemble(m.frame(), std::move(out), 0.0);
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline Bpa approximate(const Bpa& m, const ApproxMethod& method) {
  return std::visit(
      [&](const auto& p) -> Bpa {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Bayesian>) {
          return approx_bayesian(m);
        } else if constexpr (std::is_same_v<T, Klx>) {
          return approx_klx(m, p);
        } else if constexpr (std::is_same_v<T, Summarize>) {
          return approx_summarize(m, p.k);
        } else {
          return approx_d1(m, p.k);
        }
      },
      method);
}

/// Upper bound on the focal count produced by `method` on a frame of the
/// given size, if the method has one.
inline std::optional<std::size_t> output_bound(const ApproxMethod& method, std::size_t frame_size) {
  return std::visit(
      [&](const auto& p) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Bayesian>) {
          return frame_size;
        } else if constexpr (std::is_same_v<T, Klx>) {
          return p.l;
        } else {
          return p.k;
        }
      },
      method);
}

}  // namespace evidential
