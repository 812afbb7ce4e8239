#pragma once

// Test-only reference computations. Each one takes a different route from the
// library code it checks, so agreement is meaningful.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "evidential/bpa.hpp"
#include "evidential/random.hpp"

namespace evidential::oracle {

/// Commonality Q(A) = sum of m(B) over B containing A, for every subset of a
/// small frame, indexed by bitset value.
inline std::vector<double> commonality(const Bpa& m) {
  const std::size_t n = m.frame().size();
  std::vector<double> q(std::size_t{1} << n, 0.0);
  for (std::uint64_t a = 0; a < q.size(); ++a) {
    for (const auto& e : m.entries()) {
      if (FocalSet{a}.subset_of(e.set)) q[a] += e.mass;
    }
  }
  return q;
}

/// Dempster's rule through commonalities: Q12 = Q1 * Q2 pointwise, then
/// Moebius inversion m(A) = sum over B containing A of (-1)^|B \ A| Q(B),
/// then normalization over the nonempty sets. Frames up to ~10 elements.
inline std::map<std::uint64_t, double> combine_by_commonality(const Bpa& m1, const Bpa& m2) {
  const auto q1 = commonality(m1);
  const auto q2 = commonality(m2);
  const std::uint64_t full = (std::uint64_t{1} << m1.frame().size()) - 1;
  std::map<std::uint64_t, double> raw;
  double total = 0.0;
  for (std::uint64_t a = 1; a <= full; ++a) {
    double v = 0.0;
    // supersets of a
    const std::uint64_t free = full & ~a;
    for (std::uint64_t extra = free;; extra = (extra - 1) & free) {
      const std::uint64_t b = a | extra;
      const double sign = (std::popcount(extra) % 2 == 0) ? 1.0 : -1.0;
      v += sign * q1[b] * q2[b];
      if (extra == 0) break;
    }
    if (std::abs(v) > 1e-13) {
      raw[a] = v;
      total += v;
    }
  }
  for (auto& [set, mass] : raw) mass /= total;
  return raw;
}

/// max over every event A of |P0(A) - Papp(A)| by enumerating all subsets.
inline double error1_by_enumeration(const std::vector<double>& p0, const std::vector<double>& papp) {
  const std::size_t n = p0.size();
  double best = 0.0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((a >> i) & 1U) {
        s0 += p0[i];
        s1 += papp[i];
      }
    }
    best = std::max(best, std::abs(s0 - s1));
  }
  return best;
}

/// Random probability vector; with probability 1/4 some entries are zeroed,
/// with probability 1/4 entries are drawn from a few levels to force ties.
inline std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  const auto mode = rng.next() % 4;
  double total = 0.0;
  for (auto& v : p) {
    if (mode == 0) {
      v = (rng.next() % 3 == 0) ? 0.0 : rng.uniform_open();
    } else if (mode == 1) {
      v = static_cast<double>(1 + rng.next() % 3);
    } else {
      v = rng.exponential(1.0);
    }
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

/// Random bpa on a frame of `frame_size` with up to `max_focal` focal
/// elements and masses from normalized exponentials. Sometimes includes the
/// whole frame and tied masses, which exercise tie-breaking paths.
inline Bpa random_bpa(Rng& rng, const Frame& frame, std::size_t max_focal) {
  const std::size_t n = frame.size();
  const std::uint64_t mask = FocalSet::full(n).bits();
  const std::uint64_t subsets = n >= 63 ? ~std::uint64_t{0} : mask;
  const std::size_t focal = 1 + static_cast<std::size_t>(rng.next() % std::min<std::uint64_t>(max_focal, subsets));
  const bool ties = rng.next() % 4 == 0;
  std::vector<MassEntry> entries;
  std::vector<std::uint64_t> used;
  double total = 0.0;
  while (entries.size() < focal) {
    std::uint64_t s = rng.next() & mask;
    if (rng.next() % 8 == 0) s = mask;
    if (s == 0 || std::find(used.begin(), used.end(), s) != used.end()) continue;
    used.push_back(s);
    const double w = ties ? static_cast<double>(1 + rng.next() % 2) : rng.exponential(1.0);
    entries.push_back({FocalSet{s}, w});
    total += w;
  }
  for (auto& e : entries) e.mass /= total;
  return Bpa::assemble(frame, std::move(entries));
}

inline Frame letters(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
  return Frame{labels};
}

/// The running example: frame {a..e} with masses 0.5 on {a,b}, 0.3 on
/// {a,c,d}, 0.1 on {c}, 0.05 on {c,d}, 0.05 on {d,e}.
inline Bpa running_example() {
  const Frame f = letters(5);
  return make_bpa(f, {{f.set_of({"a", "b"}), 0.50},
                      {f.set_of({"a", "c", "d"}), 0.30},
                      {f.set_of({"c"}), 0.10},
                      {f.set_of({"c", "d"}), 0.05},
                      {f.set_of({"d", "e"}), 0.05}});
}

}  // namespace evidential::oracle
