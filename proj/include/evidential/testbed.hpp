#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "evidential/approx.hpp"
#include "evidential/bpa.hpp"
#include "evidential/metrics.hpp"
#include "evidential/random.hpp"

namespace evidential {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct GenConfig {
  std::size_t frame_size = 32;
  std::size_t focal_count = 8;
  std::uint64_t seed = 1;
  double rate = 1.0;
};

/// How the approximated accumulator evolves across combination steps.
enum class Track {
  /// approx_t = approximate(approx_{t-1} (+) fresh_t); errors compound.
  cumulative,
  /// approx_t = approximate(exact_t).
  from_exact,
};

inline std::string_view to_string(Track t) {
  return t == Track::cumulative ? "cumulative" : "from-exact";
}

struct NamedMethod {
  std::string name;
  ApproxMethod method;
};

struct ExperimentConfig {
  GenConfig gen;
  std::vector<NamedMethod> methods;
  std::size_t combinations = 5;
  std::size_t trials = 1000;
  Track track = Track::cumulative;
  /// Worker threads; results do not depend on this.
  std::size_t threads = 1;
};

inline void validate(const GenConfig& g) {
  if (g.frame_size < 1 || g.frame_size > kMaxFrameSize) {
    throw InvalidParameter("frame_size must be between 1 and 64");
  }
  if (g.focal_count < 1) throw InvalidParameter("focal_count must be at least 1");
  if (g.frame_size < 64 && g.focal_count > (std::uint64_t{1} << g.frame_size) - 1) {
    throw InvalidParameter("focal_count exceeds the number of nonempty subsets");
  }
  if (!(g.rate > 0.0)) throw InvalidParameter("rate must be positive");
}

inline void validate(const ExperimentConfig& c) {
  validate(c.gen);
  if (c.combinations < 1) throw InvalidParameter("combinations must be at least 1");
  if (c.trials < 1) throw InvalidParameter("trials must be at least 1");
  if (c.methods.empty()) throw InvalidParameter("no approximation methods given");
  for (const auto& m : c.methods) validate(m.method);
}

// ---------------------------------------------------------------------------
// Method names
// ---------------------------------------------------------------------------

/// D1_8, D1_30, Summ_8, Summ_30, Bayes, klx_01, klx_30.
inline std::vector<NamedMethod> default_method_suite() {
  return {
      {"D1_8", D1{8}},
      {"D1_30", D1{30}},
      {"Summ_8", Summarize{8}},
      {"Summ_30", Summarize{30}},
      {"Bayes", Bayesian{}},
      {"klx_01", Klx{1, std::nullopt, 0.01}},
      {"klx_30", Klx{1, 30, 1.0}},
  };
}

namespace detail {

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

/// Parses a method name, case-insensitively: `bayes`, `d1_<k>`, `summ_<k>`,
/// `klx_01`, `klx_30`, or `klx_<k>_<l|inf>_<x>`. The returned name is the
/// canonical spelling used in reports.
inline NamedMethod parse_method_name(std::string_view text) {
  const std::string name = detail::lowercase(text);
  auto fail = [&]() -> NamedMethod {
    throw InvalidParameter("unknown approximation method '" + std::string(text) + "'");
  };
  for (auto& m : default_method_suite()) {
    if (detail::lowercase(m.name) == name) return m;
  }
  const auto parts = detail::split(name, '_');
  NamedMethod out;
  if (parts.size() == 2 && (parts[0] == "d1" || parts[0] == "summ")) {
    const auto k = detail::parse_count(parts[1]);
    if (!k) return fail();
    if (parts[0] == "d1") {
      out = {"D1_" + std::to_string(*k), D1{*k}};
    } else {
      out = {"Summ_" + std::to_string(*k), Summarize{*k}};
    }
  } else if (parts.size() == 4 && parts[0] == "klx") {
    const auto k = detail::parse_count(parts[1]);
    const auto x = detail::parse_real(parts[3]);
    std::optional<std::size_t> l;
    if (parts[2] != "inf") {
      l = detail::parse_count(parts[2]);
      if (!l) return fail();
    }
    if (!k || !x) return fail();
    out = {name, Klx{*k, l, *x}};
  } else {
    return fail();
  }
  validate(out.method);
  return out;
}

// ---------------------------------------------------------------------------
// Random bpas
// ---------------------------------------------------------------------------

/// Stick-breaking generator: each of the first focal_count - 1 sets takes the
/// fraction P(Y <= X) = 1 - exp(-rate X) of the remaining mass, X and Y being
/// i.i.d. exponential; the last set takes what is left. Sets are uniform
/// nonempty subsets, redrawn until distinct.
inline Bpa gen_random_bpa(const GenConfig& cfg, Rng& rng, const Frame& frame) {
  validate(cfg);
  if (frame.size() != cfg.frame_size) throw FrameMismatch();
  const std::uint64_t mask = FocalSet::full(cfg.frame_size).bits();

  std::unordered_set<FocalSet, FocalSetHash> used;
  auto fresh_set = [&] {
    while (true) {
      const FocalSet s{rng.next() & mask};
      if (!s.empty() && used.insert(s).second) return s;
    }
  };

  std::vector<MassEntry> entries;
  entries.reserve(cfg.focal_count);
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < cfg.focal_count; ++i) {
    const double x = rng.exponential(cfg.rate);
    const FocalSet a = fresh_set();
    const double m = (1.0 - std::exp(-cfg.rate * x)) * rest;
    entries.push_back({a, m});
    rest -= m;
  }
  entries.push_back({fresh_set(), rest});
  return Bpa::assemble(frame, std::move(entries), 0.0);
}

inline Bpa gen_random_bpa(const GenConfig& cfg, Rng& rng) {
  return gen_random_bpa(cfg, rng, Frame::anonymous(cfg.frame_size));
}

// ---------------------------------------------------------------------------
// Records and aggregates
// ---------------------------------------------------------------------------

struct TrialRecord {
  std::string method;
  std::size_t step = 0;   // 1-based combination step
  std::size_t trial = 0;  // 0-based trial index
  std::size_t focal_count_original = 0;
  std::size_t focal_count_approx = 0;
  ErrorTriple errors;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Running count/mean/min/max of one quantity.
struct Summary {
  std::size_t count = 0;
  double sum = 0.0;
  double min = 0.0;
  double max = 0.0;

  void add(double v) {
    if (count == 0) {
      min = max = v;
    } else {
      min = std::min(min, v);
      max = std::max(max, v);
    }
    sum += v;
    ++count;
  }
  double mean() const {
    if (count == 0) return 0.0;
    // keep min <= mean <= max despite rounding in the sum
    return std::clamp(sum / static_cast<double>(count), min, max);
  }
};

struct StepStats {
  std::string method;
  std::size_t step = 0;
  Summary focal_original;
  Summary focal_approx;
  Summary error1;
  Summary error2;
  Summary error3;
};

struct RunStats {
  std::size_t combinations = 0;
  std::size_t trials_completed = 0;
  std::size_t trials_aborted = 0;
  /// Method-major: entry (method i, step s) is at i * combinations + (s - 1).
  std::vector<StepStats> steps;

  const StepStats& at(std::size_t method_index, std::size_t step) const {
    return steps.at(method_index * combinations + (step - 1));
  }
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // ordered by (trial, step, method)
  RunStats stats;
};

namespace detail {

struct TrialOutcome {
  bool aborted = false;
  std::vector<TrialRecord> records;
  std::exception_ptr failure;
};

inline TrialOutcome run_trial(const ExperimentConfig& cfg, const Frame& frame, std::size_t trial) {
  Rng rng(cfg.gen.seed, trial);
  const Bpa initial = gen_random_bpa(cfg.gen, rng, frame);
  std::vector<Bpa> fresh;
  fresh.reserve(cfg.combinations);
  for (std::size_t s = 0; s < cfg.combinations; ++s) fresh.push_back(gen_random_bpa(cfg.gen, rng, frame));

  TrialOutcome out;
  try {
    Bpa exact = initial;
    std::vector<Bpa> tracks(cfg.methods.size(), initial);
    for (std::size_t s = 0; s < cfg.combinations; ++s) {
      exact = combine(exact, fresh[s]);
      const PignisticDist p0 = pignistic(exact);
      for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        const Bpa input = cfg.track == Track::cumulative ? combine(tracks[i], fresh[s]) : exact;
        tracks[i] = approximate(input, cfg.methods[i].method);
        out.records.push_back({cfg.methods[i].name, s + 1, trial, exact.size(), tracks[i].size(),
                               evaluate(p0, pignistic(tracks[i]))});
      }
    }
  } catch (const TotalConflict&) {
    out.aborted = true;
    out.records.clear();
  } catch (...) {
    out.failure = std::current_exception();
  }
  return out;
}

}  // namespace detail

/// Runs the randomized study: every trial draws an initial bpa and one fresh
/// bpa per combination step from its own RNG stream (seed, trial index), so
/// the outcome is independent of `threads`. A total conflict on any track
/// drops the whole trial.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const Frame frame = Frame::anonymous(cfg.gen.frame_size);
  std::vector<detail::TrialOutcome> outcomes(cfg.trials);

  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, cfg.trials);
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.trials; ++t) outcomes[t] = detail::run_trial(cfg, frame, t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < cfg.trials; t = next++) {
          outcomes[t] = detail::run_trial(cfg, frame, t);
        }
      });
    }
  }

  ExperimentResult result;
  RunStats& stats = result.stats;
  stats.combinations = cfg.combinations;
  for (const auto& m : cfg.methods) {
    for (std::size_t s = 1; s <= cfg.combinations; ++s) stats.steps.push_back({m.name, s, {}, {}, {}, {}, {}});
  }
  for (auto& o : outcomes) {
    if (o.failure) std::rethrow_exception(o.failure);
    if (o.aborted) {
      ++stats.trials_aborted;
      continue;
    }
    ++stats.trials_completed;
    for (std::size_t r = 0; r < o.records.size(); ++r) {
      const auto& rec = o.records[r];
      // records of a trial are laid out step-major, method-minor
      const std::size_t method_index = r % cfg.methods.size();
      StepStats& st = stats.steps[method_index * cfg.combinations + (rec.step - 1)];
      st.focal_original.add(static_cast<double>(rec.focal_count_original));
      st.focal_approx.add(static_cast<double>(rec.focal_count_approx));
      st.error1.add(rec.errors.error1);
      st.error2.add(static_cast<double>(rec.errors.error2));
      st.error3.add(static_cast<double>(rec.errors.error3));
    }
    std::move(o.records.begin(), o.records.end(), std::back_inserter(result.records));
  }
  return result;
}

}  // namespace evidential
