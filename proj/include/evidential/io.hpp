#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "evidential/bpa.hpp"
#include "evidential/random.hpp"
#include "evidential/testbed.hpp"
#include "evidential/version.hpp"

namespace evidential {

// ---------------------------------------------------------------------------
// Bpa documents
//
//   # comment
//   frame: a b c d e
//   mass 0.5 set a,b
//   mass 0.3 set a,c,d
//
// The frame line comes first; duplicate sets accumulate.
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

/// Splits on blanks, dropping a trailing `#` comment.
inline std::vector<Token> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::string format_shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace detail

inline Bpa parse_bpa(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::optional<Frame> frame;
  std::vector<MassEntry> entries;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    auto tokens = detail::tokenize(lines[ln]);
    if (tokens.empty()) continue;

    // "frame:" may be glued to the first label
    if (tokens[0].text.starts_with("frame:")) {
      if (frame) throw ParseError(line_no, tokens[0].column, "frame declared twice");
      std::vector<std::string> labels;
      if (tokens[0].text.size() > 6) labels.emplace_back(tokens[0].text.substr(6));
      for (std::size_t t = 1; t < tokens.size(); ++t) labels.emplace_back(tokens[t].text);
      if (labels.empty()) throw ParseError(line_no, tokens[0].column, "frame has no elements");
      try {
        frame.emplace(std::move(labels));
      } catch (const InvalidParameter& e) {
        throw ParseError(line_no, tokens[0].column, e.what());
      }
      continue;
    }

    if (tokens[0].text != "mass") {
      throw ParseError(line_no, tokens[0].column,
                       "expected 'frame:' or 'mass', found '" + std::string(tokens[0].text) + "'");
    }
    if (!frame) throw ParseError(line_no, tokens[0].column, "mass line before frame declaration");
    if (tokens.size() < 2) throw ParseError(line_no, tokens[0].column + 4, "missing mass value");
    const auto mass = detail::parse_real(tokens[1].text);
    if (!mass) {
      throw ParseError(line_no, tokens[1].column,
                       "invalid mass '" + std::string(tokens[1].text) + "'");
    }
    if (tokens.size() < 3 || tokens[2].text != "set") {
      const std::size_t col = tokens.size() < 3 ? tokens[1].column + tokens[1].text.size() + 1
                                                : tokens[2].column;
      throw ParseError(line_no, col, "expected 'set'");
    }
    if (tokens.size() < 4) throw ParseError(line_no, tokens[2].column + 4, "empty element list");

    // elements: label (',' label)*, blanks allowed around commas
    const std::string_view line = lines[ln];
    const std::size_t stop = std::min(line.find('#'), line.size());
    std::size_t pos = tokens[3].column - 1;
    FocalSet set;
    while (true) {
      while (pos < stop && detail::is_space(line[pos])) ++pos;
      const std::size_t start = pos;
      while (pos < stop && !detail::is_space(line[pos]) && line[pos] != ',') ++pos;
      if (pos == start) throw ParseError(line_no, start + 1, "expected element name");
      const std::string_view label = line.substr(start, pos - start);
      const std::size_t idx = frame->find(label);
      if (idx == frame->size()) {
        throw UnknownElement("line " + std::to_string(line_no) + ", column " +
                             std::to_string(start + 1) + ": unknown element '" +
                             std::string(label) + "'");
      }
      set |= FocalSet::singleton(idx);
      while (pos < stop && detail::is_space(line[pos])) ++pos;
      if (pos == stop) break;
      if (line[pos] != ',') throw ParseError(line_no, pos + 1, "expected ','");
      ++pos;
    }
    entries.push_back({set, *mass});
  }
  if (!frame) throw ParseError(lines.size() + 1, 1, "missing frame declaration");
  return make_bpa(*frame, std::move(entries));
}

inline std::string format_set(const Frame& frame, FocalSet s) {
  std::string out;
  s.for_each([&](std::size_t i) {
    if (!out.empty()) out += ',';
    out += frame.label(i);
  });
  return out;
}

/// Canonical document: entries in ascending bitset order, masses with the
/// shortest representation that reads back to the same double.
inline std::string format_bpa(const Bpa& m) {
  std::string out = "frame:";
  for (const auto& l : m.frame().labels()) out += ' ' + l;
  out += '\n';
  for (const auto& e : m.entries()) {
    out += "mass " + detail::format_shortest(e.mass) + " set " + format_set(m.frame(), e.set) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration: flat `key = value` lines, `#` comments.
// ---------------------------------------------------------------------------

/// Applies one configuration key to `cfg`. Keys: frame_size, focal_count,
/// seed, rate, methods, combinations, trials, track, threads.
inline void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  auto count = [&]() {
    auto v = detail::parse_count(value);
    if (!v) throw InvalidParameter("invalid value '" + std::string(value) + "' for " + std::string(key));
    return *v;
  };
  if (key == "frame_size") {
    cfg.gen.frame_size = count();
  } else if (key == "focal_count") {
    cfg.gen.focal_count = count();
  } else if (key == "seed") {
    cfg.gen.seed = count();
  } else if (key == "rate") {
    auto v = detail::parse_real(value);
    if (!v) throw InvalidParameter("invalid value '" + std::string(value) + "' for rate");
    cfg.gen.rate = *v;
  } else if (key == "combinations") {
    cfg.combinations = count();
  } else if (key == "trials") {
    cfg.trials = count();
  } else if (key == "threads") {
    cfg.threads = count();
  } else if (key == "track") {
    if (value == "cumulative") {
      cfg.track = Track::cumulative;
    } else if (value == "from-exact") {
      cfg.track = Track::from_exact;
    } else {
      throw InvalidParameter("track must be 'cumulative' or 'from-exact'");
    }
  } else if (key == "methods") {
    cfg.methods.clear();
    for (std::string_view name : detail::split(value, ',')) {
      while (!name.empty() && detail::is_space(name.front())) name.remove_prefix(1);
      while (!name.empty() && detail::is_space(name.back())) name.remove_suffix(1);
      if (name.empty()) continue;
      if (detail::lowercase(name) == "default") {
        auto suite = default_method_suite();
        cfg.methods.insert(cfg.methods.end(), suite.begin(), suite.end());
      } else {
        cfg.methods.push_back(parse_method_name(name));
      }
    }
  } else {
    throw InvalidParameter("invalid config key '" + std::string(key) + "'");
  }
}

/// Parses a configuration document on top of `base`.
inline ExperimentConfig parse_experiment_config(std::string_view text, ExperimentConfig base = {}) {
  const auto lines = detail::split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    auto trim = [](std::string_view s) {
      while (!s.empty() && detail::is_space(s.front())) s.remove_prefix(1);
      while (!s.empty() && detail::is_space(s.back())) s.remove_suffix(1);
      return s;
    };
    if (trim(line).empty()) continue;
    if (eq == std::string_view::npos) throw ParseError(ln + 1, 1, "expected 'key = value'");
    try {
      apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InvalidParameter& e) {
      throw ParseError(ln + 1, 1, e.what());
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Leading comment line describing how a result set was produced.
inline std::string metadata_line(const ExperimentConfig& cfg, const RunStats& stats) {
  std::ostringstream os;
  os << "# evidential " << kVersion << " seed=" << cfg.gen.seed << " rng=" << Rng::kName
     << " track=" << to_string(cfg.track) << " frame_size=" << cfg.gen.frame_size
     << " focal_count=" << cfg.gen.focal_count << " rate=" << detail::format_shortest(cfg.gen.rate)
     << " combinations=" << cfg.combinations << " trials=" << cfg.trials
     << " completed=" << stats.trials_completed << " aborted=" << stats.trials_aborted << '\n';
  return os.str();
}

inline void write_trials_csv(std::ostream& os, const ExperimentConfig& cfg,
                             const ExperimentResult& result) {
  os << metadata_line(cfg, result.stats);
  os << "method,step,trial,n_original,n_approx,error1,error2,error3\n";
  for (const auto& r : result.records) {
    os << r.method << ',' << r.step << ',' << r.trial << ',' << r.focal_count_original << ','
       << r.focal_count_approx << ',' << detail::format_g6(r.errors.error1) << ','
       << r.errors.error2 << ',' << r.errors.error3 << '\n';
  }
}

/// One row per method: focal-count average/minimum/maximum after the last
/// combination, then the mean of each error measure at every step.
inline void write_stats_csv(std::ostream& os, const ExperimentConfig& cfg,
                            const ExperimentResult& result) {
  const RunStats& st = result.stats;
  const std::size_t steps = st.combinations;
  os << metadata_line(cfg, st);
  os << "method,trials,orig_avg,orig_min,orig_max,approx_avg,approx_min,approx_max";
  for (const char* name : {"error1", "error2", "error3"}) {
    for (std::size_t s = 1; s <= steps; ++s) os << ',' << name << "_step" << s;
  }
  os << '\n';
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const StepStats& last = st.at(i, steps);
    auto g = detail::format_g6;
    os << cfg.methods[i].name << ',' << last.focal_original.count << ','
       << g(last.focal_original.mean()) << ',' << g(last.focal_original.min) << ','
       << g(last.focal_original.max) << ',' << g(last.focal_approx.mean()) << ','
       << g(last.focal_approx.min) << ',' << g(last.focal_approx.max);
    for (std::size_t s = 1; s <= steps; ++s) os << ',' << g(st.at(i, s).error1.mean());
    for (std::size_t s = 1; s <= steps; ++s) os << ',' << g(st.at(i, s).error2.mean());
    for (std::size_t s = 1; s <= steps; ++s) os << ',' << g(st.at(i, s).error3.mean());
    os << '\n';
  }
}

}  // namespace evidential
