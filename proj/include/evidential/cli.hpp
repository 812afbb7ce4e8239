#pragma once

// Command-line front end: `evidential combine|approx|bench|gen`.
// Exit codes: 0 success, 2 usage or parse error, 3 numerical failure
// (total conflict, masses that do not sum to one).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evidential/approx.hpp"
#include "evidential/bpa.hpp"
#include "evidential/io.hpp"
#include "evidential/metrics.hpp"
#include "evidential/testbed.hpp"

namespace evidential::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

inline constexpr const char* kSeedEnv = "EVIDENTIAL_SEED";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Bpa load_bpa(const std::string& path) {
  try {
    return parse_bpa(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path + ": " + e.what());
  }
}

/// Seed from the environment, if set and numeric.
inline std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv(kSeedEnv);
  if (!v) return std::nullopt;
  const auto parsed = detail::parse_count(v);
  if (!parsed) throw InvalidParameter(std::string(kSeedEnv) + " is not a non-negative integer");
  return *parsed;
}

// ---------------------------------------------------------------------------
// combine
// ---------------------------------------------------------------------------

inline int cmd_combine(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  if (paths.size() < 2) throw InvalidParameter("combine needs at least two input files");
  Bpa acc = load_bpa(paths[0]);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const Bpa next = load_bpa(paths[i]);
    auto [result, conflict] = combine_with_conflict(acc, next);
    err << "step " << i << ": conflict " << detail::format_shortest(conflict) << '\n';
    acc = std::move(result);
  }
  out << format_bpa(acc);
  return kOk;
}

// ---------------------------------------------------------------------------
// approx
// ---------------------------------------------------------------------------

struct ApproxOptions {
  std::string method;
  std::optional<std::size_t> k;
  std::optional<std::string> l;  // count or "inf"
  std::optional<double> x;
  bool stats = false;
};

inline ApproxMethod method_from_options(const ApproxOptions& o) {
  const std::string name = detail::lowercase(o.method);
  auto need_k = [&]() {
    if (!o.k) throw InvalidParameter(name + " requires --k");
    return *o.k;
  };
  ApproxMethod method;
  if (name == "bayes") {
    method = Bayesian{};
  } else if (name == "summarize") {
    method = Summarize{need_k()};
  } else if (name == "d1") {
    method = D1{need_k()};
  } else if (name == "klx") {
    Klx p{o.k.value_or(1), std::nullopt, o.x.value_or(0.0)};
    if (o.l && detail::lowercase(*o.l) != "inf") {
      p.l = detail::parse_count(*o.l);
      if (!p.l) throw InvalidParameter("--l must be a count or 'inf'");
    }
    method = p;
  } else {
    // also accept report names such as D1_8 or klx_01
    method = parse_method_name(o.method).method;
  }
  validate(method);
  return method;
}

inline int cmd_approx(const std::string& path, const ApproxOptions& opts, std::ostream& out) {
  const ApproxMethod method = method_from_options(opts);
  const Bpa input = load_bpa(path);
  const Bpa result = approximate(input, method);
  out << format_bpa(result);
  if (opts.stats) {
    const ErrorTriple e = evaluate(input, result);
    out << "# n_original " << input.size() << '\n'
        << "# n_approx " << result.size() << '\n'
        << "# error1 " << detail::format_shortest(e.error1) << '\n'
        << "# error2 " << e.error2 << '\n'
        << "# error3 " << e.error3 << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::optional<std::string> config_path;
  /// `key=value` overrides applied after the config file, in order.
  std::vector<std::string> settings;
  std::string out_dir = ".";
};

inline ExperimentConfig resolve_bench_config(const BenchOptions& opts) {
  ExperimentConfig cfg;
  cfg.methods = default_method_suite();
  if (auto s = env_seed()) cfg.gen.seed = *s;
  if (opts.config_path) cfg = parse_experiment_config(read_file(*opts.config_path), cfg);
  for (const auto& kv : opts.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidParameter("expected key=value, got '" + kv + "'");
    apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << content) || !(f.flush())) {
    throw InputError("cannot write '" + path.string() + "'");
  }
}

inline int cmd_bench(const BenchOptions& opts, std::ostream& err) {
  const ExperimentConfig cfg = resolve_bench_config(opts);
  const ExperimentResult result = run_experiment(cfg);

  std::ostringstream trials;
  std::ostringstream stats;
  write_trials_csv(trials, cfg, result);
  write_stats_csv(stats, cfg, result);

  const std::filesystem::path dir(opts.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "trials.csv", trials.str());
  write_file(dir / "stats.csv", stats.str());
  err << "trials completed " << result.stats.trials_completed << ", aborted "
      << result.stats.trials_aborted << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

inline int cmd_gen(GenConfig gen, const std::vector<std::string>& labels, std::ostream& out) {
  if (!labels.empty()) gen.frame_size = labels.size();
  validate(gen);
  const Frame frame = labels.empty() ? Frame::anonymous(gen.frame_size) : Frame(labels);
  Rng rng(gen.seed);
  out << format_bpa(gen_random_bpa(gen, rng, frame));
  return kOk;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dempster-Shafer combination and focal-element approximation", "evidential"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::vector<std::string> combine_files;
  auto* combine_cmd = app.add_subcommand("combine", "Combine bpa documents with Dempster's rule");
  combine_cmd->add_option("files", combine_files, "Input documents (at least two)")->required();

  ApproxOptions approx_opts;
  std::string approx_file;
  auto* approx_cmd = app.add_subcommand("approx", "Approximate a bpa document");
  approx_cmd->add_option("file", approx_file, "Input document")->required();
  approx_cmd->add_option("--method", approx_opts.method, "bayes | klx | summarize | d1")->required();
  approx_cmd->add_option("--k", approx_opts.k, "k parameter");
  approx_cmd->add_option("--l", approx_opts.l, "klx upper bound (count or 'inf')");
  approx_cmd->add_option("--x", approx_opts.x, "klx mass slack in [0, 1]");
  approx_cmd->add_flag("--stats", approx_opts.stats, "Append focal counts and error measures");

  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Run the randomized approximation study");
  bench_cmd->add_option("--config", bench_opts.config_path, "key = value configuration file");
  bench_cmd->add_option("--set", bench_opts.settings, "Override one key (key=value), repeatable");
  bench_cmd->add_option("--out", bench_opts.out_dir, "Output directory for trials.csv and stats.csv");
  // shorthand flags, applied after --config and --set
  std::optional<std::string> seed, trials, combinations, methods, track, threads, frame_size,
      focal_count, rate;
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_option("--trials", trials);
  bench_cmd->add_option("--combinations", combinations);
  bench_cmd->add_option("--methods", methods, "Comma-separated method names, or 'default'");
  bench_cmd->add_option("--track", track, "cumulative | from-exact");
  bench_cmd->add_option("--threads", threads);
  bench_cmd->add_option("--frame-size", frame_size);
  bench_cmd->add_option("--focal-count", focal_count);
  bench_cmd->add_option("--rate", rate);

  GenConfig gen;
  std::optional<std::uint64_t> gen_seed;
  std::vector<std::string> gen_labels;
  auto* gen_cmd = app.add_subcommand("gen", "Emit a random bpa document");
  gen_cmd->add_option("--frame-size", gen.frame_size, "Frame size")->capture_default_str();
  gen_cmd->add_option("--focal-count", gen.focal_count, "Number of focal elements")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "RNG seed");
  gen_cmd->add_option("--rate", gen.rate, "Exponential rate")->capture_default_str();
  gen_cmd->add_option("--labels", gen_labels, "Frame labels (overrides --frame-size)")->delimiter(',');

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*combine_cmd) return cmd_combine(combine_files, out, err);
    if (*approx_cmd) return cmd_approx(approx_file, approx_opts, out);
    if (*bench_cmd) {
      const std::pair<const char*, std::optional<std::string>*> shorthands[] = {
          {"seed", &seed},           {"trials", &trials},         {"combinations", &combinations},
          {"methods", &methods},     {"track", &track},           {"threads", &threads},
          {"frame_size", &frame_size}, {"focal_count", &focal_count}, {"rate", &rate}};
      for (const auto& [key, value] : shorthands) {
        if (*value) bench_opts.settings.push_back(std::string(key) + "=" + **value);
      }
      return cmd_bench(bench_opts, err);
    }
    if (*gen_cmd) {
      if (gen_seed) {
        gen.seed = *gen_seed;
      } else if (auto s = env_seed()) {
        gen.seed = *s;
      }
      return cmd_gen(gen, gen_labels, out);
    }
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace evidential::cli
