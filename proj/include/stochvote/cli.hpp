#pragma once

// Command-line front end: parse a run description (flags and/or a flat
// key=value file), evaluate the sweep and/or simulate it, write CSV or SVG.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stochvote/errors.hpp"
#include "stochvote/expectations.hpp"
#include "stochvote/model.hpp"
#include "stochvote/report.hpp"
#include "stochvote/simulator.hpp"

namespace stochvote::cli {

struct AlphaRange {
  double start = 0.0;
  double stop = 0.999;
  std::optional<double> step;  // nullopt: 1/(2n)
};

struct RunSpec {
  std::int64_t n = 300;
  std::optional<double> beta;
  std::optional<std::int64_t> egoists;
  double mu = 0.0;
  double sigma = 1.0;
  std::int64_t steps = 1000;
  std::vector<Principle> principles{Principle::A};
  AlphaRange alpha;
  std::string mode = "exact";  // exact | approx | auto | simulate | both
  std::int64_t replications = 100;
  std::uint64_t seed = 1;
  std::string out;             // empty: standard output
  std::string format = "csv";  // csv | svg | both
};

inline std::vector<std::string> split(const std::string& text, char delimiter) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, delimiter)) parts.push_back(part);
  if (!text.empty() && text.back() == delimiter) parts.emplace_back();
  return parts;
}

inline double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw parameter_error(what + ": '" + text + "' is not a number");
  }
  return value;
}

// "a" (single point), "start:stop" (auto step) or "start:stop:step|auto".
inline AlphaRange parse_alpha_range(const std::string& text) {
  const auto parts = split(text, ':');
  AlphaRange range;
  if (parts.size() == 1) {
    range.start = range.stop = parse_real(parts[0], "alpha");
    range.step = 1.0;
  } else if (parts.size() == 2 || parts.size() == 3) {
    range.start = parse_real(parts[0], "alpha start");
    range.stop = parse_real(parts[1], "alpha stop");
    if (parts.size() == 3 && parts[2] != "auto") {
      range.step = parse_real(parts[2], "alpha step");
    }
  } else {
    throw parameter_error("alpha must be 'a', 'start:stop' or 'start:stop:step' (step may be 'auto')");
  }
  if (!(range.start >= 0.0 && range.start < 1.0 && range.stop >= 0.0 && range.stop < 1.0)) {
    throw parameter_error("alpha values must lie in [0, 1); got '" + text + "'");
  }
  if (range.stop < range.start) throw parameter_error("alpha stop is below alpha start");
  if (range.step && !(*range.step > 0.0)) throw parameter_error("alpha step must be positive");
  return range;
}

inline std::vector<Principle> parse_principles(const std::string& text) {
  std::vector<Principle> list;
  for (const auto& name : split(text, ',')) {
    if (name.empty()) throw parameter_error("empty entry in principle list '" + text + "'");
    list.push_back(parse_principle(name));
  }
  if (list.empty()) throw parameter_error("principle list is empty");
  return list;
}

// Checks cross-parameter constraints; returns the model at alpha = start.
inline ModelParams validate(const RunSpec& spec) {
  if (spec.beta.has_value() == spec.egoists.has_value()) {
    throw parameter_error("give exactly one of --beta or --egoists");
  }
  if (spec.n < 1) throw parameter_error("--n must be at least 1");
  if (spec.steps < 1) throw parameter_error("--s must be at least 1");
  if (spec.replications < 1) throw parameter_error("--replications must be at least 1");
  if (spec.mode != "exact" && spec.mode != "approx" && spec.mode != "auto" &&
      spec.mode != "simulate" && spec.mode != "both") {
    throw parameter_error("--mode must be exact, approx, auto, simulate or both");
  }
  if (spec.format != "csv" && spec.format != "svg" && spec.format != "both") {
    throw parameter_error("--format must be csv, svg or both");
  }
  if (spec.format == "both" && spec.out.empty()) {
    throw parameter_error("--format both writes two files and needs --out");
  }
  const ModelParams model =
      spec.beta ? ModelParams::from_beta(spec.n, *spec.beta, spec.mu, spec.sigma, spec.alpha.start)
                : ModelParams(spec.n, *spec.egoists, spec.mu, spec.sigma, spec.alpha.start);
  if (model.group() == 0) {
    throw parameter_error("the society has no group members (g = 0); every principle needs a "
                          "group, so lower --egoists or --beta");
  }
  for (Principle p : spec.principles) {
    if (p == Principle::APrime && model.egoists() == 0) {
      throw parameter_error("Principle Aprime is undefined with beta = 0 (no egoists); "
                            "use A or Adprime, or add egoists");
    }
  }
  if (spec.mode == "approx" && model.egoists() == 0) {
    throw parameter_error("--mode approx needs at least one egoist");
  }
  return model;
}

inline std::vector<CsvRow> execute(const RunSpec& spec, std::ostream& diagnostics) {
  const ModelParams model = validate(spec);
  const double step = spec.alpha.step.value_or(1.0 / (2.0 * static_cast<double>(spec.n)));
  const std::vector<double> grid = alpha_grid(spec.alpha.start, spec.alpha.stop, step);
  if (grid.back() < spec.alpha.stop - 1e-12) {
    diagnostics << "note: alpha grid ends at " << format_number(grid.back()) << "; stop "
                << format_number(spec.alpha.stop) << " is not a whole number of steps "
                << format_number(step) << " from start\n";
  }

  const bool analytic = spec.mode != "simulate";
  const bool simulate = spec.mode == "simulate" || spec.mode == "both";
  EvalMode eval_mode = EvalMode::exact;
  if (spec.mode == "approx") eval_mode = EvalMode::approx;
  if (spec.mode == "auto") eval_mode = EvalMode::auto_select;

  std::vector<CsvRow> rows;
  for (Principle principle : spec.principles) {
    for (double a : grid) {
      const ModelParams at = model.with_alpha(a);
      if (analytic) rows.push_back(to_csv_row(make_sweep_point(at, principle, eval_mode, spec.steps)));
      if (simulate) {
        // The same seed at every grid point: common random numbers across alpha.
        const SimConfig config{at, principle, spec.steps, spec.replications, spec.seed};
        rows.push_back(to_csv_row(a, principle, run(config)));
      }
    }
  }
  return rows;
}

inline std::string svg_path_for(const std::string& out) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return out.substr(0, dot) + ".svg";
  }
  return out + ".svg";
}

inline std::string chart_title(const RunSpec& spec, const ModelParams& model) {
  std::ostringstream t;
  t << "n=" << model.n() << ", egoists=" << model.egoists() << " (beta=" << format_number(model.beta())
    << "), mu=" << format_number(spec.mu) << ", sigma=" << format_number(spec.sigma)
    << ", s=" << spec.steps;
  return t.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw parameter_error("cannot open output file '" + path + "'");
  file << contents;
  if (!file) throw parameter_error("failed writing output file '" + path + "'");
}

// Builds the parser bound to `spec`. Flag names double as config-file keys.
inline void configure(CLI::App& app, RunSpec& spec, std::string& principle_text,
                      std::string& alpha_text) {
  app.set_config("--config", "", "Flat key=value file; command-line flags override it");
  app.add_option("--n", spec.n, "Number of participants")->capture_default_str();
  app.add_option("--beta", spec.beta, "Half the share of egoists (egoists = 2*beta*n)");
  app.add_option("--egoists", spec.egoists, "Number of egoists");
  app.add_option("--mu", spec.mu, "Mean of a proposal's per-participant increment")
      ->capture_default_str();
  app.add_option("--sigma", spec.sigma, "Standard deviation of the increment")
      ->capture_default_str();
  app.add_option("--s", spec.steps, "Number of steps")->capture_default_str();
  app.add_option("--principle", principle_text,
                 "Comma-separated group principles: A, B, Aprime, Adprime")
      ->join(',')  // a config-file list arrives as separate values
      ->capture_default_str();
  app.add_option("--alpha", alpha_text, "Thresholds: a | start:stop | start:stop:step|auto")
      ->capture_default_str();
  app.add_option("--mode", spec.mode, "exact | approx | auto | simulate | both")
      ->capture_default_str();
  app.add_option("--replications", spec.replications, "Simulation replications")
      ->capture_default_str();
  app.add_option("--seed", spec.seed, "Simulation seed")->capture_default_str();
  app.add_option("--out", spec.out, "Output path (CSV, or SVG with --format svg)");
  app.add_option("--format", spec.format, "csv | svg | both")->capture_default_str();
}

// Parses arguments (argv[0] excluded) into a RunSpec.
inline RunSpec parse_run_spec(const std::vector<std::string>& args) {
  RunSpec spec;
  std::string principle_text = "A";
  std::string alpha_text = "0:0.999:auto";
  CLI::App app{"stochvote"};
  configure(app, spec, principle_text, alpha_text);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  spec.principles = parse_principles(principle_text);
  spec.alpha = parse_alpha_range(alpha_text);
  return spec;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  std::string principle_text = "A";
  std::string alpha_text = "0:0.999:auto";
  CLI::App app{"Expected capital increments of egoists and group members under "
               "threshold-majority voting",
               "stochvote"};
  configure(app, spec, principle_text, alpha_text);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    spec.principles = parse_principles(principle_text);
    spec.alpha = parse_alpha_range(alpha_text);
    const ModelParams model = validate(spec);
    const std::vector<CsvRow> rows = execute(spec, err);

    std::ostringstream csv;
    std::ostringstream svg;
    if (spec.format != "svg") write_csv(csv, rows);
    if (spec.format != "csv") write_svg(svg, rows, chart_title(spec, model));

    if (spec.out.empty()) {
      out << (spec.format == "svg" ? svg.str() : csv.str());
    } else if (spec.format == "both") {
      write_file(spec.out, csv.str());
      write_file(svg_path_for(spec.out), svg.str());
    } else {
      write_file(spec.out, spec.format == "svg" ? svg.str() : csv.str());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace stochvote::cli
