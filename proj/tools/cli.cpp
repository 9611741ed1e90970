#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "n00n/calibrator.hpp"
#include "n00n/errors.hpp"
#include "n00n/experiments.hpp"
#include "n00n/kernels.hpp"
#include "n00n/record_io.hpp"
#include "n00n/rng.hpp"

namespace n00n::cli {

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string record_path;
  std::string estimator_path;
  std::string counts;
  double counts_exposure_s = 1.0;
  std::string kernels;
  std::map<std::string, std::string> overrides;
};

// Sink that writes to --out when given, otherwise to the command's stdout.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

StudySettings load_settings(const Options& opt) {
  KeyValueConfig cfg;
  if (!opt.config_path.empty()) cfg = KeyValueConfig::load(opt.config_path);
  for (const auto& [key, value] : cfg.entries()) {
    const auto& known = known_config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("unknown configuration key '" + key + "' in " + opt.config_path);
    }
  }
  for (const auto& [key, value] : opt.overrides) cfg.set(key, value);
  if (opt.seed) cfg.set("seed", std::to_string(*opt.seed));
  return StudySettings::from_config(cfg);
}

std::string header(const std::string& command, const StudySettings& s) {
  return "# n00n " + command + "\n" + s.to_config().as_comment_block();
}

CalibrationRecord record_for(const Options& opt, const StudySettings& s) {
  if (!opt.record_path.empty()) return load_record_csv(opt.record_path);
  return simulate_study_record(s, s.record_step_deg, derive_seed(s.seed, 1));
}

CountVector parse_counts(const Options& opt) {
  if (opt.counts.empty()) throw InvalidArgument("estimate needs --counts c1,c2,...");
  CountVector cv;
  cv.exposure_s = opt.counts_exposure_s;
  for (const auto& item : split_list(opt.counts)) cv.counts.push_back(parse_int(item, "--counts"));
  cv.validate();
  return cv;
}

TrainedEstimator require_estimator(const Options& opt) {
  if (opt.estimator_path.empty()) throw InvalidArgument(opt.command + " needs --estimator <file>");
  return TrainedEstimator::load(opt.estimator_path);
}

int dispatch(const Options& opt, std::ostream& out) {
  const StudySettings s = load_settings(opt);
  Output sink(opt.out_path, out);
  std::ostream& os = sink.stream();
  const std::string& cmd = opt.command;

  if (cmd == "simulate-record") {
    const auto rec = simulate_study_record(s, s.record_step_deg, s.seed);
    write_record_csv(os, rec, header(cmd, s));
  } else if (cmd == "calibrate") {
    const auto rec = record_for(opt, s);
    calibrate(rec, s.topology(), s.train, s.n_b, s.seed).write(os);
  } else if (cmd == "estimate") {
    const auto est = require_estimator(opt);
    write_estimate_csv(os, estimate(est, parse_counts(opt), s.n_b, s.seed));
  } else if (cmd == "evaluate") {
    const auto est = require_estimator(opt);
    const auto ev = evaluate_error(est, s.model, s.error_phases, s.repetitions, s.events, s.seed);
    write_evaluation_csv(os, ev, header(cmd, s));
  } else if (cmd == "sweep-neurons") {
    std::optional<CalibrationRecord> rec;
    if (!opt.record_path.empty()) rec = load_record_csv(opt.record_path);
    write_sweep_csv(os, sweep_neurons(s, rec, s.neuron_grid), header(cmd, s));
  } else if (cmd == "sweep-bootstrap") {
    std::optional<CalibrationRecord> rec;
    if (!opt.record_path.empty()) rec = load_record_csv(opt.record_path);
    write_sweep_csv(os, sweep_bootstrap(s, rec, s.bootstrap_grid), header(cmd, s));
  } else if (cmd == "crb-curve") {
    write_crb_csv(os, crb_curve(s.model, s.crb_step_deg, s.crb_events), header(cmd, s));
  } else if (cmd == "fm-table") {
    const auto table = opt.estimator_path.empty() ? fm_table(s, s.fm_step_deg)
                                                  : fm_table(s, require_estimator(opt), s.fm_step_deg);
    write_fm_csv(os, table, header(cmd, s));
  } else {
    throw InvalidArgument("unknown command '" + cmd + "'");
  }
  os.flush();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural-network calibration toolkit for a simulated two-photon phase sensor", "n00n"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path, "Key-value configuration file");
  app.add_option("--seed", opt.seed, "Master seed (overrides the config)");
  app.add_option("--out", opt.out_path, "Output file (default: stdout)");
  app.add_option("--record", opt.record_path, "Calibration record CSV");
  app.add_option("--estimator", opt.estimator_path, "Trained estimator file");
  app.add_option("--counts", opt.counts, "Counts to estimate from, comma separated");
  app.add_option("--counts-exposure", opt.counts_exposure_s, "Exposure of --counts, seconds");
  app.add_option("--kernels", opt.kernels, "Force a kernel variant: scalar, avx2, neon");

  std::map<std::string, std::string> raw;
  for (const auto& key : known_config_keys()) {
    if (key == "seed") continue;
    app.add_option("--" + key, raw[key], "Config override: " + key);
  }

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate-record", "Simulate a calibration record CSV"},
      {"calibrate", "Train an estimator from a record (or a simulated one)"},
      {"estimate", "Estimate the phase of one acquisition with bootstrap uncertainty"},
      {"evaluate", "Estimator error over simulated acquisitions"},
      {"sweep-neurons", "Error versus hidden-layer size"},
      {"sweep-bootstrap", "Error versus bootstrap replicas n_b"},
      {"crb-curve", "Fisher information and CRB over phase"},
      {"fm-table", "Variance-to-CRB ratio F_M versus event count"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  opt.command = app.get_subcommands().front()->get_name();
  for (const auto& key : known_config_keys()) {
    if (key != "seed" && app.count("--" + key) > 0) opt.overrides[key] = raw[key];
  }

  try {
    if (!opt.kernels.empty()) {
      bool found = false;
      for (auto isa : {kernels::Isa::scalar, kernels::Isa::avx2, kernels::Isa::neon}) {
        if (opt.kernels == kernels::name(isa)) {
          kernels::select(isa);
          found = true;
        }
      }
      if (!found) throw InvalidArgument("unknown kernel variant '" + opt.kernels + "'");
    }
    return dispatch(opt, out);
  } catch (const std::exception& e) {
    err << "n00n " << opt.command << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace n00n::cli
