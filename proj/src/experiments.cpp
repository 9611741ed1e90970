#include "n00n/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "n00n/errors.hpp"
#include "n00n/rng.hpp"

namespace n00n {

namespace {

std::string join_doubles(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string hidden_string(const std::vector<std::size_t>& hidden) {
  std::string out;
  for (std::size_t i = 0; i < hidden.size(); ++i) out += (i ? "x" : "") + std::to_string(hidden[i]);
  return out;
}

std::vector<std::size_t> parse_hidden(const std::string& spec) {
  return Topology::parse(spec, 1).hidden;
}

std::size_t positive_size(const KeyValueConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
  if (v <= 0) throw InvalidArgument(key + " must be positive");
  return static_cast<std::size_t>(v);
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> default_error_phases() {
  std::vector<double> out;
  for (int j = 0; j < 30; ++j) out.push_back(3.0 + 6.0 * j);
  return out;
}

std::vector<double> default_fm_phases() { return {20.8, 45.0, 90.0, 140.0, 168.8}; }

std::vector<double> default_fm_events() { return {1000.0, 5000.0, 10000.0, 40000.0}; }

std::vector<std::vector<std::size_t>> default_neuron_grid() {
  return {{5}, {10}, {20}, {30}, {20, 10}, {50}};
}

std::vector<std::size_t> default_bootstrap_grid() { return {5, 10, 25, 50, 100}; }

Topology StudySettings::topology() const {
  Topology t;
  t.input_dim = model.channels();
  t.hidden = hidden;
  t.validate();
  return t;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "K", "offsets_deg", "visibility", "efficiency", "rate",
      "hidden", "n_b",
      "train_fraction", "validation_fraction", "test_fraction",
      "mu_initial", "mu_increase", "mu_decrease", "mu_max",
      "max_epochs", "patience", "min_gradient",
      "record_start_deg", "record_end_deg", "record_step_deg", "record_exposure_s",
      "error_phases_deg", "repetitions", "events",
      "n_trainings", "sweep_hidden", "sweep_n_b",
      "fm_step_deg", "fm_events", "fm_phases_deg",
      "crb_events", "crb_step_deg",
      "seed"};
  return keys;
}

StudySettings StudySettings::from_config(const KeyValueConfig& cfg) {
  StudySettings s;
  s.model = SensorModel::from_config(cfg);
  if (auto h = cfg.find("hidden")) s.hidden = parse_hidden(*h);
  s.n_b = positive_size(cfg, "n_b", s.n_b);

  TrainConfig& t = s.train;
  t.fractions.train = cfg.get_double("train_fraction", t.fractions.train);
  t.fractions.validation = cfg.get_double("validation_fraction", t.fractions.validation);
  t.fractions.test = cfg.get_double("test_fraction", t.fractions.test);
  t.mu_initial = cfg.get_double("mu_initial", t.mu_initial);
  t.mu_increase = cfg.get_double("mu_increase", t.mu_increase);
  t.mu_decrease = cfg.get_double("mu_decrease", t.mu_decrease);
  t.mu_max = cfg.get_double("mu_max", t.mu_max);
  t.max_epochs = positive_size(cfg, "max_epochs", t.max_epochs);
  t.patience = positive_size(cfg, "patience", t.patience);
  t.min_gradient = cfg.get_double("min_gradient", t.min_gradient);
  t.validate();

  s.record_start_deg = cfg.get_double("record_start_deg", s.record_start_deg);
  s.record_end_deg = cfg.get_double("record_end_deg", s.record_end_deg);
  s.record_step_deg = cfg.get_double("record_step_deg", s.record_step_deg);
  s.record_exposure_s = cfg.get_double("record_exposure_s", s.record_exposure_s);

  s.error_phases = cfg.get_doubles("error_phases_deg", s.error_phases);
  s.repetitions = positive_size(cfg, "repetitions", s.repetitions);
  s.events = cfg.get_double("events", s.events);

  s.n_trainings = positive_size(cfg, "n_trainings", s.n_trainings);
  if (auto grid = cfg.find("sweep_hidden")) {
    s.neuron_grid.clear();
    for (const auto& item : split_list(*grid)) s.neuron_grid.push_back(parse_hidden(item));
  }
  if (auto grid = cfg.find("sweep_n_b")) {
    s.bootstrap_grid.clear();
    for (const auto& item : split_list(*grid)) {
      const auto v = parse_int(item, "sweep_n_b");
      if (v <= 0) throw InvalidArgument("sweep_n_b entries must be positive");
      s.bootstrap_grid.push_back(static_cast<std::size_t>(v));
    }
  }

  s.fm_step_deg = cfg.get_double("fm_step_deg", s.fm_step_deg);
  s.fm_events = cfg.get_doubles("fm_events", s.fm_events);
  s.fm_phases = cfg.get_doubles("fm_phases_deg", s.fm_phases);
  s.crb_events = cfg.get_double("crb_events", s.crb_events);
  s.crb_step_deg = cfg.get_double("crb_step_deg", s.crb_step_deg);
  s.seed = cfg.get_u64("seed", s.seed);
  return s;
}

KeyValueConfig StudySettings::to_config() const {
  KeyValueConfig cfg;
  model.write_config(cfg);
  cfg.set("hidden", hidden_string(hidden));
  cfg.set("n_b", std::to_string(n_b));
  cfg.set("train_fraction", format_double(train.fractions.train));
  cfg.set("validation_fraction", format_double(train.fractions.validation));
  cfg.set("test_fraction", format_double(train.fractions.test));
  cfg.set("mu_initial", format_double(train.mu_initial));
  cfg.set("mu_increase", format_double(train.mu_increase));
  cfg.set("mu_decrease", format_double(train.mu_decrease));
  cfg.set("mu_max", format_double(train.mu_max));
  cfg.set("max_epochs", std::to_string(train.max_epochs));
  cfg.set("patience", std::to_string(train.patience));
  cfg.set("min_gradient", format_double(train.min_gradient));
  cfg.set("record_start_deg", format_double(record_start_deg));
  cfg.set("record_end_deg", format_double(record_end_deg));
  cfg.set("record_step_deg", format_double(record_step_deg));
  cfg.set("record_exposure_s", format_double(record_exposure_s));
  cfg.set("error_phases_deg", join_doubles(error_phases));
  cfg.set("repetitions", std::to_string(repetitions));
  cfg.set("events", format_double(events));
  cfg.set("n_trainings", std::to_string(n_trainings));
  std::string grid;
  for (std::size_t i = 0; i < neuron_grid.size(); ++i) grid += (i ? ", " : "") + hidden_string(neuron_grid[i]);
  cfg.set("sweep_hidden", grid);
  grid.clear();
  for (std::size_t i = 0; i < bootstrap_grid.size(); ++i) grid += (i ? ", " : "") + std::to_string(bootstrap_grid[i]);
  cfg.set("sweep_n_b", grid);
  cfg.set("fm_step_deg", format_double(fm_step_deg));
  cfg.set("fm_events", join_doubles(fm_events));
  cfg.set("fm_phases_deg", join_doubles(fm_phases));
  cfg.set("crb_events", format_double(crb_events));
  cfg.set("crb_step_deg", format_double(crb_step_deg));
  cfg.set("seed", std::to_string(seed));
  return cfg;
}

CalibrationRecord simulate_study_record(const StudySettings& s, double step_deg, std::uint64_t seed) {
  return simulate_record(s.model, s.record_start_deg, s.record_end_deg, step_deg,
                         s.record_exposure_s, seed);
}

ErrorEvaluation evaluate_error(const PhaseEstimatorFn& estimator, const SensorModel& model,
                               std::span<const double> phases_deg, std::size_t repetitions,
                               double events, std::uint64_t seed) {
  if (repetitions == 0) throw InvalidArgument("repetitions must be positive");
  if (!(events > 0.0)) throw InvalidArgument("event count must be positive");
  ErrorEvaluation ev;
  ev.phases_deg.assign(phases_deg.begin(), phases_deg.end());
  ev.repetitions = repetitions;
  ev.events = events;
  const double exposure = events / model.rate();
  std::vector<double> estimates(repetitions);
  for (std::size_t i = 0; i < phases_deg.size(); ++i) {
    const Phase phi = Phase::degrees(phases_deg[i]);
    const std::uint64_t phase_seed = derive_seed(seed, i);
    double sq = 0.0;
    for (std::size_t j = 0; j < repetitions; ++j) {
      estimates[j] = estimator(simulate_counts(model, phi, exposure, derive_seed(phase_seed, j)));
      sq += (estimates[j] - phases_deg[i]) * (estimates[j] - phases_deg[i]);
    }
    ev.mean_deg.push_back(mean_of(estimates));
    ev.std_deg.push_back(sample_std(estimates));
    ev.rmse_deg.push_back(std::sqrt(sq / static_cast<double>(repetitions)));
  }
  ev.epsilon_deg = mean_of(ev.std_deg);
  return ev;
}

ErrorEvaluation evaluate_error(const TrainedEstimator& estimator, const SensorModel& model,
                               std::span<const double> phases_deg, std::size_t repetitions,
                               double events, std::uint64_t seed) {
  if (estimator.channels() != model.channels()) {
    throw DimensionError("estimator and model disagree on the number of projections");
  }
  for (double phi : phases_deg) {
    if (phi < estimator.phase_min_deg() || phi > estimator.phase_max_deg()) {
      throw InvalidArgument("test phase " + format_double(phi) + " deg lies outside the estimator domain");
    }
  }
  return evaluate_error([&](const CountVector& c) { return estimator.point(c).phi_deg; }, model,
                        phases_deg, repetitions, events, seed);
}

namespace {

double mean_crb(const StudySettings& s) {
  std::vector<double> sig;
  for (double phi : s.error_phases) sig.push_back(crb_sigma(s.model, Phase::degrees(phi), s.events));
  return mean_of(sig);
}

// Runs n_trainings calibrations for one swept value and summarizes epsilon.
void sweep_point(const StudySettings& s, const CalibrationRecord& record, const Topology& topo,
                 std::size_t n_b, std::uint64_t value_seed, SweepResult& out) {
  std::vector<double> eps;
  for (std::size_t t = 0; t < s.n_trainings; ++t) {
    const TrainedEstimator est = calibrate(record, topo, s.train, n_b, derive_seed(value_seed, t));
    eps.push_back(evaluate_error(est, s.model, s.error_phases, s.repetitions, s.events,
                                 derive_seed(s.seed, 2))
                      .epsilon_deg);
  }
  out.eps_deg.push_back(mean_of(eps));
  out.eps_err_deg.push_back(sample_std(eps));
}

CalibrationRecord sweep_record(const StudySettings& s, const std::optional<CalibrationRecord>& record) {
  if (s.n_trainings < 2) throw InvalidArgument("a sweep needs at least two trainings per point");
  return record ? *record : simulate_study_record(s, s.record_step_deg, derive_seed(s.seed, 1));
}

}  // namespace

SweepResult sweep_neurons(const StudySettings& s, const std::optional<CalibrationRecord>& record,
                          const std::vector<std::vector<std::size_t>>& grid) {
  const CalibrationRecord rec = sweep_record(s, record);
  SweepResult out;
  out.parameter = "n_n";
  out.n_trainings = s.n_trainings;
  out.crb_reference_deg = mean_crb(s);
  for (std::size_t v = 0; v < grid.size(); ++v) {
    Topology topo = s.topology();
    topo.hidden = grid[v];
    topo.validate();
    out.values.push_back(topo.hidden_string());
    sweep_point(s, rec, topo, s.n_b, derive_seed(s.seed, 100 + v), out);
  }
  return out;
}

SweepResult sweep_bootstrap(const StudySettings& s, const std::optional<CalibrationRecord>& record,
                            const std::vector<std::size_t>& grid) {
  const CalibrationRecord rec = sweep_record(s, record);
  SweepResult out;
  out.parameter = "n_b";
  out.n_trainings = s.n_trainings;
  out.crb_reference_deg = mean_crb(s);
  for (std::size_t v = 0; v < grid.size(); ++v) {
    out.values.push_back(std::to_string(grid[v]));
    sweep_point(s, rec, s.topology(), grid[v], derive_seed(s.seed, 100 + v), out);
  }
  return out;
}

FmTable fm_table(const StudySettings& s, double step_deg) {
  const CalibrationRecord rec = simulate_study_record(s, step_deg, derive_seed(s.seed, 1));
  CalibrationResult cal = calibrate_with_record(rec, s.topology(), s.train, s.n_b, derive_seed(s.seed, 2));
  FmTable t = fm_table(s, cal.estimator, step_deg);
  t.training = std::move(cal.record);
  return t;
}

FmTable fm_table(const StudySettings& s, const TrainedEstimator& estimator, double step_deg) {
  if (s.fm_events.empty()) throw InvalidArgument("fm_events is empty");
  FmTable t;
  t.step_deg = step_deg;
  t.phases_deg = s.fm_phases;
  for (std::size_t m = 0; m < s.fm_events.size(); ++m) {
    const double events = s.fm_events[m];
    const ErrorEvaluation ev = evaluate_error(estimator, s.model, s.fm_phases, s.repetitions, events,
                                              derive_seed(derive_seed(s.seed, 3), m));
    FmRow row;
    row.events = events;
    for (std::size_t i = 0; i < s.fm_phases.size(); ++i) {
      const double var = ev.std_deg[i] * ev.std_deg[i];
      const double sigma = crb_sigma(s.model, Phase::degrees(s.fm_phases[i]), events);
      row.variance_deg2.push_back(var);
      row.crb_sigma_deg.push_back(sigma);
      row.per_phase_fm.push_back(var / (sigma * sigma));
    }
    row.fm = mean_of(row.per_phase_fm);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<CrbPoint> crb_curve(const SensorModel& model, double step_deg, double events) {
  if (!(step_deg > 0.0)) throw InvalidArgument("phase step must be positive");
  std::vector<CrbPoint> out;
  for (std::size_t i = 0;; ++i) {
    const double phi = static_cast<double>(i) * step_deg;
    if (phi > 180.0 + 1e-9) break;
    const FisherInformation f = fisher_per_event(model, Phase::degrees(phi));
    CrbPoint pt;
    pt.phase_deg = phi;
    pt.events = events;
    pt.fisher = f.per_event;
    if (f.infinite) {
      pt.sigma_rad = 0.0;
    } else if (f.per_event > 0.0) {
      pt.sigma_rad = 1.0 / std::sqrt(events * f.per_event);
    } else {
      pt.sigma_rad = std::numeric_limits<double>::infinity();
    }
    pt.sigma_deg = rad_to_deg(pt.sigma_rad);
    out.push_back(pt);
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r, std::string_view comments) {
  out << comments;
  out << "# swept = " << r.parameter << '\n';
  out << "# crb_reference_deg = " << format_double(r.crb_reference_deg) << '\n';
  out << "param,eps_deg,eps_err_deg,n_trainings\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    out << r.values[i] << ',' << format_double(r.eps_deg[i]) << ',' << format_double(r.eps_err_deg[i])
        << ',' << r.n_trainings << '\n';
  }
}

void write_crb_csv(std::ostream& out, const std::vector<CrbPoint>& pts, std::string_view comments) {
  out << comments;
  out << "phase_deg,fisher_rad2,sigma_deg,M\n";
  for (const auto& p : pts) {
    out << format_double(p.phase_deg) << ',' << format_double(p.fisher) << ','
        << format_double(p.sigma_deg) << ',' << format_double(p.events) << '\n';
  }
}

void write_fm_csv(std::ostream& out, const FmTable& t, std::string_view comments) {
  out << comments;
  out << "# training_step_deg = " << format_double(t.step_deg) << '\n';
  for (const auto& row : t.rows) {
    out << "# M = " << format_double(row.events) << ": per-phase F = " << join_doubles(row.per_phase_fm)
        << '\n';
  }
  out << "M,F_M\n";
  for (const auto& row : t.rows) out << format_double(row.events) << ',' << format_double(row.fm) << '\n';
}

void write_evaluation_csv(std::ostream& out, const ErrorEvaluation& e, std::string_view comments) {
  out << comments;
  out << "# eps_deg = " << format_double(e.epsilon_deg) << '\n';
  out << "phase_deg,mean_deg,std_deg,rmse_deg\n";
  for (std::size_t i = 0; i < e.phases_deg.size(); ++i) {
    out << format_double(e.phases_deg[i]) << ',' << format_double(e.mean_deg[i]) << ','
        << format_double(e.std_deg[i]) << ',' << format_double(e.rmse_deg[i]) << '\n';
  }
}

void write_estimate_csv(std::ostream& out, const Estimate& e) {
  out << "phi_hat_deg,delta_phi_deg,n_b,flag_clamped\n";
  out << format_double(e.phi_hat_deg) << ',' << format_double(e.delta_phi_deg) << ',' << e.n_b << ','
      << (e.clamped ? 1 : 0) << '\n';
}

}  // namespace n00n
