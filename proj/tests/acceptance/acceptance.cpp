// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "n00n/bootstrap.hpp"
#include "n00n/calibrator.hpp"
#include "n00n/crb.hpp"
#include "n00n/experiments.hpp"
#include "n00n/network.hpp"
#include "n00n/rng.hpp"
#include "n00n/trainer.hpp"

using namespace n00n;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Fisher information of the ideal model equals 4 on a 181-phase grid.
Outcome criterion_fisher() {
  const auto ideal = SensorModel::symmetric(4, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 180; ++i) {
    const auto f = fisher_per_event(ideal, Phase::degrees(i));
    worst = std::max(worst, f.infinite ? INFINITY : std::abs(f.per_event - 4.0));
  }
  return {worst < 1e-9, fmt("max |F - 4| = %.3g", worst)};
}

// 2. Backprop Jacobian against central differences on random small networks.
Outcome criterion_jacobian() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<std::string> shapes{"3", "5", "4x3", "2x3x2", "8"};
  double worst = 0.0;
  const int networks = 24;
  for (int t = 0; t < networks; ++t) {
    const std::size_t dim = 1 + static_cast<std::size_t>(t) % 4;
    auto net = Network::initialize(Topology::parse(shapes[t % shapes.size()], dim), 500 + t);
    auto params = net.parameters();
    for (auto& p : params) p += 0.5 * u(rng);
    net.set_parameters(params);
    Dataset data(dim);
    std::vector<double> x(dim);
    for (int i = 0; i < 8; ++i) {
      for (auto& v : x) v = u(rng);
      data.add(x, u(rng));
    }
    const Matrix j = jacobian(net, data);
    const double h = 1e-5;
    for (std::size_t c = 0; c < params.size(); ++c) {
      auto p = params, m = params;
      p[c] += h;
      m[c] -= h;
      Network np = net, nm = net;
      np.set_parameters(p);
      nm.set_parameters(m);
      const auto rp = residuals(np, data);
      const auto rm = residuals(nm, data);
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double fd = (rp[i] - rm[i]) / (2 * h);
        const double scale = std::max({std::abs(fd), std::abs(j(i, c)), 1e-3});
        worst = std::max(worst, std::abs(fd - j(i, c)) / scale);
      }
    }
  }
  return {worst < 1e-5, std::to_string(networks) + " networks, max rel err " + fmt("%.3g", worst)};
}

// 3. Linear hook: one accepted LM step solves a linear-consistent problem.
Outcome criterion_lm_linear() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset data(4);
  const std::vector<double> w{0.7, -1.1, 0.25, 2.0};
  for (int i = 0; i < 60; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = u(rng);
    data.add(x, w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + w[3] * x[3] - 0.4);
  }
  const auto step = lm_step(Network(Topology{4, {}, Activation::identity}), data, 1e-12, TrainConfig{});
  Eigen::MatrixXd a(data.size(), 5);
  Eigen::VectorXd y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) a(i, k) = data.input(i)[k];
    a(i, 4) = 1.0;
    y(i) = data.target(i);
  }
  const Eigen::VectorXd oracle = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  const auto p = step.weights.parameters();
  double dev = 0.0;
  for (int k = 0; k < 5; ++k) dev = std::max(dev, std::abs(p[k] - oracle(k)));
  const bool ok = step.accepted && step.train_mse < 1e-20 && dev < 1e-10;
  return {ok, fmt("MSE = %.3g", step.train_mse) + fmt(", max |w - w_normal| = %.3g", dev)};
}

// 4. Noiseless fringe dataset on a 1-degree grid.
Outcome criterion_convergence() {
  const auto model = SensorModel::symmetric();
  Dataset data(4);
  for (int deg = 0; deg < 180; ++deg) data.add(model.probabilities(Phase::degrees(deg)), deg);
  TrainConfig cfg;
  cfg.seed = 1;
  const auto res = train(data, Topology::parse("30", 4), cfg);
  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < res.split.test.size(); ++i) {
    const double phi = res.split.test.target(i);
    if (phi < 10.0 || phi > 170.0) continue;
    const double e = res.model.predict(res.split.test.input(i)) - phi;
    sq += e * e;
    ++n;
  }
  const double rmse = std::sqrt(sq / static_cast<double>(n));
  return {n > 0 && rmse < 0.5,
          fmt("test RMSE = %.4f deg", rmse) + " over " + std::to_string(n) + " held-out phases"};
}

struct Fig4Run {
  StudySettings settings;
  std::optional<TrainedEstimator> estimator;
};

// Shared 1-degree estimator for criteria 5, 7, 8 and 9.
Fig4Run& fig4() {
  static Fig4Run run = [] {
    Fig4Run r;
    r.settings = StudySettings{};
    const auto rec = simulate_study_record(r.settings, 1.0, derive_seed(r.settings.seed, 1));
    r.estimator = calibrate(rec, r.settings.topology(), r.settings.train, r.settings.n_b,
                            derive_seed(r.settings.seed, 2));
    return r;
  }();
  return run;
}

// 5. Estimate std within 2x the CRB at the test phases (90 deg exempt).
Outcome criterion_fig4() {
  auto& f = fig4();
  const std::vector<double> phases{20.8, 45.0, 140.0, 168.8};
  double worst = 0.0;
  std::ostringstream detail;
  for (std::size_t m = 0; m < f.settings.fm_events.size(); ++m) {
    const double events = f.settings.fm_events[m];
    const auto ev = evaluate_error(*f.estimator, f.settings.model, phases, f.settings.repetitions,
                                   events, derive_seed(derive_seed(f.settings.seed, 3), m));
    double row = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
      row = std::max(row, ev.std_deg[i] / crb_sigma(f.settings.model, Phase::degrees(phases[i]), events));
    }
    worst = std::max(worst, row);
    detail << (m ? ", " : "") << "M=" << events << ": " << fmt("%.2f", row);
  }
  return {worst <= 2.0, "max std/CRB " + detail.str()};
}

// 6. F_M rises with M at a 2-degree training step.
Outcome criterion_fm_trend() {
  const StudySettings s;
  const auto t = fm_table(s, 2.0);
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    ok = ok && t.rows[i].fm > 1.0;
    if (i > 0) ok = ok && t.rows[i].fm > t.rows[i - 1].fm;
    detail << (i ? ", " : "") << "F_" << t.rows[i].events << "=" << fmt("%.3f", t.rows[i].fm);
  }
  return {ok, detail.str()};
}

// 7. Error at the edges of the calibrated range exceeds the mid-range median.
Outcome criterion_boundary() {
  auto& f = fig4();
  std::vector<double> mid;
  for (double phi : default_error_phases()) {
    if (phi >= 30.0 && phi <= 150.0) mid.push_back(phi);
  }
  const std::vector<double> edges{2.0, 178.0};
  const auto ev_mid = evaluate_error(*f.estimator, f.settings.model, mid, f.settings.repetitions,
                                     f.settings.events, derive_seed(f.settings.seed, 4));
  const auto ev_edge = evaluate_error(*f.estimator, f.settings.model, edges, f.settings.repetitions,
                                      f.settings.events, derive_seed(f.settings.seed, 5));
  const double med = median(ev_mid.rmse_deg);
  const bool ok = ev_edge.rmse_deg[0] > med && ev_edge.rmse_deg[1] > med;
  return {ok, fmt("RMSE(2) = %.3f", ev_edge.rmse_deg[0]) + fmt(", RMSE(178) = %.3f", ev_edge.rmse_deg[1]) +
                  fmt(", mid-range median = %.3f deg", med)};
}

bool within_4se_poisson(const std::vector<double>& x, double lambda, std::string& why) {
  const double n = static_cast<double>(x.size());
  double s = 0.0, s2 = 0.0;
  for (double v : x) {
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = (s2 - n * mean * mean) / (n - 1);
  const double se_mean = std::sqrt(lambda / n);
  const double se_var = std::sqrt((lambda + 2 * lambda * lambda * n / (n - 1)) / n);
  const bool ok = std::abs(mean - lambda) < 4 * se_mean && std::abs(var - lambda) < 4 * se_var;
  if (!ok) why += fmt(" [lambda %.1f:", lambda) + fmt(" mean %.2f", mean) + fmt(" var %.2f]", var);
  return ok;
}

// 8. Poisson simulator and bootstrap moments, simplex, scale invariance, CLI reproducibility.
Outcome criterion_invariants() {
  bool ok = true;
  std::string why;
  const auto model = SensorModel::symmetric();
  const Phase phi = Phase::degrees(37.0);
  const auto p = model.probabilities(phi);
  constexpr int draws = 10000;

  std::vector<std::vector<double>> sim(4);
  for (int s = 0; s < draws; ++s) {
    const auto c = simulate_counts(model, phi, 1.0, static_cast<std::uint64_t>(s));
    for (std::size_t k = 0; k < 4; ++k) sim[k].push_back(static_cast<double>(c.counts[k]));
  }
  for (std::size_t k = 0; k < 4; ++k) ok = within_4se_poisson(sim[k], 10000.0 * p[k], why) && ok;

  const CountVector base{{10000, 3700, 420, 5880}, 1.0};
  std::vector<std::vector<double>> boot(4);
  for (const auto& r : resample_replicas(base, draws, 5)) {
    for (std::size_t k = 0; k < 4; ++k) boot[k].push_back(static_cast<double>(r.counts[k]));
  }
  for (std::size_t k = 0; k < 4; ++k) {
    ok = within_4se_poisson(boot[k], static_cast<double>(base.counts[k]), why) && ok;
  }

  for (int i = 0; i <= 3600; ++i) {
    const auto q = model.probabilities(Phase::degrees(0.1 * i));
    double sum = 0.0;
    for (double v : q) sum += v;
    if (std::abs(sum - 1.0) > 1e-12 || *std::min_element(q.begin(), q.end()) < 0.0) {
      ok = false;
      why += " [simplex]";
      break;
    }
  }

  auto& f = fig4();
  for (int s = 0; s < 200; ++s) {
    const auto c = simulate_counts(model, Phase::degrees(0.9 * s), 1.0, 900 + s);
    if (c.total() == 0) continue;
    CountVector scaled = c;
    for (auto& v : scaled.counts) v *= 7;
    scaled.exposure_s = 7.0;
    if (f.estimator->point(c).raw_deg != f.estimator->point(scaled).raw_deg) {
      ok = false;
      why += " [scale invariance]";
      break;
    }
  }

  const std::vector<std::vector<std::string>> runs{
      {"simulate-record", "--seed", "31"},
      {"calibrate", "--seed", "31", "--record_step_deg", "5", "--hidden", "10", "--n_b", "20"},
      {"sweep-bootstrap", "--seed", "31", "--record_step_deg", "3", "--hidden", "5", "--sweep_n_b", "5,10",
       "--n_trainings", "2", "--max_epochs", "20", "--repetitions", "10"},
      {"crb-curve", "--seed", "31"},
  };
  for (const auto& args : runs) {
    std::ostringstream o1, o2, e;
    const int c1 = cli::run(args, o1, e);
    const int c2 = cli::run(args, o2, e);
    if (c1 != 0 || c2 != 0 || o1.str() != o2.str() || o1.str().empty()) {
      ok = false;
      why += " [cli " + args.front() + "]";
    }
  }
  return {ok, why.empty() ? "moments within 4 SE, simplex, scale invariance, 4 CLI runs identical" : why};
}

// 9. Bootstrap uncertainty at 45 deg scales as M^(-1/2).
Outcome criterion_m_scaling() {
  auto& f = fig4();
  const std::vector<double> events{1000.0, 10000.0, 100000.0};
  std::vector<double> lx, ly;
  std::ostringstream detail;
  for (std::size_t m = 0; m < events.size(); ++m) {
    std::vector<double> dphi;
    for (std::size_t j = 0; j < 50; ++j) {
      const std::uint64_t seed = derive_seed(derive_seed(f.settings.seed, 6), m * 1000 + j);
      const auto counts = simulate_counts(f.settings.model, Phase::degrees(45.0),
                                          events[m] / f.settings.model.rate(), seed);
      dphi.push_back(estimate(*f.estimator, counts, f.settings.n_b, derive_seed(seed, 1)).delta_phi_deg);
    }
    const double med = median(dphi);
    lx.push_back(std::log(events[m]));
    ly.push_back(std::log(med));
    detail << (m ? ", " : "") << fmt("%.4f", med);
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope >= -0.6 && slope <= -0.4, fmt("slope = %.3f", slope) + " (median dphi deg: " + detail.str() + ")"};
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "analytic Fisher identity", 1.0, criterion_fisher},
      {2, "Jacobian correctness", 10.0, criterion_jacobian},
      {3, "LM sanity (linear hook)", 1.0, criterion_lm_linear},
      {4, "end-to-end convergence", 300.0, criterion_convergence},
      {5, "std within 2x CRB (1 deg step)", 1800.0, criterion_fig4},
      {6, "F_M trend (2 deg step)", 1800.0, criterion_fm_trend},
      {7, "boundary effect", 1800.0, criterion_boundary},
      {8, "statistical invariants", 60.0, criterion_invariants},
      {9, "M-scaling of bootstrap uncertainty", 600.0, criterion_m_scaling},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    const bool pass = o.pass && dt <= c.budget_s;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail
              << fmt(" [%.2f s", dt) << fmt(" / budget %.0f s]", c.budget_s) << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
