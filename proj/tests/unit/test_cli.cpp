#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "n00n/calibrator.hpp"
#include "n00n/record_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = n00n::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "n00n_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("crb-curve output and header") {
  const auto r = run({"crb-curve", "--crb_step_deg", "45", "--visibility", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# n00n crb-curve\n", 0) == 0);
  CHECK(r.out.find("# visibility = 1") != std::string::npos);
  CHECK(r.out.find("phase_deg,fisher_rad2,sigma_deg,M\n0,4,") != std::string::npos);
}

TEST_CASE("config file and flag overrides") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "study.cfg";
  std::ofstream(cfg) << "# tiny\nrecord_step_deg = 30\nrecord_exposure_s = 0.1\nseed = 5\n";
  const auto r = run({"simulate-record", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  const auto rec = n00n::parse_record_csv(r.out);
  CHECK(rec.size() == 6);
  CHECK(r.out.find("# seed = 5") != std::string::npos);
  const auto r2 = run({"simulate-record", "--config", cfg.string(), "--seed", "6", "--record_step_deg", "60"});
  REQUIRE(r2.code == 0);
  CHECK(n00n::parse_record_csv(r2.out).size() == 3);
  CHECK(r2.out.find("# seed = 6") != std::string::npos);

  std::ofstream(dir / "bad.cfg") << "no_such_key = 1\n";
  const auto bad = run({"crb-curve", "--config", (dir / "bad.cfg").string()});
  CHECK(bad.code != 0);
  CHECK(bad.err.find("no_such_key") != std::string::npos);
}

TEST_CASE("errors are reported with a non-zero exit") {
  CHECK(run({}).code != 0);
  CHECK(run({"estimate"}).code != 0);
  CHECK(run({"crb-curve", "--kernels", "mmx"}).code != 0);
  const auto dir = scratch_dir();
  std::ofstream(dir / "neg.csv") << "phase_deg,count_1,count_2,count_3,count_4,exposure_s\n0,1,-1,1,1,1\n";
  const auto r = run({"calibrate", "--record", (dir / "neg.csv").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("calibrate, estimate and evaluate are reproducible bit for bit") {
  const auto dir = scratch_dir();
  const std::vector<std::string> common{"--record_step_deg", "10", "--record_exposure_s", "0.3",
                                        "--hidden", "5", "--max_epochs", "15", "--n_b", "8",
                                        "--seed", "12"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail = {}) {
    head.insert(head.end(), common.begin(), common.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  const auto est_a = dir / "a.est";
  const auto est_b = dir / "b.est";
  REQUIRE(run(with({"calibrate"}, {"--out", est_a.string()})).code == 0);
  REQUIRE(run(with({"calibrate", "--kernels", "scalar"}, {"--out", est_b.string()})).code == 0);
  CHECK(slurp(est_a) == slurp(est_b));
  CHECK(n00n::TrainedEstimator::load(est_a.string()).provenance().seed == 12);

  const auto e1 = run(with({"estimate", "--estimator", est_a.string(), "--counts", "3000,4500,1200,1300"}));
  const auto e2 = run(with({"estimate", "--estimator", est_a.string(), "--counts", "3000,4500,1200,1300"}));
  REQUIRE(e1.code == 0);
  CHECK(e1.out == e2.out);
  CHECK(e1.out.rfind("phi_hat_deg,delta_phi_deg,n_b,flag_clamped\n", 0) == 0);

  const std::vector<std::string> eval_args{"--error_phases_deg", "20,60,100", "--repetitions", "10"};
  const auto v1 = run(with({"evaluate", "--estimator", est_a.string()}, eval_args));
  const auto v2 = run(with({"evaluate", "--estimator", est_a.string()}, eval_args));
  REQUIRE(v1.code == 0);
  CHECK(v1.out == v2.out);
  CHECK(v1.out.find("phase_deg,mean_deg,std_deg,rmse_deg\n") != std::string::npos);
}
