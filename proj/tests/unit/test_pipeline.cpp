#include "doctest.h"

#include "arc/config.hpp"
#include "arc/pipeline.hpp"
#include "testing.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace arc;
using arc::testing::scratch_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

// Short synthetic run: 1 s of signal gives 37 frames at the default framing.
RunConfig short_config(const std::filesystem::path& dir) {
  RunConfig cfg;
  cfg.scenario.duration_s = 1.0;
  cfg.out_dir = dir.string();
  return cfg;
}

std::string error_of(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

std::string json_error(const std::string& text) {
  try {
    run_config_from_json(Json::parse(text));
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

struct Cli {
  int status;
  std::string output;
};

Cli run_cli(const std::string& args, const std::filesystem::path& dir) {
  const auto log = dir / "cli.log";
  const std::string cmd = std::string("\"") + ARC_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return {raw, slurp(log)};
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config serialization is a fixed point") {
  RunConfig cfg;
  const std::string first = to_json(cfg).dump(2);
  CHECK(to_json(run_config_from_json(Json::parse(first))).dump(2) == first);

  cfg.input_path = "x.csv";
  cfg.input_sample_rate_hz = 44100.5;
  cfg.scenario.scenario = Scenario::S4;
  cfg.scenario.detuning = {0.0, 0.001, 0.002, 0.003, 0.004};
  cfg.scenario.seed = 18446744073709551615ull;
  cfg.grid_step_rpm = 0.5;
  cfg.estimators.set_enabled({"comb", "yin"});
  cfg.c2g.beta = 0.1 + 0.2;
  cfg.fusion.weights = {{"yin", 0.25}, {"comb", 2.0}};
  cfg.tracker.sigma_min_rpm = 12.345678901234567;
  cfg.baselines = {"viterbi"};
  cfg.seeds = {3, 1, 4, 1, 5};
  cfg.dump_posteriors = true;
  const std::string second = to_json(cfg).dump(2);
  const RunConfig back = run_config_from_json(Json::parse(second));
  CHECK(to_json(back).dump(2) == second);
  CHECK(back.scenario == cfg.scenario);
  CHECK(back.c2g.beta == cfg.c2g.beta);
  CHECK(back.fusion.weights == cfg.fusion.weights);

  const auto dir = scratch_dir("config");
  save_run_config(cfg, dir / "c.json");
  CHECK(to_json(load_run_config(dir / "c.json")).dump(2) == second);

  // Absent fields keep their defaults.
  const RunConfig partial = run_config_from_json(Json::parse(R"({"grid": {"step_rpm": 2}})"));
  CHECK(partial.grid_step_rpm == 2.0);
  CHECK(partial.grid_min_rpm == 300.0);
  CHECK(partial.framing.frame_len == 8192);
}

TEST_CASE("configuration errors name the field") {
  CHECK(json_error(R"({"grid": {"stepsize": 1}})") == "grid.stepsize: unknown field");
  CHECK(json_error(R"({"colour": 1})") == "config.colour: unknown field");
  CHECK(json_error(R"({"estimators": {"enabled": ["yin", "swipe"]}})").find("estimators.enabled") == 0);
  CHECK(json_error(R"({"estimators": {"enabled": ["yin", "swipe"]}})").find("'swipe'") != std::string::npos);
  CHECK(json_error(R"({"scenario": {"snr": 3}})") == "scenario.snr: unknown field");
  CHECK(json_error(R"({"framing": {"hop": "big"}})").find("framing.hop") == 0);
  CHECK(json_error(R"({"fusion_weights": {"swipe": 1}})").find("fusion_weights.swipe") == 0);

  RunConfig cfg;
  cfg.baselines = {"kalman"};
  CHECK(error_of(cfg).find("output.baselines") == 0);
  cfg = {};
  cfg.benchmark_methods = {"arc", "magic"};
  CHECK(error_of(cfg).find("benchmark.methods") == 0);
  cfg = {};
  cfg.grid_step_rpm = 0.7;
  CHECK(error_of(cfg).find("grid") != std::string::npos);
  cfg = {};
  cfg.framing.hop = 0;
  CHECK(!error_of(cfg).empty());
  cfg = {};
  CHECK(error_of(cfg).empty());
}

TEST_CASE("clean scenario end to end with defaults") {
  const auto dir = scratch_dir("e2e");
  RunConfig cfg;
  cfg.out_dir = dir.string();
  const auto out = run_pipeline(cfg);
  REQUIRE(out.frames == 437);
  const auto& arc_metrics = out.metrics.at(kArcMethod);
  REQUIRE(arc_metrics.full.has_value());
  CHECK(arc_metrics.full->rmse < 5.0);

  const auto json = Json::parse(slurp(out.metrics_json));
  CHECK(json["frames"] == 437);
  CHECK(json["methods"]["arc"]["rmse"].get<double>() < 5.0);
  for (const char* m : {"arc", "yin", "cepstrum", "comb", "fusion"}) {
    CAPTURE(m);
    CHECK(json["methods"].contains(m));
    for (const char* k : {"rmse", "p95", "jitter", "max_jump"}) CHECK(json["methods"][m].contains(k));
  }

  const auto traj = lines_of(out.trajectory_csv);
  REQUIRE(traj.size() == 438);
  CHECK(traj[0] == "frame_index,time_s,map_rpm,mmse_rpm,sigma_rpm,entropy_nats");
  CHECK(traj[1].rfind("1,0.32,", 0) == 0);
  CHECK(lines_of(dir / "ground_truth.csv").size() == 438);
  CHECK(out.baseline_csvs.size() == 4);
  for (const auto& p : out.baseline_csvs) CHECK(lines_of(p).size() == 438);
  CHECK(std::filesystem::exists(dir / "config.json"));
  CHECK(!out.posterior_csv);
}

TEST_CASE("metrics are byte-identical across runs") {
  const auto a = scratch_dir("det_a");
  const auto b = scratch_dir("det_b");
  RunConfig cfg = short_config(a);
  cfg.scenario.scenario = Scenario::S2;
  cfg.baselines = {"yin", "fusion", "viterbi"};
  const auto first = run_pipeline(cfg);
  cfg.out_dir = b.string();
  const auto second = run_pipeline(cfg);
  CHECK(slurp(first.metrics_json) == slurp(second.metrics_json));
  CHECK(slurp(first.trajectory_csv) == slurp(second.trajectory_csv));
}

TEST_CASE("trajectory rows follow the framing for any hop") {
  for (std::size_t hop : {256u, 1000u, 4096u}) {
    const auto dir = scratch_dir("rows");
    RunConfig cfg = short_config(dir);
    cfg.scenario.duration_s = 1.7;
    cfg.framing.hop = hop;
    cfg.baselines.clear();
    const auto out = run_pipeline(cfg);
    const std::size_t expect = (static_cast<std::size_t>(1.7 * 12800) - 8192) / hop + 1;
    CHECK(out.frames == expect);
    CHECK(lines_of(out.trajectory_csv).size() == expect + 1);
  }
}

TEST_CASE("posterior dump is a T x G matrix and the plot is written") {
  const auto dir = scratch_dir("dump");
  RunConfig cfg = short_config(dir);
  cfg.dump_posteriors = true;
  cfg.plot = true;
  cfg.grid_step_rpm = 2.0;
  const auto out = run_pipeline(cfg);
  REQUIRE(out.posterior_csv);
  const auto rows = lines_of(*out.posterior_csv);
  REQUIRE(rows.size() == out.frames + 1);
  CHECK(rows[0].rfind("300,302,", 0) == 0);
  for (const auto& r : rows) REQUIRE(fields(r) == 1851);
  double total = 0.0;
  std::istringstream last(rows.back());
  for (std::string cell; std::getline(last, cell, ',');) total += std::stod(cell);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  REQUIRE(out.plot_svg);
  const std::string svg = slurp(*out.plot_svg);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("ARC (MMSE)") != std::string::npos);
}

TEST_CASE("file input runs without a reference") {
  const auto dir = scratch_dir("file_in");
  ScenarioSpec spec;
  spec.duration_s = 1.0;
  write_csv(synthesize(spec, {}).signal, dir / "sig.csv");
  RunConfig cfg;
  cfg.input_path = (dir / "sig.csv").string();
  cfg.out_dir = (dir / "out").string();
  cfg.baselines = {"comb"};
  const auto out = run_pipeline(cfg);
  CHECK(out.frames == 37);
  CHECK(!out.metrics.at(kArcMethod).full);
  const auto json = Json::parse(slurp(out.metrics_json));
  CHECK(!json["methods"]["arc"].contains("rmse"));
  CHECK(json["methods"]["arc"].contains("jitter"));
  CHECK(!std::filesystem::exists(dir / "out" / "ground_truth.csv"));
}

TEST_CASE("benchmark shape, single runs and determinism") {
  const auto dir = scratch_dir("bench");
  RunConfig cfg = short_config(dir);
  cfg.scenario.duration_s = 0.8;
  cfg.seeds = {1, 2};
  const auto table = run_benchmark(cfg);
  CHECK(table.scenarios == std::vector<std::string>{"S1", "S2", "S3", "S4"});
  CHECK(table.methods == std::vector<std::string>{"yin", "cepstrum", "comb", "arc"});
  CHECK(table.cells.size() == 16);
  for (const auto& c : table.cells) CHECK(c.runs == 2);
  const auto csv = lines_of(dir / "benchmark.csv");
  REQUIRE(csv.size() == 5);
  CHECK(csv[0] == "method,S1_rmse,S1_p95,S2_rmse,S2_p95,S3_rmse,S3_p95,S4_rmse,S4_p95");
  CHECK(csv[4].rfind("arc,", 0) == 0);
  CHECK(std::filesystem::exists(dir / "benchmark.txt"));

  const auto again = run_benchmark(cfg, false);
  CHECK(again.to_csv() == table.to_csv());
  RunConfig repeated = cfg;
  repeated.seeds = {1, 2, 1, 2};
  const auto doubled = run_benchmark(repeated, false);
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    CHECK(doubled.cells[i].mean_rmse == doctest::Approx(table.cells[i].mean_rmse).epsilon(1e-12));
    CHECK(doubled.cells[i].mean_p95 == doctest::Approx(table.cells[i].mean_p95).epsilon(1e-12));
  }

  RunConfig single = cfg;
  single.benchmark_scenarios = {"S3"};
  single.seeds = {7};
  const auto one = run_benchmark(single, false);
  ScenarioSpec spec = cfg.scenario;
  spec.scenario = Scenario::S3;
  spec.seed = 7;
  const auto direct = score_scenario(spec, single);
  for (const auto& m : one.methods) {
    CHECK(one.at("S3", m).mean_rmse == direct.at(m).rmse);
    CHECK(one.at("S3", m).mean_p95 == direct.at(m).p95);
  }
  CHECK_THROWS_AS(one.at("S1", "arc"), std::out_of_range);
}

TEST_CASE("ablation reports both methods per seed") {
  const auto dir = scratch_dir("ablate");
  RunConfig cfg = short_config(dir);
  cfg.scenario.scenario = Scenario::S5;
  cfg.scenario.duration_s = 1.5;
  cfg.scenario.jump_time_s = 0.9;
  cfg.seeds = {1, 2, 3};
  const auto res = run_ablation(cfg);
  CHECK(res.size() == 3);
  const auto csv = lines_of(dir / "ablation.csv");
  CHECK(csv.size() == 7);
  CHECK(csv[0] == "seed,method,rmse,p95,jitter,max_jump");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("unknown estimator in a config exits nonzero and names the field") {
  const auto dir = scratch_dir("cli_bad");
  std::ofstream(dir / "bad.json") << R"({"estimators": {"enabled": ["yin", "swipe"]}})";
  const auto r = run_cli("run --config \"" + (dir / "bad.json").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  CHECK(r.status != 0);
  CHECK(r.output.find("estimators.enabled") != std::string::npos);
  CHECK(r.output.find("swipe") != std::string::npos);
}

TEST_CASE("bad flags exit nonzero") {
  const auto dir = scratch_dir("cli_flags");
  CHECK(run_cli("run --no-such-flag", dir).status != 0);
  const auto grid = run_cli("run --grid 300:4000:0.7 --out \"" + dir.string() + "\"", dir);
  CHECK(grid.status != 0);
  CHECK(grid.output.find("grid") != std::string::npos);
  const auto base = run_cli("run --baselines kalman --out \"" + dir.string() + "\"", dir);
  CHECK(base.status != 0);
  CHECK(base.output.find("output.baselines") != std::string::npos);
  CHECK(run_cli("run --scenario S9", dir).status != 0);
}

TEST_CASE("run, synth and benchmark from the command line") {
  const auto dir = scratch_dir("cli_ok");
  std::ofstream(dir / "short.json") << R"({"scenario": {"duration_s": 0.8}})";
  const std::string config = "--config \"" + (dir / "short.json").string() + "\"";

  auto r = run_cli("run " + config + " --scenario S1 --seed 3 --baselines comb,viterbi --dump-posteriors --plot --out \"" +
                       (dir / "run").string() + "\"",
                   dir);
  CHECK(r.status == 0);
  CHECK(std::filesystem::exists(dir / "run" / "metrics.json"));
  CHECK(std::filesystem::exists(dir / "run" / "baseline_viterbi.csv"));
  CHECK(std::filesystem::exists(dir / "run" / "posteriors.csv"));
  CHECK(std::filesystem::exists(dir / "run" / "trajectory.svg"));
  const auto saved = load_run_config(dir / "run" / "config.json");
  CHECK(saved.scenario.scenario == Scenario::S1);
  CHECK(saved.scenario.seed == 3);

  r = run_cli("synth " + config + " --scenario S5 --seed 2 --format csv --out \"" + (dir / "syn").string() + "\"", dir);
  CHECK(r.status == 0);
  const auto truth = lines_of(dir / "syn" / "S5_seed2_truth.csv");
  CHECK(truth.size() == 18);
  CHECK(truth[0] == "frame_index,time_s,rpm_ref");
  const Signal sig = load_signal(dir / "syn" / "S5_seed2.csv", SignalFormat::Csv);
  CHECK(sig.size() == 10240);

  r = run_cli("run --input \"" + (dir / "syn" / "S5_seed2.csv").string() + "\" --baselines none --out \"" +
                  (dir / "from_file").string() + "\"",
              dir);
  CHECK(r.status == 0);
  CHECK(lines_of(dir / "from_file" / "trajectory.csv").size() == 18);

  r = run_cli("benchmark " + config + " --scenarios S1,S3 --seeds 1..2 --out \"" + (dir / "bench").string() + "\"", dir);
  CHECK(r.status == 0);
  const auto csv = lines_of(dir / "bench" / "benchmark.csv");
  REQUIRE(csv.size() == 5);
  CHECK(csv[0] == "method,S1_rmse,S1_p95,S3_rmse,S3_p95");
}

}  // TEST_SUITE
