#pragma once

#include "arc/baselines.hpp"
#include "arc/c2g.hpp"
#include "arc/estimators.hpp"
#include "arc/fusion.hpp"
#include "arc/ingest.hpp"
#include "arc/metrics.hpp"
#include "arc/synth.hpp"
#include "arc/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arc {

inline constexpr const char* kArcMethod = "arc";
inline constexpr const char* kFusionMethod = "fusion";
inline constexpr const char* kViterbiMethod = "viterbi";

// Everything a run needs. JSON (de)serialization lives in config.hpp.
struct RunConfig {
  // Signal source: a file when input_path is set, otherwise `scenario`.
  std::optional<std::string> input_path;
  std::optional<double> input_sample_rate_hz;
  ScenarioSpec scenario{};

  FramingConfig framing{};
  double grid_min_rpm{300.0};
  double grid_max_rpm{4000.0};
  double grid_step_rpm{1.0};

  EstimatorConfig estimators{};
  C2gConfig c2g{};
  FusionWeights fusion{};
  TrackerConfig tracker{};
  ViterbiOptions viterbi{};

  std::string out_dir{"arc_out"};
  bool dump_posteriors{false};
  bool plot{false};
  // Any of yin, cepstrum, comb, fusion, viterbi.
  std::vector<std::string> baselines{"yin", "cepstrum", "comb", "fusion"};

  // Benchmark settings.
  std::vector<std::string> benchmark_scenarios{"S1", "S2", "S3", "S4"};
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> benchmark_methods{"yin", "cepstrum", "comb", "arc"};
  unsigned threads{0};  // 0: hardware concurrency

  RpmGrid grid() const;
  // Throws std::invalid_argument with the offending field named.
  void validate() const;
};

// Per-frame evidence after C2G and fusion.
struct FrameEvidence {
  std::vector<std::size_t> frame_index;
  std::vector<double> time_s;
  std::vector<GridLogLikelihood> fused;
  // Single-estimator framewise picks keyed by estimator id.
  std::map<std::string, std::vector<double>> picks;
};

FrameEvidence collect_evidence(const Signal& signal, const RunConfig& cfg);

struct Analysis {
  FrameEvidence evidence;
  std::vector<TrajectoryPoint> arc;
  std::map<std::string, BaselineTrajectory> baselines;
};

// Evidence, ARC tracking and the configured baselines on one signal.
Analysis analyze(const Signal& signal, const RunConfig& cfg, const PosteriorSink& sink = {});

std::vector<double> mmse_series(const std::vector<TrajectoryPoint>& traj);

// Metrics per method; with a reference all four, otherwise jitter/max_jump only.
struct MethodMetrics {
  std::optional<Metrics> full;
  StabilityMetrics stability;
};
std::map<std::string, MethodMetrics> evaluate(const Analysis& analysis,
                                              const std::vector<double>* reference);

struct RunOutputs {
  std::filesystem::path trajectory_csv;
  std::filesystem::path metrics_json;
  std::vector<std::filesystem::path> baseline_csvs;
  std::optional<std::filesystem::path> posterior_csv;
  std::optional<std::filesystem::path> plot_svg;
  std::map<std::string, MethodMetrics> metrics;
  std::size_t frames{0};
};

// Loads or synthesizes the signal, analyzes it and writes the result bundle
// into cfg.out_dir.
RunOutputs run_pipeline(const RunConfig& cfg);

struct BenchmarkCell {
  std::string scenario;
  std::string method;
  double mean_rmse{0.0};
  double mean_p95{0.0};
  std::size_t runs{0};
};

struct BenchmarkTable {
  std::vector<std::string> scenarios;
  std::vector<std::string> methods;
  std::vector<BenchmarkCell> cells;  // scenario-major

  const BenchmarkCell& at(const std::string& scenario, const std::string& method) const;
  std::string to_csv() const;
  std::string to_text() const;
};

// Metrics of every benchmark method on one synthesized scenario.
std::map<std::string, Metrics> score_scenario(const ScenarioSpec& spec, const RunConfig& cfg);

// Mean RMSE/P95 over cfg.seeds for each scenario x method. Writes
// benchmark.csv and benchmark.txt into cfg.out_dir when write_files is set.
BenchmarkTable run_benchmark(const RunConfig& cfg, bool write_files = true);

struct AblationResult {
  Metrics framewise;
  Metrics arc;
};

// Framewise fusion vs full tracking on cfg.scenario for each seed.
std::vector<AblationResult> run_ablation(const RunConfig& cfg, bool write_files = true);

}  // namespace arc
