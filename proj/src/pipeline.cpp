#include "arc/pipeline.hpp"

#include "arc/config.hpp"
#include "arc/stats.hpp"
#include "arc/svg.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace arc {

namespace {

const std::set<std::string>& known_baselines() {
  static const std::set<std::string> names{kYinId, kCepstrumId, kCombId, kFusionMethod,
                                           kViterbiMethod};
  return names;
}

bool is_single_estimator(const std::string& name) {
  return name == kYinId || name == kCepstrumId || name == kCombId;
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

RpmGrid RunConfig::grid() const { return RpmGrid::with_step(grid_min_rpm, grid_max_rpm, grid_step_rpm); }

void RunConfig::validate() const {
  framing.validate();
  (void)grid();
  c2g.validate();
  fusion.validate();
  tracker.validate();
  if (estimators.enabled().empty()) {
    throw std::invalid_argument("estimators: at least one estimator must be enabled");
  }
  if (estimators.comb.n_candidates < 2) {
    throw std::invalid_argument("estimators.comb_candidates: must be >= 2");
  }
  if (estimators.comb.n_harmonics < 1) {
    throw std::invalid_argument("estimators.n_harmonics: must be >= 1");
  }
  if (estimators.comb.zero_pad_factor < 1) {
    throw std::invalid_argument("estimators.comb_zero_pad: must be >= 1");
  }
  for (const auto& b : baselines) {
    if (!known_baselines().count(b)) {
      throw std::invalid_argument("output.baselines: unknown baseline '" + b +
                                  "' (expected yin, cepstrum, comb, fusion or viterbi)");
    }
  }
  for (const auto& m : benchmark_methods) {
    if (m != kArcMethod && !known_baselines().count(m)) {
      throw std::invalid_argument("benchmark.methods: unknown method '" + m + "'");
    }
  }
  for (const auto& s : benchmark_scenarios) (void)parse_scenario(s);
  if (viterbi.n_candidates_per_frame < 1) {
    throw std::invalid_argument("viterbi.n_candidates_per_frame: must be >= 1");
  }
  if (!(viterbi.transition_penalty_per_rpm >= 0.0)) {
    throw std::invalid_argument("viterbi.transition_penalty_per_rpm: must be >= 0");
  }
  if (input_sample_rate_hz && !(*input_sample_rate_hz > 0.0)) {
    throw std::invalid_argument("source.sample_rate_hz: must be positive");
  }
}

FrameEvidence collect_evidence(const Signal& signal, const RunConfig& cfg) {
  const RpmGrid grid = cfg.grid();
  const auto frames = frame_signal(signal, cfg.framing);

  // Single-estimator baselines may ask for curves that are not fused.
  EstimatorConfig curve_cfg = cfg.estimators;
  std::set<std::string> pick_ids;
  for (const auto& b : cfg.baselines) {
    if (!is_single_estimator(b)) continue;
    pick_ids.insert(b);
    if (b == kYinId) curve_cfg.use_yin = true;
    if (b == kCepstrumId) curve_cfg.use_cepstrum = true;
    if (b == kCombId) curve_cfg.use_comb = true;
  }
  const auto fused_ids = cfg.estimators.enabled();

  FrameEvidence ev;
  ev.fused.reserve(frames.size());
  for (const auto& id : pick_ids) ev.picks[id].reserve(frames.size());

  std::vector<GridLogLikelihood> per_estimator;
  for (const auto& frame : frames) {
    const auto curves =
        compute_curves(frame.data, signal.sample_rate_hz, grid.r_min(), grid.r_max(), curve_cfg);
    per_estimator.clear();
    for (const auto& curve : curves) {
      if (pick_ids.count(curve.estimator_id)) {
        ev.picks[curve.estimator_id].push_back(
            single_estimator_pick(curve, grid.r_min(), grid.r_max(), signal.sample_rate_hz));
      }
      if (std::find(fused_ids.begin(), fused_ids.end(), curve.estimator_id) != fused_ids.end()) {
        per_estimator.push_back(curve_to_grid_loglik(curve, grid, cfg.c2g, signal.sample_rate_hz));
      }
    }
    ev.fused.push_back(fuse_loglik(per_estimator, cfg.fusion));
    ev.frame_index.push_back(frame.index);
    ev.time_s.push_back(frame.time_s);
  }
  return ev;
}

Analysis analyze(const Signal& signal, const RunConfig& cfg, const PosteriorSink& sink) {
  cfg.validate();
  Analysis out;
  out.evidence = collect_evidence(signal, cfg);
  const FrameEvidence& ev = out.evidence;
  out.arc = track(ev.fused, cfg.grid(), cfg.tracker, ev.time_s, sink);

  for (const auto& b : cfg.baselines) {
    if (is_single_estimator(b)) {
      BaselineTrajectory traj{b, {}};
      const auto& picks = ev.picks.at(b);
      for (std::size_t t = 0; t < picks.size(); ++t) {
        traj.points.push_back({ev.frame_index[t], ev.time_s[t], picks[t]});
      }
      out.baselines[b] = std::move(traj);
    } else if (b == kFusionMethod) {
      out.baselines[b] = c2g_fusion_framewise(ev.fused, ev.time_s);
    } else if (b == kViterbiMethod) {
      out.baselines[b] = viterbi_stft(signal, cfg.framing, cfg.grid(), cfg.viterbi);
    }
  }
  return out;
}

std::vector<double> mmse_series(const std::vector<TrajectoryPoint>& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& p : traj) out.push_back(p.mmse_rpm);
  return out;
}

std::map<std::string, MethodMetrics> evaluate(const Analysis& analysis,
                                              const std::vector<double>* reference) {
  std::map<std::string, MethodMetrics> out;
  const auto score = [&](const std::string& name, const std::vector<double>& est) {
    MethodMetrics mm;
    mm.stability = stability_metrics(est);
    if (reference) mm.full = compute_metrics(est, *reference);
    out[name] = mm;
  };
  score(kArcMethod, mmse_series(analysis.arc));
  for (const auto& [name, traj] : analysis.baselines) score(name, traj.rpm());
  return out;
}

namespace {

Json metrics_to_json(const std::map<std::string, MethodMetrics>& metrics, std::size_t frames) {
  Json j;
  j["frames"] = frames;
  Json methods = Json::object();
  for (const auto& [name, mm] : metrics) {
    Json m;
    if (mm.full) {
      m["rmse"] = mm.full->rmse;
      m["p95"] = mm.full->p95;
    }
    m["jitter"] = mm.stability.jitter;
    m["max_jump"] = mm.stability.max_jump;
    methods[name] = m;
  }
  j["methods"] = methods;
  return j;
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryPoint>& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "frame_index,time_s,map_rpm,mmse_rpm,sigma_rpm,entropy_nats\n";
  for (const auto& p : traj) {
    out << p.frame_index << ',' << fmt(p.time_s) << ',' << fmt(p.map_rpm) << ',' << fmt(p.mmse_rpm)
        << ',' << fmt(p.sigma_rpm) << ',' << fmt(p.entropy_nats) << '\n';
  }
}

void write_baseline_csv(const std::filesystem::path& path, const BaselineTrajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "frame_index,time_s,rpm\n";
  for (const auto& p : traj.points) {
    out << p.frame_index << ',' << fmt(p.time_s) << ',' << fmt(p.rpm) << '\n';
  }
}

void write_truth_csv(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "frame_index,time_s,rpm_ref\n";
  for (std::size_t t = 0; t < truth.rpm_ref.size(); ++t) {
    out << truth.frame_index[t] << ',' << fmt(truth.time_s[t]) << ',' << fmt(truth.rpm_ref[t]) << '\n';
  }
}

const char* color_for(const std::string& method) {
  if (method == kYinId) return "#2ca02c";
  if (method == kCepstrumId) return "#9467bd";
  if (method == kCombId) return "#ff7f0e";
  if (method == kFusionMethod) return "#1f77b4";
  if (method == kViterbiMethod) return "#8c564b";
  return "#7f7f7f";
}

}  // namespace

RunOutputs run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);

  Signal signal;
  std::optional<GroundTruth> truth;
  if (cfg.input_path) {
    const std::filesystem::path in(*cfg.input_path);
    signal = load_signal(in, format_from_path(in), cfg.input_sample_rate_hz);
  } else {
    ScenarioSpec spec = cfg.scenario;
    spec.r_min = std::max(spec.r_min, cfg.grid_min_rpm);
    spec.r_max = std::min(spec.r_max, cfg.grid_max_rpm);
    SynthResult synth = synthesize(spec, cfg.framing);
    signal = std::move(synth.signal);
    truth = std::move(synth.truth);
  }

  RunOutputs outputs;
  std::ofstream posterior_out;
  PosteriorSink sink;
  if (cfg.dump_posteriors) {
    outputs.posterior_csv = dir / "posteriors.csv";
    posterior_out.open(*outputs.posterior_csv);
    if (!posterior_out) throw std::runtime_error("cannot write posterior dump");
    const auto values = cfg.grid().values();
    for (std::size_t g = 0; g < values.size(); ++g) posterior_out << (g ? "," : "") << fmt(values[g]);
    posterior_out << '\n';
    sink = [&posterior_out](const PosteriorState& post) {
      for (std::size_t g = 0; g < post.mass.size(); ++g) {
        posterior_out << (g ? "," : "") << fmt(post.mass[g]);
      }
      posterior_out << '\n';
    };
  }

  const Analysis analysis = analyze(signal, cfg, sink);
  outputs.frames = analysis.arc.size();

  outputs.trajectory_csv = dir / "trajectory.csv";
  write_trajectory_csv(outputs.trajectory_csv, analysis.arc);
  for (const auto& [name, traj] : analysis.baselines) {
    auto path = dir / ("baseline_" + name + ".csv");
    write_baseline_csv(path, traj);
    outputs.baseline_csvs.push_back(path);
  }
  if (truth) write_truth_csv(dir / "ground_truth.csv", *truth);

  outputs.metrics = evaluate(analysis, truth ? &truth->rpm_ref : nullptr);
  outputs.metrics_json = dir / "metrics.json";
  write_text_file(outputs.metrics_json, metrics_to_json(outputs.metrics, outputs.frames).dump(2) + "\n");
  save_run_config(cfg, dir / "config.json");

  if (cfg.plot) {
    std::vector<PlotSeries> series;
    for (const auto& [name, traj] : analysis.baselines) {
      series.push_back({name, traj.rpm(), color_for(name), true});
    }
    if (truth) series.push_back({"reference", truth->rpm_ref, "#000000", false});
    series.push_back({"ARC (MMSE)", mmse_series(analysis.arc), "#d62728", false});
    PlotBand band;
    for (const auto& p : analysis.arc) {
      band.lower.push_back(p.mmse_rpm - p.sigma_rpm);
      band.upper.push_back(p.mmse_rpm + p.sigma_rpm);
    }
    outputs.plot_svg = dir / "trajectory.svg";
    write_text_file(*outputs.plot_svg,
                    render_line_plot("RPM trajectory", analysis.evidence.time_s, series, &band));
  }
  return outputs;
}

const BenchmarkCell& BenchmarkTable::at(const std::string& scenario, const std::string& method) const {
  for (const auto& c : cells) {
    if (c.scenario == scenario && c.method == method) return c;
  }
  throw std::out_of_range("benchmark: no cell for " + scenario + "/" + method);
}

std::string BenchmarkTable::to_csv() const {
  std::ostringstream out;
  out << "method";
  for (const auto& s : scenarios) out << ',' << s << "_rmse," << s << "_p95";
  out << '\n';
  for (const auto& m : methods) {
    out << m;
    for (const auto& s : scenarios) {
      const auto& c = at(s, m);
      out << ',' << fmt(c.mean_rmse) << ',' << fmt(c.mean_p95);
    }
    out << '\n';
  }
  return out.str();
}

std::string BenchmarkTable::to_text() const {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s", "Method");
  out << buf;
  for (const auto& s : scenarios) {
    std::snprintf(buf, sizeof buf, " | %-17s", s.c_str());
    out << buf;
  }
  out << '\n';
  std::snprintf(buf, sizeof buf, "%-10s", "");
  out << buf;
  for (std::size_t i = 0; i < scenarios.size(); ++i) out << " |   RMSE      P95  ";
  out << '\n';
  for (const auto& m : methods) {
    std::snprintf(buf, sizeof buf, "%-10s", m.c_str());
    out << buf;
    for (const auto& s : scenarios) {
      const auto& c = at(s, m);
      std::snprintf(buf, sizeof buf, " | %8.1f %8.1f", c.mean_rmse, c.mean_p95);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::map<std::string, Metrics> score_scenario(const ScenarioSpec& spec, const RunConfig& cfg) {
  RunConfig run = cfg;
  run.baselines.clear();
  for (const auto& m : cfg.benchmark_methods) {
    if (m != kArcMethod) run.baselines.push_back(m);
  }
  const SynthResult synth = synthesize(spec, cfg.framing);
  const Analysis analysis = analyze(synth.signal, run);

  std::map<std::string, Metrics> out;
  for (const auto& m : cfg.benchmark_methods) {
    const std::vector<double> est =
        m == kArcMethod ? mmse_series(analysis.arc) : analysis.baselines.at(m).rpm();
    out[m] = compute_metrics(est, synth.truth.rpm_ref);
  }
  return out;
}

namespace {

// Runs job(i) for i in [0, count) across worker threads.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ScenarioSpec spec_for(const RunConfig& cfg, Scenario scenario, std::uint64_t seed) {
  ScenarioSpec spec = cfg.scenario;
  spec.scenario = scenario;
  spec.seed = seed;
  spec.r_min = std::max(spec.r_min, cfg.grid_min_rpm);
  spec.r_max = std::min(spec.r_max, cfg.grid_max_rpm);
  return spec;
}

}  // namespace

BenchmarkTable run_benchmark(const RunConfig& cfg, bool write_files) {
  cfg.validate();
  if (cfg.seeds.empty()) throw std::invalid_argument("benchmark.seeds: at least one seed required");

  const std::size_t n_scen = cfg.benchmark_scenarios.size();
  const std::size_t n_seed = cfg.seeds.size();
  std::vector<std::map<std::string, Metrics>> results(n_scen * n_seed);
  parallel_for(results.size(), cfg.threads, [&](std::size_t i) {
    const Scenario sc = parse_scenario(cfg.benchmark_scenarios[i / n_seed]);
    results[i] = score_scenario(spec_for(cfg, sc, cfg.seeds[i % n_seed]), cfg);
  });

  BenchmarkTable table;
  table.scenarios = cfg.benchmark_scenarios;
  table.methods = cfg.benchmark_methods;
  for (std::size_t s = 0; s < n_scen; ++s) {
    for (const auto& m : cfg.benchmark_methods) {
      BenchmarkCell cell{cfg.benchmark_scenarios[s], m, 0.0, 0.0, n_seed};
      for (std::size_t k = 0; k < n_seed; ++k) {
        const Metrics& r = results[s * n_seed + k].at(m);
        cell.mean_rmse += r.rmse;
        cell.mean_p95 += r.p95;
      }
      cell.mean_rmse /= static_cast<double>(n_seed);
      cell.mean_p95 /= static_cast<double>(n_seed);
      table.cells.push_back(cell);
    }
  }

  if (write_files) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "benchmark.csv", table.to_csv());
    write_text_file(dir / "benchmark.txt", table.to_text());
  }
  return table;
}

std::vector<AblationResult> run_ablation(const RunConfig& cfg, bool write_files) {
  cfg.validate();
  if (cfg.seeds.empty()) throw std::invalid_argument("benchmark.seeds: at least one seed required");
  RunConfig run = cfg;
  run.baselines = {kFusionMethod};

  std::vector<AblationResult> results(cfg.seeds.size());
  parallel_for(results.size(), cfg.threads, [&](std::size_t i) {
    const ScenarioSpec spec = spec_for(cfg, cfg.scenario.scenario, cfg.seeds[i]);
    const SynthResult synth = synthesize(spec, cfg.framing);
    const Analysis analysis = analyze(synth.signal, run);
    results[i].framewise =
        compute_metrics(analysis.baselines.at(kFusionMethod).rpm(), synth.truth.rpm_ref);
    results[i].arc = compute_metrics(mmse_series(analysis.arc), synth.truth.rpm_ref);
  });

  if (write_files) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    csv << "seed,method,rmse,p95,jitter,max_jump\n";
    const auto row = [&](std::uint64_t seed, const char* method, const Metrics& m) {
      csv << seed << ',' << method << ',' << fmt(m.rmse) << ',' << fmt(m.p95) << ','
          << fmt(m.jitter) << ',' << fmt(m.max_jump) << '\n';
    };
    for (std::size_t i = 0; i < results.size(); ++i) {
      row(cfg.seeds[i], "fusion", results[i].framewise);
      row(cfg.seeds[i], "arc", results[i].arc);
    }
    write_text_file(dir / "ablation.csv", csv.str());
  }
  return results;
}

}  // namespace arc
