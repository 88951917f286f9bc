#include "arc/config.hpp"
#include "arc/pipeline.hpp"
#include "arc/svg.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct Overrides {
  std::string config;
  std::string input;
  std::optional<double> sample_rate;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  bool dump_posteriors{false};
  bool plot{false};
  std::string baselines;
  std::string grid;
  std::optional<std::size_t> frame;
  std::optional<std::size_t> hop;
  std::optional<unsigned> threads;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const char* flag) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(std::string(flag) + ": cannot parse '" + text + "'");
  }
  return value;
}

// "1..20" or "1,2,5".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto a = parse_number<std::uint64_t>(text.substr(0, dots), "--seeds");
    const auto b = parse_number<std::uint64_t>(text.substr(dots + 2), "--seeds");
    if (b < a) throw std::invalid_argument("--seeds: empty range '" + text + "'");
    for (auto s = a; s <= b; ++s) seeds.push_back(s);
  } else {
    for (const auto& part : split(text, ',')) seeds.push_back(parse_number<std::uint64_t>(part, "--seeds"));
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds: no seeds in '" + text + "'");
  return seeds;
}

arc::RunConfig build_config(const Overrides& o) {
  arc::RunConfig cfg = o.config.empty() ? arc::RunConfig{} : arc::load_run_config(o.config);
  if (!o.input.empty()) cfg.input_path = o.input;
  if (o.sample_rate) cfg.input_sample_rate_hz = *o.sample_rate;
  if (!o.scenario.empty()) {
    cfg.scenario.scenario = arc::parse_scenario(o.scenario);
    cfg.input_path.reset();
  }
  if (o.seed) {
    cfg.scenario.seed = *o.seed;
    cfg.seeds = {*o.seed};
  }
  if (!o.seeds.empty()) cfg.seeds = parse_seeds(o.seeds);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.dump_posteriors) cfg.dump_posteriors = true;
  if (o.plot) cfg.plot = true;
  if (!o.baselines.empty()) cfg.baselines = o.baselines == "none" ? std::vector<std::string>{} : split(o.baselines, ',');
  if (!o.grid.empty()) {
    const auto parts = split(o.grid, ':');
    if (parts.size() != 3) throw std::invalid_argument("--grid: expected min:max:step, got '" + o.grid + "'");
    cfg.grid_min_rpm = parse_number<double>(parts[0], "--grid");
    cfg.grid_max_rpm = parse_number<double>(parts[1], "--grid");
    cfg.grid_step_rpm = parse_number<double>(parts[2], "--grid");
  }
  if (o.frame) cfg.framing.frame_len = *o.frame;
  if (o.hop) cfg.framing.hop = *o.hop;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--scenario", o.scenario, "Synthetic scenario S0..S5");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--seeds", o.seeds, "Seed range a..b or list a,b,c");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--grid", o.grid, "RPM grid min:max:step");
  app->add_option("--frame", o.frame, "Frame length in samples");
  app->add_option("--hop", o.hop, "Hop in samples");
  app->add_option("--threads", o.threads, "Worker threads (0: all cores)");
}

void print_metrics(const arc::RunOutputs& out) {
  std::printf("%zu frames -> %s\n", out.frames, out.trajectory_csv.parent_path().string().c_str());
  for (const auto& [name, mm] : out.metrics) {
    if (mm.full) {
      std::printf("  %-9s rmse %8.2f  p95 %8.2f  jitter %7.2f  max_jump %8.2f\n", name.c_str(),
                  mm.full->rmse, mm.full->p95, mm.stability.jitter, mm.stability.max_jump);
    } else {
      std::printf("  %-9s jitter %7.2f  max_jump %8.2f\n", name.c_str(), mm.stability.jitter,
                  mm.stability.max_jump);
    }
  }
}

int cmd_run(const Overrides& o) {
  print_metrics(arc::run_pipeline(build_config(o)));
  return 0;
}

int cmd_synth(const Overrides& o, const std::string& format) {
  const arc::RunConfig cfg = build_config(o);
  arc::ScenarioSpec spec = cfg.scenario;
  const auto synth = arc::synthesize(spec, cfg.framing);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const std::string stem = arc::to_string(spec.scenario) + "_seed" + std::to_string(spec.seed);
  std::filesystem::path signal_path;
  if (format == "csv") {
    signal_path = dir / (stem + ".csv");
    arc::write_csv(synth.signal, signal_path);
  } else {
    signal_path = dir / (stem + ".wav");
    arc::write_wav(synth.signal, signal_path);
  }
  std::ostringstream truth;
  truth << "frame_index,time_s,rpm_ref\n";
  truth.precision(17);
  for (std::size_t t = 0; t < synth.truth.rpm_ref.size(); ++t) {
    truth << synth.truth.frame_index[t] << ',' << synth.truth.time_s[t] << ','
          << synth.truth.rpm_ref[t] << '\n';
  }
  arc::write_text_file(dir / (stem + "_truth.csv"), truth.str());
  arc::write_text_file(dir / (stem + ".json"), arc::to_json(spec).dump(2) + "\n");
  std::printf("wrote %s (%zu samples, %zu frames)\n", signal_path.string().c_str(),
              synth.signal.samples.size(), synth.truth.rpm_ref.size());
  return 0;
}

int cmd_benchmark(const Overrides& o, const std::vector<std::string>& scenarios,
                  const std::vector<std::string>& methods) {
  arc::RunConfig cfg = build_config(o);
  if (!scenarios.empty()) cfg.benchmark_scenarios = scenarios;
  if (!methods.empty()) cfg.benchmark_methods = methods;
  const auto table = arc::run_benchmark(cfg);
  std::printf("%s", table.to_text().c_str());
  return 0;
}

int cmd_ablate(Overrides o) {
  if (o.scenario.empty() && o.config.empty()) o.scenario = "S5";
  const arc::RunConfig cfg = build_config(o);
  const auto results = arc::run_ablation(cfg);
  double fw_rmse = 0, fw_p95 = 0, arc_rmse = 0, arc_p95 = 0;
  for (const auto& r : results) {
    fw_rmse += r.framewise.rmse;
    fw_p95 += r.framewise.p95;
    arc_rmse += r.arc.rmse;
    arc_p95 += r.arc.p95;
  }
  const double n = static_cast<double>(results.size());
  std::printf("%s over %zu seed(s)\n", arc::to_string(cfg.scenario.scenario).c_str(), results.size());
  std::printf("  framewise  rmse %8.2f  p95 %8.2f\n", fw_rmse / n, fw_p95 / n);
  std::printf("  arc        rmse %8.2f  p95 %8.2f\n", arc_rmse / n, arc_p95 / n);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tacho-less RPM estimation by curve alignment and curvature-adaptive tracking"};
  app.require_subcommand(1);

  Overrides o;
  std::string synth_format = "wav";
  std::vector<std::string> bench_scenarios;
  std::vector<std::string> bench_methods;

  auto* run = app.add_subcommand("run", "Analyze a file or a synthetic scenario");
  add_common(run, o);
  run->add_option("--input", o.input, "Input signal (.wav or .csv)")->check(CLI::ExistingFile);
  run->add_option("--sample-rate", o.sample_rate, "Sample rate for CSV input (Hz)");
  run->add_flag("--dump-posteriors", o.dump_posteriors, "Write posteriors.csv");
  run->add_flag("--plot", o.plot, "Write trajectory.svg");
  run->add_option("--baselines", o.baselines, "Comma list of yin,cepstrum,comb,fusion,viterbi or none");

  auto* synth = app.add_subcommand("synth", "Write a synthetic scenario and its ground truth");
  add_common(synth, o);
  synth->add_option("--format", synth_format, "wav or csv")->check(CLI::IsMember({"wav", "csv"}));

  auto* bench = app.add_subcommand("benchmark", "Scenario x seed x method table");
  add_common(bench, o);
  bench->add_option("--scenarios", bench_scenarios, "Scenarios (default S1 S2 S3 S4)")->delimiter(',');
  bench->add_option("--methods", bench_methods, "Methods (default yin cepstrum comb arc)")->delimiter(',');

  auto* ablate = app.add_subcommand("ablate", "Framewise fusion vs tracking (default scenario S5)");
  add_common(ablate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(o);
    if (*synth) return cmd_synth(o, synth_format);
    if (*bench) return cmd_benchmark(o, bench_scenarios, bench_methods);
    if (*ablate) return cmd_ablate(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
