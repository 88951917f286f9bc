// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "arc/pipeline.hpp"
#include "arc/stats.hpp"
#include "testing.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace arc;
using arc::testing::discrete_gaussian;
using arc::testing::Gen;
using arc::testing::loglik_from_mass;
using arc::testing::mean_of;
using arc::testing::stddev_of;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
}

std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

std::vector<std::uint64_t> seed_list(std::uint64_t n) {
  std::vector<std::uint64_t> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("arc_acceptance_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome invariant_suite() {
  const auto start = Clock::now();
  const std::string cmd = std::string("\"") + ARC_UNIT_TESTS_PATH + "\" --minimal > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double t = seconds_since(start);
  return {status == 0 && t < 120.0,
          format("unit/property binary exit %d, %.1f s (limit 120 s)", status, t)};
}

Outcome oracle_equivalence() {
  Gen gen(1001);
  double worst_c2g = 0.0, worst_predict = 0.0;
  const int instances = 200;
  for (int trial = 0; trial < instances; ++trial) {
    const auto g_count = static_cast<std::size_t>(gen.integer(2, 200));
    const double step = gen.uniform(0.2, 5.0);
    const double r_min = gen.uniform(200.0, 2000.0);
    const RpmGrid g(r_min, r_min + step * static_cast<double>(g_count - 1), g_count);

    C2gConfig cfg;
    cfg.kernel_bandwidth_rpm = gen.uniform(0.3, 3.0) * step;
    cfg.beta = gen.uniform(0.5, 2.0);
    const auto m_count = static_cast<std::size_t>(gen.integer(2, 50));
    std::vector<double> rpm(m_count);
    for (double& r : rpm) r = gen.uniform(g.r_min() - 5.0 * step, g.r_max() + 5.0 * step);
    rpm[0] = gen.uniform(g.r_min(), g.r_max());
    std::sort(rpm.begin(), rpm.end());
    rpm.erase(std::unique(rpm.begin(), rpm.end()), rpm.end());
    if (rpm.size() < 2) rpm.push_back(rpm.back() + step);
    EvidenceCurve curve{rpm, gen.normals(rpm.size(), 3.0), AxisType::Rpm,
                        gen.coin() ? Polarity::Score : Polarity::Cost, "x"};
    const auto got = curve_to_grid_loglik(curve, g, cfg, 12800.0);
    const auto expect = arc::testing::naive_c2g_mass(curve, g, cfg, 12800.0);
    for (std::size_t i = 0; i < g_count; ++i) {
      if (expect[i] < 1e-290) continue;
      worst_c2g = std::max(worst_c2g, std::abs(std::exp(got.log_values[i]) - expect[i]) / expect[i]);
    }

    const PosteriorState st{g, gen.simplex(g_count), 0};
    std::vector<double> sigmas(g_count);
    for (double& s : sigmas) s = gen.uniform(40.0, 150.0) * step / 5.0;
    const auto pred = predict(st, sigmas);
    const auto naive = arc::testing::naive_predict(g, st.mass, sigmas);
    for (std::size_t i = 0; i < g_count; ++i) worst_predict = std::max(worst_predict, std::abs(pred[i] - naive[i]));
  }
  return {worst_c2g <= 1e-9 && worst_predict <= 1e-9,
          format("%d instances each; C2G worst relative error %.2e, predict worst abs error %.2e (limit 1e-9)",
                 instances, worst_c2g, worst_predict)};
}

Outcome gaussian_product() {
  const RpmGrid grid(300.0, 4000.0, 3701);
  double worst_mean = 0.0, worst_sd = 0.0;
  int cases = 0;
  for (double center : {900.0, 1500.0, 2750.5}) {
    for (double s1 : {40.0, 75.0, 150.0}) {
      for (double s2 : {20.0, 60.0, 200.0}) {
        const auto post = update(discrete_gaussian(grid, center, s1),
                                 loglik_from_mass(grid, discrete_gaussian(grid, center, s2)));
        const double sd = s1 * s2 / std::hypot(s1, s2);
        worst_mean = std::max(worst_mean, std::abs(mean_of(grid, post.mass) - center));
        worst_sd = std::max(worst_sd, std::abs(stddev_of(grid, post.mass) - sd));
        ++cases;
      }
    }
  }
  const double tol = 2.0 * grid.step();
  return {worst_mean <= tol && worst_sd <= tol,
          format("%d cases; worst |mean err| %.3g RPM, worst |sd err| %.3g RPM (limit %.0f)", cases,
                 worst_mean, worst_sd, tol)};
}

Outcome curvature_calibration() {
  const RpmGrid grid(300.0, 4000.0, 3701);
  const TrackerConfig cfg;
  const std::size_t mode = grid.nearest_index(2000.0);
  std::string detail;
  bool ok = true;
  for (double s : {50.0, 80.0, 120.0}) {
    const double sigma = curvature_sigma({grid, discrete_gaussian(grid, 2000.0, s), 0}, cfg)[mode];
    ok = ok && std::abs(sigma - s) <= 0.1 * s;
    detail += format("s=%g -> %.2f; ", s, sigma);
  }
  const double sharp = curvature_sigma({grid, discrete_gaussian(grid, 2000.0, 1.0), 0}, cfg)[mode];
  const auto flat = curvature_sigma(init_posterior(grid), cfg);
  const bool flat_ok = std::all_of(flat.begin(), flat.end(), [](double v) { return v == 150.0; });
  ok = ok && sharp == 40.0 && flat_ok;
  detail += format("s=1 -> %.2f; uniform -> %s", sharp, flat_ok ? "150 everywhere" : "not 150");
  return {ok, detail};
}

Outcome clean_tracking() {
  RunConfig cfg;
  const auto start = Clock::now();
  const auto synth = synthesize(cfg.scenario, cfg.framing);
  const Analysis a = analyze(synth.signal, cfg);
  const double t = seconds_since(start);
  double worst = 0.0;
  for (std::size_t i = 5; i < a.arc.size(); ++i) {
    worst = std::max(worst, std::abs(a.arc[i].mmse_rpm - synth.truth.rpm_ref[i]));
  }
  return {worst <= 5.0 && t < 60.0,
          format("%zu frames, max |MMSE - truth| after frame 5 = %.3f RPM (limit 5), %.1f s (limit 60 s)",
                 a.arc.size(), worst, t)};
}

Outcome s3_ordering() {
  RunConfig cfg;
  cfg.benchmark_scenarios = {"S3"};
  cfg.benchmark_methods = {"yin", "comb", "arc"};
  cfg.seeds = seed_list(10);
  cfg.scenario.interference_level = 0.9;
  const auto table = run_benchmark(cfg, false);
  const double arc_p95 = table.at("S3", "arc").mean_p95;
  const double comb_p95 = table.at("S3", "comb").mean_p95;
  const double yin_p95 = table.at("S3", "yin").mean_p95;
  return {arc_p95 <= comb_p95 && arc_p95 <= 0.5 * yin_p95,
          format("S3, 10 seeds, interference 0.9: mean P95 ARC %.2f, Comb %.2f, YIN %.2f "
                 "(need ARC <= Comb and ARC <= 0.5 x YIN)",
                 arc_p95, comb_p95, yin_p95)};
}

Outcome step_ablation() {
  RunConfig cfg;
  cfg.scenario.scenario = Scenario::S5;
  cfg.scenario.jump_rpm = 600.0;
  cfg.seeds = seed_list(10);
  const auto results = run_ablation(cfg, false);
  std::vector<double> fw_p95, arc_p95, fw_rmse, arc_rmse;
  for (const auto& r : results) {
    fw_p95.push_back(r.framewise.p95);
    arc_p95.push_back(r.arc.p95);
    fw_rmse.push_back(r.framewise.rmse);
    arc_rmse.push_back(r.arc.rmse);
  }
  const double a = mean(arc_p95), f = mean(fw_p95);
  return {a <= 0.7 * f, format("S5, 10 seeds, +600 RPM step: mean P95 ARC %.2f vs framewise %.2f "
                               "(ratio %.3f, limit 0.7); mean RMSE ARC %.2f vs framewise %.2f",
                               a, f, a / f, mean(arc_rmse), mean(fw_rmse))};
}

Outcome dropout_stability() {
  RunConfig cfg;
  const auto synth = synthesize(cfg.scenario, cfg.framing);
  FrameEvidence ev = collect_evidence(synth.signal, cfg);
  const RpmGrid grid = cfg.grid();

  // Corrupted evidence: the same estimator chain on frames of pure noise.
  Gen gen(2024);
  const std::size_t burst = 200;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto noise = gen.normals(cfg.framing.frame_len, 0.5);
    const auto curves = compute_curves(noise, cfg.scenario.sample_rate_hz, grid.r_min(), grid.r_max(), cfg.estimators);
    std::vector<GridLogLikelihood> liks;
    for (const auto& c : curves) liks.push_back(curve_to_grid_loglik(c, grid, cfg.c2g, cfg.scenario.sample_rate_hz));
    ev.fused[burst + k] = fuse_loglik(liks, cfg.fusion);
  }
  const auto arc_traj = track(ev.fused, grid, cfg.tracker, ev.time_s);
  const auto framewise = c2g_fusion_framewise(ev.fused, ev.time_s);
  const auto a = stability_metrics(mmse_series(arc_traj));
  const auto f = stability_metrics(framewise.rpm());
  return {a.jitter <= 0.3 * f.jitter && a.max_jump <= 0.3 * f.max_jump,
          format("S0 with noise burst at frames %zu-%zu: jitter ARC %.3f vs framewise %.3f (ratio %.3f); "
                 "max_jump ARC %.2f vs framewise %.2f (ratio %.3f); limit 0.3",
                 burst + 1, burst + 3, a.jitter, f.jitter, a.jitter / f.jitter, a.max_jump, f.max_jump,
                 a.max_jump / f.max_jump)};
}

Outcome viterbi_optimality() {
  Gen gen(3003);
  const int instances = 500;
  double worst = 0.0;
  for (int trial = 0; trial < instances; ++trial) {
    std::vector<std::vector<SpectralCandidate>> c(static_cast<std::size_t>(gen.integer(1, 6)));
    for (auto& frame : c) {
      frame.resize(static_cast<std::size_t>(gen.integer(1, 8)));
      for (auto& cand : frame) cand = {gen.uniform(300.0, 4000.0), gen.normal(0.0, 3.0)};
    }
    const double penalty = gen.uniform(0.0, 0.1);
    const auto path = viterbi_decode(c, penalty);
    std::vector<std::size_t> choice(c.size(), 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      best = std::max(best, path_score(c, choice, penalty));
      std::size_t t = 0;
      while (t < c.size() && ++choice[t] == c[t].size()) choice[t++] = 0;
      if (t == c.size()) break;
    }
    worst = std::max(worst, std::abs(path.score - best));
    worst = std::max(worst, std::abs(path_score(c, path.choice, penalty) - best));
  }
  return {worst <= 1e-9, format("%d instances (<= 6 frames x <= 8 candidates), worst score gap %.2e",
                                instances, worst)};
}

Outcome benchmark_harness() {
  RunConfig cfg;
  cfg.seeds = seed_list(20);
  cfg.out_dir = scratch("bench_a").string();
  auto start = Clock::now();
  const auto first = run_benchmark(cfg);
  const double t1 = seconds_since(start);
  const std::string csv_a = slurp(std::filesystem::path(cfg.out_dir) / "benchmark.csv");
  cfg.out_dir = scratch("bench_b").string();
  start = Clock::now();
  run_benchmark(cfg);
  const double t2 = seconds_since(start);
  const std::string csv_b = slurp(std::filesystem::path(cfg.out_dir) / "benchmark.csv");
  const bool shape = first.scenarios.size() == 4 && first.methods.size() == 4 && first.cells.size() == 16;
  std::printf("%s", first.to_text().c_str());
  return {shape && csv_a == csv_b && !csv_a.empty() && t1 < 1800.0,
          format("S1-S4 x 20 seeds x 4 methods: %s, CSV %s across two runs, %.0f s and %.0f s (limit 1800 s)",
                 shape ? "4x4 table" : "wrong shape", csv_a == csv_b ? "byte-identical" : "DIFFERS", t1, t2)};
}

}  // namespace

int main() {
  report(1, "invariant/property suite", invariant_suite);
  report(2, "oracle equivalence (C2G, predict)", oracle_equivalence);
  report(3, "Gaussian product update", gaussian_product);
  report(4, "curvature calibration", curvature_calibration);
  report(5, "clean S0 tracking", clean_tracking);
  report(6, "S3 ordering vs Comb and YIN", s3_ordering);
  report(7, "S5 step ablation", step_ablation);
  report(8, "dropout burst stability", dropout_stability);
  report(9, "Viterbi DP optimality", viterbi_optimality);
  report(10, "benchmark harness", benchmark_harness);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
