#include "arc/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace arc {

namespace {

// Rejects keys outside `allowed`, naming the offending field.
void check_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw std::invalid_argument(where + "." + item.key() + ": unknown field");
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(where + "." + key + ": " + e.what());
  }
}

}  // namespace

Json to_json(const ScenarioSpec& s) {
  Json j;
  j["scenario"] = to_string(s.scenario);
  j["duration_s"] = s.duration_s;
  j["sample_rate_hz"] = s.sample_rate_hz;
  j["base_rpm"] = s.base_rpm;
  j["n_harmonics"] = s.n_harmonics;
  j["harmonic_amps"] = s.harmonic_amps;
  j["seed"] = s.seed;
  j["r_min"] = s.r_min;
  j["r_max"] = s.r_max;
  j["wobble_fraction"] = s.wobble_fraction;
  j["wobble_period_s"] = s.wobble_period_s;
  j["sub_ratio"] = s.sub_ratio;
  j["snr_db"] = s.snr_db;
  j["interference_level"] = s.interference_level;
  j["alpha"] = s.alpha;
  j["detuning"] = s.detuning;
  j["jump_rpm"] = s.jump_rpm;
  j["jump_time_s"] = s.jump_time_s;
  return j;
}

ScenarioSpec scenario_from_json(const Json& j, ScenarioSpec s) {
  const std::string where = "scenario";
  check_keys(j, where,
             {"scenario", "duration_s", "sample_rate_hz", "base_rpm", "n_harmonics",
              "harmonic_amps", "seed", "r_min", "r_max", "wobble_fraction", "wobble_period_s",
              "sub_ratio", "snr_db", "interference_level", "alpha", "detuning", "jump_rpm",
              "jump_time_s"});
  if (const auto it = j.find("scenario"); it != j.end()) {
    s.scenario = parse_scenario(it->get<std::string>());
  }
  read(j, "duration_s", s.duration_s, where);
  read(j, "sample_rate_hz", s.sample_rate_hz, where);
  read(j, "base_rpm", s.base_rpm, where);
  read(j, "n_harmonics", s.n_harmonics, where);
  read(j, "harmonic_amps", s.harmonic_amps, where);
  read(j, "seed", s.seed, where);
  read(j, "r_min", s.r_min, where);
  read(j, "r_max", s.r_max, where);
  read(j, "wobble_fraction", s.wobble_fraction, where);
  read(j, "wobble_period_s", s.wobble_period_s, where);
  read(j, "sub_ratio", s.sub_ratio, where);
  read(j, "snr_db", s.snr_db, where);
  read(j, "interference_level", s.interference_level, where);
  read(j, "alpha", s.alpha, where);
  read(j, "detuning", s.detuning, where);
  read(j, "jump_rpm", s.jump_rpm, where);
  read(j, "jump_time_s", s.jump_time_s, where);
  return s;
}

Json to_json(const RunConfig& c) {
  Json j;
  Json source;
  source["input"] = c.input_path ? Json(*c.input_path) : Json(nullptr);
  source["sample_rate_hz"] = c.input_sample_rate_hz ? Json(*c.input_sample_rate_hz) : Json(nullptr);
  j["source"] = source;
  j["scenario"] = to_json(c.scenario);
  j["framing"] = {{"frame_len", c.framing.frame_len}, {"hop", c.framing.hop}};
  j["grid"] = {{"min_rpm", c.grid_min_rpm}, {"max_rpm", c.grid_max_rpm}, {"step_rpm", c.grid_step_rpm}};
  j["estimators"] = {{"enabled", c.estimators.enabled()},
                     {"comb_candidates", c.estimators.comb.n_candidates},
                     {"n_harmonics", c.estimators.comb.n_harmonics},
                     {"comb_zero_pad", c.estimators.comb.zero_pad_factor},
                     {"cepstrum_eps_log", c.estimators.cepstrum_eps_log}};
  j["c2g"] = {{"beta", c.c2g.beta},
              {"kernel_bandwidth_rpm", c.c2g.kernel_bandwidth_rpm},
              {"eps_norm", c.c2g.eps_norm},
              {"kernel_truncation_sigmas", c.c2g.kernel_truncation_sigmas}};
  Json weights = Json::object();
  for (const auto& [id, w] : c.fusion.weights) weights[id] = w;
  j["fusion_weights"] = weights;
  j["tracker"] = {{"sigma_min_rpm", c.tracker.sigma_min_rpm},
                  {"sigma_max_rpm", c.tracker.sigma_max_rpm},
                  {"eps_c", c.tracker.eps_c},
                  {"eps_log", c.tracker.eps_log},
                  {"presmooth_width", c.tracker.presmooth_width},
                  {"transition_truncation_sigmas", c.tracker.transition_truncation_sigmas}};
  j["viterbi"] = {{"transition_penalty_per_rpm", c.viterbi.transition_penalty_per_rpm},
                  {"n_candidates_per_frame", c.viterbi.n_candidates_per_frame},
                  {"zero_pad_factor", c.viterbi.zero_pad_factor}};
  j["output"] = {{"out_dir", c.out_dir},
                 {"dump_posteriors", c.dump_posteriors},
                 {"plot", c.plot},
                 {"baselines", c.baselines}};
  j["benchmark"] = {{"scenarios", c.benchmark_scenarios},
                    {"seeds", c.seeds},
                    {"methods", c.benchmark_methods},
                    {"threads", c.threads}};
  return j;
}

RunConfig run_config_from_json(const Json& j, RunConfig c) {
  check_keys(j, "config",
             {"source", "scenario", "framing", "grid", "estimators", "c2g", "fusion_weights",
              "tracker", "viterbi", "output", "benchmark"});

  if (const auto it = j.find("source"); it != j.end()) {
    check_keys(*it, "source", {"input", "sample_rate_hz"});
    if (const auto in = it->find("input"); in != it->end()) {
      c.input_path = in->is_null() ? std::nullopt : std::optional(in->get<std::string>());
    }
    if (const auto sr = it->find("sample_rate_hz"); sr != it->end()) {
      c.input_sample_rate_hz = sr->is_null() ? std::nullopt : std::optional(sr->get<double>());
    }
  }
  if (const auto it = j.find("scenario"); it != j.end()) {
    c.scenario = scenario_from_json(*it, c.scenario);
  }
  if (const auto it = j.find("framing"); it != j.end()) {
    check_keys(*it, "framing", {"frame_len", "hop"});
    read(*it, "frame_len", c.framing.frame_len, "framing");
    read(*it, "hop", c.framing.hop, "framing");
  }
  if (const auto it = j.find("grid"); it != j.end()) {
    check_keys(*it, "grid", {"min_rpm", "max_rpm", "step_rpm"});
    read(*it, "min_rpm", c.grid_min_rpm, "grid");
    read(*it, "max_rpm", c.grid_max_rpm, "grid");
    read(*it, "step_rpm", c.grid_step_rpm, "grid");
  }
  if (const auto it = j.find("estimators"); it != j.end()) {
    check_keys(*it, "estimators",
               {"enabled", "comb_candidates", "n_harmonics", "comb_zero_pad", "cepstrum_eps_log"});
    if (const auto en = it->find("enabled"); en != it->end()) {
      try {
        c.estimators.set_enabled(en->get<std::vector<std::string>>());
      } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        if (msg.rfind("estimators: ", 0) == 0) msg.erase(0, 12);
        throw std::invalid_argument("estimators.enabled: " + msg);
      }
    }
    read(*it, "comb_candidates", c.estimators.comb.n_candidates, "estimators");
    read(*it, "n_harmonics", c.estimators.comb.n_harmonics, "estimators");
    read(*it, "comb_zero_pad", c.estimators.comb.zero_pad_factor, "estimators");
    read(*it, "cepstrum_eps_log", c.estimators.cepstrum_eps_log, "estimators");
  }
  if (const auto it = j.find("c2g"); it != j.end()) {
    check_keys(*it, "c2g", {"beta", "kernel_bandwidth_rpm", "eps_norm", "kernel_truncation_sigmas"});
    read(*it, "beta", c.c2g.beta, "c2g");
    read(*it, "kernel_bandwidth_rpm", c.c2g.kernel_bandwidth_rpm, "c2g");
    read(*it, "eps_norm", c.c2g.eps_norm, "c2g");
    read(*it, "kernel_truncation_sigmas", c.c2g.kernel_truncation_sigmas, "c2g");
  }
  if (const auto it = j.find("fusion_weights"); it != j.end()) {
    if (!it->is_object()) throw std::invalid_argument("fusion_weights: expected a JSON object");
    c.fusion.weights.clear();
    for (const auto& item : it->items()) {
      const std::string& id = item.key();
      if (id != kYinId && id != kCepstrumId && id != kCombId) {
        throw std::invalid_argument("fusion_weights." + id + ": unknown estimator");
      }
      c.fusion.weights[id] = item.value().get<double>();
    }
  }
  if (const auto it = j.find("tracker"); it != j.end()) {
    check_keys(*it, "tracker",
               {"sigma_min_rpm", "sigma_max_rpm", "eps_c", "eps_log", "presmooth_width",
                "transition_truncation_sigmas"});
    read(*it, "sigma_min_rpm", c.tracker.sigma_min_rpm, "tracker");
    read(*it, "sigma_max_rpm", c.tracker.sigma_max_rpm, "tracker");
    read(*it, "eps_c", c.tracker.eps_c, "tracker");
    read(*it, "eps_log", c.tracker.eps_log, "tracker");
    read(*it, "presmooth_width", c.tracker.presmooth_width, "tracker");
    read(*it, "transition_truncation_sigmas", c.tracker.transition_truncation_sigmas, "tracker");
  }
  if (const auto it = j.find("viterbi"); it != j.end()) {
    check_keys(*it, "viterbi",
               {"transition_penalty_per_rpm", "n_candidates_per_frame", "zero_pad_factor"});
    read(*it, "transition_penalty_per_rpm", c.viterbi.transition_penalty_per_rpm, "viterbi");
    read(*it, "n_candidates_per_frame", c.viterbi.n_candidates_per_frame, "viterbi");
    read(*it, "zero_pad_factor", c.viterbi.zero_pad_factor, "viterbi");
  }
  if (const auto it = j.find("output"); it != j.end()) {
    check_keys(*it, "output", {"out_dir", "dump_posteriors", "plot", "baselines"});
    read(*it, "out_dir", c.out_dir, "output");
    read(*it, "dump_posteriors", c.dump_posteriors, "output");
    read(*it, "plot", c.plot, "output");
    read(*it, "baselines", c.baselines, "output");
  }
  if (const auto it = j.find("benchmark"); it != j.end()) {
    check_keys(*it, "benchmark", {"scenarios", "seeds", "methods", "threads"});
    read(*it, "scenarios", c.benchmark_scenarios, "benchmark");
    read(*it, "seeds", c.seeds, "benchmark");
    read(*it, "methods", c.benchmark_methods, "benchmark");
    read(*it, "threads", c.threads, "benchmark");
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config '" + path.string() + "': " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace arc
