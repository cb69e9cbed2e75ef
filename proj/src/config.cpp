#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fcmcrlb/error.hpp"
#include "fcmcrlb/experiments.hpp"

namespace fcmcrlb {

namespace {

using json = nlohmann::ordered_json;

constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::EigFit, "eig-fit"},
    {Experiment::MseVsNt, "mse-vs-nt"},
    {Experiment::BoundTightness, "bound-tightness"},
    {Experiment::Histograms, "histograms"},
    {Experiment::SirScan, "sir-scan"},
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment",  "profile",     "profile_file", "n_tones",      "cp_len",
      "sample_period_s", "f_d_hz",  "snr_db",       "n_t_list",     "n_trials",
      "n_pilot_seqs", "master_seed", "mode",        "out_path",     "n_tones_list",
      "fdts_list",   "snr_db_list", "f_d_hz_list",  "workers",
  };
  return keys;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("config key '") + key + "': " + e.what());
  }
}

bool is_monte_carlo(Experiment e) {
  return e == Experiment::MseVsNt || e == Experiment::BoundTightness ||
         e == Experiment::Histograms;
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [value, name] : kExperimentNames)
    if (value == e) return name;
  return "unknown";
}

std::string_view to_string(LinkMode m) { return m == LinkMode::Model ? "model" : "waveform"; }

Experiment parse_experiment(std::string_view name) {
  for (const auto& [value, n] : kExperimentNames)
    if (n == name) return value;
  fail(ErrorCode::Config, "unknown experiment '" + std::string(name) + "'");
}

LinkMode parse_mode(std::string_view name) {
  if (name == "model") return LinkMode::Model;
  if (name == "waveform") return LinkMode::Waveform;
  fail(ErrorCode::Config, "unknown mode '" + std::string(name) + "' (model|waveform)");
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::EigFit:
      c.n_tones_list = {128, 256, 512, 1024};
      c.fdts_list = linspace(0.01, 0.35, 20);
      break;
    case Experiment::MseVsNt:
      c.n_tones = 32;
      c.n_t_list = {25, 50, 100, 200, 400, 800};
      c.n_trials = 500;
      break;
    case Experiment::BoundTightness:
      c.n_tones = 32;
      c.n_t_list = {25, 50, 100, 200, 400, 800};
      c.n_trials = 200;
      c.n_pilot_seqs = 100;
      break;
    case Experiment::Histograms:
      c.n_tones = 32;
      c.n_t_list = {200};
      c.n_trials = 10000;
      c.snr_db_list = {10.0, 15.0, 20.0};
      c.f_d_hz_list = {100.0, 200.0, 300.0};
      break;
    case Experiment::SirScan:
      c.fdts_list = {0.0, 0.02, 0.05, 0.1};
      c.n_trials = 1000;
      break;
  }
  return c;
}

void ExperimentConfig::apply_paper_scale() {
  if (is_monte_carlo(experiment)) {
    n_tones = 128;
    cp_len = 16;
  }
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorCode::Config, what); };
  check(n_tones >= 2, "n_tones must be >= 2");
  check(cp_len >= 0, "cp_len must be >= 0");
  check(sample_period_s > 0.0 && std::isfinite(sample_period_s), "sample_period_s must be > 0");
  check(f_d_hz >= 0.0 && std::isfinite(f_d_hz), "f_d_hz must be >= 0");
  check(std::isfinite(snr_db), "snr_db must be finite");
  check(n_trials >= 1, "n_trials must be >= 1");
  check(n_pilot_seqs >= 1, "n_pilot_seqs must be >= 1");
  check(workers >= 1, "workers must be >= 1");
  check(profile_file.empty() ? (profile == "EVA" || profile == "ETU") : true,
        "profile must be EVA or ETU (or set profile_file)");
  for (long nt : n_t_list) check(nt >= 1, "n_t_list entries must be >= 1");
  for (int n : n_tones_list) check(n >= 2, "n_tones_list entries must be >= 2");
  for (double f : fdts_list) check(f >= 0.0 && std::isfinite(f), "fdts_list entries must be >= 0");
  for (double s : snr_db_list) check(std::isfinite(s), "snr_db_list entries must be finite");
  for (double f : f_d_hz_list) check(f >= 0.0 && std::isfinite(f), "f_d_hz_list entries must be >= 0");

  switch (experiment) {
    case Experiment::EigFit:
      check(!n_tones_list.empty() && !fdts_list.empty(), "eig-fit needs n_tones_list and fdts_list");
      break;
    case Experiment::MseVsNt:
    case Experiment::BoundTightness:
      check(!n_t_list.empty(), "n_t_list must not be empty");
      break;
    case Experiment::Histograms:
      check(n_t_list.size() == 1, "histograms takes exactly one n_t_list entry");
      check(!snr_db_list.empty() && !f_d_hz_list.empty(),
            "histograms needs snr_db_list and f_d_hz_list");
      break;
    case Experiment::SirScan:
      check(!fdts_list.empty(), "sir-scan needs fdts_list");
      check(n_trials >= 100, "sir-scan needs n_trials >= 100");
      break;
  }
}

ExperimentConfig parse_config(std::string_view text, std::optional<Experiment> experiment) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorCode::Config, "config must be a JSON object");
  for (const auto& item : j.items()) {
    require(known_keys().count(item.key()) == 1, ErrorCode::Config,
            "unknown config key '" + item.key() + "'");
  }

  std::optional<Experiment> named;
  if (j.contains("experiment")) {
    std::string name;
    read(j, "experiment", name);
    named = parse_experiment(name);
  }
  if (named && experiment && *named != *experiment) {
    fail(ErrorCode::Config, "config names experiment '" + std::string(to_string(*named)) +
                                "' but '" + std::string(to_string(*experiment)) +
                                "' was requested");
  }
  const auto chosen = experiment ? experiment : named;
  require(chosen.has_value(), ErrorCode::Config, "no experiment given");

  ExperimentConfig c = default_config(*chosen);
  read(j, "profile", c.profile);
  read(j, "profile_file", c.profile_file);
  read(j, "n_tones", c.n_tones);
  read(j, "cp_len", c.cp_len);
  read(j, "sample_period_s", c.sample_period_s);
  read(j, "f_d_hz", c.f_d_hz);
  read(j, "snr_db", c.snr_db);
  read(j, "n_t_list", c.n_t_list);
  read(j, "n_trials", c.n_trials);
  read(j, "n_pilot_seqs", c.n_pilot_seqs);
  read(j, "master_seed", c.master_seed);
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m);
    c.mode = parse_mode(m);
  }
  read(j, "out_path", c.out_path);
  read(j, "n_tones_list", c.n_tones_list);
  read(j, "fdts_list", c.fdts_list);
  read(j, "snr_db_list", c.snr_db_list);
  read(j, "f_d_hz_list", c.f_d_hz_list);
  read(j, "workers", c.workers);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<Experiment> experiment) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), experiment);
}

namespace {

json to_json(const ExperimentConfig& c, bool with_execution_fields) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["profile"] = c.profile;
  j["profile_file"] = c.profile_file;
  j["n_tones"] = c.n_tones;
  j["cp_len"] = c.cp_len;
  j["sample_period_s"] = c.sample_period_s;
  j["f_d_hz"] = c.f_d_hz;
  j["snr_db"] = c.snr_db;
  j["n_t_list"] = c.n_t_list;
  j["n_trials"] = c.n_trials;
  j["n_pilot_seqs"] = c.n_pilot_seqs;
  j["master_seed"] = c.master_seed;
  j["mode"] = std::string(to_string(c.mode));
  j["n_tones_list"] = c.n_tones_list;
  j["fdts_list"] = c.fdts_list;
  j["snr_db_list"] = c.snr_db_list;
  j["f_d_hz_list"] = c.f_d_hz_list;
  if (with_execution_fields) {
    j["out_path"] = c.out_path;
    j["workers"] = c.workers;
  }
  return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) { return to_json(cfg, true).dump(2); }

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = to_json(cfg, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fcmcrlb
