#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "fcmcrlb/error.hpp"
#include "fcmcrlb/experiments.hpp"

using namespace fcmcrlb;

namespace {

ErrorCode code_of(const std::string& text, std::optional<Experiment> e = std::nullopt) {
  try {
    parse_config(text, e);
  } catch (const Error& err) {
    return err.code();
  }
  return ErrorCode::Internal;  // sentinel: no error
}

}  // namespace

TEST_CASE("experiment and mode names") {
  for (Experiment e : {Experiment::EigFit, Experiment::MseVsNt, Experiment::BoundTightness,
                       Experiment::Histograms, Experiment::SirScan})
    CHECK(parse_experiment(to_string(e)) == e);
  CHECK(to_string(Experiment::BoundTightness) == "bound-tightness");
  CHECK(parse_mode("waveform") == LinkMode::Waveform);
  CHECK_THROWS_AS(parse_experiment("fig2"), Error);
  CHECK_THROWS_AS(parse_mode("Model"), Error);
}

TEST_CASE("defaults") {
  const ExperimentConfig eig = default_config(Experiment::EigFit);
  CHECK(eig.n_tones_list == std::vector<int>{128, 256, 512, 1024});
  REQUIRE(eig.fdts_list.size() == 20);
  CHECK(eig.fdts_list.front() == 0.01);
  CHECK(eig.fdts_list.back() == doctest::Approx(0.35).epsilon(1e-15));

  const ExperimentConfig mse = default_config(Experiment::MseVsNt);
  CHECK(mse.n_tones == 32);
  CHECK(mse.snr_db == 20.0);
  CHECK(mse.f_d_hz == 200.0);
  CHECK(mse.n_t_list == std::vector<long>{25, 50, 100, 200, 400, 800});
  CHECK(default_config(Experiment::BoundTightness).n_pilot_seqs == 100);
  CHECK(default_config(Experiment::Histograms).n_trials == 10000);
  CHECK(default_config(Experiment::Histograms).n_t_list == std::vector<long>{200});
  for (Experiment e : {Experiment::EigFit, Experiment::MseVsNt, Experiment::BoundTightness,
                       Experiment::Histograms, Experiment::SirScan})
    CHECK_NOTHROW(default_config(e).validate());
}

TEST_CASE("parse -> serialize -> parse round trip") {
  const char* text = R"({
    "experiment": "mse-vs-nt", "n_tones": 16, "cp_len": 4, "f_d_hz": 150.5,
    "snr_db": 12.25, "n_t_list": [10, 20], "n_trials": 33, "master_seed": 18446744073709551615,
    "mode": "waveform", "profile": "ETU", "workers": 3, "out_path": "x.csv"
  })";
  const ExperimentConfig a = parse_config(text);
  CHECK(a.master_seed == 18446744073709551615ull);
  CHECK(a.mode == LinkMode::Waveform);
  CHECK(a.n_t_list == std::vector<long>{10, 20});
  const ExperimentConfig b = parse_config(serialize_config(a));
  CHECK(a == b);
  CHECK(serialize_config(a) == serialize_config(b));

  for (Experiment e : {Experiment::EigFit, Experiment::MseVsNt, Experiment::BoundTightness,
                       Experiment::Histograms, Experiment::SirScan}) {
    const ExperimentConfig d = default_config(e);
    CHECK(parse_config(serialize_config(d)) == d);
  }
}

TEST_CASE("config errors") {
  CHECK(code_of(R"({"experiment": "eig-fit", "n_tone": 3})") == ErrorCode::Config);
  CHECK(code_of(R"({"experiment": "eig-fit"})", Experiment::SirScan) == ErrorCode::Config);
  CHECK(code_of(R"({"n_tones": 16})") == ErrorCode::Config);
  CHECK(code_of(R"({"n_tones": 16})", Experiment::MseVsNt) == ErrorCode::Internal);
  CHECK(code_of("[1, 2]", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of("{not json", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"n_tones": "many"})", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"n_tones": 1})", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"n_t_list": []})", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"n_t_list": [100, 200]})", Experiment::Histograms) == ErrorCode::Config);
  CHECK(code_of(R"({"profile": "TU6"})", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"mode": "fast"})", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"workers": 0})", Experiment::MseVsNt) == ErrorCode::Config);
  CHECK(code_of(R"({"n_trials": 10})", Experiment::SirScan) == ErrorCode::Config);

  try {
    load_config("/nonexistent/dir/cfg.json");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("load_config reads a file") {
  const std::string path = "test_config_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"experiment": "sir-scan", "fdts_list": [0.1], "n_trials": 100})";
  }
  const ExperimentConfig c = load_config(path, Experiment::SirScan);
  CHECK(c.fdts_list == std::vector<double>{0.1});
  std::remove(path.c_str());
}

TEST_CASE("config_hash ignores execution-only fields") {
  ExperimentConfig a = default_config(Experiment::MseVsNt);
  ExperimentConfig b = a;
  b.workers = 7;
  b.out_path = "elsewhere.csv";
  CHECK(config_hash(a) == config_hash(b));
  b.master_seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  ExperimentConfig c = a;
  c.n_trials = 501;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("paper scale") {
  ExperimentConfig m = default_config(Experiment::BoundTightness);
  m.apply_paper_scale();
  CHECK(m.n_tones == 128);
  CHECK(m.cp_len == 16);
  ExperimentConfig e = default_config(Experiment::EigFit);
  const ExperimentConfig before = e;
  e.apply_paper_scale();
  CHECK(e == before);
}
