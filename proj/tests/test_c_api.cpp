#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fcmcrlb/fcm_crlb.h"

namespace {

struct ConfigHandle {
  fcm_config* p = nullptr;
  ~ConfigHandle() { fcm_config_free(p); }
};

struct ResultHandle {
  fcm_result* p = nullptr;
  ~ResultHandle() { fcm_result_free(p); }
};

void collect(const char* message, void* user) {
  static_cast<std::vector<std::string>*>(user)->emplace_back(message);
}

}  // namespace

TEST_CASE("status strings and last error") {
  CHECK(std::string(fcm_status_string(FCM_OK)) == "ok");
  CHECK(std::string(fcm_status_string(FCM_ERR_CONFIG)) != "ok");
  CHECK(fcm_status_string(static_cast<fcm_status>(99)) != nullptr);

  ConfigHandle c;
  CHECK(fcm_config_default("no-such-experiment", &c.p) == FCM_ERR_CONFIG);
  CHECK(c.p == nullptr);
  CHECK(std::string(fcm_last_error()).find("no-such-experiment") != std::string::npos);
  CHECK(fcm_config_default("eig-fit", nullptr) == FCM_ERR_INVALID_ARGUMENT);
  CHECK(fcm_config_default(nullptr, &c.p) == FCM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config handles") {
  ConfigHandle c;
  REQUIRE(fcm_config_parse(R"({"experiment": "sir-scan", "fdts_list": [0.0, 0.1], "n_trials": 100})",
                           nullptr, &c.p) == FCM_OK);
  CHECK(std::string(fcm_config_experiment(c.p)) == "sir-scan");
  CHECK(std::string(fcm_config_out_path(c.p)).empty());
  const uint64_t h = fcm_config_hash(c.p);
  CHECK(fcm_config_set_out_path(c.p, "a.csv") == FCM_OK);
  CHECK(std::string(fcm_config_out_path(c.p)) == "a.csv");
  CHECK(fcm_config_set_workers(c.p, 2) == FCM_OK);
  CHECK(fcm_config_hash(c.p) == h);
  CHECK(fcm_config_set_seed(c.p, 5) == FCM_OK);
  CHECK(fcm_config_hash(c.p) != h);
  CHECK(std::string(fcm_config_serialized(c.p)).find("\"master_seed\": 5") != std::string::npos);

  CHECK(fcm_config_set_workers(c.p, 0) == FCM_ERR_INVALID_ARGUMENT);
  CHECK(fcm_config_set_mode(c.p, "bogus") == FCM_ERR_CONFIG);
  CHECK(fcm_config_set_mode(c.p, "waveform") == FCM_OK);

  ConfigHandle bad;
  CHECK(fcm_config_parse(R"({"experiment": "sir-scan", "typo": 1})", nullptr, &bad.p) ==
        FCM_ERR_CONFIG);
  CHECK(fcm_config_parse(R"({"experiment": "sir-scan"})", "eig-fit", &bad.p) == FCM_ERR_CONFIG);
  CHECK(fcm_config_load("/nonexistent/x.json", "eig-fit", &bad.p) == FCM_ERR_IO);
  CHECK(bad.p == nullptr);

  ConfigHandle m;
  REQUIRE(fcm_config_default("mse-vs-nt", &m.p) == FCM_OK);
  CHECK(fcm_config_set_paper_scale(m.p) == FCM_OK);
  CHECK(std::string(fcm_config_serialized(m.p)).find("\"n_tones\": 128") != std::string::npos);
}

TEST_CASE("running an experiment") {
  ConfigHandle c;
  REQUIRE(fcm_config_parse(R"({"n_tones_list": [16], "fdts_list": [0.0, 0.2]})", "eig-fit",
                           &c.p) == FCM_OK);
  ResultHandle r;
  REQUIRE(fcm_run(c.p, &r.p) == FCM_OK);
  CHECK(fcm_result_rows(r.p) == 2);
  const std::string csv = fcm_result_csv(r.p);
  CHECK(csv.rfind("# fcm-crlb experiment=eig-fit", 0) == 0);
  CHECK(csv.find("\nN,fdts,lambda_numeric,lambda_fit,rel_dev\n16,0,16,16,0\n") != std::string::npos);

  const char* path = "test_c_api_out.csv";
  REQUIRE(fcm_result_write(r.p, path) == FCM_OK);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csv);
  std::remove(path);
  CHECK(fcm_result_write(r.p, "/nonexistent/dir/x.csv") == FCM_ERR_IO);
  CHECK(fcm_run(nullptr, &r.p) == FCM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("warnings reach the callback") {
  std::vector<std::string> seen;
  fcm_set_warning_callback(collect, &seen);
  double v = 0.0;
  CHECK(fcm_lambda_max_fit(64, 0.5, &v) == FCM_OK);
  CHECK(seen.size() == 1);
  fcm_set_warning_callback(nullptr, nullptr);
}

TEST_CASE("closed forms") {
  double v = 0.0;
  REQUIRE(fcm_bessel_j0(0.0, &v) == FCM_OK);
  CHECK(v == 1.0);
  REQUIRE(fcm_bessel_j0(2.404825557695773, &v) == FCM_OK);
  CHECK(std::fabs(v) < 1e-9);
  CHECK(fcm_bessel_j0(NAN, &v) == FCM_ERR_DOMAIN);
  CHECK(fcm_bessel_j0(1.0, nullptr) == FCM_ERR_INVALID_ARGUMENT);

  REQUIRE(fcm_lambda_max_fit(128, 0.0, &v) == FCM_OK);
  CHECK(v == 128.0);

  REQUIRE(fcm_avgmse_lb(128, 200, 100.0, 16384.0, &v) == FCM_OK);
  CHECK(v == doctest::Approx(81.92 / 16384.0).epsilon(1e-6));
  double free = 0.0, ins = 0.0;
  REQUIRE(fcm_avgmse_lb_pilot_free(128, 200, 100.0, 128.0, &free) == FCM_OK);
  REQUIRE(fcm_avgmse_lb_insightful(128, 200, 100.0, 0.0, &ins) == FCM_OK);
  CHECK(free == doctest::Approx(v).epsilon(1e-14));
  CHECK(ins == doctest::Approx(v).epsilon(1e-14));
  CHECK(fcm_avgmse_lb(128, 0, 100.0, 16384.0, &v) != FCM_OK);
}
