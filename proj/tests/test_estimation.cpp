#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fcmcrlb/bounds.hpp"
#include "fcmcrlb/channel_model.hpp"
#include "fcmcrlb/error.hpp"
#include "fcmcrlb/estimation.hpp"
#include "fcmcrlb/ofdm_link.hpp"
#include "test_util.hpp"

using namespace fcmcrlb;

namespace {

struct Setup {
  OfdmConfig cfg;
  PathProfile prof;
  TimeCorrMatrix tcm;
  TrueFcm truth;
  PilotSequence pilots;
  double sigma_n2;
};

Setup make_setup(int n, double f_d, double snr_db, std::uint64_t seed) {
  Setup s;
  s.cfg = OfdmConfig{n, 4, 0.8e-6};
  s.prof = builtin_profile("EVA", s.cfg);
  s.tcm = build_tcm(s.cfg, DopplerSpec{f_d});
  s.truth = build_true_fcm(build_delay_transform(s.cfg, s.prof), s.prof);
  RngStream ps(seed, 0);
  s.pilots = generate_qpsk_pilots(ps, n);
  s.sigma_n2 = NoiseSpec{snr_db}.sigma_n2();
  return s;
}

}  // namespace

TEST_CASE("SfcmAccumulator basics") {
  std::mt19937_64 rng(3);
  const Eigen::VectorXcd h = test::random_complex(5, 1, rng);
  SfcmAccumulator acc(5);
  acc.accumulate(h);
  const Sfcm one = acc.finalize();
  CHECK(one.n_t == 1);
  CHECK((one.r_hat - h * h.adjoint()).norm() < 1e-14);

  const Eigen::MatrixXcd samples = test::random_complex(5, 7, rng);
  SfcmAccumulator acc7(5);
  acc7.accumulate_block(samples);
  CHECK(acc7.count() == 7);
  CHECK((acc7.finalize().r_hat - samples * samples.adjoint() / 7.0).norm() < 1e-13);
  CHECK((acc7.running_sum() - samples * samples.adjoint()).norm() < 1e-13);

  CHECK_THROWS_AS(acc.accumulate(Eigen::VectorXcd::Ones(4)), Error);
  try {
    SfcmAccumulator(3).finalize();
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Precondition);
  }
}

TEST_CASE("accumulation order does not matter") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXcd samples = test::random_complex(6, 40, rng);
  std::vector<int> order(40);
  std::iota(order.begin(), order.end(), 0);
  SfcmAccumulator ref(6);
  for (int t : order) ref.accumulate(samples.col(t));
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(order.begin(), order.end(), rng);
    SfcmAccumulator acc(6);
    for (int t : order) acc.accumulate(samples.col(t));
    CHECK(test::rel_frob(acc.finalize().r_hat, ref.finalize().r_hat) <= 1e-12);
  }

  SfcmAccumulator a(6), b(6);
  a.accumulate_block(samples.leftCols(15));
  b.accumulate_block(samples.rightCols(25));
  a.merge(b);
  CHECK(a.count() == 40);
  CHECK(test::rel_frob(a.finalize().r_hat, ref.finalize().r_hat) <= 1e-12);
  CHECK_THROWS_AS(a.merge(SfcmAccumulator(3)), Error);
}

TEST_CASE("finalized SFCM is Hermitian PSD with rank min(N_t, N)") {
  std::mt19937_64 rng(8);
  for (int n_t : {1, 3, 7, 12, 30}) {
    SfcmAccumulator acc(12);
    acc.accumulate_block(test::random_complex(12, n_t, rng));
    const Eigen::MatrixXcd r = acc.finalize().r_hat;
    CHECK((r - r.adjoint()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    const Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev.minCoeff() >= -1e-10 * ev.maxCoeff());
    const long rank = (ev.array() > 1e-10 * ev.maxCoeff()).count();
    CHECK(rank == std::min(n_t, 12));
  }
}

TEST_CASE("SFCM from 10^4 model-mode samples approaches Sigma") {
  const Setup s = make_setup(16, 200.0, 20.0, 1);
  const LsCovariance cov = ls_covariance(s.truth, s.pilots, s.tcm, s.sigma_n2, 1);
  RngStream st(1, 1);
  SfcmAccumulator acc(16);
  acc.accumulate_block(LsModelSampler(cov.sigma).sample_block(st, 10000));
  CHECK(test::rel_frob(acc.finalize().r_hat, cov.sigma) <= 0.05);
}

TEST_CASE("mle_fcm inverts the covariance model") {
  for (double f_d : {0.0, 200.0, 3000.0}) {
    const Setup s = make_setup(16, f_d, 15.0, 2);
    const LsCovariance cov = ls_covariance(s.truth, s.pilots, s.tcm, s.sigma_n2, 1);
    const FcmEstimate est = mle_fcm(Sfcm{cov.sigma, 1}, s.pilots, s.tcm, s.sigma_n2);
    CHECK((est.r_est - s.truth.r_p).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("mle_fcm with a static channel and all-ones pilots") {
  Setup s = make_setup(8, 0.0, 10.0, 3);
  s.pilots.x_p = Eigen::VectorXcd::Ones(8);
  CHECK(pilot_omega(s.pilots, s.tcm) == doctest::Approx(64.0).epsilon(1e-14));
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd c = test::random_complex(8, 8, rng);
  const Eigen::MatrixXcd r_hat = c * c.adjoint();
  const FcmEstimate est = mle_fcm(Sfcm{r_hat, 4}, s.pilots, s.tcm, s.sigma_n2);
  const Eigen::MatrixXcd expect =
      (r_hat - s.sigma_n2 * Eigen::MatrixXcd::Identity(8, 8)) / 64.0;
  CHECK((est.r_est - expect).norm() < 1e-13);
}

TEST_CASE("mle_fcm scaling equivariance") {
  const Setup s = make_setup(16, 200.0, 20.0, 4);
  std::mt19937_64 rng(4);
  const Eigen::MatrixXcd c = test::random_complex(16, 16, rng);
  const Sfcm base{c * c.adjoint(), 50};
  const FcmEstimate e0 = mle_fcm(base, s.pilots, s.tcm, s.sigma_n2);
  for (double k : {0.01, 3.0, 250.0}) {
    const FcmEstimate ek = mle_fcm(Sfcm{k * base.r_hat, 50}, s.pilots, s.tcm, k * s.sigma_n2);
    CHECK(test::rel_frob(ek.r_est, k * e0.r_est) <= 1e-12);
  }
  CHECK_THROWS_AS(mle_fcm_with_gain(base, s.pilots, 0.0, s.sigma_n2), Error);
}

TEST_CASE("mle_fcm is unbiased in model mode") {
  const Setup s = make_setup(8, 200.0, 20.0, 5);
  const long n_t = 10;
  const LsCovariance cov = ls_covariance(s.truth, s.pilots, s.tcm, s.sigma_n2, n_t);
  const LsModelSampler sampler(cov.sigma);
  const RngStream root(5, 1);
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(8, 8);
  const int runs = 10000;
  for (int r = 0; r < runs; ++r) {
    RngStream st = root.derive(r);
    SfcmAccumulator acc(8);
    acc.accumulate_block(sampler.sample_block(st, n_t));
    mean += mle_fcm(acc.finalize(), s.pilots, s.tcm, s.sigma_n2).r_est;
  }
  mean /= static_cast<double>(runs);
  CHECK(test::rel_frob(mean, s.truth.r_p) <= 0.02);
}

TEST_CASE("MSE metrics") {
  const Setup s = make_setup(8, 200.0, 20.0, 6);
  const FcmEstimate same{s.truth.r_p};
  CHECK(avg_mse(same, s.truth) == 0.0);
  CHECK(total_mse(same, s.truth) == 0.0);
  CHECK(signed_diag_error(same, s.truth) == 0.0);

  const cplx c(0.3, -0.4);
  const FcmEstimate shifted{s.truth.r_p + c * Eigen::MatrixXcd::Identity(8, 8)};
  CHECK(avg_mse(shifted, s.truth) == doctest::Approx(std::norm(c) / 8.0).epsilon(1e-12));
  CHECK(signed_diag_error(shifted, s.truth) == doctest::Approx(0.3).epsilon(1e-12));

  std::mt19937_64 rng(6);
  const Eigen::VectorXcd u = test::random_complex(8, 1, rng);
  const FcmEstimate rank1{s.truth.r_p + u * u.adjoint()};
  CHECK(total_mse(rank1, s.truth) ==
        doctest::Approx(std::pow(u.squaredNorm(), 2)).epsilon(1e-12));
  CHECK(total_mse(rank1, s.truth) ==
        doctest::Approx(64.0 * avg_mse(rank1, s.truth)).epsilon(1e-14));
  CHECK_THROWS_AS(avg_mse(FcmEstimate{Eigen::MatrixXcd::Zero(3, 3)}, s.truth), Error);
}

TEST_CASE("waveform_fcm_estimate") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXcd c = test::random_complex(6, 6, rng);
  const Sfcm sf{c * c.adjoint(), 10};
  const FcmEstimate e = waveform_fcm_estimate(sf, 0.8, 0.05);
  CHECK((e.r_est - (sf.r_hat - 0.05 * Eigen::MatrixXcd::Identity(6, 6)) / 0.8).norm() < 1e-13);
  CHECK_THROWS_AS(waveform_fcm_estimate(sf, 0.0, 0.05), Error);
}

TEST_CASE("Wishart second-moment identity") {
  SUBCASE("scalar chi-square variance") {
    const WishartMomentCheck r =
        wishart_second_moment_check(Eigen::MatrixXcd::Ones(1, 1), 10, 100000, RngStream(11, 0));
    CHECK(r.n_runs == 100000);
    CHECK(r.max_rel_deviation <= 0.05);
  }
  SUBCASE("diagonal covariance") {
    Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(2, 2);
    sp(0, 0) = 1.0;
    sp(1, 1) = 2.5;
    const WishartMomentCheck r = wishart_second_moment_check(sp, 10, 50000, RngStream(12, 0));
    CHECK(r.max_rel_deviation <= 0.05);
  }
  SUBCASE("random 4x4 covariance") {
    std::mt19937_64 rng(13);
    const Eigen::MatrixXcd c = test::random_complex(4, 4, rng);
    const Eigen::MatrixXcd sp = c * c.adjoint() / 4.0 + 0.1 * Eigen::MatrixXcd::Identity(4, 4);
    const WishartMomentCheck r = wishart_second_moment_check(sp, 20, 100000, RngStream(13, 0));
    CHECK(r.max_rel_deviation <= 0.05);
  }
  CHECK_THROWS_AS(wishart_second_moment_check(Eigen::MatrixXcd::Ones(2, 3), 10, 10, RngStream(1, 1)),
                  Error);
}
