#include "fcmcrlb/estimation.hpp"

#include <cmath>
#include <vector>

#include "fcmcrlb/bounds.hpp"
#include "fcmcrlb/error.hpp"

namespace fcmcrlb {

SfcmAccumulator::SfcmAccumulator(Eigen::Index n) : sum_(Eigen::MatrixXcd::Zero(n, n)) {
  require(n >= 1, ErrorCode::InvalidArgument, "SfcmAccumulator: dimension must be positive");
}

void SfcmAccumulator::accumulate(const Eigen::VectorXcd& h_ls) {
  require(h_ls.size() == sum_.rows(), ErrorCode::DimensionMismatch,
          "SfcmAccumulator: sample dimension mismatch");
  sum_.selfadjointView<Eigen::Lower>().rankUpdate(h_ls);
  sum_.triangularView<Eigen::StrictlyUpper>() = sum_.adjoint().eval();
  ++count_;
}

void SfcmAccumulator::accumulate_block(const Eigen::MatrixXcd& samples) {
  require(samples.rows() == sum_.rows(), ErrorCode::DimensionMismatch,
          "SfcmAccumulator: sample dimension mismatch");
  sum_.selfadjointView<Eigen::Lower>().rankUpdate(samples);
  sum_.triangularView<Eigen::StrictlyUpper>() = sum_.adjoint().eval();
  count_ += static_cast<long>(samples.cols());
}

void SfcmAccumulator::merge(const SfcmAccumulator& other) {
  require(other.sum_.rows() == sum_.rows(), ErrorCode::DimensionMismatch,
          "SfcmAccumulator: merge dimension mismatch");
  sum_ += other.sum_;
  count_ += other.count_;
}

Sfcm SfcmAccumulator::finalize() const {
  require(count_ >= 1, ErrorCode::Precondition, "SfcmAccumulator: no samples accumulated");
  return Sfcm{sum_ / static_cast<double>(count_), count_};
}

FcmEstimate mle_fcm(const Sfcm& sfcm, const PilotSequence& pilots, const TimeCorrMatrix& tcm,
                    double sigma_n2) {
  return mle_fcm_with_gain(sfcm, pilots, pilot_omega(pilots, tcm), sigma_n2);
}

FcmEstimate mle_fcm_with_gain(const Sfcm& sfcm, const PilotSequence& pilots, double gain,
                              double sigma_n2) {
  require(sfcm.r_hat.rows() == pilots.size() && sfcm.r_hat.cols() == pilots.size(),
          ErrorCode::DimensionMismatch, "mle_fcm: dimension mismatch");
  require(gain > 0.0 && std::isfinite(gain), ErrorCode::Precondition,
          "mle_fcm: pilot quadratic form must be positive");
  const auto x = pilots.x_p.asDiagonal();
  Eigen::MatrixXcd r = x * sfcm.r_hat * pilots.x_p.conjugate().asDiagonal();
  r.diagonal().array() -= sigma_n2;
  r /= gain;
  return FcmEstimate{std::move(r)};
}

FcmEstimate waveform_fcm_estimate(const Sfcm& sfcm, double diag_gain, double sigma_n2) {
  require(diag_gain > 0.0 && std::isfinite(diag_gain), ErrorCode::Precondition,
          "waveform_fcm_estimate: gain must be positive");
  Eigen::MatrixXcd r = sfcm.r_hat;
  r.diagonal().array() -= sigma_n2;
  r /= diag_gain;
  return FcmEstimate{std::move(r)};
}

double total_mse(const FcmEstimate& est, const TrueFcm& truth) {
  require(est.r_est.rows() == truth.r_p.rows() && est.r_est.cols() == truth.r_p.cols(),
          ErrorCode::DimensionMismatch, "total_mse: dimension mismatch");
  return (est.r_est - truth.r_p).squaredNorm();
}

double avg_mse(const FcmEstimate& est, const TrueFcm& truth) {
  const auto n = static_cast<double>(truth.r_p.rows());
  return total_mse(est, truth) / (n * n);
}

double signed_diag_error(const FcmEstimate& est, const TrueFcm& truth) {
  require(est.r_est.rows() == truth.r_p.rows(), ErrorCode::DimensionMismatch,
          "signed_diag_error: dimension mismatch");
  return (est.r_est - truth.r_p).trace().real() / static_cast<double>(truth.r_p.rows());
}

WishartMomentCheck wishart_second_moment_check(const Eigen::MatrixXcd& sigma_prime, long n_t,
                                               long n_runs, const RngStream& stream) {
  require(sigma_prime.rows() == sigma_prime.cols(), ErrorCode::DimensionMismatch,
          "wishart_second_moment_check: covariance must be square");
  require(n_t >= 1 && n_runs >= 2, ErrorCode::InvalidArgument,
          "wishart_second_moment_check: need n_t >= 1 and n_runs >= 2");
  const Eigen::Index n = sigma_prime.rows();
  const Eigen::Index n2 = n * n;
  const LsModelSampler sampler(sigma_prime);

  // Streaming mean and co-moment of vec(S) (Welford) keep the estimate of
  // the non-conjugated product E[dS_ij dS_kl] numerically clean.
  Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(n2);
  Eigen::MatrixXcd comoment = Eigen::MatrixXcd::Zero(n2, n2);
  for (long r = 0; r < n_runs; ++r) {
    RngStream run = stream.derive(static_cast<std::uint64_t>(r));
    const Eigen::MatrixXcd v = sampler.sample_block(run, n_t);
    const Eigen::MatrixXcd s = v * v.adjoint();
    const Eigen::Map<const Eigen::VectorXcd> vec_s(s.data(), n2);
    const Eigen::VectorXcd delta = vec_s - mean;
    mean += delta / static_cast<double>(r + 1);
    comoment.noalias() += delta * (vec_s - mean).transpose();
  }
  const Eigen::MatrixXcd central = comoment / static_cast<double>(n_runs - 1);

  // vec is column-major: S_ij sits at i + n j.
  WishartMomentCheck out;
  out.n_runs = n_runs;
  const auto nt = static_cast<double>(n_t);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          const cplx expected = nt * sigma_prime(k, j) * sigma_prime(i, l);
          const double scale =
              nt * std::sqrt(std::abs(sigma_prime(i, i) * sigma_prime(j, j) *
                                      sigma_prime(k, k) * sigma_prime(l, l)));
          const double dev = std::abs(central(i + n * j, k + n * l) - expected) / scale;
          if (dev > out.max_rel_deviation) {
            out.max_rel_deviation = dev;
            out.worst_i = i;
            out.worst_j = j;
            out.worst_k = k;
            out.worst_l = l;
          }
        }
  return out;
}

}  // namespace fcmcrlb
