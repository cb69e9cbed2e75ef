#pragma once

#include <Eigen/Dense>

#include "fcmcrlb/channel_model.hpp"
#include "fcmcrlb/numerics.hpp"
#include "fcmcrlb/ofdm_link.hpp"

namespace fcmcrlb {

/// Sample frequency correlation matrix: r_hat = (1/N_t) sum h h^H.
struct Sfcm {
  Eigen::MatrixXcd r_hat;
  long n_t = 0;
};

/// Affine ML correction of an SFCM. Not projected onto the PSD cone.
struct FcmEstimate {
  Eigen::MatrixXcd r_est;
};

/// Running sum of outer products. Single writer; per-worker accumulators
/// combine with merge().
class SfcmAccumulator {
 public:
  explicit SfcmAccumulator(Eigen::Index n);

  void accumulate(const Eigen::VectorXcd& h_ls);
  /// Adds every column of `samples` (N x k) as one sample.
  void accumulate_block(const Eigen::MatrixXcd& samples);
  void merge(const SfcmAccumulator& other);

  Sfcm finalize() const;

  Eigen::Index dim() const { return sum_.rows(); }
  long count() const { return count_; }
  const Eigen::MatrixXcd& running_sum() const { return sum_; }

 private:
  Eigen::MatrixXcd sum_;
  long count_ = 0;
};

/// (X_p r_hat X_p^H - sigma_n2 I) / omega with omega = x_p^H Omega x_p.
FcmEstimate mle_fcm(const Sfcm& sfcm, const PilotSequence& pilots, const TimeCorrMatrix& tcm,
                    double sigma_n2);

/// Same correction with an explicit channel gain in place of x_p^H Omega x_p.
FcmEstimate mle_fcm_with_gain(const Sfcm& sfcm, const PilotSequence& pilots, double gain,
                              double sigma_n2);

/// Correction for LS estimates taken through the full transfer matrix, where
/// the pilot phases cancel on the diagonal and the channel enters with the
/// mean diagonal gain rho = 1^T Omega 1 / N^2: (r_hat - sigma_n2 I) / rho.
FcmEstimate waveform_fcm_estimate(const Sfcm& sfcm, double diag_gain, double sigma_n2);

double total_mse(const FcmEstimate& est, const TrueFcm& truth);
double avg_mse(const FcmEstimate& est, const TrueFcm& truth);

/// trace(est - R_p) / N; real for Hermitian inputs.
double signed_diag_error(const FcmEstimate& est, const TrueFcm& truth);

struct WishartMomentCheck {
  double max_rel_deviation = 0.0;
  /// Deviation is |empirical - N_t S'_kj S'_il| divided by the
  /// Cauchy-Schwarz scale N_t sqrt(S'_ii S'_jj S'_kk S'_ll), so entries whose
  /// expected value vanishes are still measured on a meaningful scale.
  Eigen::Index worst_i = 0, worst_j = 0, worst_k = 0, worst_l = 0;
  long n_runs = 0;
};

/// Empirical second central moments E[(S_ij - E S_ij)(S_kl - E S_kl)] of
/// S ~ CW(N_t, sigma_prime), drawn as sums of outer products, against
/// N_t [sigma_prime]_kj [sigma_prime]_il.
WishartMomentCheck wishart_second_moment_check(const Eigen::MatrixXcd& sigma_prime, long n_t,
                                               long n_runs, const RngStream& stream);

}  // namespace fcmcrlb
