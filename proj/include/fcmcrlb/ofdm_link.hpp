#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "fcmcrlb/channel_model.hpp"
#include "fcmcrlb/numerics.hpp"

namespace fcmcrlb {

/// Unit-modulus pilot symbol occupying all N tones; fixed for an experiment.
struct PilotSequence {
  Eigen::VectorXcd x_p;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  Eigen::Index size() const { return x_p.size(); }
};

struct NoiseSpec {
  double snr_db = 20.0;

  double gamma() const { return std::pow(10.0, snr_db / 10.0); }
  double sigma_n2() const { return 1.0 / gamma(); }

  static NoiseSpec from_snr_db(double db);
};

/// Entries drawn uniformly from {(+-1 +- j)/sqrt(2)}.
PilotSequence generate_qpsk_pilots(RngStream& stream, Eigen::Index n);

/// y_p = H_f x_p + n_p, n_p ~ CN(0, sigma_n2 I).
Eigen::VectorXcd simulate_pilot_rx(const TransferMatrix& hf, const PilotSequence& pilots,
                                   double sigma_n2, RngStream& stream);

/// Same received symbol as simulate_pilot_rx(build_transfer_matrix(cir, ft), ...)
/// without building the N x N transfer matrix.
Eigen::VectorXcd simulate_pilot_rx(const CirMatrix& cir, const DelayTransform& ft,
                                   const PilotSequence& pilots, double sigma_n2,
                                   RngStream& stream);

/// Received pilot under the time-frequency response F_tau H_t applied
/// directly to the pilot vector (the product form used to derive the LS
/// covariance). Its LS estimate is exactly CN(0, Sigma).
Eigen::VectorXcd simulate_pilot_rx_product_form(const CirMatrix& cir, const DelayTransform& ft,
                                                const PilotSequence& pilots, double sigma_n2,
                                                RngStream& stream);

/// Elementwise y_p / x_p.
Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& y_p, const PilotSequence& pilots);

/// Model-mode source of LS estimates: i.i.d. draws from CN(0, Sigma).
class LsModelSampler {
 public:
  explicit LsModelSampler(const Eigen::MatrixXcd& sigma);

  Eigen::VectorXcd sample(RngStream& stream) const;
  /// N x count matrix whose columns are independent LS estimates.
  Eigen::MatrixXcd sample_block(RngStream& stream, Eigen::Index count) const;

 private:
  Eigen::MatrixXcd factor_;
};

}  // namespace fcmcrlb
