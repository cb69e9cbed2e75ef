#include "fcmcrlb/ofdm_link.hpp"

#include <cmath>

#include "fcmcrlb/error.hpp"

namespace fcmcrlb {

NoiseSpec NoiseSpec::from_snr_db(double db) {
  require(std::isfinite(db), ErrorCode::InvalidArgument, "NoiseSpec: SNR must be finite");
  return NoiseSpec{db};
}

PilotSequence generate_qpsk_pilots(RngStream& stream, Eigen::Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "generate_qpsk_pilots: n must be positive");
  constexpr double a = 0.7071067811865476;
  PilotSequence p;
  p.master_seed = stream.master_seed();
  p.stream_id = stream.stream_id();
  p.x_p.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::uint64_t bits = stream.next_u64() >> 62;
    p.x_p(k) = cplx((bits & 1U) ? -a : a, (bits & 2U) ? -a : a);
  }
  return p;
}

namespace {

void add_noise(Eigen::VectorXcd& y, double sigma_n2, RngStream& stream) {
  require(sigma_n2 >= 0.0, ErrorCode::InvalidArgument, "noise variance must be nonnegative");
  if (sigma_n2 == 0.0) return;
  const double s = std::sqrt(sigma_n2);
  for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += s * stream.complex_normal();
}

}  // namespace

Eigen::VectorXcd simulate_pilot_rx(const TransferMatrix& hf, const PilotSequence& pilots,
                                   double sigma_n2, RngStream& stream) {
  require(hf.h_f.cols() == pilots.size() && hf.h_f.rows() == pilots.size(),
          ErrorCode::DimensionMismatch, "simulate_pilot_rx: dimension mismatch");
  Eigen::VectorXcd y = hf.h_f * pilots.x_p;
  add_noise(y, sigma_n2, stream);
  return y;
}

Eigen::VectorXcd simulate_pilot_rx(const CirMatrix& cir, const DelayTransform& ft,
                                   const PilotSequence& pilots, double sigma_n2,
                                   RngStream& stream) {
  Eigen::VectorXcd y = apply_transfer(cir, ft, pilots.x_p);
  add_noise(y, sigma_n2, stream);
  return y;
}

Eigen::VectorXcd simulate_pilot_rx_product_form(const CirMatrix& cir, const DelayTransform& ft,
                                                const PilotSequence& pilots, double sigma_n2,
                                                RngStream& stream) {
  require(ft.f_tau.cols() == cir.h_t.rows() && cir.h_t.cols() == pilots.size() &&
              ft.f_tau.rows() == pilots.size(),
          ErrorCode::DimensionMismatch, "simulate_pilot_rx_product_form: dimension mismatch");
  Eigen::VectorXcd y = ft.f_tau * (cir.h_t * pilots.x_p);
  add_noise(y, sigma_n2, stream);
  return y;
}

Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& y_p, const PilotSequence& pilots) {
  require(y_p.size() == pilots.size(), ErrorCode::DimensionMismatch,
          "ls_estimate: dimension mismatch");
  for (Eigen::Index k = 0; k < pilots.size(); ++k) {
    require(pilots.x_p(k) != cplx(0.0, 0.0), ErrorCode::Domain,
            "ls_estimate: zero pilot on tone " + std::to_string(k));
  }
  return y_p.cwiseQuotient(pilots.x_p);
}

LsModelSampler::LsModelSampler(const Eigen::MatrixXcd& sigma) : factor_(psd_factor(sigma)) {}

Eigen::VectorXcd LsModelSampler::sample(RngStream& stream) const {
  return factor_ * sample_cn(stream, factor_.cols());
}

Eigen::MatrixXcd LsModelSampler::sample_block(RngStream& stream, Eigen::Index count) const {
  return factor_ * sample_cn_matrix(stream, factor_.cols(), count);
}

}  // namespace fcmcrlb
