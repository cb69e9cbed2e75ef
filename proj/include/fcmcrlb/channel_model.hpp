#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fcmcrlb/numerics.hpp"

namespace fcmcrlb {

struct OfdmConfig {
  int n_tones = 128;
  int cp_len = 16;
  double sample_period_s = 0.8e-6;

  double symbol_duration_s() const { return (n_tones + cp_len) * sample_period_s; }
  void validate() const;
};

/// Multipath power-delay profile. `tau` holds delays in sample periods and
/// `sigma2` the linear path powers normalized to unit sum.
struct PathProfile {
  std::string name;
  std::vector<double> delays_s;
  std::vector<double> powers_db;
  std::vector<double> tau;
  std::vector<double> sigma2;

  std::size_t paths() const { return tau.size(); }
};

PathProfile make_profile(std::string name, const std::vector<double>& delays_ns,
                         const std::vector<double>& powers_db, const OfdmConfig& cfg);

/// 3GPP E-UTRA EVA or ETU.
PathProfile builtin_profile(const std::string& name, const OfdmConfig& cfg);

/// Profile from a JSON file with keys name, delays_ns, powers_db.
PathProfile load_profile(const std::string& path, const OfdmConfig& cfg);

struct DopplerSpec {
  double f_d_hz = 0.0;

  double normalized(const OfdmConfig& cfg) const { return f_d_hz * cfg.symbol_duration_s(); }
  void validate(const OfdmConfig& cfg) const;
};

/// Intra-symbol time correlation, [omega]_{m1,m2} = J0(2 pi f_d (m1-m2) T).
struct TimeCorrMatrix {
  Eigen::MatrixXd omega;
};

/// [f_tau]_{k,l} = exp(-j 2 pi k tau_l / N).
struct DelayTransform {
  Eigen::MatrixXcd f_tau;
};

/// R_p = F_tau diag(sigma2) F_tau^H.
struct TrueFcm {
  Eigen::MatrixXcd r_p;
};

/// L x N; column m is the path-gain vector at in-symbol sample m.
struct CirMatrix {
  Eigen::MatrixXcd h_t;
};

/// N x N frequency-domain transfer matrix including ICI.
struct TransferMatrix {
  Eigen::MatrixXcd h_f;
};

TimeCorrMatrix build_tcm(const OfdmConfig& cfg, const DopplerSpec& dop);

/// Expected power gain of each transfer-matrix diagonal entry, 1^T Omega 1 / N^2.
/// 1 - gain is the ICI power per tone.
double mean_diagonal_gain(const TimeCorrMatrix& tcm);
DelayTransform build_delay_transform(const OfdmConfig& cfg, const PathProfile& prof);
TrueFcm build_true_fcm(const DelayTransform& ft, const PathProfile& prof);

/// Draws CIR matrices with vec(H_t) ~ CN(0, Omega (x) D). Holds the
/// factor of Omega so repeated draws skip the eigendecomposition.
class CirSampler {
 public:
  CirSampler(const TimeCorrMatrix& tcm, const PathProfile& prof);

  CirMatrix sample(RngStream& stream) const;

 private:
  Eigen::MatrixXcd time_factor_;  // N x r
  Eigen::VectorXd path_amplitude_;
};

CirMatrix sample_cir(RngStream& stream, const TimeCorrMatrix& tcm, const PathProfile& prof);

TransferMatrix build_transfer_matrix(const CirMatrix& cir, const DelayTransform& ft);

/// H_f * x without forming H_f; O(N^2 + N L) per call.
Eigen::VectorXcd apply_transfer(const CirMatrix& cir, const DelayTransform& ft,
                                const Eigen::VectorXcd& x);

/// Signal-to-interference ratio of the transfer matrix in dB. Returns
/// +infinity when the interference power is below 1e-20 of the signal.
double measure_sir(const OfdmConfig& cfg, const PathProfile& prof, const DopplerSpec& dop,
                   int n_trials, const RngStream& stream);

}  // namespace fcmcrlb
