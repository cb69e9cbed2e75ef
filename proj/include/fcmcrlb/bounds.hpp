#pragma once

#include <Eigen/Dense>

#include "fcmcrlb/channel_model.hpp"
#include "fcmcrlb/ofdm_link.hpp"

namespace fcmcrlb {

/// Fitting constant of the largest-eigenvalue law N J0(2 pi c f_d T_s).
inline constexpr double kLambdaFitC = 0.35;

/// Covariance of the LS estimate, Sigma = omega X^-1 (R_p + sigma_n2/omega I) X^-H.
struct LsCovariance {
  Eigen::MatrixXcd sigma;
  double omega = 0.0;
  Eigen::MatrixXcd sigma_prime;  // sigma / n_t
};

/// CRLB(R_p) = (1/N_t) A (x) A^T with A = R_p + (sigma_n2/omega) I.
/// The N^2 x N^2 bound is only ever accessed entrywise.
struct CrlbFactor {
  Eigen::MatrixXcd a;
  long n_t = 1;
};

struct BoundReport {
  double omega = 0.0;
  double tmse_lb = 0.0;
  double avgmse_lb = 0.0;
  double avgmse_lb_pilot_free = 0.0;
  double avgmse_lb_insightful = 0.0;
  double lambda_max = 0.0;
  double c_fit = kLambdaFitC;
};

/// x_p^H Omega x_p.
double pilot_omega(const PilotSequence& pilots, const TimeCorrMatrix& tcm);

LsCovariance ls_covariance(const TrueFcm& truth, const PilotSequence& pilots,
                           const TimeCorrMatrix& tcm, double sigma_n2, long n_t);

CrlbFactor make_crlb_factor(const TrueFcm& truth, double omega, double sigma_n2, long n_t);

/// Entry ((i N + j), (k N + l)) of (1/N_t) A (x) A^T.
cplx crlb_entry(const CrlbFactor& factor, Eigen::Index i, Eigen::Index j, Eigen::Index k,
                Eigen::Index l);

/// (1/N_t) trace(A)^2.
double tmse_lb(const CrlbFactor& factor);
double avgmse_lb(const CrlbFactor& factor);

double lambda_max_numeric(const TimeCorrMatrix& tcm);
double lambda_max_fit(int n, double fdts);

double avgmse_lb_pilot_free(int n, long n_t, double gamma, double lambda_max);
double avgmse_lb_insightful(int n, long n_t, double gamma, double fdts);

BoundReport bound_report(const OfdmConfig& cfg, const DopplerSpec& dop, const TrueFcm& truth,
                         const PilotSequence& pilots, const TimeCorrMatrix& tcm,
                         const NoiseSpec& noise, long n_t);

}  // namespace fcmcrlb
