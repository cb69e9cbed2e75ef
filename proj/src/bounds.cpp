#include "fcmcrlb/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fcmcrlb/error.hpp"

namespace fcmcrlb {

namespace {

void check_fit_range(double fdts) {
  require(fdts >= 0.0 && std::isfinite(fdts), ErrorCode::InvalidArgument,
          "normalized Doppler must be nonnegative");
  if (fdts > 0.35) {
    std::ostringstream msg;
    msg << "f_d*T_s = " << fdts << " is outside the eigenvalue fit range (<= 0.35)";
    warn(msg.str());
  }
}

double noise_factor(double x) { return (1.0 + x) * (1.0 + x); }

}  // namespace

double pilot_omega(const PilotSequence& pilots, const TimeCorrMatrix& tcm) {
  require(tcm.omega.rows() == pilots.size() && tcm.omega.cols() == pilots.size(),
          ErrorCode::DimensionMismatch, "pilot_omega: dimension mismatch");
  const cplx q = pilots.x_p.dot(tcm.omega.cast<cplx>() * pilots.x_p);  // x^H Omega x
  return q.real();
}

LsCovariance ls_covariance(const TrueFcm& truth, const PilotSequence& pilots,
                           const TimeCorrMatrix& tcm, double sigma_n2, long n_t) {
  require(truth.r_p.rows() == pilots.size(), ErrorCode::DimensionMismatch,
          "ls_covariance: dimension mismatch");
  require(n_t >= 1, ErrorCode::InvalidArgument, "ls_covariance: n_t must be positive");
  const double omega = pilot_omega(pilots, tcm);
  require(omega > 0.0, ErrorCode::Precondition, "ls_covariance: omega must be positive");

  const Eigen::VectorXcd inv_x = pilots.x_p.cwiseInverse();
  Eigen::MatrixXcd a = truth.r_p;
  a.diagonal().array() += sigma_n2 / omega;
  LsCovariance out;
  out.omega = omega;
  out.sigma = omega * (inv_x.asDiagonal() * a * inv_x.conjugate().asDiagonal());
  out.sigma = (out.sigma + out.sigma.adjoint()).eval() / 2.0;
  out.sigma_prime = out.sigma / static_cast<double>(n_t);
  return out;
}

CrlbFactor make_crlb_factor(const TrueFcm& truth, double omega, double sigma_n2, long n_t) {
  require(omega > 0.0, ErrorCode::Precondition, "make_crlb_factor: omega must be positive");
  require(n_t >= 1, ErrorCode::InvalidArgument, "make_crlb_factor: n_t must be positive");
  CrlbFactor f{truth.r_p, n_t};
  f.a.diagonal().array() += sigma_n2 / omega;
  return f;
}

cplx crlb_entry(const CrlbFactor& factor, Eigen::Index i, Eigen::Index j, Eigen::Index k,
                Eigen::Index l) {
  const Eigen::Index n = factor.a.rows();
  require(i >= 0 && j >= 0 && k >= 0 && l >= 0 && i < n && j < n && k < n && l < n,
          ErrorCode::InvalidArgument, "crlb_entry: index out of range");
  // (A (x) A^T)_{(iN+j),(kN+l)} = A_ik (A^T)_jl = A_ik A_lj
  return factor.a(i, k) * factor.a(l, j) / static_cast<double>(factor.n_t);
}

double tmse_lb(const CrlbFactor& factor) {
  const cplx tr = factor.a.trace();
  return std::norm(tr) / static_cast<double>(factor.n_t);
}

double avgmse_lb(const CrlbFactor& factor) {
  const auto n = static_cast<double>(factor.a.rows());
  return tmse_lb(factor) / (n * n);
}

double lambda_max_numeric(const TimeCorrMatrix& tcm) {
  // Static channel: Omega is the all-ones matrix and its top eigenvalue is N,
  // which the iterative solver would only return to within rounding.
  if ((tcm.omega.array() == 1.0).all()) return static_cast<double>(tcm.omega.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tcm.omega, Eigen::EigenvaluesOnly);
  require(eig.info() == Eigen::Success, ErrorCode::Internal,
          "lambda_max_numeric: eigensolver failed");
  return eig.eigenvalues()(eig.eigenvalues().size() - 1);
}

double lambda_max_fit(int n, double fdts) {
  check_fit_range(fdts);
  return n * bessel_j0(2.0 * std::numbers::pi * kLambdaFitC * fdts);
}

double avgmse_lb_pilot_free(int n, long n_t, double gamma, double lambda_max) {
  require(n >= 1 && n_t >= 1 && gamma > 0.0 && lambda_max > 0.0, ErrorCode::InvalidArgument,
          "avgmse_lb_pilot_free: arguments must be positive");
  return noise_factor(1.0 / (n * lambda_max * gamma)) / static_cast<double>(n_t);
}

double avgmse_lb_insightful(int n, long n_t, double gamma, double fdts) {
  require(n >= 1 && n_t >= 1 && gamma > 0.0, ErrorCode::InvalidArgument,
          "avgmse_lb_insightful: arguments must be positive");
  return avgmse_lb_pilot_free(n, n_t, gamma, lambda_max_fit(n, fdts));
}

BoundReport bound_report(const OfdmConfig& cfg, const DopplerSpec& dop, const TrueFcm& truth,
                         const PilotSequence& pilots, const TimeCorrMatrix& tcm,
                         const NoiseSpec& noise, long n_t) {
  BoundReport r;
  r.omega = pilot_omega(pilots, tcm);
  const CrlbFactor f = make_crlb_factor(truth, r.omega, noise.sigma_n2(), n_t);
  r.tmse_lb = tmse_lb(f);
  r.avgmse_lb = avgmse_lb(f);
  r.lambda_max = lambda_max_numeric(tcm);
  r.avgmse_lb_pilot_free =
      avgmse_lb_pilot_free(cfg.n_tones, n_t, noise.gamma(), r.lambda_max);
  r.avgmse_lb_insightful =
      avgmse_lb_insightful(cfg.n_tones, n_t, noise.gamma(), dop.normalized(cfg));
  return r;
}

}  // namespace fcmcrlb
