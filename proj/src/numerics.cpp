#include "fcmcrlb/numerics.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>

#include "fcmcrlb/error.hpp"

namespace fcmcrlb {

namespace {

std::mutex g_warning_mutex;
WarningHandler g_warning_handler;

constexpr double kSeriesLimit = 12.0;

double j0_series(double x) {
  const long double q = static_cast<long double>(x) * x / 4.0L;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::fabs(term) < 1e-21L * std::fabs(sum) && std::fabs(term) < 1e-21L) break;
  }
  return static_cast<double>(sum);
}

double j0_asymptotic(double x) {
  // Hankel expansion: J0 = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)).
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev_mag = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(odd * odd) / (8.0 * k * x);
    const double mag = std::fabs(term);
    if (mag > prev_mag) break;  // series starts diverging
    prev_mag = mag;
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (mag < 1e-17) break;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double cos_chi = (c + s) * std::numbers::sqrt2 / 2.0;
  const double sin_chi = (s - c) * std::numbers::sqrt2 / 2.0;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cos_chi - q * sin_chi);
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_warning_mutex);
  g_warning_handler = std::move(handler);
}

void warn(std::string_view message) {
  std::lock_guard lock(g_warning_mutex);
  if (g_warning_handler) {
    g_warning_handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(a) ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2)));
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      engine_(mix_ids(master_seed, stream_id)) {}

RngStream RngStream::derive(std::uint64_t sub_id) const {
  return RngStream(master_seed_, mix_ids(stream_id_, sub_id));
}

cplx RngStream::complex_normal() {
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {re, im};
}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double bessel_j0(double x) {
  require(std::isfinite(x), ErrorCode::Domain, "bessel_j0: non-finite argument");
  const double ax = std::fabs(x);
  return ax <= kSeriesLimit ? j0_series(ax) : j0_asymptotic(ax);
}

Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& m, double rel_tol) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::DimensionMismatch,
          "psd_factor: matrix must be square and non-empty");
  require(rel_tol >= 0.0, ErrorCode::InvalidArgument, "psd_factor: negative tolerance");

  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Eigen::MatrixXcd::Zero(m.rows(), 1);
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * scale, ErrorCode::InvalidArgument,
          "psd_factor: matrix is not Hermitian");

  const Eigen::MatrixXcd sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sym);
  require(eig.info() == Eigen::Success, ErrorCode::Internal,
          "psd_factor: eigendecomposition failed");

  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double lambda_max = lambda(lambda.size() - 1);
  require(lambda_max > 0.0, ErrorCode::NotPsd, "psd_factor: no positive eigenvalue");
  const double cut = rel_tol * lambda_max;
  require(lambda(0) >= -cut, ErrorCode::NotPsd,
          "psd_factor: eigenvalue " + std::to_string(lambda(0)) +
              " below tolerance; matrix is not positive semidefinite");

  Eigen::Index first = 0;
  while (first < lambda.size() && lambda(first) <= cut) ++first;
  const Eigen::Index rank = lambda.size() - first;

  Eigen::MatrixXcd b = eig.eigenvectors().rightCols(rank);
  for (Eigen::Index c = 0; c < rank; ++c) b.col(c) *= std::sqrt(lambda(first + c));
  return b;
}

Eigen::VectorXcd sample_cn(RngStream& stream, Eigen::Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "sample_cn: n must be positive");
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = stream.complex_normal();
  return v;
}

Eigen::MatrixXcd sample_cn_matrix(RngStream& stream, Eigen::Index rows, Eigen::Index cols) {
  require(rows >= 1 && cols >= 1, ErrorCode::InvalidArgument,
          "sample_cn_matrix: dimensions must be positive");
  Eigen::MatrixXcd g(rows, cols);
  cplx* data = g.data();
  for (Eigen::Index i = 0; i < rows * cols; ++i) data[i] = stream.complex_normal();
  return g;
}

}  // namespace fcmcrlb
