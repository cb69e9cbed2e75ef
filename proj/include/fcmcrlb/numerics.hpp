#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace fcmcrlb {

using cplx = std::complex<double>;

/// Deterministic random stream keyed by (master_seed, stream_id).
///
/// The engine seed is a splitmix64 hash of both keys, so a stream can be
/// rebuilt anywhere from its two ids without replaying other streams. That
/// is what lets parallel trials produce schedule-independent results.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream; ids are combined by hashing, not by addition.
  RngStream derive(std::uint64_t sub_id) const;

  /// Standard circular complex normal: real and imaginary parts N(0, 1/2).
  cplx complex_normal();
  double uniform();
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 0.7071067811865476};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) noexcept;

/// Zeroth-order Bessel function of the first kind.
/// Power series for |x| <= 12, Hankel asymptotic expansion beyond.
double bessel_j0(double x);

/// Factor B (n x r) with B*B^H ~= M for a Hermitian positive semidefinite M.
/// Eigenvalues below rel_tol * lambda_max are dropped; an eigenvalue below
/// -rel_tol * lambda_max raises ErrorCode::NotPsd.
Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& m, double rel_tol = 1e-12);

Eigen::VectorXcd sample_cn(RngStream& stream, Eigen::Index n);

/// n x cols matrix of i.i.d. standard complex normals, filled column-major.
Eigen::MatrixXcd sample_cn_matrix(RngStream& stream, Eigen::Index rows, Eigen::Index cols);

}  // namespace fcmcrlb
