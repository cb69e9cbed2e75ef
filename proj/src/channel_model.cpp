#include "fcmcrlb/channel_model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fcmcrlb/error.hpp"

namespace fcmcrlb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(sign * j 2 pi t / N) for t = 0..N-1.
std::vector<cplx> twiddles(int n, double sign) {
  std::vector<cplx> w(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) w[t] = std::polar(1.0, sign * kTwoPi * t / n);
  return w;
}

}  // namespace

void OfdmConfig::validate() const {
  require(n_tones >= 2, ErrorCode::InvalidArgument, "OfdmConfig: n_tones must be >= 2");
  require(cp_len >= 0, ErrorCode::InvalidArgument, "OfdmConfig: cp_len must be >= 0");
  require(sample_period_s > 0.0 && std::isfinite(sample_period_s), ErrorCode::InvalidArgument,
          "OfdmConfig: sample_period_s must be positive");
}

void DopplerSpec::validate(const OfdmConfig& cfg) const {
  require(f_d_hz >= 0.0 && std::isfinite(f_d_hz), ErrorCode::InvalidArgument,
          "DopplerSpec: f_d must be a nonnegative number");
  const double fdts = normalized(cfg);
  if (fdts > 0.35) {
    std::ostringstream msg;
    msg << "normalized Doppler f_d*T_s = " << fdts
        << " exceeds 0.35; the eigenvalue fit is not valid there";
    warn(msg.str());
  }
}

PathProfile make_profile(std::string name, const std::vector<double>& delays_ns,
                         const std::vector<double>& powers_db, const OfdmConfig& cfg) {
  cfg.validate();
  require(!delays_ns.empty(), ErrorCode::InvalidArgument, "profile: at least one path required");
  require(delays_ns.size() == powers_db.size(), ErrorCode::InvalidArgument,
          "profile: delays and powers differ in length");
  for (std::size_t l = 0; l < delays_ns.size(); ++l) {
    require(std::isfinite(delays_ns[l]) && std::isfinite(powers_db[l]),
            ErrorCode::InvalidArgument, "profile: non-finite entry");
    require(delays_ns[l] >= 0.0, ErrorCode::InvalidArgument, "profile: negative delay");
    if (l > 0) {
      require(delays_ns[l] > delays_ns[l - 1], ErrorCode::InvalidArgument,
              "profile: delays must be strictly increasing");
    }
  }

  PathProfile p;
  p.name = std::move(name);
  p.powers_db = powers_db;
  double total = 0.0;
  for (std::size_t l = 0; l < delays_ns.size(); ++l) {
    const double delay_s = delays_ns[l] * 1e-9;
    p.delays_s.push_back(delay_s);
    p.tau.push_back(delay_s / cfg.sample_period_s);
    const double lin = std::pow(10.0, powers_db[l] / 10.0);
    p.sigma2.push_back(lin);
    total += lin;
  }
  for (double& s : p.sigma2) s /= total;

  require(p.tau.back() <= cfg.cp_len, ErrorCode::Precondition,
          "profile '" + p.name + "': maximum delay of " + std::to_string(p.tau.back()) +
              " samples exceeds the cyclic prefix of " + std::to_string(cfg.cp_len));
  return p;
}

PathProfile builtin_profile(const std::string& name, const OfdmConfig& cfg) {
  if (name == "EVA") {
    return make_profile(name, {0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
                        {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9}, cfg);
  }
  if (name == "ETU") {
    return make_profile(name, {0, 50, 120, 200, 230, 500, 1600, 2300, 5000},
                        {-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0}, cfg);
  }
  fail(ErrorCode::InvalidArgument, "unknown channel profile '" + name + "'");
}

PathProfile load_profile(const std::string& path, const OfdmConfig& cfg) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open profile file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, "profile file " + path + ": " + e.what());
  }
  require(j.is_object(), ErrorCode::Config, "profile file " + path + ": expected an object");
  for (const auto& item : j.items()) {
    const auto& key = item.key();
    require(key == "name" || key == "delays_ns" || key == "powers_db", ErrorCode::Config,
            "profile file " + path + ": unknown key '" + key + "'");
  }
  try {
    return make_profile(j.at("name").get<std::string>(),
                        j.at("delays_ns").get<std::vector<double>>(),
                        j.at("powers_db").get<std::vector<double>>(), cfg);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, "profile file " + path + ": " + e.what());
  }
}

TimeCorrMatrix build_tcm(const OfdmConfig& cfg, const DopplerSpec& dop) {
  cfg.validate();
  dop.validate(cfg);
  const int n = cfg.n_tones;
  // Toeplitz: one J0 evaluation per lag.
  std::vector<double> lag(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) lag[d] = bessel_j0(kTwoPi * dop.f_d_hz * d * cfg.sample_period_s);
  TimeCorrMatrix tcm{Eigen::MatrixXd(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tcm.omega(i, j) = lag[std::abs(i - j)];
  return tcm;
}

double mean_diagonal_gain(const TimeCorrMatrix& tcm) {
  const auto n = static_cast<double>(tcm.omega.rows());
  return tcm.omega.sum() / (n * n);
}

DelayTransform build_delay_transform(const OfdmConfig& cfg, const PathProfile& prof) {
  const int n = cfg.n_tones;
  const auto l_paths = static_cast<Eigen::Index>(prof.paths());
  DelayTransform ft{Eigen::MatrixXcd(n, l_paths)};
  for (int k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < l_paths; ++l)
      ft.f_tau(k, l) = std::polar(1.0, -kTwoPi * k * prof.tau[l] / n);
  return ft;
}

TrueFcm build_true_fcm(const DelayTransform& ft, const PathProfile& prof) {
  require(ft.f_tau.cols() == static_cast<Eigen::Index>(prof.paths()),
          ErrorCode::DimensionMismatch, "build_true_fcm: path count mismatch");
  Eigen::VectorXd d(static_cast<Eigen::Index>(prof.paths()));
  for (std::size_t l = 0; l < prof.paths(); ++l) d(l) = prof.sigma2[l];
  const Eigen::MatrixXcd scaled = ft.f_tau * d.cast<cplx>().asDiagonal();
  Eigen::MatrixXcd r = scaled * ft.f_tau.adjoint();
  // Exact Hermitian symmetry and unit diagonal.
  r = (r + r.adjoint()).eval() / 2.0;
  const double diag = d.sum();
  for (Eigen::Index k = 0; k < r.rows(); ++k) r(k, k) = diag;
  return TrueFcm{std::move(r)};
}

CirSampler::CirSampler(const TimeCorrMatrix& tcm, const PathProfile& prof)
    : time_factor_(psd_factor(tcm.omega.cast<cplx>())),
      path_amplitude_(static_cast<Eigen::Index>(prof.paths())) {
  for (std::size_t l = 0; l < prof.paths(); ++l) path_amplitude_(l) = std::sqrt(prof.sigma2[l]);
}

CirMatrix CirSampler::sample(RngStream& stream) const {
  const Eigen::Index rank = time_factor_.cols();
  const Eigen::Index l_paths = path_amplitude_.size();
  const Eigen::MatrixXcd z = sample_cn_matrix(stream, rank, l_paths);
  CirMatrix cir{path_amplitude_.cast<cplx>().asDiagonal() *
                (time_factor_ * z).transpose()};
  return cir;
}

CirMatrix sample_cir(RngStream& stream, const TimeCorrMatrix& tcm, const PathProfile& prof) {
  return CirSampler(tcm, prof).sample(stream);
}

TransferMatrix build_transfer_matrix(const CirMatrix& cir, const DelayTransform& ft) {
  require(ft.f_tau.cols() == cir.h_t.rows(), ErrorCode::DimensionMismatch,
          "build_transfer_matrix: path count mismatch");
  require(ft.f_tau.rows() == cir.h_t.cols(), ErrorCode::DimensionMismatch,
          "build_transfer_matrix: tone count mismatch");
  const Eigen::Index n = ft.f_tau.rows();
  const Eigen::MatrixXcd g = ft.f_tau * cir.h_t;  // tone k x sample m

  const auto w = twiddles(static_cast<int>(n), -1.0);
  Eigen::MatrixXcd dft(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index v = 0; v < n; ++v) dft(m, v) = w[(m * v) % n] / static_cast<double>(n);
  const Eigen::MatrixXcd bands = g * dft;  // (k, Doppler index)

  TransferMatrix hf{Eigen::MatrixXcd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index v = 0; v < n; ++v) hf.h_f((k + v) % n, k) = bands(k, v);
  return hf;
}

Eigen::VectorXcd apply_transfer(const CirMatrix& cir, const DelayTransform& ft,
                                const Eigen::VectorXcd& x) {
  require(ft.f_tau.rows() == x.size() && cir.h_t.cols() == x.size() &&
              ft.f_tau.cols() == cir.h_t.rows(),
          ErrorCode::DimensionMismatch, "apply_transfer: dimension mismatch");
  const Eigen::Index n = x.size();
  const Eigen::MatrixXcd g = ft.f_tau * cir.h_t;
  const auto fwd = twiddles(static_cast<int>(n), -1.0);
  const auto inv = twiddles(static_cast<int>(n), 1.0);

  // y_j = (1/N) sum_m e^{-j2pi jm/N} sum_k G_{k,m} x_k e^{+j2pi km/N}
  Eigen::VectorXcd s(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    cplx acc{0.0, 0.0};
    for (Eigen::Index k = 0; k < n; ++k) acc += g(k, m) * x(k) * inv[(k * m) % n];
    s(m) = acc;
  }
  Eigen::VectorXcd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    cplx acc{0.0, 0.0};
    for (Eigen::Index m = 0; m < n; ++m) acc += s(m) * fwd[(j * m) % n];
    y(j) = acc / static_cast<double>(n);
  }
  return y;
}

double measure_sir(const OfdmConfig& cfg, const PathProfile& prof, const DopplerSpec& dop,
                   int n_trials, const RngStream& stream) {
  require(n_trials >= 1, ErrorCode::InvalidArgument, "measure_sir: n_trials must be positive");
  const TimeCorrMatrix tcm = build_tcm(cfg, dop);
  const DelayTransform ft = build_delay_transform(cfg, prof);
  const CirSampler sampler(tcm, prof);

  double signal = 0.0;
  double interference = 0.0;
  for (int t = 0; t < n_trials; ++t) {
    RngStream trial = stream.derive(static_cast<std::uint64_t>(t));
    const TransferMatrix hf = build_transfer_matrix(sampler.sample(trial), ft);
    const Eigen::Index n = hf.h_f.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        const double p = std::norm(hf.h_f(r, c));
        (r == c ? signal : interference) += p;
      }
    }
  }
  if (interference <= 1e-20 * signal) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / interference);
}

}  // namespace fcmcrlb
