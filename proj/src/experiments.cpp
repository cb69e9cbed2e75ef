#include "fcmcrlb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "fcmcrlb/bounds.hpp"
#include "fcmcrlb/channel_model.hpp"
#include "fcmcrlb/error.hpp"
#include "fcmcrlb/estimation.hpp"
#include "fcmcrlb/ofdm_link.hpp"

namespace fcmcrlb {

namespace {

// Stream ids by purpose; trial streams are derived from these.
constexpr std::uint64_t kPilotStream = 1;
constexpr std::uint64_t kTrialStream = 2;
constexpr std::uint64_t kHistogramStream = 3;
constexpr std::uint64_t kSirStream = 4;

/// Runs fn(i) for i in [0, count). Each index is independent, so the
/// outcome does not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sequential reduction in index order keeps sums bit-identical.
MeanAndError summarize(const std::vector<double>& v) {
  MeanAndError out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) /
                              static_cast<double>(v.size()));
  }
  return out;
}

OfdmConfig ofdm_from(const ExperimentConfig& cfg) {
  OfdmConfig o{cfg.n_tones, cfg.cp_len, cfg.sample_period_s};
  o.validate();
  return o;
}

PathProfile profile_from(const ExperimentConfig& cfg, const OfdmConfig& ofdm) {
  return cfg.profile_file.empty() ? builtin_profile(cfg.profile, ofdm)
                                  : load_profile(cfg.profile_file, ofdm);
}

/// Everything one estimation trial needs for a fixed pilot, SNR and Doppler.
struct TrialContext {
  LinkMode mode = LinkMode::Model;
  PilotSequence pilots;
  TimeCorrMatrix tcm;
  const DelayTransform* ft = nullptr;
  const TrueFcm* truth = nullptr;
  double sigma_n2 = 0.0;
  double omega = 0.0;
  double diag_gain = 0.0;
  std::optional<LsModelSampler> model;
  std::optional<CirSampler> waveform;
};

TrialContext make_context(LinkMode mode, const PilotSequence& pilots, const TimeCorrMatrix& tcm,
                          const PathProfile& prof, const DelayTransform& ft,
                          const TrueFcm& truth, double sigma_n2) {
  TrialContext c;
  c.mode = mode;
  c.pilots = pilots;
  c.tcm = tcm;
  c.ft = &ft;
  c.truth = &truth;
  c.sigma_n2 = sigma_n2;
  c.omega = pilot_omega(pilots, tcm);
  c.diag_gain = mean_diagonal_gain(tcm);
  if (mode == LinkMode::Model) {
    c.model.emplace(ls_covariance(truth, pilots, tcm, sigma_n2, 1).sigma);
  } else {
    c.waveform.emplace(tcm, prof);
  }
  return c;
}

FcmEstimate estimate_once(const TrialContext& c, RngStream& stream, long n_t) {
  SfcmAccumulator acc(c.pilots.size());
  if (c.mode == LinkMode::Model) {
    acc.accumulate_block(c.model->sample_block(stream, n_t));
    return mle_fcm(acc.finalize(), c.pilots, c.tcm, c.sigma_n2);
  }
  for (long s = 0; s < n_t; ++s) {
    const CirMatrix cir = c.waveform->sample(stream);
    acc.accumulate(ls_estimate(simulate_pilot_rx(cir, *c.ft, c.pilots, c.sigma_n2, stream),
                               c.pilots));
  }
  return waveform_fcm_estimate(acc.finalize(), c.diag_gain, c.sigma_n2);
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::string cell_text(const Cell& c) {
  std::string s;
  if (const auto* i = std::get_if<long>(&c)) {
    s = std::to_string(*i);
  } else if (const auto* d = std::get_if<double>(&c)) {
    append_number(s, *d);
  } else {
    s = std::get<std::string>(c);
  }
  return s;
}

ResultTable make_table(const ExperimentConfig& cfg, std::vector<std::string> columns) {
  ResultTable t;
  t.experiment = std::string(to_string(cfg.experiment));
  t.columns = std::move(columns);
  t.master_seed = cfg.master_seed;
  t.config_hash = config_hash(cfg);
  return t;
}

}  // namespace

std::string ResultTable::to_csv() const {
  std::string out;
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash));
  out += "# fcm-crlb experiment=" + experiment + " config_hash=" + hash +
         " master_seed=" + std::to_string(master_seed) + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_text(row[c]);
    }
    out += '\n';
  }
  return out;
}

EigFitResult run_eig_fit(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Point {
    int n;
    double fdts;
  };
  std::vector<Point> grid;
  for (int n : cfg.n_tones_list)
    for (double f : cfg.fdts_list) grid.push_back({n, f});

  EigFitResult out;
  out.rows.resize(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    const auto [n, fdts] = grid[i];
    // Keep the reference system's CP fraction at every size.
    const int cp = static_cast<int>(std::lround(static_cast<double>(n) * cfg.cp_len / cfg.n_tones));
    const OfdmConfig ofdm{n, cp, cfg.sample_period_s};
    const DopplerSpec dop{fdts / ofdm.symbol_duration_s()};
    const double numeric = lambda_max_numeric(build_tcm(ofdm, dop));
    const double fit = lambda_max_fit(n, fdts);
    out.rows[i] = {n, fdts, numeric, fit, std::fabs(numeric - fit) / numeric};
  });
  for (const auto& r : out.rows) out.max_rel_dev = std::max(out.max_rel_dev, r.rel_dev);
  return out;
}

MseVsNtResult run_mse_vs_nt(const ExperimentConfig& cfg) {
  cfg.validate();
  const OfdmConfig ofdm = ofdm_from(cfg);
  const PathProfile prof = profile_from(cfg, ofdm);
  const DopplerSpec dop{cfg.f_d_hz};
  const NoiseSpec noise{cfg.snr_db};
  const TimeCorrMatrix tcm = build_tcm(ofdm, dop);
  const DelayTransform ft = build_delay_transform(ofdm, prof);
  const TrueFcm truth = build_true_fcm(ft, prof);
  RngStream pilot_stream = RngStream(cfg.master_seed, kPilotStream).derive(0);
  const PilotSequence pilots = generate_qpsk_pilots(pilot_stream, ofdm.n_tones);
  const TrialContext ctx =
      make_context(cfg.mode, pilots, tcm, prof, ft, truth, noise.sigma_n2());

  const std::size_t n_nt = cfg.n_t_list.size();
  const auto trials = static_cast<std::size_t>(cfg.n_trials);
  std::vector<double> mse(n_nt * trials);
  parallel_for(mse.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t a = idx / trials;
    const std::size_t t = idx % trials;
    RngStream s = RngStream(cfg.master_seed, kTrialStream).derive(a).derive(t);
    mse[idx] = avg_mse(estimate_once(ctx, s, cfg.n_t_list[a]), truth);
  });

  MseVsNtResult out;
  out.mode = cfg.mode;
  out.omega = ctx.omega;
  for (std::size_t a = 0; a < n_nt; ++a) {
    const std::vector<double> slice(mse.begin() + static_cast<long>(a * trials),
                                    mse.begin() + static_cast<long>((a + 1) * trials));
    const MeanAndError s = summarize(slice);
    const long n_t = cfg.n_t_list[a];
    const double lb = avgmse_lb(make_crlb_factor(truth, ctx.omega, noise.sigma_n2(), n_t));
    out.rows.push_back({n_t, s.mean, lb, s.std_error});
  }
  return out;
}

BoundTightnessResult run_bound_tightness(const ExperimentConfig& cfg) {
  cfg.validate();
  const OfdmConfig ofdm = ofdm_from(cfg);
  const PathProfile prof = profile_from(cfg, ofdm);
  const DopplerSpec dop{cfg.f_d_hz};
  const NoiseSpec noise{cfg.snr_db};
  const TimeCorrMatrix tcm = build_tcm(ofdm, dop);
  const DelayTransform ft = build_delay_transform(ofdm, prof);
  const TrueFcm truth = build_true_fcm(ft, prof);

  const auto n_pilots = static_cast<std::size_t>(cfg.n_pilot_seqs);
  std::vector<TrialContext> contexts;
  contexts.reserve(n_pilots);
  const RngStream pilot_root(cfg.master_seed, kPilotStream);
  for (std::size_t p = 0; p < n_pilots; ++p) {
    RngStream ps = pilot_root.derive(p);
    contexts.push_back(make_context(cfg.mode, generate_qpsk_pilots(ps, ofdm.n_tones), tcm,
                                    prof, ft, truth, noise.sigma_n2()));
  }

  const std::size_t n_nt = cfg.n_t_list.size();
  const auto trials = static_cast<std::size_t>(cfg.n_trials);
  const std::size_t per_nt = n_pilots * trials;
  std::vector<double> mse(n_nt * per_nt);
  parallel_for(mse.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t a = idx / per_nt;
    const std::size_t p = (idx % per_nt) / trials;
    const std::size_t t = idx % trials;
    RngStream s = RngStream(cfg.master_seed, kTrialStream).derive(a).derive(p).derive(t);
    mse[idx] = avg_mse(estimate_once(contexts[p], s, cfg.n_t_list[a]), truth);
  });

  BoundTightnessResult out;
  out.lambda_max = lambda_max_numeric(tcm);
  for (const auto& c : contexts) out.pilot_omegas.push_back(c.omega);
  const double fdts = dop.normalized(ofdm);
  for (std::size_t a = 0; a < n_nt; ++a) {
    const std::vector<double> slice(mse.begin() + static_cast<long>(a * per_nt),
                                    mse.begin() + static_cast<long>((a + 1) * per_nt));
    const MeanAndError s = summarize(slice);
    const long n_t = cfg.n_t_list[a];
    BoundTightnessRow row{n_t,
                          s.mean,
                          avgmse_lb_pilot_free(ofdm.n_tones, n_t, noise.gamma(), out.lambda_max),
                          avgmse_lb_insightful(ofdm.n_tones, n_t, noise.gamma(), fdts),
                          s.std_error,
                          {}};
    for (const auto& c : contexts)
      row.per_pilot_avgmse_lb.push_back(
          avgmse_lb(make_crlb_factor(truth, c.omega, noise.sigma_n2(), n_t)));
    out.rows.push_back(std::move(row));
  }
  return out;
}

HistogramResult run_histograms(const ExperimentConfig& cfg) {
  cfg.validate();
  const OfdmConfig ofdm = ofdm_from(cfg);
  const PathProfile prof = profile_from(cfg, ofdm);
  const DelayTransform ft = build_delay_transform(ofdm, prof);
  const TrueFcm truth = build_true_fcm(ft, prof);
  const long n_t = cfg.n_t_list.front();

  struct CellSpec {
    double snr_db;
    double f_d_hz;
    TimeCorrMatrix tcm;
  };
  std::vector<CellSpec> cells;
  for (double snr : cfg.snr_db_list)
    for (double fd : cfg.f_d_hz_list) cells.push_back({snr, fd, build_tcm(ofdm, DopplerSpec{fd})});

  // One pilot sequence per run, as in mse-vs-nt.
  RngStream pilot_stream = RngStream(cfg.master_seed, kPilotStream).derive(0);
  const PilotSequence pilots = generate_qpsk_pilots(pilot_stream, ofdm.n_tones);
  std::vector<TrialContext> contexts;
  contexts.reserve(cells.size());
  for (const CellSpec& cell : cells)
    contexts.push_back(make_context(cfg.mode, pilots, cell.tcm, prof, ft, truth,
                                    NoiseSpec{cell.snr_db}.sigma_n2()));

  const auto trials = static_cast<std::size_t>(cfg.n_trials);
  HistogramResult out;
  out.n_t = n_t;
  out.rows.resize(cells.size() * trials);
  // Trial t replays the same Gaussian draws in every cell (common random
  // numbers), so cell-to-cell differences isolate the effect of SNR and
  // Doppler.
  parallel_for(out.rows.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t c = idx / trials;
    const std::size_t t = idx % trials;
    RngStream stream = RngStream(cfg.master_seed, kHistogramStream).derive(t);
    const FcmEstimate est = estimate_once(contexts[c], stream, n_t);
    out.rows[idx] = {cells[c].snr_db, cells[c].f_d_hz, static_cast<long>(t), avg_mse(est, truth),
                     signed_diag_error(est, truth)};
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> mse(trials);
    std::vector<double> sde(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      mse[t] = out.rows[c * trials + t].avgmse;
      sde[t] = out.rows[c * trials + t].signed_diag_err;
    }
    const MeanAndError m = summarize(mse);
    const MeanAndError d = summarize(sde);
    out.cells.push_back({cells[c].snr_db, cells[c].f_d_hz, m.mean, d.mean, d.std_error});
  }
  return out;
}

SirScanResult run_sir_scan(const ExperimentConfig& cfg) {
  cfg.validate();
  const OfdmConfig ofdm = ofdm_from(cfg);
  const PathProfile prof = profile_from(cfg, ofdm);
  SirScanResult out;
  out.rows.resize(cfg.fdts_list.size());
  parallel_for(out.rows.size(), cfg.workers, [&](std::size_t i) {
    const double fdts = cfg.fdts_list[i];
    const DopplerSpec dop{fdts / ofdm.symbol_duration_s()};
    const double sir = measure_sir(ofdm, prof, dop, static_cast<int>(cfg.n_trials),
                                   RngStream(cfg.master_seed, kSirStream).derive(i));
    out.rows[i] = {fdts, sir, cfg.n_trials};
  });
  return out;
}

ResultTable to_table(const EigFitResult& r, const ExperimentConfig& cfg) {
  ResultTable t = make_table(cfg, {"N", "fdts", "lambda_numeric", "lambda_fit", "rel_dev"});
  for (const auto& row : r.rows)
    t.rows.push_back({static_cast<long>(row.n), row.fdts, row.lambda_numeric, row.lambda_fit,
                      row.rel_dev});
  return t;
}

ResultTable to_table(const MseVsNtResult& r, const ExperimentConfig& cfg) {
  ResultTable t = make_table(cfg, {"N_t", "avgmse_empirical", "avgmse_lb", "mode"});
  for (const auto& row : r.rows)
    t.rows.push_back({row.n_t, row.avgmse_empirical, row.avgmse_lb, std::string(to_string(r.mode))});
  return t;
}

ResultTable to_table(const BoundTightnessResult& r, const ExperimentConfig& cfg) {
  ResultTable t =
      make_table(cfg, {"N_t", "avgmse_mean_over_pilots", "lb_pilot_free", "lb_insightful"});
  for (const auto& row : r.rows)
    t.rows.push_back({row.n_t, row.avgmse_mean_over_pilots, row.lb_pilot_free, row.lb_insightful});
  return t;
}

ResultTable to_table(const HistogramResult& r, const ExperimentConfig& cfg) {
  ResultTable t = make_table(cfg, {"gamma_db", "f_d_hz", "trial", "avgmse", "signed_diag_err"});
  t.rows.reserve(r.rows.size());
  for (const auto& row : r.rows)
    t.rows.push_back({row.gamma_db, row.f_d_hz, row.trial, row.avgmse, row.signed_diag_err});
  return t;
}

ResultTable to_table(const SirScanResult& r, const ExperimentConfig& cfg) {
  ResultTable t = make_table(cfg, {"fdts", "sir_db", "n_trials"});
  for (const auto& row : r.rows)
    t.rows.push_back({row.fdts, std::isinf(row.sir_db) ? kSirCapDb : row.sir_db, row.n_trials});
  return t;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::EigFit:
      return to_table(run_eig_fit(cfg), cfg);
    case Experiment::MseVsNt:
      return to_table(run_mse_vs_nt(cfg), cfg);
    case Experiment::BoundTightness:
      return to_table(run_bound_tightness(cfg), cfg);
    case Experiment::Histograms:
      return to_table(run_histograms(cfg), cfg);
    case Experiment::SirScan:
      return to_table(run_sir_scan(cfg), cfg);
  }
  fail(ErrorCode::Internal, "unhandled experiment");
}

}  // namespace fcmcrlb
