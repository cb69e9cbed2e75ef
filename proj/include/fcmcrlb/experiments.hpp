#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fcmcrlb {

enum class Experiment { EigFit, MseVsNt, BoundTightness, Histograms, SirScan };
enum class LinkMode { Model, Waveform };

std::string_view to_string(Experiment e);
std::string_view to_string(LinkMode m);
Experiment parse_experiment(std::string_view name);
LinkMode parse_mode(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::MseVsNt;
  std::string profile = "EVA";
  std::string profile_file;  // overrides `profile` when non-empty
  int n_tones = 128;
  int cp_len = 16;
  double sample_period_s = 0.8e-6;
  double f_d_hz = 200.0;
  double snr_db = 20.0;
  std::vector<long> n_t_list;
  long n_trials = 500;
  int n_pilot_seqs = 100;
  std::uint64_t master_seed = 1;
  LinkMode mode = LinkMode::Model;
  std::string out_path;

  // Experiment grids.
  std::vector<int> n_tones_list;    // eig-fit
  std::vector<double> fdts_list;    // eig-fit, sir-scan
  std::vector<double> snr_db_list;  // histograms
  std::vector<double> f_d_hz_list;  // histograms

  // Execution only; never changes results.
  unsigned workers = 1;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
  /// Switches the Monte Carlo experiments to N = 128, L_cp = 16.
  void apply_paper_scale();
};

/// Defaults for one experiment (desk-scale sizes for the Monte Carlo runs).
ExperimentConfig default_config(Experiment e);

/// JSON text -> config. Keys absent from the text keep the experiment's
/// defaults; unknown keys are errors. If `experiment` is given and the text
/// names a different one, that is an error too.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<Experiment> experiment = std::nullopt);
ExperimentConfig load_config(const std::string& path,
                             std::optional<Experiment> experiment = std::nullopt);
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a over the serialized config without execution-only fields.
std::uint64_t config_hash(const ExperimentConfig& cfg);

using Cell = std::variant<long, double, std::string>;

struct ResultTable {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;

  /// Leading "# ..." comment with the config hash, then header and rows.
  std::string to_csv() const;
};

struct EigFitRow {
  int n;
  double fdts;
  double lambda_numeric;
  double lambda_fit;
  double rel_dev;
};

struct EigFitResult {
  std::vector<EigFitRow> rows;
  double max_rel_dev = 0.0;
};

struct MseVsNtRow {
  long n_t;
  double avgmse_empirical;
  double avgmse_lb;
  double std_error;  // of avgmse_empirical
};

struct MseVsNtResult {
  LinkMode mode = LinkMode::Model;
  double omega = 0.0;
  std::vector<MseVsNtRow> rows;
};

struct BoundTightnessRow {
  long n_t;
  double avgmse_mean_over_pilots;
  double lb_pilot_free;
  double lb_insightful;
  double std_error;
  std::vector<double> per_pilot_avgmse_lb;
};

struct BoundTightnessResult {
  double lambda_max = 0.0;
  std::vector<double> pilot_omegas;
  std::vector<BoundTightnessRow> rows;
};

struct HistogramRow {
  double gamma_db;
  double f_d_hz;
  long trial;
  double avgmse;
  double signed_diag_err;
};

struct HistogramCell {
  double gamma_db;
  double f_d_hz;
  double mean_avgmse;
  double mean_signed_diag_err;
  double std_error_signed_diag_err;
};

struct HistogramResult {
  long n_t = 0;
  std::vector<HistogramRow> rows;
  std::vector<HistogramCell> cells;
};

struct SirScanRow {
  double fdts;
  double sir_db;  // +inf when interference vanishes
  long n_trials;
};

struct SirScanResult {
  std::vector<SirScanRow> rows;
};

EigFitResult run_eig_fit(const ExperimentConfig& cfg);
MseVsNtResult run_mse_vs_nt(const ExperimentConfig& cfg);
BoundTightnessResult run_bound_tightness(const ExperimentConfig& cfg);
HistogramResult run_histograms(const ExperimentConfig& cfg);
SirScanResult run_sir_scan(const ExperimentConfig& cfg);

/// SIR written to CSV when the interference power is zero.
inline constexpr double kSirCapDb = 300.0;

ResultTable to_table(const EigFitResult& r, const ExperimentConfig& cfg);
ResultTable to_table(const MseVsNtResult& r, const ExperimentConfig& cfg);
ResultTable to_table(const BoundTightnessResult& r, const ExperimentConfig& cfg);
ResultTable to_table(const HistogramResult& r, const ExperimentConfig& cfg);
ResultTable to_table(const SirScanResult& r, const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment.
ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace fcmcrlb
