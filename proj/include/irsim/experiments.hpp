#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irsim/analytic.hpp"
#include "irsim/channel.hpp"
#include "irsim/montecarlo.hpp"

namespace irsim {

enum class ExperimentKind { kOutageSweep, kGainRatio, kDiversityFit, kBoundsTable };
enum class SimScheme { kNoma, kOma, kFdrNoma };

// Key = value configuration mirroring the documented parameter names; see
// README for the full key list.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kOutageSweep;
  ScenarioParams<double> params;
  NomaConfig<double> noma;
  SimScheme scheme = SimScheme::kNoma;

  // Sweep axes: gain-ratio walks bit_sweep; outage kinds walk rho_db unless
  // element_sweep or bit_sweep is set (then rho_db must be a single point).
  std::vector<double> rho_db;
  std::vector<int> element_sweep;
  std::vector<int> bit_sweep;

  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  std::string out_path = "results.csv";
  GainPath path = GainPath::kFull;
  FdrParams fdr;
  std::optional<std::pair<double, double>> fit_window_db;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// One line of the fixed-schema results file; empty optionals serialize as
// blanks. `resolution` holds the bit count or the word "continuous".
struct CsvRow {
  std::string experiment;
  int scenario = 1;
  std::string scheme;
  std::optional<int> user;
  std::optional<double> rho_db;
  std::string resolution;
  int num_elements = 0;
  int num_users = 0;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> failures;
  std::optional<double> p_hat;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> analytic_upper;
  std::optional<double> analytic_lower;
  std::optional<double> diversity;

  bool operator==(const CsvRow&) const = default;
};

inline constexpr const char* kCsvHeader =
    "experiment,scenario,scheme,user,rho_db,b,K,N,trials,failures,p_hat,"
    "ci_low,ci_high,analytic_upper,analytic_lower,diversity";

std::string to_csv_line(const CsvRow& row);
CsvRow parse_csv_line(const std::string& line);
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);
std::vector<CsvRow> read_csv(const std::string& path);

// Least-squares slope of log10(p_hat) against rho_db/10; reported positive,
// so a p ~ rho^-d power law fits to slope d.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_low_db = 0.0;
  double window_high_db = 0.0;
  int points_used = 0;
};

// Rows must belong to one user. Points need p_hat > 0 and at least 20
// failures; without an explicit window the fit keeps 1e-5 < p_hat < 1e-2,
// the range where the high-SNR asymptote is informative but estimable.
SlopeFit fit_diversity(const std::vector<CsvRow>& user_rows,
                       std::optional<std::pair<double, double>> window_db = {});

struct RunSummary {
  std::vector<CsvRow> rows;
  std::vector<std::pair<int, SlopeFit>> fits;  // user -> fit (diversity-fit runs)
  std::vector<std::string> notes;
};

// Executes the configured experiment, writes the CSV (deterministic bytes for
// a fixed seed and config), and returns everything that was written.
RunSummary run_experiment(const ExperimentConfig& config);

std::string to_string(ExperimentKind kind);
std::string to_string(SimScheme scheme);

}  // namespace irsim
