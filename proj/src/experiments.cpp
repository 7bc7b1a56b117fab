#include "irsim/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace irsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': cannot parse number '" + t + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': cannot parse integer '" + t + "'");
  }
  return value;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item, key));
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    out.push_back(static_cast<int>(parse_int(item, key)));
  }
  return out;
}

ArrayX<double> to_array(const std::vector<double>& v) {
  ArrayX<double> out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// Default power allocations for the small group sizes used throughout.
ArrayX<double> default_power_fractions(int users) {
  switch (users) {
    case 1: return to_array({1.0});
    case 2: return to_array({0.9, 0.1});
    case 3: return to_array({0.7, 0.2, 0.1});
    case 4: return to_array({0.6, 0.25, 0.1, 0.05});
    default:
      throw ConfigError("no default power fractions for N = " + std::to_string(users) +
                        "; set 'alpha' explicitly");
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

std::string format_optional(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "";
}

std::string format_optional(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : "";
}

template <typename T>
std::optional<T> parse_optional(const std::string& field);

template <>
std::optional<double> parse_optional<double>(const std::string& field) {
  if (field.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw IoError("csv: cannot parse number '" + field + "'");
  }
  return value;
}

template <>
std::optional<int> parse_optional<int>(const std::string& field) {
  if (field.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw IoError("csv: cannot parse integer '" + field + "'");
  }
  return value;
}

template <>
std::optional<std::uint64_t> parse_optional<std::uint64_t>(const std::string& field) {
  if (field.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw IoError("csv: cannot parse integer '" + field + "'");
  }
  return value;
}

std::string resolution_label(const PhaseResolution& r) {
  return r.is_continuous() ? "continuous" : std::to_string(r.bit_count());
}

void require_strictly_increasing(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw ConfigError(std::string(name) + " must be non-empty");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ConfigError(std::string(name) + " must be strictly increasing");
    }
  }
}

void require_strictly_increasing(const std::vector<int>& axis, const char* name) {
  if (axis.empty()) throw ConfigError(std::string(name) + " must be non-empty");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ConfigError(std::string(name) + " must be strictly increasing");
    }
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kOutageSweep: return "outage-sweep";
    case ExperimentKind::kGainRatio: return "gain-ratio";
    case ExperimentKind::kDiversityFit: return "diversity-fit";
    case ExperimentKind::kBoundsTable: return "bounds-table";
  }
  return "?";
}

std::string to_string(SimScheme scheme) {
  switch (scheme) {
    case SimScheme::kNoma: return "noma";
    case SimScheme::kOma: return "oma";
    case SimScheme::kFdrNoma: return "fdr-noma";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  params.validate();
  noma.validate();
  fdr.validate();
  if (noma.num_users() != params.num_users) {
    throw ConfigError("alpha/rate lists must have N entries");
  }
  if (out_path.empty()) throw ConfigError("output path must be set");
  if (!element_sweep.empty() && !bit_sweep.empty() &&
      kind != ExperimentKind::kGainRatio) {
    throw ConfigError("set at most one of K_list and b_list");
  }

  switch (kind) {
    case ExperimentKind::kGainRatio:
      require_strictly_increasing(bit_sweep, "b_list");
      if (bit_sweep.front() < 1) throw ConfigError("b_list entries must be >= 1");
      if (trials < 1) throw ConfigError("trials must be >= 1");
      break;
    case ExperimentKind::kOutageSweep:
    case ExperimentKind::kDiversityFit:
      if (trials < 10'000) {
        throw ConfigError("outage experiments need trials >= 10000");
      }
      if (!element_sweep.empty() || !bit_sweep.empty()) {
        if (kind == ExperimentKind::kDiversityFit) {
          throw ConfigError("diversity-fit sweeps rho_db only");
        }
        if (rho_db.size() != 1) {
          throw ConfigError("K/b sweeps need a single rho_db value");
        }
        if (!element_sweep.empty()) {
          require_strictly_increasing(element_sweep, "K_list");
          if (element_sweep.front() < 1) throw ConfigError("K_list entries must be >= 1");
        } else {
          require_strictly_increasing(bit_sweep, "b_list");
          if (bit_sweep.front() < 1) throw ConfigError("b_list entries must be >= 1");
        }
      } else {
        require_strictly_increasing(rho_db, "rho_db");
      }
      break;
    case ExperimentKind::kBoundsTable:
      require_strictly_increasing(rho_db, "rho_db");
      if (!element_sweep.empty() || !bit_sweep.empty()) {
        throw ConfigError("bounds-table sweeps rho_db only");
      }
      break;
  }
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("duplicate key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  cfg.params.num_users = 2;
  cfg.params.num_elements = 2;
  cfg.params.resolution = PhaseResolution::bits(3);
  cfg.params.reflection_amplitude = 0.9;
  cfg.params.bs_irs = {2.0, 1.0};
  cfg.params.irs_ud = {1.0, 1.0};
  cfg.params.direct = {1.0, 1.0};

  auto take = [&kv](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string value = it->second;
    kv.erase(it);
    return value;
  };

  if (auto v = take("experiment")) {
    if (*v == "outage-sweep") cfg.kind = ExperimentKind::kOutageSweep;
    else if (*v == "gain-ratio") cfg.kind = ExperimentKind::kGainRatio;
    else if (*v == "diversity-fit") cfg.kind = ExperimentKind::kDiversityFit;
    else if (*v == "bounds-table") cfg.kind = ExperimentKind::kBoundsTable;
    else throw ConfigError("unknown experiment '" + *v + "'");
  } else {
    throw ConfigError("missing required key 'experiment'");
  }

  if (auto v = take("scenario")) {
    const auto s = parse_int(*v, "scenario");
    if (s == 1) cfg.params.scenario = Scenario::kNoDirectLink;
    else if (s == 2) cfg.params.scenario = Scenario::kWithDirectLink;
    else throw ConfigError("scenario must be 1 or 2");
  }
  if (auto v = take("scheme")) {
    if (*v == "noma") cfg.scheme = SimScheme::kNoma;
    else if (*v == "oma") cfg.scheme = SimScheme::kOma;
    else if (*v == "fdr-noma") cfg.scheme = SimScheme::kFdrNoma;
    else throw ConfigError("unknown scheme '" + *v + "'");
  }
  if (auto v = take("N")) cfg.params.num_users = static_cast<int>(parse_int(*v, "N"));
  if (auto v = take("K")) cfg.params.num_elements = static_cast<int>(parse_int(*v, "K"));
  if (auto v = take("b")) {
    if (*v == "continuous") cfg.params.resolution = PhaseResolution::continuous();
    else cfg.params.resolution = PhaseResolution::bits(static_cast<int>(parse_int(*v, "b")));
  }
  if (auto v = take("beta")) cfg.params.reflection_amplitude = parse_double(*v, "beta");
  if (auto v = take("m_G")) cfg.params.bs_irs.m = parse_double(*v, "m_G");
  if (auto v = take("m_g")) cfg.params.irs_ud.m = parse_double(*v, "m_g");
  if (auto v = take("m_h")) cfg.params.direct.m = parse_double(*v, "m_h");
  if (auto v = take("omega_G")) cfg.params.bs_irs.omega = parse_double(*v, "omega_G");
  if (auto v = take("omega_g")) cfg.params.irs_ud.omega = parse_double(*v, "omega_g");
  if (auto v = take("omega_h")) cfg.params.direct.omega = parse_double(*v, "omega_h");
  if (auto v = take("theta_tilde")) {
    cfg.params.alignment_phase = parse_double(*v, "theta_tilde");
  }

  if (auto v = take("alpha")) {
    cfg.noma.power_fractions = to_array(parse_double_list(*v, "alpha"));
  } else {
    cfg.noma.power_fractions = default_power_fractions(cfg.params.num_users);
  }
  if (auto v = take("rate")) {
    auto rates = parse_double_list(*v, "rate");
    if (rates.size() == 1) {
      cfg.noma.target_rates =
          ArrayX<double>::Constant(cfg.noma.power_fractions.size(), rates[0]);
    } else {
      cfg.noma.target_rates = to_array(rates);
    }
  } else {
    cfg.noma.target_rates = ArrayX<double>::Constant(cfg.noma.power_fractions.size(), 1.0);
  }

  if (auto v = take("rho_db")) cfg.rho_db = parse_double_list(*v, "rho_db");
  if (auto v = take("b_list")) cfg.bit_sweep = parse_int_list(*v, "b_list");
  if (auto v = take("K_list")) cfg.element_sweep = parse_int_list(*v, "K_list");
  if (auto v = take("trials")) {
    const auto t = parse_int(*v, "trials");
    if (t < 1) throw ConfigError("trials must be >= 1");
    cfg.trials = static_cast<std::uint64_t>(t);
  }
  if (auto v = take("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int(*v, "seed"));
  if (auto v = take("out")) cfg.out_path = *v;
  if (auto v = take("gain_path")) {
    if (*v == "exact") cfg.path = GainPath::kFull;
    else if (*v == "residual") cfg.path = GainPath::kResidual;
    else throw ConfigError("gain_path must be 'exact' or 'residual'");
  }
  if (auto v = take("window_db")) {
    const auto w = parse_double_list(*v, "window_db");
    if (w.size() != 2 || !(w[0] < w[1])) {
      throw ConfigError("window_db needs 'low,high' with low < high");
    }
    cfg.fit_window_db = std::make_pair(w[0], w[1]);
  }
  if (auto v = take("fdr_split")) cfg.fdr.power_split = parse_double(*v, "fdr_split");
  if (auto v = take("fdr_si")) {
    if (*v == "off") cfg.fdr.self_interference.reset();
    else if (*v != "on") throw ConfigError("fdr_si must be 'on' or 'off'");
  }
  if (auto v = take("fdr_m_SI")) {
    if (!cfg.fdr.self_interference) cfg.fdr.self_interference = FadingParam<double>{1.0, 0.01};
    cfg.fdr.self_interference->m = parse_double(*v, "fdr_m_SI");
  }
  if (auto v = take("fdr_omega_SI")) {
    if (!cfg.fdr.self_interference) cfg.fdr.self_interference = FadingParam<double>{1.0, 0.01};
    cfg.fdr.self_interference->omega = parse_double(*v, "fdr_omega_SI");
  }
  if (auto v = take("fdr_m_BR")) cfg.fdr.bs_relay.m = parse_double(*v, "fdr_m_BR");
  if (auto v = take("fdr_omega_BR")) cfg.fdr.bs_relay.omega = parse_double(*v, "fdr_omega_BR");
  if (auto v = take("fdr_m_RU")) cfg.fdr.relay_ud.m = parse_double(*v, "fdr_m_RU");
  if (auto v = take("fdr_omega_RU")) cfg.fdr.relay_ud.omega = parse_double(*v, "fdr_omega_RU");

  if (!kv.empty()) {
    throw ConfigError("unknown key '" + kv.begin()->first + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_csv_line(const CsvRow& r) {
  std::string line;
  line += r.experiment;
  line += ',';
  line += std::to_string(r.scenario);
  line += ',';
  line += r.scheme;
  line += ',';
  line += format_optional(r.user);
  line += ',';
  line += format_optional(r.rho_db);
  line += ',';
  line += r.resolution;
  line += ',';
  line += std::to_string(r.num_elements);
  line += ',';
  line += std::to_string(r.num_users);
  line += ',';
  line += format_optional(r.trials);
  line += ',';
  line += format_optional(r.failures);
  line += ',';
  line += format_optional(r.p_hat);
  line += ',';
  line += format_optional(r.ci_low);
  line += ',';
  line += format_optional(r.ci_high);
  line += ',';
  line += format_optional(r.analytic_upper);
  line += ',';
  line += format_optional(r.analytic_lower);
  line += ',';
  line += format_optional(r.diversity);
  return line;
}

CsvRow parse_csv_line(const std::string& line) {
  const auto fields = split(line, ',');
  if (fields.size() != 16) {
    throw IoError("csv: expected 16 fields, got " + std::to_string(fields.size()));
  }
  CsvRow r;
  r.experiment = fields[0];
  r.scenario = static_cast<int>(parse_int(fields[1], "scenario"));
  r.scheme = fields[2];
  r.user = parse_optional<int>(fields[3]);
  r.rho_db = parse_optional<double>(fields[4]);
  r.resolution = fields[5];
  r.num_elements = static_cast<int>(parse_int(fields[6], "K"));
  r.num_users = static_cast<int>(parse_int(fields[7], "N"));
  r.trials = parse_optional<std::uint64_t>(fields[8]);
  r.failures = parse_optional<std::uint64_t>(fields[9]);
  r.p_hat = parse_optional<double>(fields[10]);
  r.ci_low = parse_optional<double>(fields[11]);
  r.ci_high = parse_optional<double>(fields[12]);
  r.analytic_upper = parse_optional<double>(fields[13]);
  r.analytic_lower = parse_optional<double>(fields[14]);
  r.diversity = parse_optional<double>(fields[15]);
  return r;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << to_csv_line(row) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw IoError("unexpected csv header in '" + path + "'");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_csv_line(line));
  }
  return rows;
}

SlopeFit fit_diversity(const std::vector<CsvRow>& user_rows,
                       std::optional<std::pair<double, double>> window_db) {
  std::vector<std::pair<double, double>> points;  // (rho_db/10, log10 p)
  double low = 0.0, high = 0.0;
  for (const auto& row : user_rows) {
    if (!row.p_hat || !row.rho_db || !row.failures) continue;
    if (*row.p_hat <= 0.0 || *row.failures < kMinFailures) continue;
    if (window_db) {
      if (*row.rho_db < window_db->first || *row.rho_db > window_db->second) continue;
    } else {
      if (*row.p_hat <= 1e-5 || *row.p_hat >= 1e-2) continue;
    }
    if (points.empty()) {
      low = high = *row.rho_db;
    } else {
      low = std::min(low, *row.rho_db);
      high = std::max(high, *row.rho_db);
    }
    points.emplace_back(*row.rho_db / 10.0, std::log10(*row.p_hat));
  }
  if (points.size() < 3) {
    throw InsufficientDataError("slope fit needs >= 3 usable points, got " +
                                std::to_string(points.size()));
  }

  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InsufficientDataError("slope fit needs spread in rho_db");
  const double b = (n * sxy - sx * sy) / denom;
  const double a = (sy - b * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : points) {
    const double fitted = a + b * x;
    ss_res += (y - fitted) * (y - fitted);
    ss_tot += (y - mean_y) * (y - mean_y);
  }

  SlopeFit fit;
  fit.slope = -b;
  fit.intercept = a;
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  fit.window_low_db = low;
  fit.window_high_db = high;
  fit.points_used = static_cast<int>(points.size());
  return fit;
}

namespace {

struct SweepPoint {
  ScenarioParams<double> params;
  double rho_db = 0.0;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  if (!cfg.element_sweep.empty()) {
    for (const int k : cfg.element_sweep) {
      SweepPoint p{cfg.params, cfg.rho_db.front()};
      p.params.num_elements = k;
      points.push_back(p);
    }
  } else if (!cfg.bit_sweep.empty() && cfg.kind != ExperimentKind::kGainRatio) {
    for (const int b : cfg.bit_sweep) {
      SweepPoint p{cfg.params, cfg.rho_db.front()};
      p.params.resolution = PhaseResolution::bits(b);
      points.push_back(p);
    }
  } else {
    for (const double rho : cfg.rho_db) points.push_back({cfg.params, rho});
  }
  return points;
}

void run_outage_kind(const ExperimentConfig& cfg, RunSummary& summary) {
  bool noted_analytic = false;
  const auto points = sweep_points(cfg);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& point = points[i];
    const double snr = std::pow(10.0, point.rho_db / 10.0);

    std::vector<std::optional<double>> upper(point.params.num_users);
    std::vector<std::optional<double>> lower(point.params.num_users);
    std::vector<std::optional<double>> diversity(point.params.num_users);
    if (cfg.scheme != SimScheme::kFdrNoma) {
      const MultipleAccess access = cfg.scheme == SimScheme::kNoma
                                        ? MultipleAccess::kNoma
                                        : MultipleAccess::kOma;
      for (int u = 0; u < point.params.num_users; ++u) {
        diversity[u] =
            diversity_order(access, point.params.scenario, u + 1, point.params);
      }
      try {
        if (cfg.scheme == SimScheme::kNoma) {
          const auto thresholds = noma_thresholds(cfg.noma, snr);
          for (int u = 0; u < point.params.num_users; ++u) {
            const auto bounds = outage_bounds_noma(u + 1, point.params, thresholds);
            upper[u] = bounds.upper;
            lower[u] = bounds.lower;
          }
        } else {
          const auto bounds =
              outage_bounds_oma(point.params, cfg.noma.target_rates[0], snr);
          for (int u = 0; u < point.params.num_users; ++u) {
            upper[u] = bounds.upper;
            lower[u] = bounds.lower;
          }
        }
      } catch (const UnsupportedParametersError& err) {
        if (!noted_analytic) {
          summary.notes.push_back(std::string("analytic bounds unavailable (") +
                                  err.code() + "): " + err.what());
          noted_analytic = true;
        }
      }
    } else if (!noted_analytic) {
      summary.notes.push_back(
          "analytic bounds unavailable (unsupported-parameters): no closed form "
          "for fdr-noma");
      noted_analytic = true;
    }

    MonteCarloOptions opts;
    opts.seed = cfg.seed;
    opts.stream_block = i;
    opts.path = cfg.path;
    std::vector<OutageEstimate> estimates;
    if (cfg.scheme == SimScheme::kFdrNoma) {
      estimates = estimate_outage_fdr(point.params, cfg.noma, cfg.fdr, snr,
                                      cfg.trials, opts);
    } else {
      const MultipleAccess access = cfg.scheme == SimScheme::kNoma
                                        ? MultipleAccess::kNoma
                                        : MultipleAccess::kOma;
      estimates = estimate_outage(point.params, cfg.noma, access, snr, cfg.trials, opts);
    }

    for (const auto& est : estimates) {
      CsvRow row;
      row.experiment = to_string(cfg.kind);
      row.scenario = point.params.scenario == Scenario::kNoDirectLink ? 1 : 2;
      row.scheme = to_string(cfg.scheme);
      row.user = est.user_rank;
      row.rho_db = point.rho_db;
      row.resolution = resolution_label(point.params.resolution);
      row.num_elements = point.params.num_elements;
      row.num_users = point.params.num_users;
      row.trials = est.trials;
      row.failures = est.failures;
      row.p_hat = est.p_hat;
      row.ci_low = est.ci_low;
      row.ci_high = est.ci_high;
      row.analytic_upper = upper[est.user_rank - 1];
      row.analytic_lower = lower[est.user_rank - 1];
      row.diversity = diversity[est.user_rank - 1];
      summary.rows.push_back(row);
      if (!est.sufficient_failures()) {
        summary.notes.push_back(
            "insufficient failures: user=" + std::to_string(est.user_rank) +
            " rho_db=" + format_double(point.rho_db) +
            " failures=" + std::to_string(est.failures));
      }
    }
  }

  if (cfg.kind == ExperimentKind::kDiversityFit) {
    for (int u = 1; u <= cfg.params.num_users; ++u) {
      std::vector<CsvRow> user_rows;
      for (const auto& row : summary.rows) {
        if (row.user && *row.user == u) user_rows.push_back(row);
      }
      try {
        summary.fits.emplace_back(u, fit_diversity(user_rows, cfg.fit_window_db));
      } catch (const InsufficientDataError& err) {
        summary.notes.push_back("slope fit skipped for user " + std::to_string(u) +
                                ": " + err.what());
      }
    }
  }
}

void run_gain_ratio(const ExperimentConfig& cfg, RunSummary& summary) {
  for (std::size_t i = 0; i < cfg.bit_sweep.size(); ++i) {
    ScenarioParams<double> params = cfg.params;
    params.resolution = PhaseResolution::bits(cfg.bit_sweep[i]);
    MonteCarloOptions opts;
    opts.seed = cfg.seed;
    opts.stream_block = i;
    opts.path = cfg.path;
    const double ratio = quantization_gain_ratio(params, cfg.trials, opts);

    CsvRow row;
    row.experiment = to_string(cfg.kind);
    row.scenario = params.scenario == Scenario::kNoDirectLink ? 1 : 2;
    row.resolution = resolution_label(params.resolution);
    row.num_elements = params.num_elements;
    row.num_users = params.num_users;
    row.trials = cfg.trials;
    row.p_hat = ratio;
    // per-realization bracket: cos(pi/2^b) <= quantized/continuous <= 1
    row.analytic_lower = std::cos(kTwoPi / 2.0 / (1 << cfg.bit_sweep[i]));
    row.analytic_upper = 1.0;
    summary.rows.push_back(row);
  }
}

void run_bounds_table(const ExperimentConfig& cfg, RunSummary& summary) {
  for (const double rho_db : cfg.rho_db) {
    const double snr = std::pow(10.0, rho_db / 10.0);
    const auto thresholds = noma_thresholds(cfg.noma, snr);
    for (const SimScheme scheme : {SimScheme::kNoma, SimScheme::kOma}) {
      for (int u = 1; u <= cfg.params.num_users; ++u) {
        BoundSet<double> bounds;
        if (scheme == SimScheme::kNoma) {
          bounds = outage_bounds_noma(u, cfg.params, thresholds);
        } else {
          bounds = outage_bounds_oma(cfg.params, cfg.noma.target_rates[0], snr);
        }
        CsvRow row;
        row.experiment = to_string(cfg.kind);
        row.scenario = cfg.params.scenario == Scenario::kNoDirectLink ? 1 : 2;
        row.scheme = to_string(scheme);
        row.user = u;
        row.rho_db = rho_db;
        row.resolution = resolution_label(cfg.params.resolution);
        row.num_elements = cfg.params.num_elements;
        row.num_users = cfg.params.num_users;
        row.analytic_upper = bounds.upper;
        row.analytic_lower = bounds.lower;
        row.diversity = scheme == SimScheme::kNoma
                            ? diversity_order(MultipleAccess::kNoma,
                                              cfg.params.scenario, u, cfg.params)
                            : diversity_order(MultipleAccess::kOma,
                                              cfg.params.scenario, u, cfg.params);
        summary.rows.push_back(row);
      }
    }
  }
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunSummary summary;
  switch (cfg.kind) {
    case ExperimentKind::kOutageSweep:
    case ExperimentKind::kDiversityFit:
      run_outage_kind(cfg, summary);
      break;
    case ExperimentKind::kGainRatio:
      run_gain_ratio(cfg, summary);
      break;
    case ExperimentKind::kBoundsTable:
      run_bounds_table(cfg, summary);
      break;
  }
  write_csv(cfg.out_path, summary.rows);
  return summary;
}

}  // namespace irsim
