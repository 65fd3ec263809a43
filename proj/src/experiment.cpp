#include "fsign/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fsign/errors.hpp"
#include "fsign/io.hpp"
#include "fsign/location.hpp"
#include "fsign/rng.hpp"
#include "fsign/signcov.hpp"

namespace fsign {

// ---------------------------------------------------------------------------
// Normal quantile and size classification

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("normal_quantile: p must lie in (0, 1)");
  }
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Newton step against the exact CDF tightens to near machine precision.
  static const double sqrt2 = std::sqrt(2.0);
  static const double sqrt_2pi = std::sqrt(2.0 * M_PI);
  double e = 0.5 * std::erfc(-x / sqrt2) - p;
  double u = e * sqrt_2pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

std::string to_string(SizeClass c) {
  switch (c) {
    case SizeClass::accurate: return "accurate";
    case SizeClass::conservative: return "conservative";
    case SizeClass::liberal: return "liberal";
  }
  return "?";
}

SizeClass classify_size(double pi_n, std::size_t N, double alpha, double gamma) {
  const double z = normal_quantile(1.0 - 0.5 * gamma);
  const double half = z * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(N));
  if (pi_n < alpha - half) return SizeClass::conservative;
  if (pi_n > alpha + half) return SizeClass::liberal;
  return SizeClass::accurate;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  design.validate();
  if (M_list.empty()) throw InvalidArgument("config: M_list must not be empty");
  for (std::size_t i = 0; i < M_list.size(); ++i) {
    if (M_list[i] < 1 || M_list[i] > design.m) {
      throw InvalidArgument("config: every M must lie in [1, design.m]");
    }
    for (std::size_t j = i + 1; j < M_list.size(); ++j) {
      if (M_list[i] == M_list[j]) throw InvalidArgument("config: duplicate M");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("config: alpha must lie in (0, 1)");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidArgument("config: gamma must lie in (0, 1)");
  }
  if (replications < 1) throw InvalidArgument("config: replications must be >= 1");
  if (N_b < 1) throw InvalidArgument("config: N_b must be >= 1");
  if (modes.empty()) throw InvalidArgument("config: modes must not be empty");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) throw InvalidArgument("config: duplicate mode");
    }
  }
  if (output_dir.empty()) throw InvalidArgument("config: output_dir must be set");
}

namespace {

void require_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw InvalidArgument("config: unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  require_keys(j,
               {"design", "M_list", "alpha", "replications", "N_b", "modes",
                "output_dir", "gamma", "fixture"},
               "top level");

  ExperimentConfig cfg;
  try {
    if (j.contains("design")) {
      const auto& d = j["design"];
      require_keys(d,
                   {"model", "delta", "n1", "n2", "m", "contaminated", "epsilon",
                    "seed"},
                   "design");
      cfg.design.model = parse_sim_model(d.value("model", std::string("null")));
      cfg.design.delta = d.value("delta", 0.0);
      cfg.design.n1 = d.value("n1", std::size_t{100});
      cfg.design.n2 = d.value("n2", std::size_t{100});
      cfg.design.m = d.value("m", std::size_t{100});
      cfg.design.contaminated = d.value("contaminated", false);
      cfg.design.epsilon = d.value("epsilon", 0.1);
      cfg.design.seed = d.value("seed", std::uint64_t{0});
    }
    if (!j.contains("M_list")) throw InvalidArgument("config: M_list is required");
    cfg.M_list = j["M_list"].get<std::vector<std::size_t>>();
    cfg.alpha = j.value("alpha", 0.05);
    if (!j.contains("replications")) {
      throw InvalidArgument("config: replications is required");
    }
    cfg.replications = j["replications"].get<std::size_t>();
    cfg.N_b = j.value("N_b", std::size_t{5000});
    if (!j.contains("modes")) throw InvalidArgument("config: modes is required");
    for (const auto& s : j["modes"].get<std::vector<std::string>>()) {
      cfg.modes.push_back(parse_test_mode(s));
    }
    cfg.output_dir = j.value("output_dir", std::string("fsign-results"));
    cfg.gamma = j.value("gamma", 0.01);
    cfg.fixture_path = j.value("fixture", std::string());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

// ---------------------------------------------------------------------------
// Experiment runner

namespace {

struct CellKey {
  TestMode mode;
  std::size_t M;
};

struct CellOutcome {
  double p_value = 1.0;
  double explained = 0.0;
  bool has_explained = false;
};

using RepOutcome = std::vector<CellOutcome>;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << to_string(cfg.design.model) << '|' << io::format_full(cfg.design.delta)
     << '|' << cfg.design.n1 << '|' << cfg.design.n2 << '|' << cfg.design.m << '|'
     << cfg.design.contaminated << '|' << io::format_full(cfg.design.epsilon)
     << '|' << cfg.design.seed << '|';
  for (std::size_t M : cfg.M_list) os << M << ',';
  os << '|' << io::format_full(cfg.alpha) << '|' << cfg.replications << '|'
     << cfg.N_b << '|';
  for (TestMode mode : cfg.modes) os << to_string(mode) << ',';
  os << '|' << io::format_full(cfg.gamma) << '|' << cfg.fixture_path;
  std::ostringstream hex;
  hex << std::hex << fnv1a(os.str());
  return hex.str();
}

// Everything a replication shares for one mode before the per-M loop.
struct ModePrep {
  double statistic = 0.0;
  std::optional<PooledBasis> basis;  // sign / classical
  std::vector<double> lambda1;       // classical_gauss
  std::vector<double> lambda2;
};

ModePrep prepare_mode(const std::vector<Curve>& s1, const std::vector<Curve>& s2,
                      TestMode mode, std::size_t M_max) {
  ModePrep prep;
  if (mode == TestMode::sign) {
    Curve c1 = spatial_median_weiszfeld(s1).estimate;
    Curve c2 = spatial_median_weiszfeld(s2).estimate;
    prep.statistic = statistic_sign(s1, s2, c1, c2);
    prep.basis = pooled_scores(s1, s2, c1, c2, M_max, mode);
    return prep;
  }
  prep.statistic = statistic_classical(s1, s2);
  Curve c1 = sample_mean(s1);
  Curve c2 = sample_mean(s2);
  if (mode == TestMode::classical) {
    prep.basis = pooled_scores(s1, s2, c1, c2, M_max, mode);
  } else {
    prep.lambda1 = eigendecompose(classical_cov(s1, c1), M_max).values;
    prep.lambda2 = eigendecompose(classical_cov(s2, c2), M_max).values;
  }
  return prep;
}

RepOutcome run_replication(const ExperimentConfig& cfg,
                           const std::vector<CellKey>& cells, std::size_t M_max,
                           std::uint64_t rep,
                           const std::vector<Curve>* fixture) {
  std::vector<Curve> s1;
  std::vector<Curve> s2;
  if (fixture != nullptr) {
    s1 = *fixture;
    s2 = *fixture;
  } else {
    SimDesign d = cfg.design;
    d.seed = rng::derive(cfg.design.seed, rep * 64 + 0);
    auto pair = gen_design(d);
    s1 = std::move(pair.first);
    s2 = std::move(pair.second);
    if (cfg.design.contaminated) {
      s1 = contaminate(s1, cfg.design.epsilon,
                       rng::derive(cfg.design.seed, rep * 64 + 2));
      s2 = contaminate(s2, cfg.design.epsilon,
                       rng::derive(cfg.design.seed, rep * 64 + 3));
    }
  }

  std::optional<ModePrep> preps[3];
  auto prep_for = [&](TestMode mode) -> ModePrep& {
    auto idx = static_cast<std::size_t>(mode);
    if (!preps[idx]) preps[idx] = prepare_mode(s1, s2, mode, M_max);
    return *preps[idx];
  };

  RepOutcome out(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const CellKey& cell = cells[k];
    ModePrep& prep = prep_for(cell.mode);

    ThetaSpectrum spec =
        (cell.mode == TestMode::classical_gauss)
            ? gaussian_theta_from_eigs(prep.lambda1, prep.lambda2, cell.M,
                                       s1.size(), s2.size())
            : theta_from_scores(*prep.basis, cell.M);
    std::vector<double> draws =
        bootstrap_null(spec, cfg.N_b, cfg.design.seed, rep * 64 + 8 + k);
    std::size_t count = 0;
    for (double d : draws) {
      if (d >= prep.statistic) ++count;
    }
    out[k].p_value = static_cast<double>(count) / static_cast<double>(cfg.N_b);
    if (prep.basis) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cell.M; ++j) acc += prep.basis->system.values[j];
      out[k].explained = acc / prep.basis->pooled_trace;
      out[k].has_explained = true;
    }
  }
  return out;
}

class Checkpoint {
 public:
  Checkpoint(const std::string& dir, const std::string& fingerprint,
             std::size_t n_cells, std::size_t reps)
      : path_(dir + "/checkpoint.csv"),
        fingerprint_(fingerprint),
        n_cells_(n_cells),
        loaded_(reps) {
    load();
    std::ofstream out(path_, existed_ ? std::ios::app : std::ios::out);
    if (!out) throw InvalidArgument("cannot open '" + path_ + "' for writing");
    if (!existed_) out << "# fsign-experiment " << fingerprint_ << '\n';
    out_ = std::move(out);
  }

  bool have(std::size_t rep) const { return loaded_[rep].has_value(); }
  const RepOutcome& get(std::size_t rep) const { return *loaded_[rep]; }

  void append(std::size_t rep, const std::vector<CellKey>& cells,
              const RepOutcome& outcome) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      out_ << rep << ',' << to_string(cells[k].mode) << ',' << cells[k].M << ','
           << io::format_full(outcome[k].p_value) << ',';
      if (outcome[k].has_explained) out_ << io::format_full(outcome[k].explained);
      out_ << '\n';
    }
    out_.flush();
  }

 private:
  void load() {
    std::ifstream in(path_);
    if (!in) return;
    existed_ = true;
    std::string line;
    std::size_t lineno = 0;
    // (rep, cell-within-rep) -> outcome; last write wins so partially
    // written replications from an interrupted run are recomputed cleanly.
    std::map<std::size_t, std::map<std::string, CellOutcome>> by_rep;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::istringstream hs(line);
        std::string hash1, tag, fp;
        hs >> hash1 >> tag >> fp;
        if (tag != "fsign-experiment" || fp != fingerprint_) {
          throw InvalidArgument(
              path_ + ": checkpoint belongs to a different configuration; "
                      "remove it or use another output_dir");
        }
        continue;
      }
      std::istringstream ls(line);
      std::string rep_s, mode_s, m_s, p_s, e_s;
      if (!std::getline(ls, rep_s, ',') || !std::getline(ls, mode_s, ',') ||
          !std::getline(ls, m_s, ',') || !std::getline(ls, p_s, ',')) {
        throw InvalidArgument(path_ + ":" + std::to_string(lineno) +
                              ": malformed checkpoint line");
      }
      std::getline(ls, e_s, ',');
      CellOutcome o;
      std::size_t rep = 0;
      try {
        rep = std::stoull(rep_s);
        o.p_value = std::stod(p_s);
        if (!e_s.empty()) {
          o.explained = std::stod(e_s);
          o.has_explained = true;
        }
      } catch (const std::exception&) {
        throw InvalidArgument(path_ + ":" + std::to_string(lineno) +
                              ": malformed checkpoint line");
      }
      if (rep >= loaded_.size()) continue;  // stale rows beyond this run
      by_rep[rep][mode_s + "/" + m_s] = o;
    }
    for (auto& [rep, cells] : by_rep) {
      if (cells.size() != n_cells_) continue;  // partial replication
      RepOutcome outcome;
      outcome.reserve(n_cells_);
      for (auto& [key, o] : cells) outcome.push_back(o);
      loaded_[rep] = std::move(outcome);
      order_is_keyed_ = true;
    }
  }

 public:
  // Loaded outcomes are keyed by (mode,M) string; remap them into cell
  // enumeration order.
  void remap(const std::vector<CellKey>& cells) {
    if (!order_is_keyed_) return;
    for (auto& slot : loaded_) {
      if (!slot) continue;
      // Re-read keys in the same sorted order used during load().
      std::map<std::string, CellOutcome> keyed;
      std::size_t i = 0;
      std::vector<std::string> sorted_keys;
      for (const auto& cell : cells) {
        sorted_keys.push_back(to_string(cell.mode) + "/" + std::to_string(cell.M));
      }
      std::vector<std::string> order = sorted_keys;
      std::sort(order.begin(), order.end());
      for (const auto& key : order) keyed[key] = (*slot)[i++];
      RepOutcome fixed(cells.size());
      for (std::size_t k = 0; k < cells.size(); ++k) fixed[k] = keyed[sorted_keys[k]];
      *slot = std::move(fixed);
    }
  }

 private:
  std::string path_;
  std::string fingerprint_;
  std::size_t n_cells_;
  std::vector<std::optional<RepOutcome>> loaded_;
  std::ofstream out_;
  bool existed_ = false;
  bool order_is_keyed_ = false;
};

void write_tables(const ExperimentConfig& cfg, const RejectionTable& table) {
  const std::string dir = cfg.output_dir;
  {
    std::ofstream out(dir + "/rejections.csv");
    out << "model,delta,M,mode,contaminated,rejection_freq,replications,N_b,seed\n";
    for (const auto& r : table.rows) {
      out << to_string(r.model) << ',' << io::format_full(r.delta) << ',' << r.M
          << ',' << to_string(r.mode) << ',' << (r.contaminated ? "true" : "false")
          << ',' << io::format_full(r.rejection_freq) << ',' << r.replications
          << ',' << r.N_b << ',' << r.seed << '\n';
    }
  }
  {
    std::ofstream out(dir + "/explained_variance.csv");
    out << "model,delta,mode,contaminated,M,explained_fraction,replications,seed\n";
    for (const auto& r : table.explained) {
      out << to_string(r.model) << ',' << io::format_full(r.delta) << ','
          << to_string(r.mode) << ',' << (r.contaminated ? "true" : "false") << ','
          << r.M << ',' << io::format_full(r.explained_fraction) << ','
          << r.replications << ',' << r.seed << '\n';
    }
  }
  {
    std::ofstream out(dir + "/size_classification.csv");
    out << "model,delta,M,mode,contaminated,rejection_freq,classification,"
           "replications,alpha,gamma\n";
    for (const auto& r : table.rows) {
      out << to_string(r.model) << ',' << io::format_full(r.delta) << ',' << r.M
          << ',' << to_string(r.mode) << ',' << (r.contaminated ? "true" : "false")
          << ',' << io::format_full(r.rejection_freq) << ','
          << to_string(classify_size(r.rejection_freq, r.replications, cfg.alpha,
                                     cfg.gamma))
          << ',' << r.replications << ',' << io::format_full(cfg.alpha) << ','
          << io::format_full(cfg.gamma) << '\n';
    }
  }
}

}  // namespace

RejectionTable run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);

  std::vector<CellKey> cells;
  for (TestMode mode : cfg.modes) {
    for (std::size_t M : cfg.M_list) cells.push_back({mode, M});
  }
  const std::size_t M_max = *std::max_element(cfg.M_list.begin(), cfg.M_list.end());
  const std::size_t R = cfg.replications;

  std::vector<Curve> fixture_sample;
  const std::vector<Curve>* fixture = nullptr;
  if (!cfg.fixture_path.empty()) {
    fixture_sample = io::read_sample_csv(cfg.fixture_path);
    fixture = &fixture_sample;
  }

  Checkpoint ckpt(cfg.output_dir, config_fingerprint(cfg), cells.size(), R);
  ckpt.remap(cells);

  std::vector<RepOutcome> results(R);
  std::vector<char> done(R, 0);
  for (std::size_t r = 0; r < R; ++r) {
    if (ckpt.have(r)) {
      results[r] = ckpt.get(r);
      done[r] = 1;
    }
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, R);

  std::atomic<std::size_t> next{0};
  std::mutex flush_mu;
  std::size_t frontier = 0;
  std::vector<char> newly(R, 0);
  std::exception_ptr first_error = nullptr;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      std::size_t r = next.fetch_add(1);
      if (r >= R) return;
      if (done[r]) continue;
      try {
        RepOutcome outcome = run_replication(cfg, cells, M_max, r, fixture);
        std::lock_guard<std::mutex> lock(flush_mu);
        results[r] = std::move(outcome);
        done[r] = 1;
        newly[r] = 1;
        while (frontier < R && done[frontier]) {
          if (newly[frontier]) ckpt.append(frontier, cells, results[frontier]);
          ++frontier;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Flush anything after an out-of-order tail (the loop above only advances
  // past contiguous prefixes).
  {
    std::lock_guard<std::mutex> lock(flush_mu);
    while (frontier < R && done[frontier]) {
      if (newly[frontier]) ckpt.append(frontier, cells, results[frontier]);
      ++frontier;
    }
  }

  RejectionTable table;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::size_t rejections = 0;
    double explained_sum = 0.0;
    bool has_explained = true;
    for (std::size_t r = 0; r < R; ++r) {
      if (results[r][k].p_value < cfg.alpha) ++rejections;
      if (results[r][k].has_explained) {
        explained_sum += results[r][k].explained;
      } else {
        has_explained = false;
      }
    }
    RejectionRow row;
    row.model = cfg.design.model;
    row.delta = cfg.design.delta;
    row.M = cells[k].M;
    row.mode = cells[k].mode;
    row.contaminated = cfg.design.contaminated;
    row.rejection_freq = static_cast<double>(rejections) / static_cast<double>(R);
    row.replications = R;
    row.N_b = cfg.N_b;
    row.seed = cfg.design.seed;
    table.rows.push_back(row);

    if (has_explained) {
      VarianceRow v;
      v.model = cfg.design.model;
      v.delta = cfg.design.delta;
      v.mode = cells[k].mode;
      v.contaminated = cfg.design.contaminated;
      v.M = cells[k].M;
      v.explained_fraction = explained_sum / static_cast<double>(R);
      v.replications = R;
      v.seed = cfg.design.seed;
      table.explained.push_back(v);
    }
  }

  write_tables(cfg, table);
  return table;
}

}  // namespace fsign
