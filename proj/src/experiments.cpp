// Copyright 2026 The liberation-lab Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "liblab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "liblab/heatkern.hpp"
#include "liblab/ncalg.hpp"
#include "liblab/ratefn.hpp"
#include "liblab/rmt.hpp"

namespace liblab {

using json = nlohmann::json;

namespace {

// Typed access to a configuration object. Every key read (with its default
// filled in when absent) lands in the effective configuration echoed in the
// output header; keys that are never read are rejected by finish().
class Config {
 public:
  explicit Config(json j) : raw_(std::move(j)) {
    if (!raw_.is_object()) fail(ErrorCode::ConfigError, "configuration must be a JSON object");
  }

  int integer(const std::string &key, int def) {
    const json &v = get(key, def);
    if (!v.is_number_integer()) bad(key, "an integer");
    return v.get<int>();
  }
  std::uint64_t seed(const std::string &key, std::uint64_t def) {
    const json &v = get(key, def);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      bad(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }
  double number(const std::string &key, double def) {
    const json &v = get(key, def);
    if (!v.is_number()) bad(key, "a number");
    return v.get<double>();
  }
  bool flag(const std::string &key, bool def) {
    const json &v = get(key, def);
    if (!v.is_boolean()) bad(key, "a boolean");
    return v.get<bool>();
  }
  std::string str(const std::string &key, const std::string &def) {
    const json &v = get(key, def);
    if (!v.is_string()) bad(key, "a string");
    return v.get<std::string>();
  }
  Time time(const std::string &key, const std::string &def) { return to_time(key, get(key, def)); }
  std::vector<int> int_list(const std::string &key, const std::vector<int> &def) {
    const json &v = get(key, def);
    if (v.is_number_integer()) return {v.get<int>()};
    if (!v.is_array()) bad(key, "a list of integers");
    std::vector<int> out;
    for (const json &e : v) {
      if (!e.is_number_integer()) bad(key, "a list of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }
  std::vector<Time> time_list(const std::string &key, const std::vector<std::string> &def) {
    const json &v = get(key, def);
    if (!v.is_array()) return {to_time(key, v)};
    std::vector<Time> out;
    for (const json &e : v) out.push_back(to_time(key, e));
    return out;
  }
  // Raw JSON value (recorded as used); null when absent.
  json value(const std::string &key) {
    used_.insert(key);
    if (!raw_.contains(key)) return nullptr;
    effective_[key] = raw_[key];
    return raw_[key];
  }
  void record(const std::string &key, json v) { effective_[key] = std::move(v); }

  void finish() const {
    for (auto it = raw_.begin(); it != raw_.end(); ++it)
      if (!used_.count(it.key()))
        fail(ErrorCode::ConfigError, "unknown configuration key '" + it.key() + "'");
  }
  const json &effective() const { return effective_; }

  [[noreturn]] static void bad(const std::string &key, const std::string &what) {
    fail(ErrorCode::ConfigError, "key '" + key + "' must be " + what);
  }

 private:
  template <class T>
  const json &get(const std::string &key, const T &def) {
    used_.insert(key);
    effective_[key] = raw_.contains(key) ? raw_[key] : json(def);
    return effective_[key];
  }
  static Time to_time(const std::string &key, const json &v) {
    try {
      if (v.is_string()) return Time::parse(v.get<std::string>());
      if (v.is_number()) return Time::parse(v.dump());
    } catch (const Error &e) {
      fail(ErrorCode::ConfigError, "key '" + key + "': " + e.what());
    }
    fail(ErrorCode::ConfigError, "key '" + key + "' must be a time (number or \"p/q\")");
  }

  json raw_;
  json effective_ = json::object();
  std::set<std::string> used_;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Table {
 public:
  Table(const std::string &kind, const Config &cfg, std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    out_ << "# liberation-lab " << kVersion << "\n";
    out_ << "# schema: " << kSchemaVersion << "\n";
    out_ << "# experiment: " << kind << "\n";
    if (cfg.effective().contains("seed")) out_ << "# seed: " << cfg.effective()["seed"].dump() << "\n";
    out_ << "# config: " << cfg.effective().dump() << "\n";
    for (std::size_t k = 0; k < columns_.size(); ++k) out_ << (k ? "," : "") << columns_[k];
    out_ << "\n";
  }
  void row(const std::vector<std::string> &cells) {
    if (cells.size() != columns_.size()) fail(ErrorCode::InvalidArgument, "row width mismatch");
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << quote(cells[k]);
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::vector<std::string> columns_;
  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// Laws and word sets from JSON

Eigen::MatrixXcd matrix_from_json(const json &m) {
  if (!m.is_array() || m.empty()) fail(ErrorCode::ConfigError, "matrix must be a non-empty list of rows");
  const Eigen::Index d = Eigen::Index(m.size());
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const json &row = m[std::size_t(r)];
    if (!row.is_array() || Eigen::Index(row.size()) != d)
      fail(ErrorCode::ConfigError, "matrix must be square");
    for (Eigen::Index c = 0; c < d; ++c) {
      const json &e = row[std::size_t(c)];
      if (e.is_number()) out(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        out(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      else fail(ErrorCode::ConfigError, "matrix entries must be numbers or [re, im] pairs");
    }
  }
  return out;
}

std::vector<double> numbers(const json &j, const std::string &what) {
  if (!j.is_array()) fail(ErrorCode::ConfigError, what + " must be a list of numbers");
  std::vector<double> out;
  for (const json &e : j) {
    if (!e.is_number()) fail(ErrorCode::ConfigError, what + " must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

MarginalLaw marginal_from_json(const json &j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    fail(ErrorCode::ConfigError, "a marginal needs a \"type\"");
  const std::string type = j["type"];
  try {
    if (type == "projection") {
      double tr = j.value("trace", 0.5);
      return MarginalLaw::atomic({0.0, 1.0}, {1.0 - tr, tr});
    }
    if (type == "atomic")
      return MarginalLaw::atomic(numbers(j.at("atoms"), "atoms"), numbers(j.at("weights"), "weights"));
    if (type == "semicircle")
      return MarginalLaw::semicircle(j.value("mean", 0.0), j.value("variance", 1.0));
    if (type == "moments")
      return MarginalLaw::moment_sequence(numbers(j.at("moments"), "moments"),
                                          j.at("norm_bound").get<double>());
    if (type == "matrices") {
      std::vector<Eigen::MatrixXcd> mats;
      for (const json &m : j.at("matrices")) mats.push_back(matrix_from_json(m));
      return MarginalLaw::matrices(std::move(mats));
    }
  } catch (const json::exception &e) {
    fail(ErrorCode::ConfigError, "marginal '" + type + "': " + e.what());
  } catch (const Error &e) {
    fail(ErrorCode::ConfigError, "marginal '" + type + "': " + e.what());
  }
  fail(ErrorCode::ConfigError, "unknown marginal type '" + type + "'");
}

std::vector<MarginalLaw> marginals_from_json(const json &j) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::ConfigError, "marginals must be a non-empty list");
  std::vector<MarginalLaw> out;
  for (const json &m : j) out.push_back(marginal_from_json(m));
  for (const auto &m : out) {
    try {
      m.validate();
    } catch (const Error &e) {
      fail(ErrorCode::ConfigError, std::string("invalid marginal: ") + e.what());
    }
  }
  return out;
}

const json &default_marginals_json() {
  static const json j = json::array({{{"type", "projection"}, {"trace", 0.5}},
                                     {{"type", "projection"}, {"trace", 0.5}}});
  return j;
}

std::vector<MarginalLaw> marginals_from(Config &cfg) {
  json j = cfg.value("marginals");
  if (j.is_null()) {
    j = default_marginals_json();
    cfg.record("marginals", j);
  }
  return marginals_from_json(j);
}

std::shared_ptr<const JointLaw> sigma0_from_json(const json &j, const json &marginals, double theta) {
  if (j.is_string()) {
    const std::string s = j;
    if (s == "free")
      return std::make_shared<FreeProductLaw>(
          marginals_from_json(marginals.is_null() ? default_marginals_json() : marginals));
    if (s == "correlated") return correlated_projections(theta);
    fail(ErrorCode::ConfigError, "unknown sigma0 '" + s + "' (free | correlated | {generators})");
  }
  if (j.is_object() && j.contains("generators") && j["generators"].is_array()) {
    std::map<Gen, Eigen::MatrixXcd> mats;
    for (const json &g : j["generators"]) {
      if (!g.is_object() || !g.contains("i") || !g.contains("j") || !g.contains("matrix"))
        fail(ErrorCode::ConfigError, "sigma0 generators need i, j and matrix");
      mats[{g["i"].get<int>(), g["j"].get<int>()}] = matrix_from_json(g["matrix"]);
    }
    try {
      return std::make_shared<MatrixLaw>(std::move(mats));
    } catch (const Error &e) {
      fail(ErrorCode::ConfigError, std::string("sigma0: ") + e.what());
    }
  }
  fail(ErrorCode::ConfigError, "sigma0 must be \"free\", \"correlated\" or {\"generators\": [...]}");
}

// sigma0 plus the keys it depends on ("marginals" for "free", "theta" for
// "correlated").
std::shared_ptr<const JointLaw> sigma0_from(Config &cfg, const std::string &def) {
  json j = cfg.value("sigma0");
  if (j.is_null()) {
    j = def;
    cfg.record("sigma0", j);
  }
  json marginals = nullptr;
  double theta = 0.6;
  if (j == "free") {
    marginals = cfg.value("marginals");
    if (marginals.is_null()) cfg.record("marginals", default_marginals_json());
  }
  if (j == "correlated") theta = cfg.number("theta", 0.6);
  return sigma0_from_json(j, marginals, theta);
}

std::vector<NCPolynomial> read_polynomial_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open word file '" + path + "'");
  std::vector<NCPolynomial> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    out.push_back(NCPolynomial::parse(line.substr(b)));
  }
  if (out.empty()) fail(ErrorCode::ConfigError, "word file '" + path + "' is empty");
  return out;
}

// Polynomials from "<key>" (list of strings) or "<key>_file"; falls back to
// the supplied default set.
std::vector<NCPolynomial> polynomials_from(Config &cfg, const std::string &key,
                                           const std::vector<NCPolynomial> &def) {
  json list = cfg.value(key);
  json file = cfg.value(key + "_file");
  if (!list.is_null() && !file.is_null())
    fail(ErrorCode::ConfigError, "give either '" + key + "' or '" + key + "_file', not both");
  if (!file.is_null()) {
    if (!file.is_string()) Config::bad(key + "_file", "a path");
    return read_polynomial_file(file.get<std::string>());
  }
  if (!list.is_null()) {
    if (list.is_string()) list = json::array({list});
    if (!list.is_array() || list.empty()) Config::bad(key, "a list of polynomials");
    std::vector<NCPolynomial> out;
    for (const json &e : list) {
      if (!e.is_string()) Config::bad(key, "a list of polynomials");
      out.push_back(NCPolynomial::parse(e.get<std::string>()));
    }
    return out;
  }
  json echo = json::array();
  for (const auto &p : def) echo.push_back(p.str());
  cfg.record(key, echo);
  return def;
}

int steps_for(const Time &T, const Time &h, const std::string &what) {
  if (!(h > Time(0))) fail(ErrorCode::ConfigError, "step size must be positive");
  Time q = T / h;
  if (q.den() != 1 || q.num() < 0)
    fail(ErrorCode::ConfigError, what + " " + T.str() + " is not a multiple of h = " + h.str());
  return int(q.num());
}

std::string word_label(const std::vector<Gen> &w) {
  std::string s;
  for (const Gen &g : w) s += "x" + std::to_string(g.i) + std::to_string(g.j);
  return s;
}

// Memoizes evaluations of an oracle that is shared by many comparisons.
class CachedDistribution : public TrajectoryDistribution {
 public:
  explicit CachedDistribution(const TrajectoryDistribution &base) : base_(base) {}
  Complex evaluate(const Word &w) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(w, base_.evaluate(w)).first->second;
  }
  int n_motions() const override { return base_.n_motions(); }
  int num_algebras() const override { return base_.num_algebras(); }
  int num_generators(int i) const override { return base_.num_generators(i); }
  const TraceState *oracle() const override { return base_.oracle(); }

 private:
  const TrajectoryDistribution &base_;
  mutable std::map<Word, Complex> cache_;
  mutable std::mutex mu_;
};

// Independent stream for (base, a, b), used for per-size / per-replicate
// seeds; individual paths inside a stream then use base ^ p.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{std::uint32_t(base), std::uint32_t(base >> 32), std::uint32_t(a),
                    std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(b >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  // Keep seeds within 53 bits so they survive a round trip through JSON / CSV readers.
  return ((std::uint64_t(out[0]) << 32) | out[1]) & ((std::uint64_t(1) << 53) - 1);
}

void check_positive(int v, const std::string &key) {
  if (v < 1) fail(ErrorCode::ConfigError, "'" + key + "' must be >= 1");
}

// ---------------------------------------------------------------------------
// Experiments

std::string ubm_moments(Config &cfg) {
  const int N = cfg.integer("N", 64);
  const int paths = cfg.integer("paths", 400);
  const Time T = cfg.time("T", "2");
  const Time h = cfg.time("h", "1/200");
  const int n_max = cfg.integer("n_max", 4);
  const std::uint64_t seed = cfg.seed("seed", 7);
  const bool cross = cfg.flag("cross", false);
  const int steps = steps_for(T, h, "T");
  const int record_every = cfg.integer("record_every", std::max(1, steps / 10));
  check_positive(N, "N");
  check_positive(n_max, "n_max");
  check_positive(record_every, "record_every");
  if (paths < 2) fail(ErrorCode::ConfigError, "'paths' must be >= 2");
  cfg.finish();

  Table tab("ubm-moments", cfg,
            {"quantity", "n", "t", "mean_re", "mean_im", "se_re", "se_im", "oracle", "gap_over_se"});
  auto emit = [&](const std::string &q, const std::vector<MomentCheckRow> &rows) {
    for (const auto &r : rows) {
      double gap = std::abs(r.mean.real() - r.ode);
      tab.row({q, std::to_string(r.n), r.t.str(), fmt(r.mean.real()), fmt(r.mean.imag()), fmt(r.se),
               fmt(r.se_im), fmt(r.ode), r.se > 0 ? fmt(gap / r.se) : "nan"});
    }
  };
  emit("moment", finite_n_moment_check(N, paths, T, steps, n_max, seed, record_every));
  if (cross)
    emit("cross", cross_correlation_check(N, paths, T, steps, stream_seed(seed, 2, 0), record_every));
  return tab.str();
}

std::string liberation_convergence(Config &cfg) {
  const std::vector<int> Ns = cfg.int_list("N", {16, 128});
  const int replicates = cfg.integer("replicates", 10);
  const int n = cfg.integer("n", 1);
  const std::vector<MarginalLaw> marginals = marginals_from(cfg);
  const std::vector<Time> grid = cfg.time_list("grid", {"0", "1/2", "1", "3/2", "2"});
  const int m_max = cfg.integer("m_max", 2);
  const int l_max = cfg.integer("l_max", 3);
  const Time h = cfg.time("h", "1/100");
  const std::uint64_t seed = cfg.seed("seed", 7);
  const int bootstrap = cfg.integer("bootstrap", 10000);
  check_positive(replicates, "replicates");
  check_positive(bootstrap, "bootstrap");
  if (n < 1 || n > int(marginals.size())) fail(ErrorCode::ConfigError, "need 1 <= n <= #marginals");
  if (Ns.empty()) fail(ErrorCode::ConfigError, "'N' must list at least one size");
  cfg.finish();

  Time t_end(0);
  int record_every = 0;
  for (const Time &t : grid) {
    int s = steps_for(t, h, "grid time");
    record_every = std::gcd(record_every, s);
    t_end = tmax(t_end, t);
  }
  const int steps = steps_for(t_end, h, "grid time");
  if (record_every == 0) record_every = 1;
  MetricSpec spec{m_max, l_max, grid};

  Table tab("liberation-convergence", cfg, {"row", "N", "replicate", "seed", "value"});
  std::vector<std::vector<double>> d_by_n;
  for (int N : Ns) {
    check_positive(N, "N");
    InitialFamily family = build_initial_family(marginals, N, n);
    OracleDistribution lib(TraceState::liberation(family.law(), n));
    CachedDistribution oracle(lib);
    std::vector<double> ds;
    for (int r = 0; r < replicates; ++r) {
      std::uint64_t s = stream_seed(seed, std::uint64_t(N), std::uint64_t(r) + 1);
      auto traj = std::make_shared<UnitaryTrajectory>(N, n, h, std::max(steps, 1), s, record_every);
      EmpiricalDistribution emp(family, traj);
      double d = trajectory_metric_d(emp, oracle, spec);
      ds.push_back(d);
      tab.row({"d", std::to_string(N), std::to_string(r), std::to_string(s), fmt(d)});
    }
    double mean = std::accumulate(ds.begin(), ds.end(), 0.0) / double(ds.size());
    tab.row({"mean", std::to_string(N), "", "", fmt(mean)});
    d_by_n.push_back(std::move(ds));
  }
  if (d_by_n.size() >= 2) {
    // Percentile bootstrap for mean(d at first N) - mean(d at last N).
    const auto &a = d_by_n.front(), &b = d_by_n.back();
    RandomEngine rng(stream_seed(seed, 0, 0));
    std::uniform_int_distribution<std::size_t> ia(0, a.size() - 1), ib(0, b.size() - 1);
    std::vector<double> diffs;
    for (int k = 0; k < bootstrap; ++k) {
      double sa = 0, sb = 0;
      for (std::size_t q = 0; q < a.size(); ++q) sa += a[ia(rng)];
      for (std::size_t q = 0; q < b.size(); ++q) sb += b[ib(rng)];
      diffs.push_back(sa / double(a.size()) - sb / double(b.size()));
    }
    std::sort(diffs.begin(), diffs.end());
    auto pct = [&](double p) { return diffs[std::size_t(p * double(diffs.size() - 1))]; };
    tab.row({"diff_ci_low", "", "", "", fmt(pct(0.025))});
    tab.row({"diff_ci_high", "", "", "", fmt(pct(0.975))});
  }
  return tab.str();
}

std::string chi_orb(Config &cfg) {
  const std::vector<int> Ns = cfg.int_list("N", {8, 16, 32, 64});
  const int samples = cfg.integer("samples", 500);
  const int m = cfg.integer("m", 2);
  const double delta = cfg.number("delta", 0.1);
  const int n = cfg.integer("n", 1);
  const std::vector<MarginalLaw> marginals = marginals_from(cfg);
  const std::string target = cfg.str("target", "free");
  const std::uint64_t seed = cfg.seed("seed", 7);
  check_positive(samples, "samples");
  check_positive(m, "m");
  if (!(delta > 0)) fail(ErrorCode::ConfigError, "'delta' must be positive");
  if (n < 1 || n > int(marginals.size())) fail(ErrorCode::ConfigError, "need 1 <= n <= #marginals");
  if (target != "free" && target != "initial")
    fail(ErrorCode::ConfigError, "'target' must be free or initial");
  cfg.finish();

  Table tab("chi-orb", cfg, {"N", "samples", "hits", "fraction", "log_fraction", "normalized"});
  FreeProductLaw free_law(marginals);
  for (int N : Ns) {
    check_positive(N, "N");
    InitialFamily family = build_initial_family(marginals, N, n);
    std::shared_ptr<MatrixLaw> initial = family.law();
    StaticEvaluator eval = [&](const std::vector<Gen> &w) {
      return target == "free" ? free_law.moment(w) : initial->moment(w);
    };
    ChiOrbResult r = chi_orb_mc(eval, family, {m, delta}, samples, stream_seed(seed, std::uint64_t(N)));
    tab.row({std::to_string(N), std::to_string(r.samples), std::to_string(r.hits),
             fmt(double(r.hits) / r.samples), r.log_fraction.str(), r.normalized.str()});
  }
  return tab.str();
}

std::string heat_kernel(Config &cfg) {
  const double t_min = cfg.number("t_min", 12);
  const double t_max = cfg.number("t_max", 400);
  const int points = cfg.integer("points", 50);
  const double eps = cfg.number("eps", 0.9);
  const std::string spacing = cfg.str("spacing", "linear");
  check_positive(points, "points");
  if (!(t_min > 0) || t_max < t_min) fail(ErrorCode::ConfigError, "need 0 < t_min <= t_max");
  if (spacing != "linear" && spacing != "log") fail(ErrorCode::ConfigError, "'spacing' must be linear or log");
  cfg.finish();

  Table tab("heat-kernel", cfg, {"T", "k", "F", "low", "high"});
  for (int p = 0; p < points; ++p) {
    double f = points == 1 ? 0.0 : double(p) / (points - 1);
    double T = spacing == "linear" ? t_min + f * (t_max - t_min)
                                   : std::exp(std::log(t_min) + f * (std::log(t_max) - std::log(t_min)));
    Modulus k = invert_T(T);
    double F = free_energy(T);
    std::string low = "NA", high = "NA";
    if (eps * T > std::numbers::pi * std::numbers::pi) {
      Sandwich s = li_yau_sandwich(T, eps);
      low = fmt(s.low);
      high = fmt(s.high);
    }
    tab.row({fmt(T), fmt(k.k), fmt(F), low, high});
  }
  return tab.str();
}

std::string condexp_check(Config &cfg) {
  const int n = cfg.integer("n", 2);
  auto sigma0 = sigma0_from(cfg, "free");
  std::vector<NCPolynomial> words = polynomials_from(cfg, "words", pairing_test_polynomials());
  std::vector<NCPolynomial> ys = polynomials_from(cfg, "pairing", pairing_test_multipliers());
  std::vector<int> def_k;
  for (int k = 1; k <= n; ++k) def_k.push_back(k);
  const std::vector<int> ks = cfg.int_list("k", def_k);
  const std::vector<Time> ss = cfg.time_list("s", {"1/4", "1/2", "3/4", "1", "3/2", "2"});
  if (n < 1) fail(ErrorCode::ConfigError, "'n' must be >= 1");
  for (int k : ks)
    if (k < 1 || k > n) fail(ErrorCode::ConfigError, "each k must lie in 1..n");
  cfg.finish();

  auto lib = TraceState::liberation(sigma0, n);
  auto ext = lib->extended();
  Table tab("condexp-check", cfg,
            {"P", "y", "k", "s", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff"});
  for (const auto &P : words)
    for (int k : ks)
      for (const Time &s : ss) {
        NCPolynomial E = conditional_expectation(P, k, s, *lib);
        NCPolynomial D = pi_s_substitution(cyclic_derivative(P, k, s), s, n);
        for (const auto &y : ys) {
          Complex lhs = ext->evaluate(D * y);
          Complex rhs = lib->evaluate(E * y);
          tab.row({P.str(), y.str(), std::to_string(k), s.str(), fmt(lhs.real()), fmt(lhs.imag()),
                   fmt(rhs.real()), fmt(rhs.imag()), fmt(std::abs(lhs - rhs))});
        }
      }
  return tab.str();
}

std::shared_ptr<TraceState> tau_for(const std::string &state, std::shared_ptr<const JointLaw> sigma0,
                                    int n) {
  if (state == "lib") return TraceState::liberation(sigma0, n);
  if (state == "free-constant") return TraceState::constant(free_product_of_marginals(*sigma0), n);
  if (state == "constant") return TraceState::constant(sigma0, n);
  fail(ErrorCode::ConfigError, "'state' must be lib, free-constant or constant");
}

std::string rate_table(Config &cfg, const std::string &kind, bool single) {
  const int n = cfg.integer("n", 2);
  auto sigma0 = sigma0_from(cfg, "correlated");
  const std::string state = cfg.str("state", "lib");
  std::vector<NCPolynomial> polys;
  std::vector<Time> times;
  if (single) {
    json P = cfg.value("P");
    if (!P.is_string()) fail(ErrorCode::ConfigError, "'P' (a polynomial) is required");
    polys.push_back(NCPolynomial::parse(P.get<std::string>()));
    times = {cfg.time("t", "1")};
  } else {
    polys = polynomials_from(cfg, "words", standard_test_polynomials());
    times = cfg.time_list("times", {"1/2", "1", "2"});
  }
  RateOptions opt;
  opt.tol = cfg.number("tol", opt.tol);
  if (n < 1 || n >= sigma0->num_algebras() + 1) fail(ErrorCode::ConfigError, "need 1 <= n <= #algebras");
  cfg.finish();

  auto lib = TraceState::liberation(sigma0, n);
  OracleDistribution tau(tau_for(state, sigma0, n));
  Table tab(kind, cfg,
            {"index", "P", "t", "value", "tau_t_re", "tau_t_im", "sigma_lib_re", "sigma_lib_im",
             "integral", "evaluations"});
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < polys.size(); ++q)
    for (const Time &t : times) {
      RateResult r = rate_functional(tau, *lib, polys[q], t, opt);
      sup = std::max(sup, r.value);
      tab.row({std::to_string(q + 1), polys[q].str(), t.str(), fmt(r.value), fmt(r.tau_t.real()),
               fmt(r.tau_t.imag()), fmt(r.sigma_lib.real()), fmt(r.sigma_lib.imag()), fmt(r.integral),
               std::to_string(r.evaluations)});
    }
  if (!single) tab.row({"sup", "", "", fmt(sup), "", "", "", "", "", ""});
  return tab.str();
}

std::string decay_bounds(Config &cfg) {
  const int n = cfg.integer("n", 1);
  auto sigma0 = sigma0_from(cfg, "correlated");
  const std::vector<Time> Ts = cfg.time_list("T", {"1/2", "1", "2", "4", "8"});
  json wj = cfg.value("words");
  std::vector<std::vector<Gen>> words;
  if (wj.is_null()) {
    words = {{{1, 1}}, {{1, 1}, {2, 1}}, {{1, 1}, {2, 1}, {1, 1}}};
    cfg.record("words", json::array({json::array({json::array({1, 1})}),
                                     json::array({json::array({1, 1}), json::array({2, 1})}),
                                     json::array({json::array({1, 1}), json::array({2, 1}),
                                                  json::array({1, 1})})}));
  } else {
    // [[[i, j], ...], ...]
    if (!wj.is_array()) Config::bad("words", "a list of [[i, j], ...] sequences");
    for (const json &w : wj) {
      std::vector<Gen> g;
      if (!w.is_array() || w.empty()) Config::bad("words", "a list of [[i, j], ...] sequences");
      for (const json &e : w) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
          Config::bad("words", "a list of [[i, j], ...] sequences");
        g.push_back({e[0].get<int>(), e[1].get<int>()});
      }
      words.push_back(std::move(g));
    }
  }
  cfg.finish();

  Table tab("decay-bounds", cfg, {"m", "word", "T", "lhs", "rhs", "margin"});
  for (const auto &w : words)
    for (const Time &T : Ts) {
      BoundCheck b = alternating_decay_bound(sigma0, n, w, T);
      tab.row({std::to_string(w.size()), word_label(w), T.str(), fmt(b.lhs), fmt(b.rhs),
               fmt(b.rhs - b.lhs)});
    }
  return tab.str();
}

std::string metric(Config &cfg) {
  const std::string compare = cfg.str("compare", "empirical-vs-lib");
  const int N = cfg.integer("N", 16);
  const int n = cfg.integer("n", 1);
  const std::vector<MarginalLaw> marginals = marginals_from(cfg);
  const std::vector<Time> grid = cfg.time_list("grid", {"0", "1/2", "1", "3/2", "2"});
  const int m_max = cfg.integer("m_max", 2);
  const int l_max = cfg.integer("l_max", 3);
  const Time h = cfg.time("h", "1/100");
  const std::uint64_t seed = cfg.seed("seed", 7);
  check_positive(N, "N");
  if (n < 1 || n > int(marginals.size())) fail(ErrorCode::ConfigError, "need 1 <= n <= #marginals");
  if (compare != "empirical-vs-lib" && compare != "free-vs-lib" && compare != "lib-vs-lib")
    fail(ErrorCode::ConfigError, "'compare' must be empirical-vs-lib, free-vs-lib or lib-vs-lib");
  cfg.finish();

  InitialFamily family = build_initial_family(marginals, N, n);
  auto law = family.law();
  OracleDistribution lib(TraceState::liberation(law, n));
  MetricSpec spec{m_max, l_max, grid};
  double d = 0;
  if (compare == "lib-vs-lib") {
    d = trajectory_metric_d(lib, lib, spec);
  } else if (compare == "free-vs-lib") {
    OracleDistribution fr(TraceState::constant(free_product_of_marginals(*law), n));
    d = trajectory_metric_d(fr, lib, spec);
  } else {
    Time t_end(0);
    int record_every = 0;
    for (const Time &t : grid) {
      record_every = std::gcd(record_every, steps_for(t, h, "grid time"));
      t_end = tmax(t_end, t);
    }
    auto traj = std::make_shared<UnitaryTrajectory>(N, n, h, std::max(1, steps_for(t_end, h, "grid time")),
                                                    seed, std::max(1, record_every));
    EmpiricalDistribution emp(family, traj);
    d = trajectory_metric_d(emp, lib, spec);
  }
  Table tab("metric", cfg, {"compare", "N", "seed", "d"});
  tab.row({compare, std::to_string(N), std::to_string(seed), fmt(d)});
  return tab.str();
}

}  // namespace

std::vector<MarginalLaw> two_projections() {
  return {MarginalLaw::atomic({0.0, 1.0}, {0.5, 0.5}), MarginalLaw::atomic({0.0, 1.0}, {0.5, 0.5})};
}

std::shared_ptr<MatrixLaw> correlated_projections(double theta) {
  // p = diag(1,1,0,0); q projects onto two orthonormal vectors tilted away
  // from the range of p by theta and 2 theta.
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
  p(0, 0) = p(1, 1) = 1;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(4), b = Eigen::VectorXcd::Zero(4);
  a(0) = std::cos(theta);
  a(2) = std::sin(theta);
  b(1) = std::cos(2 * theta);
  b(3) = std::sin(2 * theta);
  Eigen::MatrixXcd q = a * a.adjoint() + b * b.adjoint();
  return std::make_shared<MatrixLaw>(std::map<Gen, Eigen::MatrixXcd>{{{1, 1}, p}, {{2, 1}, q}});
}

std::vector<NCPolynomial> pairing_test_polynomials() {
  static const char *texts[] = {
      "X[1,1;1]",
      "X[1,1;1/2]X[2,1;1]",
      "X[1,1;1]X[2,1;2]X[1,1;1/2]",
      "X[2,1;3/2]X[1,1;1]",
      "X[1,1;1/2]X[1,1;3/2]",
      "X[1,1;1]X[2,1;1]X[1,1;1]X[2,1;1]",
      "X[1,1;2]X[2,1;1/2]X[2,1;3/2]",
      "X[1,1;1/4]X[2,1;1]X[1,1;3/2]X[2,1;2]",
      "X[2,1;1]X[2,1;2]",
      "X[1,1;3/2]X[1,1;1/2]X[2,1;1]X[1,1;3/2]",
  };
  std::vector<NCPolynomial> out;
  for (const char *t : texts) out.push_back(NCPolynomial::parse(t));
  return out;
}

std::vector<NCPolynomial> pairing_test_multipliers() {
  static const char *texts[] = {
      "1",
      "X[1,1;1]",
      "X[2,1;1/2]",
      "X[1,1;2]X[2,1;1]",
      "X[2,1;3/2]X[1,1;1/2]",
      "X[1,1;1]X[1,1;2]",
      "X[2,1;1]X[1,1;1]X[2,1;2]",
      "X[1,1;1/2]X[2,1;1/2]",
      "X[2,1;2]",
      "X[1,1;3/2]X[2,1;1]X[1,1;1/4]",
  };
  std::vector<NCPolynomial> out;
  for (const char *t : texts) out.push_back(NCPolynomial::parse(t));
  return out;
}

std::vector<std::string> experiment_kinds() {
  return {"ubm-moments", "liberation-convergence", "chi-orb", "heat-kernel", "condexp-check",
          "rate-minimizer", "rate", "decay-bounds", "metric"};
}

std::string run_experiment(const std::string &kind, const std::string &config_json) {
  json j;
  try {
    j = config_json.empty() ? json::object() : json::parse(config_json);
  } catch (const json::exception &e) {
    fail(ErrorCode::ConfigError, std::string("configuration is not valid JSON: ") + e.what());
  }
  Config cfg(std::move(j));
  if (kind == "ubm-moments") return ubm_moments(cfg);
  if (kind == "liberation-convergence") return liberation_convergence(cfg);
  if (kind == "chi-orb") return chi_orb(cfg);
  if (kind == "heat-kernel") return heat_kernel(cfg);
  if (kind == "condexp-check") return condexp_check(cfg);
  if (kind == "rate-minimizer") return rate_table(cfg, kind, false);
  if (kind == "rate") return rate_table(cfg, kind, true);
  if (kind == "decay-bounds") return decay_bounds(cfg);
  if (kind == "metric") return metric(cfg);
  fail(ErrorCode::ConfigError, "unknown experiment '" + kind + "'");
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok:
      return 0;
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::IoError:
      return 4;
    default:
      return 3;
  }
}

std::shared_ptr<TraceState> state_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    fail(ErrorCode::ConfigError, std::string("state description is not valid JSON: ") + e.what());
  }
  Config cfg(std::move(j));
  const std::string kind = cfg.str("kind", "liberation");
  const int n = cfg.integer("n", 1);
  auto sigma0 = sigma0_from(cfg, "free");
  cfg.finish();
  if (n < 0) fail(ErrorCode::ConfigError, "'n' must be >= 0");
  if (kind == "liberation") return TraceState::liberation(sigma0, n);
  if (kind == "constant") return TraceState::constant(sigma0, n);
  if (kind == "free-constant") return TraceState::constant(free_product_of_marginals(*sigma0), n);
  fail(ErrorCode::ConfigError, "state kind must be liberation, constant or free-constant");
}

}  // namespace liblab
