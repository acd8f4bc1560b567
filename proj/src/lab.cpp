#include "w2lab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "w2lab/harmonic.hpp"
#include "w2lab/rng.hpp"
#include "w2lab/transport.hpp"

namespace w2lab {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Error config_error(const std::string& msg) { return Error(ErrorCode::Config, msg); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw config_error(key + ": not a number: " + v);
  }
  if (pos != v.size() || !std::isfinite(x)) throw config_error(key + ": not a number: " + v);
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  auto caret = v.find('^');
  if (caret != std::string::npos) {
    std::int64_t b = parse_int(key, trim(v.substr(0, caret)));
    std::int64_t e = parse_int(key, trim(v.substr(caret + 1)));
    if (e < 0 || e > 62) throw config_error(key + ": exponent out of range: " + v);
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < e; ++i) {
      if (r > std::numeric_limits<std::int64_t>::max() / std::max<std::int64_t>(b, 1)) {
        throw config_error(key + ": value overflows: " + v);
      }
      r *= b;
    }
    return r;
  }
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw config_error(key + ": not an integer: " + v);
  }
  if (pos != v.size()) throw config_error(key + ": not an integer: " + v);
  return x;
}

int parse_small(const std::string& key, const std::string& v) {
  std::int64_t x = parse_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw config_error(key + ": out of range: " + v);
  }
  return static_cast<int>(x);
}

std::uint64_t derived_seed(std::uint64_t seed, std::size_t index) {
  Rng rng(seed, 0x6c61620000000000ULL + index);
  return rng.engine()();
}

MeasureSpec base_measure(const ExperimentConfig& cfg, const SpaceModel& space) {
  if (cfg.measure == "uniform") return MeasureSpec::uniform(space);
  TrigTerm term;
  term.k[0] = 1;
  term.a = cfg.amplitude;
  return MeasureSpec::mixture(space, 1.0 - cfg.amplitude, {term});
}

ProcessSpec base_process(const ExperimentConfig& cfg, const SpaceModel& space, std::int64_t n) {
  if (cfg.process == "iid") return ProcessSpec::iid(base_measure(cfg, space), n, cfg.seed);
  if (cfg.process == "teleport") return ProcessSpec::teleport(base_measure(cfg, space), cfg.theta, n, cfg.seed);
  if (cfg.process == "lps-walk") return ProcessSpec::walk(lps_generators(cfg.lps_prime, space), n, cfg.seed);
  return ProcessSpec::two_island(space, n, cfg.seed, cfg.island_p);
}

double lps_q(const ExperimentConfig& cfg, const SpaceModel& space, int prime) {
  FourierPacket pk = fourier_group(lps_generators(prime, space), cfg.n_max);
  SpectralRadiusReport rep = spectral_radius_q(pk);
  return rep.closed_form ? *rep.closed_form : rep.q_at_cutoff;
}

double rate_scale(std::int64_t N, int d) {
  const double n = static_cast<double>(N);
  if (d == 1) return 1.0 / std::sqrt(n);
  if (d == 2) return std::sqrt(std::log(n) / n);
  return std::pow(n, -1.0 / d);
}

struct BoundEval {
  std::optional<double> value;
  std::optional<double> t_star;
};

BoundEval empirical_bound(const ExperimentConfig& cfg, const ProcessSpec& proc, std::int64_t N) {
  const SpaceModel& space = proc.space();
  BoundEval out;
  if (cfg.process == "two-island") return out;
  if (cfg.process == "lps-walk") {
    double B = walk_budget(lps_q(cfg, space, cfg.lps_prime));
    BoundReport r = rw_empirical_bound(B, N, space);
    out.value = r.value;
    out.t_star = r.t_star;
    return out;
  }
  if (space.is_torus() && space.dim() == 1) {
    MixingBudget mb = mixing_budget(proc, N);
    out.value = circle_bound(mb.c, mb.B_beta, N);
    return out;
  }
  BoundReport r = mean_square_optimized(proc, N);
  out.value = r.value;
  out.t_star = r.t_star;
  return out;
}

bool mc_kind(ExperimentKind k) {
  return k == ExperimentKind::BoundCheck || k == ExperimentKind::RateFit || k == ExperimentKind::LowerBoundDemo;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  f << text;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::BoundCheck: return "bound-check";
    case ExperimentKind::RateFit: return "rate-fit";
    case ExperimentKind::WalkDecay: return "walk-decay";
    case ExperimentKind::LpsQuantization: return "lps-quantization";
    case ExperimentKind::LowerBoundDemo: return "lower-bound-demo";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::BoundCheck, ExperimentKind::RateFit, ExperimentKind::WalkDecay,
                 ExperimentKind::LpsQuantization, ExperimentKind::LowerBoundDemo}) {
    if (s == to_string(k)) return k;
  }
  throw config_error("unknown experiment kind: " + s);
}

void ExperimentConfig::validate() const {
  if (id.empty() || id.find_first_of(",\"\n") != std::string::npos) throw config_error("id must be a plain token");
  SpaceModel sp = SpaceModel::parse(space);
  if (measure != "uniform" && measure != "cosine") throw config_error("measure must be uniform or cosine");
  if (measure == "cosine") {
    if (!sp.is_torus()) throw config_error("cosine measure needs a torus");
    if (!(amplitude >= 0.0 && amplitude < 1.0)) throw config_error("amplitude must lie in [0, 1)");
  }
  if (process != "iid" && process != "teleport" && process != "lps-walk" && process != "two-island") {
    throw config_error("process must be iid, teleport, lps-walk or two-island");
  }
  if (process == "teleport" && !(theta > 0.0 && theta <= 1.0)) throw config_error("theta must lie in (0, 1]");
  if (process == "two-island") {
    if (!sp.is_torus()) throw config_error("two-island process needs a torus");
    if (!(island_p > 0.0 && island_p < 1.0)) throw config_error("island_p must lie in (0, 1)");
  }
  const bool needs_group = process == "lps-walk" || kind == ExperimentKind::WalkDecay ||
                           kind == ExperimentKind::LpsQuantization;
  if (needs_group && !sp.is_group()) throw config_error("LPS experiments need su2 or so3");
  if (needs_group && kind != ExperimentKind::LpsQuantization && (!is_prime(lps_prime) || lps_prime % 4 != 1)) {
    throw config_error("lps_prime must be a prime congruent to 1 mod 4");
  }
  if (N.empty()) throw config_error("N grid is empty");
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (N[i] < 1) throw config_error("N values must be positive");
    if (i > 0 && N[i] <= N[i - 1]) throw config_error("N grid must be strictly increasing");
    if (kind == ExperimentKind::LpsQuantization && (!is_prime(N[i]) || N[i] % 4 != 1)) {
      throw config_error("lps-quantization N values must be primes congruent to 1 mod 4");
    }
  }
  if (mc_kind(kind) && replicates < 2) throw config_error("replicates must be at least 2");
  if ((kind == ExperimentKind::RateFit || kind == ExperimentKind::LowerBoundDemo) && N.size() < 2) {
    throw config_error("a fit needs at least two N values");
  }
  if (threads < 1) throw config_error("threads must be positive");
  if (grid < 1) throw config_error("grid must be positive");
  if (reference_size < 16) throw config_error("reference_size must be at least 16");
  if (n_max < 2) throw config_error("n_max must be at least 2");
  if (!(tolerance >= 0.0)) throw config_error("tolerance must be nonnegative");
  if (!(bound_scale > 0.0)) throw config_error("bound_scale must be positive");
  if (output.empty()) throw config_error("output path is empty");
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "id = " << id << "\n";
  os << "kind = " << to_string(kind) << "\n";
  os << "space = " << space << "\n";
  os << "measure = " << measure << "\n";
  os << "amplitude = " << exact(amplitude) << "\n";
  os << "process = " << process << "\n";
  os << "theta = " << exact(theta) << "\n";
  os << "island_p = " << exact(island_p) << "\n";
  os << "lps_prime = " << lps_prime << "\n";
  os << "N = ";
  for (std::size_t i = 0; i < N.size(); ++i) os << (i ? ", " : "") << N[i];
  os << "\n";
  os << "replicates = " << replicates << "\n";
  os << "seed = " << seed << "\n";
  os << "threads = " << threads << "\n";
  os << "grid = " << grid << "\n";
  os << "reference_size = " << reference_size << "\n";
  os << "n_max = " << n_max << "\n";
  os << "tolerance = " << exact(tolerance) << "\n";
  os << "bound_scale = " << exact(bound_scale) << "\n";
  os << "arc_budget = " << arc_budget << "\n";
  os << "verify_plans = " << (verify_plans ? "true" : "false") << "\n";
  os << "output = " << output << "\n";
  return os.str();
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    if (!seen.emplace(key, val).second) throw config_error("duplicate key: " + key);
    if (key == "id") cfg.id = val;
    else if (key == "kind") cfg.kind = parse_kind(val);
    else if (key == "space") cfg.space = val;
    else if (key == "measure") cfg.measure = val;
    else if (key == "amplitude") cfg.amplitude = parse_double(key, val);
    else if (key == "process") cfg.process = val;
    else if (key == "theta") cfg.theta = parse_double(key, val);
    else if (key == "island_p") cfg.island_p = parse_double(key, val);
    else if (key == "lps_prime") cfg.lps_prime = parse_small(key, val);
    else if (key == "N") {
      cfg.N.clear();
      std::istringstream items(val);
      std::string item;
      while (std::getline(items, item, ',')) cfg.N.push_back(parse_int(key, trim(item)));
    } else if (key == "replicates") cfg.replicates = parse_small(key, val);
    else if (key == "seed") {
      std::int64_t s = parse_int(key, val);
      if (s < 0) throw config_error("seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "threads") cfg.threads = parse_small(key, val);
    else if (key == "grid") cfg.grid = parse_small(key, val);
    else if (key == "reference_size") cfg.reference_size = parse_small(key, val);
    else if (key == "n_max") cfg.n_max = parse_small(key, val);
    else if (key == "tolerance") cfg.tolerance = parse_double(key, val);
    else if (key == "bound_scale") cfg.bound_scale = parse_double(key, val);
    else if (key == "arc_budget") {
      std::int64_t b = parse_int(key, val);
      if (b < 0) throw config_error("arc_budget must be nonnegative");
      cfg.arc_budget = static_cast<std::size_t>(b);
    } else if (key == "verify_plans") {
      if (val == "true" || val == "1") cfg.verify_plans = true;
      else if (val == "false" || val == "0") cfg.verify_plans = false;
      else throw config_error("verify_plans must be true or false");
    } else if (key == "output") cfg.output = val;
    else throw config_error("unknown key: " + key);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw config_error("cannot read config " + file.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive data");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  FitResult f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  f.points = static_cast<int>(x.size());
  return f;
}

RunResult execute(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress) {
  cfg.validate();
  const SpaceModel space = SpaceModel::parse(cfg.space);
  RunResult res;
  auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  using clock = std::chrono::steady_clock;

  if (mc_kind(cfg.kind)) {
    MCOptions mo;
    mo.threads = cfg.threads;
    mo.semidiscrete.grid = cfg.grid;
    mo.semidiscrete.reference_size = cfg.reference_size;
    mo.semidiscrete.transport.arc_budget = cfg.arc_budget;
    mo.semidiscrete.verify = cfg.verify_plans;
    for (std::size_t i = 0; i < cfg.N.size(); ++i) {
      const std::int64_t N = cfg.N[i];
      auto t0 = clock::now();
      ProcessSpec proc = base_process(cfg, space, N);
      const std::uint64_t seed = derived_seed(cfg.seed, i);
      MCEstimate est = mc_expected_w2sq(proc, proc.stationary(), cfg.replicates, seed, mo);
      ResultRow row;
      row.experiment = cfg.id;
      row.N = N;
      row.replicates = est.replicates;
      row.mc_mean = est.mean;
      row.mc_ci_half_width = est.ci_half_width;
      row.systematic_band = est.systematic_band;
      row.seed = seed;
      BoundEval b = empirical_bound(cfg, proc, N);
      if (b.value) row.bound = *b.value * cfg.bound_scale;
      row.t_star = b.t_star;
      if (cfg.kind == ExperimentKind::RateFit) {
        row.reference_name = "rate_ratio";
        row.reference_value = std::sqrt(std::max(est.mean, 0.0)) / rate_scale(N, space.dim());
      } else if (cfg.kind == ExperimentKind::LowerBoundDemo) {
        row.reference_name = "mean_times_sqrtN";
        row.reference_value = est.mean * std::sqrt(static_cast<double>(N));
      }
      if (row.bound) {
        double rms = std::sqrt(std::max(est.mean, 0.0));
        if (rms - est.systematic_band > *row.bound * (1.0 + cfg.tolerance)) {
          row.status = "violated";
          ++res.violations;
        }
      }
      if (!est.band_certified && row.status == "ok") row.status = "ok-heuristic-band";
      row.plans_verified = est.plans_verified;
      row.plans_failed = est.plans_failed;
      if (est.plans_failed > 0) {
        row.status = "certificate-failed";
        ++res.violations;
      }
      row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      say("N=" + std::to_string(N) + " mean=" + num(est.mean) + " (" + num(row.wall_seconds) + " s)");
      res.rows.push_back(row);
    }
    if (cfg.kind != ExperimentKind::BoundCheck) {
      std::vector<double> xs, ys;
      for (const auto& r : res.rows) {
        xs.push_back(static_cast<double>(r.N));
        ys.push_back(*r.mc_mean);
      }
      res.fit = loglog_fit(xs, ys);
    }
  } else if (cfg.kind == ExperimentKind::WalkDecay) {
    MeasureSpec gens = lps_generators(cfg.lps_prime, space);
    FourierPacket pk = fourier_group(gens, cfg.n_max);
    const double q = lps_q(cfg, space, cfg.lps_prime);
    const MeasureSpec vol = MeasureSpec::uniform(space);
    const FourierPacket vol_pk = fourier_group(vol, cfg.n_max);
    for (std::size_t i = 0; i < cfg.N.size(); ++i) {
      auto t0 = clock::now();
      const std::int64_t n = cfg.N[i];
      ResultRow row;
      row.experiment = cfg.id;
      row.N = n;
      const double qn = std::pow(q, static_cast<double>(n));
      BoundReport qb = q_w2_bound(qn, space);
      row.bound = qb.value;
      row.t_star = qb.t_star;
      // Smoothing bound from the actual Fourier data of the n-step law.
      FourierPacket diff = packet_difference(convolution_power(pk, static_cast<int>(n)), vol_pk);
      OptimizeResult opt = optimize_t([&](double t) { return smoothing_rhs(vol, diff, t).value; }, 1e-6, 1.0);
      row.reference_name = "smoothing_bound";
      row.reference_value = opt.value;
      row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      res.rows.push_back(row);
    }
  } else {
    SemiDiscreteOptions so;
    so.reference_size = cfg.reference_size;
    so.reference_seed = cfg.seed;
    so.transport.arc_budget = cfg.arc_budget;
    so.verify = cfg.verify_plans;
    for (std::size_t i = 0; i < cfg.N.size(); ++i) {
      auto t0 = clock::now();
      const int p = static_cast<int>(cfg.N[i]);
      MeasureSpec nu = lps_generators(p, space);
      SemiDiscreteResult sd = w2_semidiscrete(nu.atoms().points, MeasureSpec::uniform(space), so);
      ResultRow row;
      row.experiment = cfg.id;
      row.N = p;
      row.replicates = 1;
      row.mc_mean = sd.value * sd.value;
      row.systematic_band = sd.error_bound;
      row.seed = cfg.seed;
      const double q = 2.0 * std::sqrt(static_cast<double>(p)) / (p + 1.0);
      BoundReport qb = q_w2_bound(q, space);
      row.bound = qb.value * cfg.bound_scale;
      row.t_star = qb.t_star;
      BoundReport floor = quantization_floor(static_cast<std::int64_t>(nu.atoms().points.size()), space);
      row.reference_name = "packing_floor";
      row.reference_value = floor.value;
      if (sd.certificate) {
        row.plans_verified = 1;
        row.plans_failed = sd.certificate->ok ? 0 : 1;
      }
      if (sd.value + sd.error_bound < floor.value || sd.value - sd.error_bound > *row.bound * (1.0 + cfg.tolerance)) {
        row.status = "outside-bracket";
        ++res.violations;
      } else if (!sd.certified) {
        row.status = "ok-heuristic-band";
      }
      if (row.plans_failed > 0) {
        row.status = "certificate-failed";
        ++res.violations;
      }
      row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      say("p=" + std::to_string(p) + " W2=" + num(sd.value));
      res.rows.push_back(row);
    }
  }
  res.exit_code = cfg.kind == ExperimentKind::BoundCheck && res.violations > 0 ? 2 : 0;
  return res;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string results_csv(const RunResult& result) {
  std::ostringstream os;
  os << "# w2lab-schema v1\r\n";
  os << "experiment,N,replicates,mc_mean,mc_rms,mc_ci_half_width,systematic_band,bound,t_star,"
        "reference_name,reference_value,status,plans_verified,plans_failed,seed\r\n";
  for (const auto& r : result.rows) {
    std::optional<double> rms;
    if (r.mc_mean) rms = std::sqrt(std::max(*r.mc_mean, 0.0));
    os << csv_field(r.experiment) << ',' << r.N << ',' << r.replicates << ',' << opt_num(r.mc_mean) << ','
       << opt_num(rms) << ',' << opt_num(r.mc_ci_half_width) << ',' << opt_num(r.systematic_band) << ','
       << opt_num(r.bound) << ',' << opt_num(r.t_star) << ',' << csv_field(r.reference_name) << ','
       << opt_num(r.reference_value) << ',' << csv_field(r.status) << ',' << r.plans_verified << ','
       << r.plans_failed << ',' << r.seed << "\r\n";
  }
  return os.str();
}

RunResult run(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress) {
  RunResult res = execute(cfg, progress);
  namespace fs = std::filesystem;
  const fs::path out(cfg.output);
  fs::create_directories(out / "plotdata");
  write_file(out / "results.csv", results_csv(res));
  write_file(out / "config.echo", cfg.echo());

  std::ostringstream timing;
  timing << "N,wall_seconds\r\n";
  for (const auto& r : res.rows) timing << r.N << ',' << num(r.wall_seconds) << "\r\n";
  write_file(out / "timing.csv", timing.str());

  std::ostringstream mean, bound, ref;
  mean << "N,mc_mean,ci_half_width\r\n";
  bound << "N,bound_squared\r\n";
  ref << "N," << (res.rows.empty() ? "reference" : csv_field(res.rows.front().reference_name)) << "\r\n";
  bool has_mean = false, has_bound = false, has_ref = false;
  for (const auto& r : res.rows) {
    if (r.mc_mean) {
      has_mean = true;
      mean << r.N << ',' << num(*r.mc_mean) << ',' << opt_num(r.mc_ci_half_width) << "\r\n";
    }
    if (r.bound) {
      has_bound = true;
      bound << r.N << ',' << num(*r.bound * *r.bound) << "\r\n";
    }
    if (r.reference_value) {
      has_ref = true;
      ref << r.N << ',' << num(*r.reference_value) << "\r\n";
    }
  }
  if (has_mean) write_file(out / "plotdata" / "mc_mean.csv", mean.str());
  if (has_bound) write_file(out / "plotdata" / "bound.csv", bound.str());
  if (has_ref) write_file(out / "plotdata" / "reference.csv", ref.str());
  if (res.fit) {
    std::ostringstream fit;
    fit << "slope,intercept,points\r\n" << num(res.fit->slope) << ',' << num(res.fit->intercept) << ','
        << res.fit->points << "\r\n";
    write_file(out / "plotdata" / "fit.csv", fit.str());
  }
  return res;
}

const std::vector<CatalogEntry>& list_experiments() {
  static const std::vector<CatalogEntry> catalog = {
      {"circle-iid", 1, "circle-mixing-closed-form",
       "MC mean W2^2 <= 2/(3N) with slack >= 4 for N in {100, 200, 400}",
       "id = circle-iid\nkind = bound-check\nspace = circle\nprocess = iid\nN = 100, 200, 400\n"
       "replicates = 200\nseed = 1\n"},
      {"torus2-ast", 2, "weakly-dependent-mean-square",
       "rate ratio at N = 4096 in [0.20, 0.45]; optimized bound <= 2.5 x (4 pi)^{-1/2}",
       "id = torus2-ast\nkind = rate-fit\nspace = torus2\nprocess = iid\nN = 2^8, 2^9, 2^10, 2^11, 2^12\n"
       "replicates = 50\ngrid = 96\nseed = 2\n"},
      {"torus2-teleport", 3, "weakly-dependent-mean-square",
       "teleport chain with theta = 0.2 stays below the mixing-aware bound",
       "id = torus2-teleport\nkind = bound-check\nspace = torus2\nprocess = teleport\ntheta = 0.2\n"
       "N = 2^8, 2^10\nreplicates = 30\ngrid = 96\nseed = 3\n"},
      {"smoothing-atoms", 4, "smoothing-inequality",
       "20 random 20-atom measures on the 2-torus: W2 - band <= smoothing bound at t in {1e-3, 1e-2, 1e-1}", ""},
      {"dispersion", 5, "heat-dispersion", "dispersion integral <= 2 d t on 20 log-spaced t in [1e-4, 1]", ""},
      {"lps-ramanujan", 6, "ramanujan-spectral-radius",
       "LPS p = 5 singular values <= 2 sqrt(5)/6 + 1e-9 up to n = 25",
       "id = lps-ramanujan\nkind = walk-decay\nspace = su2\nprocess = lps-walk\nlps_prime = 5\nn_max = 25\n"
       "N = 1, 2, 4, 8\nreplicates = 2\n"},
      {"circle-q-bound", 7, "spectral-radius-circle",
       "exact W2 of 1 + 0.5 cos(2 pi x) <= 0.25/sqrt(3); 2-torus constant audit in [2.76, 2.78]", ""},
      {"lps-walk-empirical", 8, "walk-empirical-numeric",
       "LPS walk on SU2 below the walk bound plus band; Fourier sum below the spectral component",
       "id = lps-walk-empirical\nkind = bound-check\nspace = su2\nprocess = lps-walk\nlps_prime = 5\n"
       "N = 2^8, 2^10\nreplicates = 25\nreference_size = 4096\nseed = 8\n"},
      {"two-island", 9, "two-island-lower-bound", "log-log slope of MC mean W2^2 in [-0.6, -0.4]",
       "id = two-island\nkind = lower-bound-demo\nspace = torus2\nprocess = two-island\n"
       "N = 2^6, 2^7, 2^8, 2^9, 2^10, 2^11, 2^12\nreplicates = 300\ngrid = 128\nseed = 9\n"},
      {"transport-oracle", 10, "transport-certificate",
       "100 random instances up to 4x4 match vertex enumeration to 1e-12; all plans certified", ""},
  };
  return catalog;
}

std::string catalog_text() {
  std::ostringstream os;
  for (const auto& e : list_experiments()) {
    os << e.criterion << "\t" << e.id << "\t" << e.check << "\t" << e.expected << "\n";
  }
  return os.str();
}

}  // namespace w2lab
