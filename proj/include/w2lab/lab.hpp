#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "w2lab/bounds.hpp"
#include "w2lab/measures.hpp"

namespace w2lab {

enum class ExperimentKind { BoundCheck, RateFit, WalkDecay, LpsQuantization, LowerBoundDemo };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& s);

// Flat key = value config, one experiment per file. Arrays are comma lists.
struct ExperimentConfig {
  std::string id = "experiment";
  ExperimentKind kind = ExperimentKind::BoundCheck;
  std::string space = "circle";
  // uniform | cosine (density 1 + amplitude cos(2 pi x_1))
  std::string measure = "uniform";
  double amplitude = 0.5;
  // iid | teleport | lps-walk | two-island
  std::string process = "iid";
  double theta = 0.2;
  double island_p = 0.5;
  int lps_prime = 5;
  // Sample sizes, walk steps, or primes depending on the kind.
  std::vector<std::int64_t> N;
  int replicates = 50;
  std::uint64_t seed = 1;
  int threads = 1;
  // Torus grid side and group reference size for semi-discrete solves.
  int grid = 64;
  int reference_size = 4096;
  // Irrep cutoff for group Fourier data.
  int n_max = 25;
  // Relative slack allowed before a bound counts as violated.
  double tolerance = 1e-9;
  // Factor applied to every bound before comparison; values below 1 stress the check.
  double bound_scale = 1.0;
  std::size_t arc_budget = 0;
  // Check every transport plan's duality certificate.
  bool verify_plans = true;
  std::string output = "w2lab-out";

  void validate() const;
  // Fully resolved config in the same format parse_config reads.
  std::string echo() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

struct ResultRow {
  std::string experiment;
  std::int64_t N = 0;
  int replicates = 0;
  std::optional<double> mc_mean;
  std::optional<double> mc_ci_half_width;
  std::optional<double> systematic_band;
  std::optional<double> bound;
  std::optional<double> t_star;
  // Kind-specific companion value, e.g. the rate ratio or a lower bound.
  std::string reference_name;
  std::optional<double> reference_value;
  std::string status = "ok";
  std::uint64_t seed = 0;
  int plans_verified = 0;
  int plans_failed = 0;
  double wall_seconds = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

// Least-squares line through (log x, log y).
FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct RunResult {
  std::vector<ResultRow> rows;
  std::optional<FitResult> fit;
  int violations = 0;
  std::vector<std::string> notes;
  int exit_code = 0;
};

// Computes the rows without touching the filesystem.
RunResult execute(const ExperimentConfig& config,
                  const std::function<void(const std::string&)>& progress = {});

// execute() plus results.csv, timing.csv, config.echo and plotdata/*.csv under config.output.
RunResult run(const ExperimentConfig& config,
              const std::function<void(const std::string&)>& progress = {});

std::string results_csv(const RunResult& result);
std::string csv_field(const std::string& s);

struct CatalogEntry {
  std::string id;
  int criterion = 0;
  std::string check;
  std::string expected;
  // Lab config text, empty for suite-only checks.
  std::string config;
};

const std::vector<CatalogEntry>& list_experiments();
std::string catalog_text();

}  // namespace w2lab
