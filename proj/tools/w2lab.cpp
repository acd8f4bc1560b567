#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "w2lab/acceptance.hpp"
#include "w2lab/common.hpp"
#include "w2lab/lab.hpp"

namespace {

std::vector<int> suite_ids(const std::string& suite) {
  if (suite == "acceptance" || suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (suite == "quick") return {1, 5, 6, 7, 10};
  std::vector<int> ids;
  std::stringstream ss(suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int id = 0;
    try {
      id = std::stoi(item);
    } catch (const std::exception&) {
      throw w2lab::Error(w2lab::ErrorCode::Config, "unknown suite: " + suite);
    }
    if (id < 1 || id > 10) throw w2lab::Error(w2lab::ErrorCode::Config, "criteria are numbered 1..10");
    ids.push_back(id);
  }
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein rate experiments on tori and compact groups"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* list = app.add_subcommand("list", "List the built-in acceptance experiments");
  std::string show;
  list->add_option("--config", show, "Print the config of one catalog entry");

  std::string suite;
  int check_threads = 1;
  auto* check = app.add_subcommand("check", "Run acceptance criteria");
  check->add_option("suite", suite, "acceptance, quick, or a comma list of criterion numbers")->required();
  check->add_option("--threads", check_threads, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      w2lab::ExperimentConfig cfg = w2lab::load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (threads) cfg.threads = *threads;
      if (out) cfg.output = *out;
      cfg.validate();
      auto progress = [&](const std::string& s) {
        if (!quiet) std::cerr << s << "\n";
      };
      w2lab::RunResult res = w2lab::run(cfg, progress);
      std::cout << w2lab::results_csv(res);
      if (res.fit) std::cout << "# fitted log-log slope " << res.fit->slope << "\n";
      if (res.violations > 0) std::cerr << res.violations << " row(s) violated their bound\n";
      return res.exit_code;
    }
    if (*list) {
      if (!show.empty()) {
        for (const auto& e : w2lab::list_experiments()) {
          if (e.id == show) {
            if (e.config.empty()) {
              std::cerr << e.id << " is a suite-only check; run it with `w2lab check " << e.criterion << "`\n";
              return 1;
            }
            std::cout << e.config;
            return 0;
          }
        }
        std::cerr << "no catalog entry " << show << "\n";
        return 1;
      }
      std::cout << w2lab::catalog_text();
      return 0;
    }
    if (*check) {
      w2lab::AcceptanceOptions opts;
      opts.threads = check_threads;
      opts.progress = [](const std::string& s) { std::cerr << "  " << s << "\n"; };
      int failed = 0;
      for (int id : suite_ids(suite)) {
        w2lab::CriterionResult r = w2lab::run_criterion(id, opts);
        std::cout << w2lab::format_result(r) << std::endl;
        if (!r.pass) ++failed;
      }
      return failed == 0 ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "w2lab: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
