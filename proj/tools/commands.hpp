#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lhr::cli {

/// Everything a subcommand needs, gathered from flags and the optional config document.
struct RunConfig {
  std::string command;
  std::string graph_path;
  std::string instance_path;
  std::string config_path;
  std::string output_path;
  std::string csv_path;
  std::optional<std::string> mu;
  std::optional<std::string> F;
  std::optional<std::string> B;
  std::optional<double> eps;
  std::optional<int> r;
  int r_prime = 0;
  std::optional<std::uint64_t> rng_seed;
  std::string objective;
  std::string matrix = "normalized";
  int samples = 0;
  int jobs = 1;
  std::optional<long long> budget;
  bool oracle = true;
  // audit only
  int max_n = 6;
  std::string kinds;
};

/// Exit codes: 0 success, 1 failed guarantee audit or run error, 2 usage or input error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Executes an already parsed configuration. Throws on errors; returns 0 or 1.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

std::vector<int> parse_int_list(const std::string& text);

}  // namespace lhr::cli
