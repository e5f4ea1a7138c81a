#pragma once

#include "rogue/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace rogue::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kUsage = 2,
  kSingular = 3,
  kVerificationFailed = 4,
  kNotConverged = 5,
};

/// Everything a run depends on; echoed into every output.
struct RunConfig {
  std::string command;
  std::string params_path;  // empty: built-in defaults (alpha 12, beta 1, gamma -8, omega 1, mu = nu = 0)
  int order = 1;
  std::string free;         // "z21=1,z24=1"
  std::string form = "corrected";
  bool override_singular = false;
  int threads = 0;          // 0: OpenMP default
  std::string out;          // empty: stdout

  // field, extrema
  std::string grid = "201x201";
  std::string xrange = "-5:5";
  std::string yrange = "-5:5";
  double t = 0;
  double threshold = 0.1;
  double min_separation = 2.0;
  bool no_refine = false;

  // solve
  std::uint64_t seed = 1;
  std::string start;        // "z0=1,z1=1"
  int starts = 0;           // order 1: extra uniform starts in [-10, 10]^2
  double perturb = 0.01;
  std::size_t samples = 200;
  double tol = 0;           // 0: 1e-12, or 1e-10 for the sampled order-3 system
  int max_iter = 200;

  // fdcheck
  std::string points;       // "x,y,t;x,y,t"
  int random_points = 0;
  std::string steps = "0.4,0.2,0.1";
};

Json config_json(const RunConfig& config);

/// Runs one command, writing its artifact to config.out or `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs; maps exceptions to exit codes.
int main_entry(int argc, char** argv);

}  // namespace rogue::cli
