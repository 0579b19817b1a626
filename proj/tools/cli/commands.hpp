#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spec.hpp"

namespace hypoco::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kInputError = 2, kNumericalFailure = 3 };

struct RunConfig {
  std::string command;
  std::string spec_path;
  std::string certificate_path;
  std::string out_dir;
  std::string format = "json";
  std::uint64_t seed = 20240611;
  std::optional<double> T;
  double beta = 0.5;
  int samples = -1;  // command default when negative
  int degree = 3;
  double t_max = 2000.0;
  std::vector<double> alpha_grid{0.0, 1.0, 10.0, 100.0, 1000.0};
  Tolerances tol;
};

// Environment overrides HYPOCO_<FIELD>_TOL for every tolerance knob.
Tolerances tolerances_from_env(Tolerances base = {});
json tolerances_json(const Tolerances& t);
std::string env_help();

json cmd_structure(const LoadedModel& lm, const RunConfig& cfg);

struct GapOutput {
  json report;
  std::string csv;  // alpha,gap,limit,singular_gap
};
GapOutput cmd_gap(const LoadedModel& lm, const RunConfig& cfg);

json cmd_certify(const LoadedModel& lm, const RunConfig& cfg);
// Carries "pass"; every check is listed with its margin.
json cmd_validate(const LoadedModel& lm, const json& certificate, const RunConfig& cfg);
json cmd_stp(const LoadedModel& lm, const RunConfig& cfg);

struct EvolveOutput {
  json report;
  std::string decay_csv;  // t,norm2,window_avg
  std::string norm_csv;   // t,opnorm,rate
};
EvolveOutput cmd_evolve(const LoadedModel& lm, const RunConfig& cfg);

// Full front end; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hypoco::cli
