#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "lrf/analytics.hpp"
#include "lrf/dynamics.hpp"
#include "lrf/model.hpp"

// Experiment orchestration: JSON config ingestion, seeded initialization
// generators, metric extraction, CSV/JSON emission, and the verification
// suite behind the CLI.
namespace lrf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InitKind { GAUSSIAN, NEAR_EQUILIBRIUM, SHARPNESS_MANIFOLD, EXPLICIT };

struct InitSpec {
  InitKind kind = InitKind::GAUSSIAN;
  double scale = 0.1;                   // GAUSSIAN
  std::vector<Eigen::Index> subset;     // NEAR_EQUILIBRIUM: retained lambda1 indices
  double radius = 1e-2;                 // NEAR_EQUILIBRIUM perturbation size
  std::uint64_t seed = 1;
  Matrix z;                             // EXPLICIT (already in Z coordinates)
};

struct ExperimentConfig {
  std::string run_id = "run";
  SpectralTarget target;
  Eigen::Index r = 0;
  InitSpec init;
  IntegratorConfig integrator;
  std::vector<Representation> representations{Representation::P_BLOCKS};
  std::vector<std::string> checks;  // empty = every applicable check
  double bound_scale = 1.0;
  double tau = 0.1;  // anchor for the noise-block envelope
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Deterministic initial factor in Z coordinates.
FactorState make_initial(const InitSpec& init, const SpectralTarget& target, Eigen::Index r);

// Shortest round-trip decimal formatting (std::to_chars).
std::string format_double(double x);

// Standard metric columns for a representation-agnostic lifted view:
// t, norm2_P1_minus_Lambda1, norm2_P0, norm2_P2, V_F, V_N.
struct MetricTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
MetricTable standard_metrics(const Trajectory& traj, const FlowSpec& spec);
std::string to_csv(const MetricTable& table);

// Recover the lifted block view of a recorded state in any representation.
LiftedState lifted_view(const Vector& state, const FlowSpec& spec);

struct CheckResult {
  std::string name;
  std::string status;  // "pass", "fail", "not-applicable"
  double max_violation = 0.0;
  std::string detail;
};

struct VerificationSummary {
  std::vector<CheckResult> checks;
  std::vector<std::string> files;
  bool all_passed() const;
};

VerificationSummary verify_suite(const ExperimentConfig& config);

// Subcommand drivers; each writes its outputs under out_dir and returns the
// process exit code (0 success/all-pass, 1 check failure, 2 config error,
// 3 numerical abort).
int run_simulate(const ExperimentConfig& config, const std::string& out_dir,
                 std::ostream& log);
int run_equilibria(const ExperimentConfig& config, const std::string& out_dir,
                   std::ostream& log);
int run_verify(const ExperimentConfig& config, const std::string& out_dir,
               std::ostream& log);
int run_rates(const ExperimentConfig& config, const std::string& out_dir,
              std::ostream& log);
int run_decompose(const ExperimentConfig& config, const std::string& out_dir,
                  std::ostream& log);

}  // namespace lrf
