#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "binsense/certificates.hpp"
#include "binsense/operators.hpp"
#include "binsense/rng.hpp"
#include "binsense/solvers.hpp"

namespace binsense::harness {

struct ExperimentConfig {
  std::size_t n = 100;
  std::vector<std::size_t> s_values;
  std::vector<std::size_t> m_values;
  std::size_t trials = 25;
  ops::Operator::Kind kind = ops::Operator::Kind::circulant;
  rng::EnsembleSpec ensemble = rng::EnsembleSpec::gaussian(1.0);
  double mu = 1.0;  // total additive bias of the operator
  double eta = 0.0;  // noise norm; 0 = noiseless
  bool run_bp = true;
  bool run_ls = true;
  bool run_bpp = false;
  bool certify = true;
  std::uint64_t base_seed = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency (capped by BINSENSE_THREADS)
  solvers::SolverOptions solver;
};

struct ProgramOutcome {
  bool ran = false;
  solvers::SolveStatus status = solvers::SolveStatus::iteration_limit;
  double err = 0.0;  // ||x - x0||_2
  bool success = false;
  double residual_l2 = 0.0;
  std::size_t iterations = 0;
  std::string error;  // non-empty when the solver threw
};

struct TrialResult {
  std::size_t s = 0;
  std::size_t m = 0;
  std::size_t trial = 0;
  std::uint64_t op_digest = 0;
  std::uint64_t signal_digest = 0;
  ProgramOutcome bp, ls, bpp;
  bool cert_built = false;
  bool cert_verified = false;
  double cert_t_actual = 0.0;
  double cert_r = 0.0;
  double cert_radius = 0.0;  // 2 r eta / t_actual when certified and eta > 0
  double noise_bound = 0.0;  // a-priori bound at eta (0 when noiseless)
  std::string error;  // operator/certificate stage failure
};

struct PhaseCell {
  std::size_t s = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t success_bp = 0;
  std::size_t success_ls = 0;
  std::size_t success_bpp = 0;
  std::size_t cert_verified = 0;
  double mean_err_bp = 0.0;
  double mean_err_ls = 0.0;

  double rate_bp() const { return trials ? static_cast<double>(success_bp) / trials : 0.0; }
  double rate_ls() const { return trials ? static_cast<double>(success_ls) / trials : 0.0; }
  double rate_bpp() const { return trials ? static_cast<double>(success_bpp) / trials : 0.0; }
  double rate_cert() const { return trials ? static_cast<double>(cert_verified) / trials : 0.0; }
};

struct PhaseGrid {
  ExperimentConfig config;
  std::vector<PhaseCell> cells;  // s-major, m ascending within s

  const PhaseCell* cell(std::size_t s, std::size_t m) const;
};

// One seeded instance: operator, signal, measurements, requested programs,
// certificate. Fully determined by (config, s, m, trial).
TrialResult run_trial(const ExperimentConfig& config, std::size_t s, std::size_t m,
                      std::size_t trial);

// Full sweep over s_values x m_values x trials. Worker threads split trials;
// aggregation is serial in a fixed order, so outputs are byte-identical for
// any thread count.
PhaseGrid run_phase_grid(const ExperimentConfig& config);

enum class Uniqueness { unique, multiple, none };

struct BruteForceResult {
  Uniqueness verdict = Uniqueness::none;
  rng::BinarySignal witness;  // first solution found (meaningful unless none)
  std::size_t count = 0;      // number of binary solutions
};

// Enumerates all 2^N binary vectors (N <= 20) and counts solutions of
// A x = y within 1e-8 * (1 + ||y||_2).
BruteForceResult brute_force_unique(const ops::Operator& op, const Vec& y);

std::string csv_from_grid(const PhaseGrid& grid);
void write_csv(const PhaseGrid& grid, const std::string& path);
// 8-bit PGM heatmap of one program's success rate ("bp", "ls", "bpp",
// "cert"); s on the x axis, m on the y axis with the origin bottom-left.
void write_pgm(const PhaseGrid& grid, const std::string& program, const std::string& path);
std::string manifest_from_config(const ExperimentConfig& config);
void write_run_manifest(const ExperimentConfig& config, const std::string& path);

// Builds a config from key=value pairs (same keys the run manifest emits);
// unknown keys are rejected.
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);

std::size_t resolve_threads(std::size_t requested);

} // namespace binsense::harness
