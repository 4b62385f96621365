/** @file

    @brief Parameter grids over (variant, p, eps2, h) and their CSV, JSON and
    table renderings.
*/

#ifndef FASD_EXPERIMENT_HPP
#define FASD_EXPERIMENT_HPP

#include "fasd/config.hpp"
#include "fasd/solvers.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fasd {

enum class OutputFormat { Csv, Json };

/// Per-run settings applied on top of each variant's defaults.
struct ConfigOverrides {
  std::optional<StepMode> step;
  std::optional<ProjectionMode> projection;
  std::optional<LipschitzMode> lipschitz;
  std::optional<LocalEnergy> local_energy;
  std::optional<Decomposition> decomposition;
  std::optional<SweepOrder> sweep_order;
  std::optional<DualNormKind> stopping_norm;
  std::optional<double> tol;
  std::optional<int> max_iter;
};

struct ExperimentSpec {
  std::vector<double> p_values;
  std::vector<double> eps2_values;
  /// Finest grids as cells per side (h = 1/n).
  std::vector<int> n_values;
  std::vector<Variant> variants;
  int coarse_n = 4;
  Forcing forcing = Forcing::One;
  ConfigOverrides overrides;
  std::string out_path; ///< empty: standard output
  OutputFormat format = OutputFormat::Csv;
  bool emit_trace = false;
  /// Write 0 in the seconds column so repeated runs compare byte for byte.
  bool deterministic = false;
  int jobs = 0; ///< 0: hardware concurrency
  std::string dump_mesh_path;

  /// Throws std::invalid_argument for empty grids, h finer than 1/4096, or
  /// an h that is not coarse_n * 2^k.
  void validate() const;
  std::size_t cell_count() const;
};

/// Number of levels that refine coarse_n up to n; throws when n is not coarse_n * 2^k.
int levels_for(int coarse_n, int n);

/// Parses "64", "1/64" or "0.015625" into cells per side.
int parse_mesh_size(const std::string& text);

SolverConfig make_config(Variant variant, const ConfigOverrides& overrides);

struct GridRow {
  Variant variant = Variant::FAS;
  double p = 0.0;
  double eps2 = 0.0;
  int n = 0;
  int iterations = 0;
  double rate = 0.0;
  double final_residual = 0.0;
  std::string status; ///< converged | maxiter | diverged | error
  double seconds = 0.0;
  std::string message;
  std::vector<IterationRecord> trace;
};

/// One row per cell, ordered by variant, p, eps2, then h, whatever the
/// completion order of the concurrent solves.
std::vector<GridRow> run_grid(const ExperimentSpec& spec);

void write_csv(std::ostream& os, const std::vector<GridRow>& rows, bool deterministic);
void write_trace_csv(std::ostream& os, const std::vector<GridRow>& rows, bool deterministic);
void write_json(std::ostream& os, const std::vector<GridRow>& rows, bool with_trace,
                bool deterministic);
/// "iterations (rate)" per cell, "-" for cells that did not converge.
void write_table(std::ostream& os, const std::vector<GridRow>& rows);

/**
   Builds an ExperimentSpec from command-line arguments (argv[0] excluded). A
   `--config FILE` of key=value lines supplies defaults; flags given on the
   command line win. Unknown keys are rejected. Returns nullopt when help was
   printed.
*/
std::optional<ExperimentSpec> parse_config(const std::vector<std::string>& args);

/// CLI entry point; returns the process exit code.
int run_cli(const std::vector<std::string>& args);

} // namespace fasd

#endif // FASD_EXPERIMENT_HPP
