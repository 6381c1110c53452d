#pragma once

// Experiment drivers behind the `pcma` command line: single runs, multi-seed
// convergence studies and worker-count speedup sweeps, all emitting CSV.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcma/cma.hpp"

namespace pcma::bench {

inline constexpr const char* kRunHeader = "generation,evals,best_f_gen,best_f_so_far,sigma,cond_C,wall_ms";
inline constexpr const char* kSweepHeader = "workers,wall_s,speedup,efficiency,final_f";
inline constexpr const char* kConvergenceHeader = "seed,evals,final_f,best_f";

struct RunConfig {
    std::string problem = "sphere";
    Eigen::Index dim = 10;
    std::size_t max_evals = 5000;
    std::optional<double> target_f;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::optional<double> sigma0;   // nullopt means "auto"
    std::optional<Vector> x0;
    StepSizeRule step_rule = StepSizeRule::ClampedSquaredNorm;
    std::uint64_t work_units = 0;   // > 0 wraps the problem with make_expensive
};

/// Throws UnknownBenchmark or InvalidArgument for an unusable config.
void validate(const RunConfig& config);

Objective make_objective(const RunConfig& config);

/// Validates, then runs one optimization.
Solution execute(const RunConfig& config);

/// Shortest decimal text that reads back to the same double; "inf", "-inf", "nan".
std::string format_double(double v);

void write_run_csv(std::ostream& out, std::span<const GenerationRecord> history);

struct SweepRow {
    std::size_t workers;
    double wall_s;
    double speedup;
    double efficiency;
    double final_f;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool final_f_consistent = true;   // final f bitwise equal across worker counts
};

/// Runs `config` once per worker count. A single-worker baseline is run
/// first (and reported) when the list does not contain 1.
SweepResult run_sweep(const RunConfig& config, std::span<const std::size_t> workers);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

struct ConvergenceRow {
    std::uint64_t seed;
    std::size_t evals;
    double final_f;
    double best_f;
};

struct ConvergenceStats {
    double median;
    double min;
    double max;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    ConvergenceStats final_f;
    ConvergenceStats best_f;
    ConvergenceStats evals;
};

ConvergenceStats summarize(std::vector<double> values);

/// One run per seed; config.seed is ignored.
ConvergenceResult run_convergence(const RunConfig& config, std::span<const std::uint64_t> seeds);

/// Per-seed rows, then summary rows whose seed column is "median", "min", "max".
void write_convergence_csv(std::ostream& out, const ConvergenceResult& result);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws InvalidArgument if absent.
    std::size_t column(const std::string& name) const;
};

/// Plain comma-separated reader (no quoting); every row must match the header width.
CsvTable read_csv(std::istream& in);

double parse_double(const std::string& text);

}  // namespace pcma::bench
