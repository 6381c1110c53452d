// pcma: command-line harness for CMA-ES runs, convergence studies and
// worker-count speedup sweeps.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcma/bench.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
    std::string sigma0 = "auto";
    std::string x0;
    std::string step_rule = "clamped";
    std::string output = "-";
    std::optional<double> target_f;
};

void add_common(CLI::App* cmd, pcma::bench::RunConfig& cfg, CommonFlags& flags) {
    cmd->add_option("--problem", cfg.problem, "Benchmark name")->capture_default_str();
    cmd->add_option("--dim", cfg.dim, "Problem dimension")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--max-evals", cfg.max_evals, "Evaluation budget")->capture_default_str();
    cmd->add_option("--target-f", flags.target_f, "Stop once a generation reaches this f-value");
    cmd->add_option("--sigma0", flags.sigma0, "Initial step size, or 'auto' for the bounds heuristic")
        ->capture_default_str();
    cmd->add_option("--x0", flags.x0, "Initial mean as comma-separated values");
    cmd->add_option("--step-rule", flags.step_rule, "Step-size rule")
        ->check(CLI::IsMember({"clamped", "expected-norm"}))
        ->capture_default_str();
    cmd->add_option("-o,--output", flags.output, "CSV destination, '-' for standard output")->capture_default_str();
}

void apply_common(pcma::bench::RunConfig& cfg, const CommonFlags& flags) {
    cfg.target_f = flags.target_f;
    if (flags.sigma0 != "auto") {
        try {
            cfg.sigma0 = pcma::bench::parse_double(flags.sigma0);
        } catch (const pcma::Error&) {
            throw pcma::InvalidArgument("--sigma0 must be a number or 'auto', got '" + flags.sigma0 + "'");
        }
    }
    if (!flags.x0.empty()) {
        std::vector<double> values;
        std::istringstream ss(flags.x0);
        for (std::string cell; std::getline(ss, cell, ',');) values.push_back(pcma::bench::parse_double(cell));
        cfg.x0 = Eigen::Map<const pcma::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
    cfg.step_rule =
        flags.step_rule == "expected-norm" ? pcma::StepSizeRule::ExpectedNorm : pcma::StepSizeRule::ClampedSquaredNorm;
}

// Standard output or a file, chosen by the --output flag.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    // Human-readable notes go wherever the CSV does not.
    std::ostream& notes() { return file_ ? std::cout : std::cerr; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel CMA-ES optimizer and benchmark harness"};
    app.require_subcommand(1);

    pcma::bench::RunConfig cfg;
    cfg.workers = pcma::default_worker_count();
    CommonFlags flags;

    auto* run_cmd = app.add_subcommand("run", "Single optimization run with a per-generation CSV log");
    add_common(run_cmd, cfg, flags);
    run_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    run_cmd->add_option("--workers", cfg.workers, "Evaluation workers (default: PCMA_WORKERS or hardware threads)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--work-units", cfg.work_units, "Busy-loop iterations added to each evaluation");

    std::vector<std::size_t> worker_list{1, 2, 4};
    double eval_ms = 0.0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Time one fixed-seed run per worker count (speedup/efficiency)");
    add_common(sweep_cmd, cfg, flags);
    sweep_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sweep_cmd->add_option("--workers", worker_list, "Worker counts to time")->delimiter(',')->capture_default_str();
    auto* wu = sweep_cmd->add_option("--work-units", cfg.work_units, "Busy-loop iterations per evaluation");
    sweep_cmd->add_option("--eval-ms", eval_ms, "Calibrate the busy loop to this many milliseconds per evaluation")
        ->excludes(wu)
        ->check(CLI::PositiveNumber);

    std::vector<std::uint64_t> seeds;
    std::size_t num_seeds = 0;
    auto* conv_cmd = app.add_subcommand("convergence", "Multi-seed final-value study");
    add_common(conv_cmd, cfg, flags);
    auto* seeds_opt = conv_cmd->add_option("--seeds", seeds, "Seeds to run")->delimiter(',');
    conv_cmd->add_option("--num-seeds", num_seeds, "Run seeds 0..N-1")->excludes(seeds_opt);
    conv_cmd->add_option("--workers", cfg.workers, "Evaluation workers")->check(CLI::PositiveNumber);

    app.add_subcommand("list", "List the benchmark problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("list")) {
            for (const auto& name : pcma::benchmark_names()) std::cout << name << '\n';
            return 0;
        }

        apply_common(cfg, flags);

        if (run_cmd->parsed()) {
            pcma::bench::validate(cfg);
            Sink sink(flags.output);
            const pcma::Solution sol = pcma::bench::execute(cfg);
            pcma::bench::write_run_csv(sink.stream(), sol.history);
            print_warnings(sol.warnings);
            sink.notes() << "final f(mean) = " << pcma::bench::format_double(sol.f)
                         << "  best f = " << pcma::bench::format_double(sol.best_f) << "  evals = " << sol.evals
                         << "  generations = " << sol.generations << '\n';
            return 0;
        }

        if (sweep_cmd->parsed()) {
            if (worker_list.empty()) throw pcma::InvalidArgument("--workers list must not be empty");
            for (std::size_t p : worker_list) {
                if (p < 1) throw pcma::InvalidArgument("worker counts must be positive");
            }
            if (eval_ms > 0.0) cfg.work_units = pcma::calibrate_work_units(eval_ms / 1000.0);
            pcma::bench::validate(cfg);
            Sink sink(flags.output);
            const auto result = pcma::bench::run_sweep(cfg, worker_list);
            pcma::bench::write_sweep_csv(sink.stream(), result);
            sink.notes() << "work units per evaluation = " << cfg.work_units << '\n';
            if (!result.final_f_consistent) {
                std::cerr << "error: final f differs across worker counts\n";
                return kExitRuntime;
            }
            return 0;
        }

        if (conv_cmd->parsed()) {
            if (num_seeds > 0) {
                for (std::uint64_t s = 0; s < num_seeds; ++s) seeds.push_back(s);
            }
            if (seeds.empty()) throw pcma::InvalidArgument("give --seeds or --num-seeds");
            pcma::bench::validate(cfg);
            Sink sink(flags.output);
            const auto result = pcma::bench::run_convergence(cfg, seeds);
            pcma::bench::write_convergence_csv(sink.stream(), result);
            return 0;
        }
    } catch (const pcma::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pcma::UnknownBenchmark& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
