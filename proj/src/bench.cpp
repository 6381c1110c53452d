#include "pcma/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace pcma::bench {

void validate(const RunConfig& config) {
    const auto names = benchmark_names();
    if (std::find(names.begin(), names.end(), config.problem) == names.end()) {
        throw UnknownBenchmark("unknown benchmark '" + config.problem + "'");
    }
    if (config.dim < 1) throw InvalidArgument("--dim must be at least 1");
    if (config.workers < 1) throw InvalidArgument("--workers must be at least 1");
    const std::size_t lambda = default_params(config.dim).lambda;
    if (config.max_evals < lambda) {
        throw InvalidArgument("--max-evals " + std::to_string(config.max_evals) + " is below the population size " +
                              std::to_string(lambda) + " for dimension " + std::to_string(config.dim));
    }
    if (config.sigma0 && !(*config.sigma0 > 0.0)) throw InvalidArgument("--sigma0 must be positive or 'auto'");
    if (config.x0 && config.x0->size() != config.dim) {
        throw InvalidArgument("--x0 has " + std::to_string(config.x0->size()) + " entries, expected " +
                              std::to_string(config.dim));
    }
}

Objective make_objective(const RunConfig& config) {
    Objective obj = benchmark(config.problem, config.dim);
    return config.work_units > 0 ? make_expensive(obj, config.work_units) : obj;
}

Solution execute(const RunConfig& config) {
    validate(config);
    const Objective obj = make_objective(config);
    StrategyParams params = default_params(config.dim);
    params.step_rule = config.step_rule;

    Termination term;
    term.max_evals = config.max_evals;
    term.target_f = config.target_f;

    RunOptions opts;
    opts.seed = config.seed;
    opts.workers = config.workers;
    opts.x0 = config.x0;
    opts.sigma0 = config.sigma0;
    return run(obj, params, term, opts);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(std::begin(buf), std::end(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("not a number: '" + text + "'");
    }
    return v;
}

void write_run_csv(std::ostream& out, std::span<const GenerationRecord> history) {
    out << kRunHeader << '\n';
    for (const auto& r : history) {
        out << r.generation << ',' << r.evals << ',' << format_double(r.best_f_gen) << ','
            << format_double(r.best_f_so_far) << ',' << format_double(r.sigma) << ',' << format_double(r.cond_C)
            << ',' << format_double(r.wall_ms) << '\n';
    }
}

SweepResult run_sweep(const RunConfig& config, std::span<const std::size_t> workers) {
    if (workers.empty()) throw InvalidArgument("worker list must not be empty");
    std::vector<std::size_t> plan(workers.begin(), workers.end());
    if (std::find(plan.begin(), plan.end(), std::size_t{1}) == plan.end()) plan.insert(plan.begin(), 1);

    struct Timed {
        std::size_t p;
        double wall_s;
        double final_f;
    };
    std::vector<Timed> timed;
    for (std::size_t p : plan) {
        RunConfig c = config;
        c.workers = p;
        const Solution s = execute(c);
        timed.push_back({p, s.wall_s, s.f});
    }

    const auto base = std::find_if(timed.begin(), timed.end(), [](const Timed& t) { return t.p == 1; });
    SweepResult result;
    for (const auto& t : timed) {
        const Speedup s = speedup(base->wall_s, t.wall_s, t.p);
        result.rows.push_back({t.p, t.wall_s, s.speedup, s.efficiency, t.final_f});
        if (std::memcmp(&t.final_f, &base->final_f, sizeof(double)) != 0) result.final_f_consistent = false;
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << kSweepHeader << '\n';
    for (const auto& r : result.rows) {
        out << r.workers << ',' << format_double(r.wall_s) << ',' << format_double(r.speedup) << ','
            << format_double(r.efficiency) << ',' << format_double(r.final_f) << '\n';
    }
}

ConvergenceStats summarize(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("cannot summarize an empty sample");
    std::sort(values.begin(), values.end(), [](double a, double b) {
        // NaN sorts last.
        if (std::isnan(a)) return false;
        if (std::isnan(b)) return true;
        return a < b;
    });
    const std::size_t n = values.size();
    const double median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return {median, values.front(), values.back()};
}

ConvergenceResult run_convergence(const RunConfig& config, std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw InvalidArgument("need at least one seed");
    ConvergenceResult result;
    std::vector<double> finals;
    std::vector<double> bests;
    std::vector<double> evals;
    for (std::uint64_t seed : seeds) {
        RunConfig c = config;
        c.seed = seed;
        const Solution s = execute(c);
        result.rows.push_back({seed, s.evals, s.f, s.best_f});
        finals.push_back(s.f);
        bests.push_back(s.best_f);
        evals.push_back(static_cast<double>(s.evals));
    }
    result.final_f = summarize(finals);
    result.best_f = summarize(bests);
    result.evals = summarize(evals);
    return result;
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result) {
    out << kConvergenceHeader << '\n';
    for (const auto& r : result.rows) {
        out << r.seed << ',' << r.evals << ',' << format_double(r.final_f) << ',' << format_double(r.best_f) << '\n';
    }
    out << "median," << format_double(result.evals.median) << ',' << format_double(result.final_f.median) << ','
        << format_double(result.best_f.median) << '\n';
    out << "min," << format_double(result.evals.min) << ',' << format_double(result.final_f.min) << ','
        << format_double(result.best_f.min) << '\n';
    out << "max," << format_double(result.evals.max) << ',' << format_double(result.final_f.max) << ','
        << format_double(result.best_f.max) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.header.size()) {
            throw InvalidArgument("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                                  std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace pcma::bench
