#pragma once

// Fork-join batch evaluation of one generation's candidates.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pcma/objectives.hpp"

namespace pcma {

struct BatchResult {
    std::vector<double> fvals;          // index-aligned with the input batch
    double wall_time = 0.0;             // seconds
    std::vector<double> eval_seconds;   // per candidate
};

/// A pool of long-lived workers. Each call to evaluate() hands out one task
/// per candidate from a shared index counter and blocks until every task has
/// finished, so results never depend on completion order.
///
/// One batch at a time: the evaluator may be used from different threads in
/// turn but evaluate() must not be called concurrently on the same instance.
class ParallelEvaluator {
public:
    explicit ParallelEvaluator(std::size_t workers);
    ~ParallelEvaluator();

    ParallelEvaluator(ParallelEvaluator&&) noexcept;
    ParallelEvaluator& operator=(ParallelEvaluator&&) noexcept;
    ParallelEvaluator(const ParallelEvaluator&) = delete;
    ParallelEvaluator& operator=(const ParallelEvaluator&) = delete;

    std::size_t workers() const noexcept;

    /// Throws WorkerFailure (lowest failing index) after the whole batch has
    /// drained if any evaluation threw.
    BatchResult evaluate(const Objective& objective, std::span<const Vector> points);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around a temporary ParallelEvaluator.
BatchResult evaluate_batch(const Objective& objective, std::span<const Vector> points, std::size_t workers);

struct Speedup {
    double speedup;
    double efficiency;
};

/// S = t1/tP and E = S/P.
Speedup speedup(double t1, double tp, std::size_t workers);

/// Worker count used when none is given: the PCMA_WORKERS environment
/// variable if set to a positive integer, else hardware concurrency (min 1).
std::size_t default_worker_count();

}  // namespace pcma
