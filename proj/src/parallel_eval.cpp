#include "pcma/parallel_eval.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace pcma {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

std::string describe(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown exception";
    }
}

}  // namespace

struct ParallelEvaluator::Impl {
    std::size_t n_workers;
    std::vector<std::thread> threads;

    std::mutex mu;
    std::condition_variable work_cv;
    std::condition_variable done_cv;
    std::uint64_t batch_id = 0;
    std::size_t active = 0;
    bool stop = false;

    // Current batch; only valid while active > 0.
    const Objective* objective = nullptr;
    std::span<const Vector> points;
    std::vector<double>* fvals = nullptr;
    std::vector<double>* times = nullptr;
    std::vector<std::exception_ptr>* errors = nullptr;
    std::atomic<std::size_t> next{0};

    explicit Impl(std::size_t workers) : n_workers(workers) {
        if (n_workers > 1) {
            threads.reserve(n_workers);
            for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back([this] { worker_loop(); });
        }
    }

    ~Impl() {
        {
            std::lock_guard lock(mu);
            stop = true;
        }
        work_cv.notify_all();
        for (auto& t : threads) t.join();
    }

    void run_one(std::size_t i) {
        const auto t0 = Clock::now();
        try {
            (*fvals)[i] = (*objective)(points[i]);
        } catch (...) {
            (*fvals)[i] = std::numeric_limits<double>::quiet_NaN();
            (*errors)[i] = std::current_exception();
        }
        (*times)[i] = seconds_between(t0, Clock::now());
    }

    void drain() {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= points.size()) return;
            run_one(i);
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mu);
                work_cv.wait(lock, [&] { return stop || batch_id != seen; });
                if (stop) return;
                seen = batch_id;
            }
            drain();
            {
                std::lock_guard lock(mu);
                if (--active == 0) done_cv.notify_one();
            }
        }
    }

    void run_batch(const Objective& obj, std::span<const Vector> pts, std::vector<double>& out,
                   std::vector<double>& per_eval, std::vector<std::exception_ptr>& errs) {
        objective = &obj;
        points = pts;
        fvals = &out;
        times = &per_eval;
        errors = &errs;
        next.store(0, std::memory_order_relaxed);

        if (threads.empty()) {
            drain();
            return;
        }
        {
            std::lock_guard lock(mu);
            active = threads.size();
            ++batch_id;
        }
        work_cv.notify_all();
        std::unique_lock lock(mu);
        done_cv.wait(lock, [&] { return active == 0; });
    }
};

ParallelEvaluator::ParallelEvaluator(std::size_t workers) {
    if (workers < 1) throw InvalidArgument("worker count must be at least 1");
    impl_ = std::make_unique<Impl>(workers);
}

ParallelEvaluator::~ParallelEvaluator() = default;
ParallelEvaluator::ParallelEvaluator(ParallelEvaluator&&) noexcept = default;
ParallelEvaluator& ParallelEvaluator::operator=(ParallelEvaluator&&) noexcept = default;

std::size_t ParallelEvaluator::workers() const noexcept { return impl_->n_workers; }

BatchResult ParallelEvaluator::evaluate(const Objective& objective, std::span<const Vector> points) {
    BatchResult result;
    result.fvals.assign(points.size(), 0.0);
    result.eval_seconds.assign(points.size(), 0.0);
    std::vector<std::exception_ptr> errors(points.size());

    const auto t0 = Clock::now();
    impl_->run_batch(objective, points, result.fvals, result.eval_seconds, errors);
    result.wall_time = seconds_between(t0, Clock::now());

    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i]) throw WorkerFailure(i, describe(errors[i]), result.fvals);
    }
    return result;
}

BatchResult evaluate_batch(const Objective& objective, std::span<const Vector> points, std::size_t workers) {
    ParallelEvaluator evaluator(workers);
    return evaluator.evaluate(objective, points);
}

Speedup speedup(double t1, double tp, std::size_t workers) {
    if (!(t1 > 0.0) || !(tp > 0.0)) throw InvalidArgument("timings must be positive");
    if (workers < 1) throw InvalidArgument("worker count must be at least 1");
    const double s = t1 / tp;
    return {s, s / static_cast<double>(workers)};
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("PCMA_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace pcma
