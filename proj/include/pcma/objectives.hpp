#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcma/core_math.hpp"

namespace pcma {

/// Search-box bounds, applied identically to every coordinate.
struct Bounds {
    double lo;
    double hi;
};

struct KnownOptimum {
    Vector point;
    double f;
};

struct EvalResult {
    Vector point;
    double f;
};

/// Black-box objective. The wrapped function must be pure: it is called
/// concurrently from evaluator workers and must return the same value for the
/// same point. Copies share the underlying function.
class Objective {
public:
    using Function = std::function<double(std::span<const double>)>;

    Objective(std::string name, Eigen::Index dim, Function fn,
              std::optional<Bounds> bounds = std::nullopt,
              std::optional<KnownOptimum> optimum = std::nullopt);

    const std::string& name() const noexcept { return name_; }
    Eigen::Index dim() const noexcept { return dim_; }
    const std::optional<Bounds>& bounds() const noexcept { return bounds_; }
    const std::optional<KnownOptimum>& known_optimum() const noexcept { return optimum_; }

    /// Throws DimensionMismatch when x has the wrong size.
    double operator()(const Vector& x) const;
    EvalResult evaluate(const Vector& x) const { return {x, (*this)(x)}; }

private:
    std::string name_;
    Eigen::Index dim_;
    std::shared_ptr<const Function> fn_;
    std::optional<Bounds> bounds_;
    std::optional<KnownOptimum> optimum_;
};

double sphere(std::span<const double> x);
double hyperellipsoid(std::span<const double> x);
double rosenbrock(std::span<const double> x);
double rastrigin(std::span<const double> x);
double ackley(std::span<const double> x);
double griewank(std::span<const double> x);
double schwefel_2_22(std::span<const double> x);
double step(std::span<const double> x);
double alpine(std::span<const double> x);

/// Names accepted by benchmark(), in registry order.
std::vector<std::string> benchmark_names();

/// Builds a registered benchmark. Throws UnknownBenchmark for other names.
Objective benchmark(std::string_view name, Eigen::Index dim);

/// Wraps `inner` so each evaluation also runs `work_units` iterations of a
/// harmonic partial sum. The f-values are bitwise those of `inner`.
Objective make_expensive(const Objective& inner, std::uint64_t work_units);

/// Runs the busy loop once and returns its result.
double burn_work(std::uint64_t work_units);

/// Estimates the work_units needed for one busy loop to take `seconds`.
std::uint64_t calibrate_work_units(double seconds);

}  // namespace pcma
