#include "pcma/objectives.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace pcma {

Objective::Objective(std::string name, Eigen::Index dim, Function fn, std::optional<Bounds> bounds,
                     std::optional<KnownOptimum> optimum)
    : name_(std::move(name)), dim_(dim), fn_(std::make_shared<const Function>(std::move(fn))),
      bounds_(bounds), optimum_(std::move(optimum)) {
    if (dim_ < 1) throw InvalidArgument("objective dimension must be at least 1");
    if (bounds_ && !(bounds_->lo < bounds_->hi)) throw InvalidArgument("objective bounds must satisfy lo < hi");
}

double Objective::operator()(const Vector& x) const {
    if (x.size() != dim_) {
        throw DimensionMismatch(name_ + " expects dimension " + std::to_string(dim_) + ", got " +
                                std::to_string(x.size()));
    }
    return (*fn_)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double hyperellipsoid(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i + 1) * x[i] * x[i];
    return s;
}

double rosenbrock(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

double ackley(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

double griewank(std::span<const double> x) {
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * x[i];
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sum / 4000.0 - prod;
}

double schwefel_2_22(std::span<const double> x) {
    double sum = 0.0;
    double prod = 1.0;
    for (double v : x) {
        sum += std::abs(v);
        prod *= std::abs(v);
    }
    return sum + prod;
}

double step(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        const double r = std::floor(v + 0.5);
        s += r * r;
    }
    return s;
}

double alpine(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
    return s;
}

namespace {

struct Entry {
    const char* name;
    double (*fn)(std::span<const double>);
    Bounds bounds;
    double optimum_coord;
    Eigen::Index min_dim;
};

constexpr Entry kRegistry[] = {
    {"sphere", &sphere, {-5.12, 5.12}, 0.0, 1},
    {"hyperellipsoid", &hyperellipsoid, {-5.12, 5.12}, 0.0, 1},
    {"rosenbrock", &rosenbrock, {-30.0, 30.0}, 1.0, 2},
    {"rastrigin", &rastrigin, {-5.12, 5.12}, 0.0, 1},
    {"ackley", &ackley, {-32.768, 32.768}, 0.0, 1},
    {"griewank", &griewank, {-600.0, 600.0}, 0.0, 1},
    {"schwefel_2_22", &schwefel_2_22, {-10.0, 10.0}, 0.0, 1},
    {"step", &step, {-100.0, 100.0}, 0.0, 1},
    {"alpine", &alpine, {-10.0, 10.0}, 0.0, 1},
};

}  // namespace

std::vector<std::string> benchmark_names() {
    std::vector<std::string> names;
    for (const auto& e : kRegistry) names.emplace_back(e.name);
    return names;
}

Objective benchmark(std::string_view name, Eigen::Index dim) {
    const auto* it = std::find_if(std::begin(kRegistry), std::end(kRegistry),
                                  [&](const Entry& e) { return name == e.name; });
    if (it == std::end(kRegistry)) throw UnknownBenchmark("unknown benchmark '" + std::string(name) + "'");
    if (dim < it->min_dim) {
        throw InvalidArgument(std::string(it->name) + " needs dimension >= " + std::to_string(it->min_dim));
    }
    const Vector opt = Vector::Constant(dim, it->optimum_coord);
    const double f_opt = it->fn(std::span<const double>(opt.data(), static_cast<std::size_t>(dim)));
    return Objective(it->name, dim, it->fn, it->bounds, KnownOptimum{opt, f_opt});
}

double burn_work(std::uint64_t work_units) {
    double s = 0.0;
    for (std::uint64_t i = 1; i <= work_units; ++i) s += 1.0 / static_cast<double>(i);
    return s;
}

namespace {
// Sink for the busy-loop result; written, never read by the optimizer.
volatile double g_work_sink = 0.0;
}  // namespace

Objective make_expensive(const Objective& inner, std::uint64_t work_units) {
    auto fn = [inner, work_units](std::span<const double> x) {
        const Vector v = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
        const double f = inner(v);
        g_work_sink = burn_work(work_units);
        return f;
    };
    return Objective(inner.name() + "_expensive", inner.dim(), std::move(fn), inner.bounds(),
                     inner.known_optimum());
}

std::uint64_t calibrate_work_units(double seconds) {
    using clock = std::chrono::steady_clock;
    std::uint64_t units = 1u << 20;
    for (;;) {
        const auto t0 = clock::now();
        g_work_sink = burn_work(units);
        const double dt = std::chrono::duration<double>(clock::now() - t0).count();
        if (dt >= 0.02 || units >= (std::uint64_t{1} << 40)) {
            return static_cast<std::uint64_t>(std::ceil(static_cast<double>(units) * seconds / dt));
        }
        units *= 4;
    }
}

}  // namespace pcma
