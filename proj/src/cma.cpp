#include "pcma/cma.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace pcma {

StrategyParams default_params(Eigen::Index n) {
    if (n < 1) throw InvalidArgument("problem dimension must be at least 1");
    StrategyParams p;
    const double dn = static_cast<double>(n);
    p.n = n;
    p.lambda = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(dn)));
    p.mu = p.lambda / 2;

    p.weights.resize(static_cast<Eigen::Index>(p.mu));
    for (std::size_t i = 0; i < p.mu; ++i) {
        p.weights[static_cast<Eigen::Index>(i)] =
            std::log(static_cast<double>(p.mu) + 0.5) - std::log(static_cast<double>(i + 1));
    }
    p.weights /= p.weights.sum();
    p.mu_eff = variance_effective_mass(p.weights);

    const double me = p.mu_eff;
    p.c_c = (4.0 + me / dn) / (dn + 4.0 + 2.0 * me / dn);
    p.c_sigma = (me + 2.0) / (dn + me + 5.0);
    p.c_1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + me);
    p.c_mu = std::min(1.0 - p.c_1, 2.0 * (me - 2.0 + 1.0 / me) / ((dn + 2.0) * (dn + 2.0) + me));
    p.d_sigma = 2.0 * me / static_cast<double>(p.lambda) + 0.3 + p.c_sigma;
    return p;
}

StrategyParams with_equal_weights(StrategyParams params) {
    params.weights = Vector::Constant(static_cast<Eigen::Index>(params.mu), 1.0 / static_cast<double>(params.mu));
    params.mu_eff = variance_effective_mass(params.weights);
    return params;
}

double variance_effective_mass(const Vector& w) { return 1.0 / w.squaredNorm(); }

double expected_normal_norm(Eigen::Index n) {
    const double dn = static_cast<double>(n);
    return std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));
}

void validate(const StrategyParams& p) {
    if (p.n < 1) throw InvalidArgument("dimension must be at least 1");
    if (p.mu < 1 || p.mu > p.lambda) throw InvalidArgument("need 1 <= mu <= lambda");
    if (p.weights.size() != static_cast<Eigen::Index>(p.mu)) throw InvalidArgument("need one weight per parent");
    if (std::abs(p.weights.sum() - 1.0) > 1e-12) throw InvalidArgument("weights must sum to 1");
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
        if (!(p.weights[i] > 0.0)) throw InvalidArgument("weights must be positive");
        if (i > 0 && p.weights[i] > p.weights[i - 1]) throw InvalidArgument("weights must be nonincreasing");
    }
    const double mu = static_cast<double>(p.mu);
    if (p.mu_eff < 1.0 - 1e-12 || p.mu_eff > mu * (1.0 + 1e-12)) {
        throw InvalidArgument("mu_eff must lie in [1, mu]");
    }
    auto unit_rate = [](double r) { return r > 0.0 && r <= 1.0; };
    if (!unit_rate(p.c_c) || !unit_rate(p.c_sigma)) throw InvalidArgument("path rates must lie in (0, 1]");
    if (!(p.c_1 > 0.0) || !(p.c_mu > 0.0) || p.c_1 + p.c_mu > 1.0) {
        throw InvalidArgument("covariance rates must be positive with c_1 + c_mu <= 1");
    }
    if (!(p.d_sigma > 0.0)) throw InvalidArgument("step-size damping must be positive");
}

CmaState init_state(const StrategyParams& params, const Vector& x0, double sigma0) {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
        throw NonPositiveStepSize("initial step size must be positive and finite, got " + std::to_string(sigma0));
    }
    if (x0.size() != params.n) {
        throw DimensionMismatch("x0 has dimension " + std::to_string(x0.size()) + ", expected " +
                                std::to_string(params.n));
    }
    if (!x0.allFinite()) throw InvalidArgument("x0 must be finite");

    CmaState s;
    s.mean = x0;
    s.sigma = sigma0;
    s.C = SymMatrix::identity(params.n);
    s.factors = EigenFactors{Matrix::Identity(params.n, params.n), Vector::Ones(params.n)};
    s.inv_sqrt_C = inverse_sqrt(s.factors);
    s.p_c = Vector::Zero(params.n);
    s.p_sigma = Vector::Zero(params.n);
    return s;
}

InitialGuess initial_guess_from_bounds(Eigen::Index n, Bounds bounds, RngStream& rng) {
    if (!(bounds.lo < bounds.hi)) throw InvalidArgument("bounds must satisfy lo < hi");
    InitialGuess g;
    g.sigma0 = std::sqrt((bounds.hi - bounds.lo) / 2.0);
    g.x0 = Vector::Constant(n, (bounds.hi + bounds.lo) / 2.0) + sample_standard_normal(rng, n);
    return g;
}

std::vector<Vector> sample_population(const CmaState& state, const StrategyParams& params, RngStream& rng) {
    const Matrix bd = state.factors.B * state.factors.D.asDiagonal();
    std::vector<Vector> points;
    points.reserve(params.lambda);
    for (std::size_t k = 0; k < params.lambda; ++k) {
        const Vector z = sample_standard_normal(rng, params.n);
        points.emplace_back(state.mean + state.sigma * (bd * z));
    }
    return points;
}

std::vector<std::size_t> rank_order(std::span<const double> fvals) {
    std::vector<std::size_t> order(fvals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key = [&](std::size_t i) {
        return std::isnan(fvals[i]) ? std::numeric_limits<double>::infinity() : fvals[i];
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    return order;
}

Population make_population(std::vector<Vector> points, std::vector<double> fvals) {
    if (points.size() != fvals.size()) throw DimensionMismatch("points and fvals differ in length");
    Population pop;
    pop.order = rank_order(fvals);
    pop.all_nonfinite = std::none_of(fvals.begin(), fvals.end(), [](double f) { return std::isfinite(f); });
    pop.points = std::move(points);
    pop.fvals = std::move(fvals);
    return pop;
}

std::vector<Selected> rank_select(const Population& pop, std::size_t count) {
    if (count > pop.order.size()) throw InvalidArgument("cannot select more points than the population holds");
    std::vector<Selected> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t i = pop.order[r];
        out.push_back({i, pop.points[i]});
    }
    return out;
}

Vector recombine_mean(std::span<const Vector> selected, const Vector& weights) {
    if (selected.empty() || selected.size() != static_cast<std::size_t>(weights.size())) {
        throw DimensionMismatch("need one weight per selected point");
    }
    Vector m = Vector::Zero(selected.front().size());
    for (std::size_t i = 0; i < selected.size(); ++i) m += weights[static_cast<Eigen::Index>(i)] * selected[i];
    return m;
}

SigmaPathUpdate update_sigma_path(const CmaState& state, const StrategyParams& params, const Vector& new_mean) {
    const double cs = params.c_sigma;
    const Vector whitened = state.inv_sqrt_C.dense() * (new_mean - state.mean);
    SigmaPathUpdate u;
    u.p_sigma = (1.0 - cs) * state.p_sigma + std::sqrt(cs * (2.0 - cs) * params.mu_eff) * whitened / state.sigma;

    const double n = static_cast<double>(params.n);
    const double g1 = static_cast<double>(state.generation + 1);
    const double norm_ratio = u.p_sigma.squaredNorm() / (1.0 - std::pow(1.0 - cs, 2.0 * g1)) / n;
    u.h_sigma = norm_ratio < 2.0 + 4.0 / (n + 1.0) ? 1 : 0;
    return u;
}

Vector update_cov_path(const CmaState& state, const StrategyParams& params, const Vector& new_mean, int h_sigma) {
    const double cc = params.c_c;
    return (1.0 - cc) * state.p_c + (static_cast<double>(h_sigma) * std::sqrt(cc * (2.0 - cc) * params.mu_eff)) *
                                        (new_mean - state.mean) / state.sigma;
}

SymMatrix update_covariance(const CmaState& state, const StrategyParams& params,
                            std::span<const Vector> selected_steps, const Vector& p_c, int h_sigma) {
    if (selected_steps.size() > static_cast<std::size_t>(params.weights.size())) {
        throw DimensionMismatch("more selected steps than weights");
    }
    const Eigen::Index n = params.n;
    Matrix rank_mu = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < selected_steps.size(); ++i) {
        const Vector& y = selected_steps[i];
        rank_mu.noalias() += params.weights[static_cast<Eigen::Index>(i)] * (y * y.transpose());
    }
    const double h2 = static_cast<double>(h_sigma * h_sigma);
    const double keep = 1.0 - params.c_1 - params.c_mu + (1.0 - h2) * params.c_1 * params.c_c * (2.0 - params.c_c);
    const Matrix next = keep * state.C.dense() + params.c_1 * (p_c * p_c.transpose()) + params.c_mu * rank_mu;
    return SymMatrix(next);
}

double update_step_size(double sigma, const StrategyParams& params, const Vector& p_sigma) {
    const double ratio = params.c_sigma / params.d_sigma;
    switch (params.step_rule) {
        case StepSizeRule::ExpectedNorm:
            return sigma * std::exp(ratio * (p_sigma.norm() / expected_normal_norm(params.n) - 1.0));
        case StepSizeRule::ClampedSquaredNorm:
        default:
            return sigma *
                   std::exp(std::min(0.6, ratio * (p_sigma.squaredNorm() / static_cast<double>(params.n) - 1.0) / 2.0));
    }
}

StepResult step(CmaState& state, const StrategyParams& params, const Objective& objective, RngStream& rng,
                ParallelEvaluator& evaluator) {
    std::vector<Vector> points = sample_population(state, params, rng);

    BatchResult batch;
    try {
        batch = evaluator.evaluate(objective, points);
    } catch (const WorkerFailure& e) {
        throw ObjectiveFailure(e.index(), e.what());
    }

    StepResult out;
    out.population = make_population(std::move(points), std::move(batch.fvals));
    const Population& pop = out.population;
    if (pop.all_nonfinite) {
        out.warnings.push_back("generation " + std::to_string(state.generation + 1) +
                               ": every f-value is non-finite; recombining by sample index");
    }

    const std::vector<Selected> selected = rank_select(pop, params.mu);
    std::vector<Vector> parents;
    std::vector<Vector> steps;
    parents.reserve(selected.size());
    steps.reserve(selected.size());
    for (const auto& s : selected) {
        parents.push_back(s.point);
        steps.push_back((s.point - state.mean) / state.sigma);
    }

    const Vector new_mean = recombine_mean(parents, params.weights);
    SigmaPathUpdate sp = update_sigma_path(state, params, new_mean);
    Vector p_c = update_cov_path(state, params, new_mean, sp.h_sigma);
    SymMatrix C = update_covariance(state, params, steps, p_c, sp.h_sigma);
    const double sigma = update_step_size(state.sigma, params, sp.p_sigma);
    EigenFactors factors = eigen_decompose(C);
    SymMatrix inv = inverse_sqrt(factors);

    state.mean = new_mean;
    state.p_sigma = std::move(sp.p_sigma);
    state.p_c = std::move(p_c);
    state.C = std::move(C);
    state.sigma = sigma;
    state.factors = std::move(factors);
    state.inv_sqrt_C = std::move(inv);
    state.generation += 1;
    state.evals += params.lambda;
    return out;
}

double condition_number(const EigenFactors& factors) {
    const double lo = factors.D.minCoeff();
    const double hi = factors.D.maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return (hi * hi) / (lo * lo);
}

namespace {

double nan_min(double a, double b) {
    if (std::isnan(a)) return b;
    if (std::isnan(b)) return a;
    return std::min(a, b);
}

}  // namespace

Solution run(const Objective& objective, const StrategyParams& params, const Termination& term,
             const RunOptions& options) {
    using Clock = std::chrono::steady_clock;
    validate(params);
    if (objective.dim() != params.n) {
        throw DimensionMismatch("objective dimension " + std::to_string(objective.dim()) +
                                " differs from strategy dimension " + std::to_string(params.n));
    }
    if (term.max_evals < params.lambda) {
        throw InvalidArgument("max_evals (" + std::to_string(term.max_evals) + ") is below the population size (" +
                              std::to_string(params.lambda) + ")");
    }

    const auto t0 = Clock::now();
    Solution sol;
    RngStream rng(options.seed);

    Vector x0;
    double sigma0 = 0.0;
    if (options.x0 && options.sigma0) {
        x0 = *options.x0;
        sigma0 = *options.sigma0;
    } else {
        const auto bounds = objective.bounds();
        if (!bounds && !options.sigma0) {
            sol.warnings.push_back("objective has no bounds; using sigma0 = 0.5");
        }
        const InitialGuess guess = bounds ? initial_guess_from_bounds(params.n, *bounds, rng)
                                          : InitialGuess{sample_standard_normal(rng, params.n), 0.5};
        x0 = options.x0 ? *options.x0 : guess.x0;
        sigma0 = options.sigma0 ? *options.sigma0 : guess.sigma0;
    }

    CmaState state = init_state(params, x0, sigma0);
    ParallelEvaluator evaluator(options.workers);
    double best_so_far = std::numeric_limits<double>::infinity();

    while (state.evals + params.lambda <= term.max_evals &&
           (!term.max_generations || state.generation < *term.max_generations)) {
        StepResult r = step(state, params, objective, rng, evaluator);
        for (auto& w : r.warnings) sol.warnings.push_back(std::move(w));

        const double best_gen = r.population.fvals[r.population.order.front()];
        best_so_far = nan_min(best_so_far, best_gen);

        GenerationRecord rec{state.generation,
                             state.evals,
                             best_gen,
                             best_so_far,
                             state.sigma,
                             condition_number(state.factors),
                             std::chrono::duration<double, std::milli>(Clock::now() - t0).count()};
        sol.history.push_back(rec);
        if (options.on_generation) options.on_generation(state, rec);

        if (term.target_f && best_gen <= *term.target_f) break;
    }

    sol.x = state.mean;
    sol.f = objective(state.mean);
    sol.best_f = nan_min(best_so_far, sol.f);
    sol.evals = state.evals + 1;
    sol.generations = state.generation;
    sol.final_state = std::move(state);
    sol.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return sol;
}

}  // namespace pcma
