#pragma once

// CMA-ES strategy: parameters, state, one-generation update and outer loop.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcma/core_math.hpp"
#include "pcma/objectives.hpp"
#include "pcma/parallel_eval.hpp"

namespace pcma {

enum class StepSizeRule {
    /// σ·exp(min(0.6, (c_σ/d_σ)·(‖p_σ‖²/n − 1)/2)).
    ClampedSquaredNorm,
    /// σ·exp((c_σ/d_σ)·(‖p_σ‖/E‖N(0,I)‖ − 1)), unclamped.
    ExpectedNorm,
};

struct StrategyParams {
    Eigen::Index n = 0;
    std::size_t lambda = 0;   // population size K
    std::size_t mu = 0;       // parent count Z
    Vector weights;           // length mu, decreasing, sums to 1
    double mu_eff = 0.0;
    double c_c = 0.0;
    double c_sigma = 0.0;
    double c_1 = 0.0;
    double c_mu = 0.0;
    double d_sigma = 0.0;
    StepSizeRule step_rule = StepSizeRule::ClampedSquaredNorm;
};

/// Default constants for dimension n: λ = 4 + ⌊3 ln n⌋, μ = ⌊λ/2⌋,
/// log-linear weights and the learning rates derived from μ_eff.
StrategyParams default_params(Eigen::Index n);

/// Replaces the weights by 1/μ each and recomputes μ_eff (= μ). The learning
/// rates are left as they were.
StrategyParams with_equal_weights(StrategyParams params);

/// 1/Σwᵢ².
double variance_effective_mass(const Vector& w);

/// E‖N(0, I)‖ ≈ √n·(1 − 1/(4n) + 1/(21n²)).
double expected_normal_norm(Eigen::Index n);

/// Throws InvalidArgument if the params break the weight/rate invariants.
void validate(const StrategyParams& params);

struct CmaState {
    Vector mean;
    double sigma = 0.0;
    SymMatrix C;
    EigenFactors factors;
    SymMatrix inv_sqrt_C;
    Vector p_c;
    Vector p_sigma;
    std::size_t generation = 0;
    std::size_t evals = 0;
};

/// Mean x0, step size sigma0, C = I, zero paths. Throws NonPositiveStepSize.
CmaState init_state(const StrategyParams& params, const Vector& x0, double sigma0);

struct InitialGuess {
    Vector x0;
    double sigma0;
};

/// Heuristic start from a search box: σ0 = √((hi − lo)/2) and x0 = the box
/// midpoint plus one standard-normal draw per coordinate.
InitialGuess initial_guess_from_bounds(Eigen::Index n, Bounds bounds, RngStream& rng);

/// m + σ·B·diag(D)·zᵢ for λ fresh standard-normal vectors zᵢ.
std::vector<Vector> sample_population(const CmaState& state, const StrategyParams& params, RngStream& rng);

struct Population {
    std::vector<Vector> points;
    std::vector<double> fvals;
    std::vector<std::size_t> order;   // ascending f; NaN last; ties by index
    bool all_nonfinite = false;
};

/// Ranks fvals ascending with NaN treated as +∞ and ties broken by index.
std::vector<std::size_t> rank_order(std::span<const double> fvals);

/// Builds a Population and fills in its ranking.
Population make_population(std::vector<Vector> points, std::vector<double> fvals);

struct Selected {
    std::size_t index;   // position in the population
    Vector point;
};

/// The `count` fittest points in rank order.
std::vector<Selected> rank_select(const Population& pop, std::size_t count);

/// Σ wᵢ·xᵢ.
Vector recombine_mean(std::span<const Vector> selected, const Vector& weights);

struct SigmaPathUpdate {
    Vector p_sigma;
    int h_sigma;   // 0 or 1
};

/// Conjugate path update. Whitening uses state.inv_sqrt_C, the factorization
/// in force when the population was sampled.
SigmaPathUpdate update_sigma_path(const CmaState& state, const StrategyParams& params, const Vector& new_mean);

/// Evolution path update; the new-step term is gated by h_sigma.
Vector update_cov_path(const CmaState& state, const StrategyParams& params, const Vector& new_mean, int h_sigma);

/// Combined rank-one and rank-μ update of state.C. `selected_steps` are
/// (x_{i:λ} − m)/σ in rank order and `p_c` is the already-updated evolution path.
SymMatrix update_covariance(const CmaState& state, const StrategyParams& params,
                            std::span<const Vector> selected_steps, const Vector& p_c, int h_sigma);

/// New step size from the updated conjugate path, per params.step_rule.
double update_step_size(double sigma, const StrategyParams& params, const Vector& p_sigma);

struct StepResult {
    Population population;
    std::vector<std::string> warnings;
};

/// One generation: sample, evaluate through `evaluator`, rank, recombine,
/// update both paths, C and σ, and refresh the factorization. Mutates `state`
/// only after the whole batch has been evaluated.
///
/// Throws ObjectiveFailure if an evaluation throws and DegenerateCovariance if
/// the updated covariance cannot be factored; `state` is unchanged in both cases.
StepResult step(CmaState& state, const StrategyParams& params, const Objective& objective, RngStream& rng,
                ParallelEvaluator& evaluator);

struct Termination {
    std::size_t max_evals = 0;
    std::optional<double> target_f;
    std::optional<std::size_t> max_generations;
};

struct GenerationRecord {
    std::size_t generation;
    std::size_t evals;
    double best_f_gen;
    double best_f_so_far;
    double sigma;
    double cond_C;
    double wall_ms;   // since the start of the run
};

struct RunOptions {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    /// Missing values fall back to initial_guess_from_bounds, or to the
    /// origin and σ0 = 0.5 when the objective has no bounds.
    std::optional<Vector> x0;
    std::optional<double> sigma0;
    /// Called after each generation, once the state has been updated.
    std::function<void(const CmaState&, const GenerationRecord&)> on_generation;
};

struct Solution {
    Vector x;                 // final mean
    double f;                 // objective at the final mean
    double best_f;            // min over every evaluation, including the final mean
    std::size_t evals;        // includes the final-mean evaluation
    std::size_t generations;
    std::vector<GenerationRecord> history;
    std::vector<std::string> warnings;
    CmaState final_state;
    double wall_s;
};

/// Repeats step() while another full generation fits in the budget and the
/// target has not been reached, then evaluates the final mean once.
Solution run(const Objective& objective, const StrategyParams& params, const Termination& term,
             const RunOptions& options);

/// Largest over smallest eigenvalue of C (D² ratio); +∞ if singular.
double condition_number(const EigenFactors& factors);

}  // namespace pcma
