#pragma once

// Naive re-evaluations of the update equations on plain std::vector data.
// These deliberately avoid Eigen and the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "pcma/cma.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline Vec to_vec(const pcma::Vector& v) { return Vec(v.data(), v.data() + v.size()); }

inline Mat to_mat(const pcma::Matrix& m) {
    Mat out(static_cast<std::size_t>(m.rows()), Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vec matvec(const Mat& m, const Vec& v) {
    Vec out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

/// m = Σ wᵢ xᵢ
inline Vec recombine(const std::vector<Vec>& xs, const Vec& w) {
    Vec m(xs.front().size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += w[i] * xs[i][j];
    return m;
}

/// μ_eff = 1 / Σ wᵢ²
inline double mu_eff(const Vec& w) { return 1.0 / dot(w, w); }

struct SigmaPath {
    Vec p;
    int h;
};

/// p_σ' = (1-cσ)p_σ + √(cσ(2-cσ)μ_eff)·C^{-1/2}(m'-m)/σ, with the stall test.
inline SigmaPath sigma_path(const Vec& p, const Mat& inv_sqrt, const Vec& m_old, const Vec& m_new, double sigma,
                            double cs, double mueff, std::size_t g) {
    const std::size_t n = p.size();
    Vec dm(n);
    for (std::size_t i = 0; i < n; ++i) dm[i] = (m_new[i] - m_old[i]) / sigma;
    const Vec z = matvec(inv_sqrt, dm);
    const double k = std::sqrt(cs * (2.0 - cs) * mueff);
    SigmaPath out{Vec(n), 0};
    for (std::size_t i = 0; i < n; ++i) out.p[i] = (1.0 - cs) * p[i] + k * z[i];
    const double dn = static_cast<double>(n);
    const double denom = 1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(g + 1));
    out.h = dot(out.p, out.p) / denom / dn < 2.0 + 4.0 / (dn + 1.0) ? 1 : 0;
    return out;
}

/// p_c' = (1-c_c)p_c + h·√(c_c(2-c_c)μ_eff)·(m'-m)/σ
inline Vec cov_path(const Vec& pc, const Vec& m_old, const Vec& m_new, double sigma, double cc, double mueff, int h) {
    Vec out(pc.size());
    const double k = h * std::sqrt(cc * (2.0 - cc) * mueff);
    for (std::size_t i = 0; i < pc.size(); ++i) out[i] = (1.0 - cc) * pc[i] + k * (m_new[i] - m_old[i]) / sigma;
    return out;
}

/// C' = (1 - c₁ - c_μ + (1-h²)c₁c_c(2-c_c))·C + c₁·p_c p_cᵀ + c_μ·Σ wᵢ yᵢyᵢᵀ
inline Mat covariance(const Mat& c, const Vec& pc, const std::vector<Vec>& ys, const Vec& w, double c1, double cmu,
                      double cc, int h) {
    const std::size_t n = c.size();
    const double keep = 1.0 - c1 - cmu + (1.0 - h * h) * c1 * cc * (2.0 - cc);
    Mat out(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double rank_mu = 0.0;
            for (std::size_t k = 0; k < ys.size(); ++k) rank_mu += w[k] * ys[k][i] * ys[k][j];
            out[i][j] = keep * c[i][j] + c1 * pc[i] * pc[j] + cmu * rank_mu;
        }
    }
    return out;
}

/// Clamped squared-norm step-size rule.
inline double sigma_clamped(double sigma, const Vec& ps, double cs, double ds) {
    const double n = static_cast<double>(ps.size());
    const double e = (cs / ds) * (dot(ps, ps) / n - 1.0) / 2.0;
    return sigma * std::exp(e < 0.6 ? e : 0.6);
}

/// σ·exp((cσ/dσ)(‖p_σ‖/E‖N(0,I)‖ - 1)) with the series approximation of E‖N(0,I)‖.
inline double sigma_expected_norm(double sigma, const Vec& ps, double cs, double ds) {
    const double n = static_cast<double>(ps.size());
    const double chi = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    return sigma * std::exp((cs / ds) * (std::sqrt(dot(ps, ps)) / chi - 1.0));
}

inline double max_abs_diff(const Vec& a, const pcma::Vector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[static_cast<Eigen::Index>(i)]));
    return d;
}

inline double max_abs_diff(const Mat& a, const pcma::Matrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            d = std::max(d, std::abs(a[i][j] - b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    return d;
}

// Random inputs, drawn with a test-local engine so the library RNG is not involved.

inline pcma::Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    pcma::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = u(gen);
    return v;
}

/// A·Aᵀ + δI with A uniform in [-1, 1].
inline pcma::SymMatrix random_spd(std::mt19937_64& gen, Eigen::Index n, double ridge = 0.1) {
    pcma::Matrix a(n, n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(gen);
    return pcma::SymMatrix(a * a.transpose() + ridge * pcma::Matrix::Identity(n, n));
}

/// A state with random SPD covariance, consistent factors and random paths.
inline pcma::CmaState random_state(std::mt19937_64& gen, const pcma::StrategyParams& params) {
    const Eigen::Index n = params.n;
    pcma::CmaState s = pcma::init_state(params, random_vector(gen, n, 3.0), 0.1 + std::uniform_real_distribution<double>(0.0, 2.0)(gen));
    s.C = random_spd(gen, n);
    s.factors = pcma::eigen_decompose(s.C);
    s.inv_sqrt_C = pcma::inverse_sqrt(s.factors);
    s.p_c = random_vector(gen, n);
    s.p_sigma = random_vector(gen, n);
    s.generation = std::uniform_int_distribution<std::size_t>(0, 50)(gen);
    s.evals = s.generation * params.lambda;
    return s;
}

// One randomized trial per update equation. Each returns the largest absolute
// deviation between the library and the naive re-evaluation.

inline pcma::StrategyParams random_params(std::mt19937_64& gen, Eigen::Index n) {
    pcma::StrategyParams p = pcma::default_params(n);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    p.c_c = u(gen);
    p.c_sigma = u(gen);
    p.c_1 = 0.5 * u(gen);
    p.c_mu = 0.5 * u(gen);
    p.d_sigma = 0.5 + u(gen);
    return p;
}

inline std::vector<pcma::Vector> random_points(std::mt19937_64& gen, std::size_t k, Eigen::Index n) {
    std::vector<pcma::Vector> pts;
    for (std::size_t i = 0; i < k; ++i) pts.push_back(random_vector(gen, n, 3.0));
    return pts;
}

inline double trial_recombine(std::mt19937_64& gen, Eigen::Index n) {
    const pcma::StrategyParams p = random_params(gen, n);
    const auto pts = random_points(gen, p.mu, n);
    std::vector<Vec> raw;
    for (const auto& x : pts) raw.push_back(to_vec(x));
    return max_abs_diff(recombine(raw, to_vec(p.weights)), pcma::recombine_mean(pts, p.weights));
}

inline double trial_mu_eff(std::mt19937_64& gen, Eigen::Index n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    pcma::Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = u(gen);
    w /= w.sum();
    return std::abs(mu_eff(to_vec(w)) - pcma::variance_effective_mass(w));
}

inline double trial_sigma_path(std::mt19937_64& gen, Eigen::Index n) {
    const pcma::StrategyParams p = random_params(gen, n);
    const pcma::CmaState s = random_state(gen, p);
    const pcma::Vector m_new = s.mean + random_vector(gen, n, s.sigma);
    const auto lib = pcma::update_sigma_path(s, p, m_new);
    const auto ref = sigma_path(to_vec(s.p_sigma), to_mat(s.inv_sqrt_C.dense()), to_vec(s.mean), to_vec(m_new),
                                s.sigma, p.c_sigma, p.mu_eff, s.generation);
    return lib.h_sigma == ref.h ? max_abs_diff(ref.p, lib.p_sigma) : 1.0;
}

inline double trial_cov_path(std::mt19937_64& gen, Eigen::Index n) {
    const pcma::StrategyParams p = random_params(gen, n);
    const pcma::CmaState s = random_state(gen, p);
    const pcma::Vector m_new = s.mean + random_vector(gen, n, s.sigma);
    const int h = std::uniform_int_distribution<int>(0, 1)(gen);
    const auto lib = pcma::update_cov_path(s, p, m_new, h);
    return max_abs_diff(cov_path(to_vec(s.p_c), to_vec(s.mean), to_vec(m_new), s.sigma, p.c_c, p.mu_eff, h), lib);
}

inline double trial_covariance(std::mt19937_64& gen, Eigen::Index n) {
    const pcma::StrategyParams p = random_params(gen, n);
    const pcma::CmaState s = random_state(gen, p);
    const auto steps = random_points(gen, p.mu, n);
    const pcma::Vector pc = random_vector(gen, n);
    const int h = std::uniform_int_distribution<int>(0, 1)(gen);
    const pcma::SymMatrix lib = pcma::update_covariance(s, p, steps, pc, h);
    std::vector<Vec> ys;
    for (const auto& y : steps) ys.push_back(to_vec(y));
    const Mat ref = covariance(to_mat(s.C.dense()), to_vec(pc), ys, to_vec(p.weights), p.c_1, p.c_mu, p.c_c, h);
    return max_abs_diff(ref, lib.dense());
}

inline double trial_step_size(std::mt19937_64& gen, Eigen::Index n) {
    pcma::StrategyParams p = random_params(gen, n);
    const double sigma = std::uniform_real_distribution<double>(0.01, 3.0)(gen);
    const pcma::Vector ps = random_vector(gen, n, 2.5);
    p.step_rule = pcma::StepSizeRule::ClampedSquaredNorm;
    const double a = std::abs(pcma::update_step_size(sigma, p, ps) - sigma_clamped(sigma, to_vec(ps), p.c_sigma, p.d_sigma));
    p.step_rule = pcma::StepSizeRule::ExpectedNorm;
    const double b =
        std::abs(pcma::update_step_size(sigma, p, ps) - sigma_expected_norm(sigma, to_vec(ps), p.c_sigma, p.d_sigma));
    return std::max(a, b);
}

}  // namespace oracle
