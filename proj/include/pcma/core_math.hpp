#pragma once

// Dense symmetric-matrix kernels and seeded Gaussian sampling.

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

#include "pcma/errors.hpp"

namespace pcma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric real matrix. Construction replaces the input by (A + Aᵀ)/2, so
/// entries (i, j) and (j, i) are always bit-identical, and rejects non-finite
/// entries.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Matrix& a);

    static SymMatrix identity(Eigen::Index n);
    static SymMatrix zero(Eigen::Index n);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const Matrix& dense() const noexcept { return m_; }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
    }

private:
    Matrix m_;
};

/// C = B·diag(D²)·Bᵀ with B orthonormal and D ascending, nonnegative.
struct EigenFactors {
    Matrix B;
    Vector D;
};

/// Lower-triangular matrix, stored densely with a zero upper triangle.
struct LowerTriangular {
    Matrix L;

    Vector operator*(const Vector& y) const { return L.triangularView<Eigen::Lower>() * y; }
};

/// Eigenvalues in [-kEigenClampTolerance·λmax, 0) are clamped to zero.
inline constexpr double kEigenClampTolerance = 1e-8;

/// Throws DegenerateCovariance when the solver fails or an eigenvalue is
/// more negative than the clamp tolerance allows.
EigenFactors eigen_decompose(const SymMatrix& c);

/// B·diag(1/(D + eps))·Bᵀ with eps the double machine epsilon.
SymMatrix inverse_sqrt(const EigenFactors& f);

/// Returns L⁻¹ for C = L·Lᵀ. Throws NotPositiveDefinite on a nonpositive pivot.
LowerTriangular inverse_factor_cholesky(const SymMatrix& c);

/// Seeded source of standard normal draws.
///
/// Uniforms come from std::mt19937_64, whose output sequence is fixed by the
/// C++ standard; each uniform uses the top 53 bits of one engine word. Normals
/// use the Box–Muller transform, emitting the cosine branch first and caching
/// the sine branch for the next call. The library never uses
/// std::normal_distribution since its algorithm is implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double standard_normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

Vector sample_standard_normal(RngStream& rng, Eigen::Index n);

/// Unbiased sample covariance around the sample mean, (1/(K-1))·Σ(xᵢ-x̄)(xᵢ-x̄)ᵀ.
SymMatrix empirical_covariance(std::span<const Vector> points);

/// Covariance of steps around a given reference mean, (1/K)·Σ(xᵢ-m)(xᵢ-m)ᵀ.
SymMatrix step_covariance(std::span<const Vector> points, const Vector& m);

}  // namespace pcma
