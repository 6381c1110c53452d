#include "pcma/core_math.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace pcma {

SymMatrix::SymMatrix(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("SymMatrix requires a square matrix, got " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()));
    }
    if (!a.allFinite()) {
        throw InvalidArgument("SymMatrix entries must be finite");
    }
    m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n)); }

EigenFactors eigen_decompose(const SymMatrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c.dense());
    if (solver.info() != Eigen::Success) {
        throw DegenerateCovariance("eigendecomposition of the covariance matrix failed");
    }
    // Eigen returns eigenvalues in ascending order.
    Vector lambda = solver.eigenvalues();
    const double lambda_max = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
    const double floor = -kEigenClampTolerance * std::max(lambda_max, 0.0);
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (!std::isfinite(lambda[i]) || lambda[i] < floor) {
            throw DegenerateCovariance("covariance matrix is indefinite beyond tolerance (eigenvalue " +
                                       std::to_string(lambda[i]) + ")");
        }
        if (lambda[i] < 0.0) lambda[i] = 0.0;
    }
    return EigenFactors{solver.eigenvectors(), lambda.cwiseSqrt()};
}

SymMatrix inverse_sqrt(const EigenFactors& f) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const Vector inv = (f.D.array() + eps).inverse().matrix();
    return SymMatrix(f.B * inv.asDiagonal() * f.B.transpose());
}

LowerTriangular inverse_factor_cholesky(const SymMatrix& c) {
    const Eigen::Index n = c.dim();
    Matrix l = Matrix::Zero(n, n);

    // Cholesky–Banachiewicz, row by row.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double s = c(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0)) {
                    throw NotPositiveDefinite("nonpositive pivot " + std::to_string(s) + " at row " +
                                              std::to_string(i));
                }
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }

    // Forward substitution for each column of L⁻¹; the inverse stays lower triangular.
    Matrix inv = Matrix::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        inv(col, col) = 1.0 / l(col, col);
        for (Eigen::Index i = col + 1; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index k = col; k < i; ++k) s -= l(i, k) * inv(k, col);
            inv(i, col) = s / l(i, i);
        }
    }
    return LowerTriangular{std::move(inv)};
}

double RngStream::uniform() {
    // 53 high bits, shifted off zero so log() below is always finite.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Vector sample_standard_normal(RngStream& rng, Eigen::Index n) {
    if (n < 1) throw InvalidArgument("sample dimension must be at least 1");
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.standard_normal();
    return z;
}

namespace {

Eigen::Index common_dim(std::span<const Vector> points) {
    const Eigen::Index n = points.front().size();
    for (const auto& p : points) {
        if (p.size() != n) throw DimensionMismatch("points have differing dimensions");
    }
    return n;
}

}  // namespace

SymMatrix empirical_covariance(std::span<const Vector> points) {
    if (points.size() < 2) {
        throw InsufficientPoints("empirical covariance needs at least 2 points, got " +
                                 std::to_string(points.size()));
    }
    const Eigen::Index n = common_dim(points);
    Vector mean = Vector::Zero(n);
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());

    Matrix acc = Matrix::Zero(n, n);
    for (const auto& p : points) {
        const Vector d = p - mean;
        acc.noalias() += d * d.transpose();
    }
    return SymMatrix(acc / static_cast<double>(points.size() - 1));
}

SymMatrix step_covariance(std::span<const Vector> points, const Vector& m) {
    if (points.empty()) throw InsufficientPoints("step covariance needs at least 1 point");
    const Eigen::Index n = common_dim(points);
    if (m.size() != n) throw DimensionMismatch("reference mean dimension differs from the points");

    Matrix acc = Matrix::Zero(n, n);
    for (const auto& p : points) {
        const Vector d = p - m;
        acc.noalias() += d * d.transpose();
    }
    return SymMatrix(acc / static_cast<double>(points.size()));
}

}  // namespace pcma
