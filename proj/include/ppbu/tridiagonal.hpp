#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppbu {

/// Symmetric tridiagonal matrix stored as its main and first off-diagonal.
struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // off[i] couples rows i and i+1

    SymmetricTridiagonal() = default;
    explicit SymmetricTridiagonal(std::size_t size) : diag(size, 0.0), off(size > 0 ? size - 1 : 0, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

    /// y = T x
    void apply(std::span<const double> x, std::span<double> y) const {
        const std::size_t n = size();
        if (x.size() != n || y.size() != n) throw std::invalid_argument("tridiagonal apply: length mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += off[i - 1] * x[i - 1];
            if (i + 1 < n) s += off[i] * x[i + 1];
            y[i] = s;
        }
    }

    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(size());
        apply(x, y);
        return y;
    }

    /// x^T T x, accumulated row by row so that the symmetric part is exact.
    [[nodiscard]] double quadratic_form(std::span<const double> x) const {
        const std::size_t n = size();
        if (x.size() != n) throw std::invalid_argument("tridiagonal quadratic form: length mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += diag[i] * x[i] * x[i];
            if (i + 1 < n) s += 2.0 * off[i] * x[i] * x[i + 1];
        }
        return s;
    }

    /// Bilinear form x^T T y.
    [[nodiscard]] double bilinear_form(std::span<const double> x, std::span<const double> y) const {
        const std::size_t n = size();
        if (x.size() != n || y.size() != n) throw std::invalid_argument("tridiagonal bilinear form: length mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += diag[i] * x[i] * y[i];
            if (i + 1 < n) s += off[i] * (x[i] * y[i + 1] + x[i + 1] * y[i]);
        }
        return s;
    }

    /// Returns a*this + b*other.
    [[nodiscard]] SymmetricTridiagonal combine(double a, const SymmetricTridiagonal& other, double b) const {
        if (other.size() != size()) throw std::invalid_argument("tridiagonal combine: size mismatch");
        SymmetricTridiagonal out(size());
        for (std::size_t i = 0; i < diag.size(); ++i) out.diag[i] = a * diag[i] + b * other.diag[i];
        for (std::size_t i = 0; i < off.size(); ++i) out.off[i] = a * off[i] + b * other.off[i];
        return out;
    }

    /// Solves T x = rhs by symmetric LDL^T elimination (Thomas algorithm).
    /// Throws std::runtime_error on a non-positive pivot.
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const {
        const std::size_t n = size();
        if (rhs.size() != n) throw std::invalid_argument("tridiagonal solve: length mismatch");
        std::vector<double> d(n), x(rhs.begin(), rhs.end());
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = diag[i];
            if (i > 0) {
                const double l = off[i - 1] / d[i - 1];
                d[i] -= l * off[i - 1];
                x[i] -= l * x[i - 1];
            }
            if (!(d[i] > 0.0)) throw std::runtime_error("tridiagonal solve: non-positive pivot (degenerate mesh?)");
        }
        x[n - 1] /= d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - off[i] * x[i + 1]) / d[i];
        return x;
    }
};

}  // namespace ppbu
