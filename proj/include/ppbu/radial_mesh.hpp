#pragma once

// Radially symmetric functions on the unit ball B(0,1) in R^n, n >= 3.
//
// Nodal values live at M radii r_0 < ... < r_{M-1} < 1; the Dirichlet value at
// r = 1 is implicitly zero. Between nodes a function is piecewise linear in r,
// and on [0, r_0] it is extended by the constant u_0. With this reading every
// nodal vector is a genuine W^{1,2}_0 radial function, so the gradient and
// 1/|x|^2 quadratic forms below are exact integrals of that function and the
// Hardy inequality holds for them without a mesh-dependent defect.
//
// Nonlinear integrands of that function are evaluated with Gauss points on
// every element (quadrature()), so they see the same piecewise-linear state as
// the quadratic forms. Plain integrals of sampled data use a product trapezoid
// rule instead: node i owns the dual cell [R_i, R_{i+1}] with R_0 = 0, R_M = 1
// and R_i the midpoint of r_{i-1}, r_i. That weight is the exact measure of the
// shell, so constants are integrated exactly.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppbu/gauss_legendre.hpp"
#include "ppbu/tridiagonal.hpp"

namespace ppbu {

/// Surface area of the unit sphere S^{n-1}.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

/// Gauss point of one element: the state there is phi_left u[left] + phi_right u[left + 1],
/// with u[M] = 0 on the boundary.
struct QuadraturePoint {
    double r = 0.0;
    double weight = 0.0;  // includes omega_{n-1} r^{n-1}
    std::size_t left = 0;
    double phi_left = 0.0;
    double phi_right = 0.0;
};

class RadialMesh {
public:
    RadialMesh(int dimension, std::size_t nodes, double grading) : n_(dimension), grading_(grading) {
        if (dimension < 3) throw std::invalid_argument("dimension must be ≥ 3");
        if (nodes < 8) throw std::invalid_argument("node count must be ≥ 8");
        if (!(grading >= 1.0) || !std::isfinite(grading)) throw std::invalid_argument("grading must be ≥ 1");
        omega_ = unit_sphere_area(n_);
        const std::size_t m = nodes;

        // r_i = ((i + 1/2) / (M + 1/2))^g, so r_min = (2M + 1)^{-g}; r_M = 1 is the boundary.
        r_.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            r_[i] = std::pow((static_cast<double>(i) + 0.5) / (static_cast<double>(m) + 0.5), grading_);

        const auto nd = static_cast<double>(n_);
        weights_.resize(m);
        double left = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double right = (i + 1 < m) ? 0.5 * (r_[i] + r_[i + 1]) : 1.0;
            weights_[i] = omega_ * (std::pow(right, nd) - std::pow(left, nd)) / nd;
            left = right;
        }

        assemble_forms();
        assemble_quadrature();
    }

    [[nodiscard]] int dimension() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return r_.size(); }
    [[nodiscard]] double grading() const noexcept { return grading_; }
    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] double r_min() const noexcept { return r_.front(); }
    [[nodiscard]] std::span<const double> radii() const noexcept { return r_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double volume() const noexcept { return unit_ball_volume(n_); }
    [[nodiscard]] std::span<const QuadraturePoint> quadrature() const noexcept { return quad_; }

    /// Value of the piecewise-linear state at a quadrature point.
    [[nodiscard]] double value_at(const QuadraturePoint& q, std::span<const double> u) const noexcept {
        const double right = q.left + 1 < u.size() ? u[q.left + 1] : 0.0;
        return q.phi_left * u[q.left] + q.phi_right * right;
    }

    /// Exact matrix of (v, phi) -> int v phi / |x|^2 dx on the piecewise-linear space.
    [[nodiscard]] const SymmetricTridiagonal& weighted_mass() const noexcept { return weighted_mass_; }
    /// Exact matrix of (v, phi) -> int grad v . grad phi dx on the piecewise-linear space.
    [[nodiscard]] const SymmetricTridiagonal& stiffness() const noexcept { return stiffness_; }

    void check_length(std::span<const double> f) const {
        if (f.size() != size())
            throw std::invalid_argument("nodal vector has " + std::to_string(f.size()) + " entries, mesh has " +
                                        std::to_string(size()));
    }

    /// Nodal samples of a radial function f(r).
    template <class F>
    [[nodiscard]] std::vector<double> sample(F&& f) const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = f(r_[i]);
        return out;
    }

private:
    void assemble_forms() {
        const std::size_t m = size();
        weighted_mass_ = SymmetricTridiagonal(m);
        stiffness_ = SymmetricTridiagonal(m);
        const auto nd = static_cast<double>(n_);

        // Innermost ball [0, r_0] carries the constant u_0: no gradient, 1/r^2 mass only.
        weighted_mass_.diag[0] += omega_ * std::pow(r_[0], nd - 2.0) / (nd - 2.0);

        // Integrands are polynomials in r of degree n - 1.
        const GaussRule rule = gauss_legendre(n_ / 2 + 2);
        for (std::size_t i = 0; i < m; ++i) {
            const double a = r_[i];
            const double b = (i + 1 < m) ? r_[i + 1] : 1.0;
            const double h = b - a;

            double shell = 0.0, mll = 0.0, mlr = 0.0, mrr = 0.0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double s = a + 0.5 * (rule.nodes[q] + 1.0) * h;
                const double wq = 0.5 * h * rule.weights[q] * std::pow(s, nd - 3.0);
                const double pl = (b - s) / h;
                const double pr = (s - a) / h;
                shell += wq * s * s;
                mll += wq * pl * pl;
                mlr += wq * pl * pr;
                mrr += wq * pr * pr;
            }

            const double k = omega_ * shell / (h * h);
            stiffness_.diag[i] += k;
            if (i + 1 < m) {
                stiffness_.diag[i + 1] += k;
                stiffness_.off[i] -= k;
            }
            weighted_mass_.diag[i] += omega_ * mll;
            if (i + 1 < m) {
                weighted_mass_.off[i] += omega_ * mlr;
                weighted_mass_.diag[i + 1] += omega_ * mrr;
            }
        }
    }

    void assemble_quadrature() {
        constexpr int kPoints = 4;
        const GaussRule rule = gauss_legendre(kPoints);
        const std::size_t m = size();
        const auto nd = static_cast<double>(n_);
        quad_.reserve((m + 1) * kPoints);
        const auto add = [&](double a, double b, std::size_t left, bool constant) {
            const double h = b - a;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double s = a + 0.5 * (rule.nodes[q] + 1.0) * h;
                const double w = omega_ * 0.5 * h * rule.weights[q] * std::pow(s, nd - 1.0);
                quad_.push_back(constant ? QuadraturePoint{s, w, left, 1.0, 0.0}
                                         : QuadraturePoint{s, w, left, (b - s) / h, (s - a) / h});
            }
        };
        add(0.0, r_[0], 0, true);
        for (std::size_t i = 0; i < m; ++i) add(r_[i], i + 1 < m ? r_[i + 1] : 1.0, i, false);
    }

    int n_;
    double grading_;
    double omega_ = 0.0;
    std::vector<double> r_;
    std::vector<double> weights_;
    std::vector<QuadraturePoint> quad_;
    SymmetricTridiagonal weighted_mass_;
    SymmetricTridiagonal stiffness_;
};

/// Mesh factory; throws std::invalid_argument on n < 3, M < 8 or grading < 1.
inline RadialMesh build_mesh(int dimension, std::size_t nodes, double grading = 1.0) {
    return RadialMesh(dimension, nodes, grading);
}

/// omega_{n-1} int_0^1 f(r) r^{n-1} dr by the product trapezoid rule.
inline double integrate(const RadialMesh& mesh, std::span<const double> f) {
    mesh.check_length(f);
    const auto w = mesh.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
    return s;
}

/// ||u / |x| ||^2_{L^2}.
inline double weighted_l2_sq(const RadialMesh& mesh, std::span<const double> u) {
    mesh.check_length(u);
    return mesh.weighted_mass().quadratic_form(u);
}

/// ||grad u||^2_{L^2} with u(1) = 0.
inline double grad_l2_sq(const RadialMesh& mesh, std::span<const double> u) {
    mesh.check_length(u);
    return mesh.stiffness().quadratic_form(u);
}

/// int |u|^q dx of the piecewise-linear state.
inline double lq_power(const RadialMesh& mesh, std::span<const double> u, double q) {
    mesh.check_length(u);
    double s = 0.0;
    for (const auto& qp : mesh.quadrature()) s += qp.weight * std::pow(std::abs(mesh.value_at(qp, u)), q);
    return s;
}

/// ||u||^2_{L^2}.
inline double l2_sq(const RadialMesh& mesh, std::span<const double> u) { return lq_power(mesh, u, 2.0); }

}  // namespace ppbu
