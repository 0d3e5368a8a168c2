#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "closed_forms.hpp"
#include "ppbu/gauss_legendre.hpp"
#include "ppbu/radial_mesh.hpp"
#include "ppbu/tridiagonal.hpp"

using namespace ppbu;
namespace cf = closed_forms;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const auto rule = gauss_legendre(5);
    for (int deg = 0; deg <= 9; ++deg) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
        const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
        EXPECT_NEAR(s, exact, 1e-14) << "degree " << deg;
    }
}

TEST(Tridiagonal, SolveInvertsApply) {
    SymmetricTridiagonal m(4);
    m.diag = {4, 5, 6, 7};
    m.off = {1, -1, 2};
    const std::vector<double> x{1, -2, 3, 0.5};
    const auto y = m.apply(x);
    const auto z = m.solve(y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(z[i], x[i], 1e-13);
    EXPECT_NEAR(m.quadratic_form(x), m.bilinear_form(x, x), 1e-12);
}

TEST(Tridiagonal, RejectsIndefiniteMatrix) {
    SymmetricTridiagonal m(2);
    m.diag = {1, 1};
    m.off = {2};
    const std::vector<double> rhs{1, 1};
    EXPECT_THROW(m.solve(rhs), std::runtime_error);
}

TEST(RadialMesh, RejectsLowDimension) {
    try {
        build_mesh(2, 64);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("dimension must be ≥ 3"), std::string::npos);
    }
}

TEST(RadialMesh, RadiiAndWeightsInvariants) {
    for (double g : {1.0, 2.0, 3.0}) {
        const auto mesh = build_mesh(3, 200, g);
        const auto r = mesh.radii();
        EXPECT_GT(r[0], 0.0);
        EXPECT_DOUBLE_EQ(r[0], mesh.r_min());
        EXPECT_LT(r.back(), 1.0);
        for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
        for (double w : mesh.weights()) EXPECT_GT(w, 0.0);
    }
}

TEST(RadialMesh, BallVolumes) {
    const std::vector<double> ones3(1024, 1.0);
    EXPECT_LT(rel(integrate(build_mesh(3, 1024), ones3), cf::ball_volume_3), 1e-6);
    const std::vector<double> ones4(2048, 1.0);
    EXPECT_LT(rel(integrate(build_mesh(4, 2048, 2.0), ones4), cf::ball_volume_4), 1e-6);
    for (int n : {3, 5, 7}) {
        const auto mesh = build_mesh(n, 64, 1.5);
        const std::vector<double> ones(64, 1.0);
        EXPECT_LT(rel(integrate(mesh, ones), unit_ball_volume(n)), 1e-12) << n;
    }
}

TEST(RadialMesh, IntegrateClosedForms) {
    const auto mesh = build_mesh(3, 4096);
    EXPECT_EQ(integrate(mesh, std::vector<double>(4096, 0.0)), 0.0);
    EXPECT_LT(rel(integrate(mesh, mesh.sample([](double r) { return r * r; })), cf::r_squared), 1e-6);
}

TEST(RadialMesh, NormsOfParabola) {
    const auto mesh = build_mesh(3, 4096);
    const auto u = mesh.sample([](double r) { return 1.0 - r * r; });
    EXPECT_LT(rel(weighted_l2_sq(mesh, u), cf::weighted), 1e-6);
    EXPECT_LT(rel(grad_l2_sq(mesh, u), cf::gradient), 1e-6);
    EXPECT_LT(rel(l2_sq(mesh, u), cf::l2), 1e-6);
    EXPECT_NEAR(weighted_l2_sq(mesh, u) / grad_l2_sq(mesh, u), 2.0 / 3.0, 1e-6);
    const std::vector<double> zero(4096, 0.0);
    EXPECT_EQ(weighted_l2_sq(mesh, zero), 0.0);
    EXPECT_EQ(grad_l2_sq(mesh, zero), 0.0);
}

TEST(RadialMesh, IdentityProfileConvergesToVolume) {
    // u = r has u^2/r^2 = 1 except in the last cell, where the Dirichlet value cuts it off
    double prev = 1.0;
    for (std::size_t m : {256u, 1024u, 4096u}) {
        const auto mesh = build_mesh(3, m);
        const double err = rel(weighted_l2_sq(mesh, mesh.sample([](double r) { return r; })), cf::ball_volume_3);
        EXPECT_LT(err, 4.0 / static_cast<double>(m));
        EXPECT_LT(err, prev);
        prev = err;
    }
}

TEST(RadialMesh, OperatorsAreSymmetricAndMatchNorms) {
    const auto mesh = build_mesh(4, 300, 2.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> x(300), y(300);
    for (auto& v : x) v = d(rng);
    for (auto& v : y) v = d(rng);
    for (const auto& op : {mesh.weighted_mass(), mesh.stiffness()}) {
        EXPECT_NEAR(op.bilinear_form(x, y), op.bilinear_form(y, x), 1e-12 * std::abs(op.bilinear_form(x, y)) + 1e-14);
    }
    EXPECT_LT(rel(mesh.weighted_mass().quadratic_form(x), weighted_l2_sq(mesh, x)), 1e-12);
    EXPECT_LT(rel(mesh.stiffness().quadratic_form(x), grad_l2_sq(mesh, x)), 1e-12);
}

TEST(RadialMesh, HardyHoldsForRandomNodalFunctions) {
    for (int n : {3, 4, 6}) {
        const auto mesh = build_mesh(n, 128, 2.5);
        const double h = 4.0 / ((n - 2.0) * (n - 2.0));
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> d(-1, 1);
        std::vector<double> u(128);
        for (int trial = 0; trial < 200; ++trial) {
            for (auto& v : u) v = d(rng);
            EXPECT_LE(weighted_l2_sq(mesh, u), h * grad_l2_sq(mesh, u));
        }
    }
}

TEST(RadialMesh, LengthMismatchThrows) {
    const auto mesh = build_mesh(3, 16);
    EXPECT_THROW(integrate(mesh, std::vector<double>(15, 1.0)), std::invalid_argument);
}
