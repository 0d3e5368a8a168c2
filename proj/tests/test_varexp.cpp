#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "closed_forms.hpp"
#include "ppbu/varexp.hpp"

using namespace ppbu;

TEST(Modular, ZeroAndCube) {
    const auto mesh = build_mesh(3, 4096);
    const std::vector<double> s(4096, 3.0);
    EXPECT_EQ(varexp::modular(mesh, std::vector<double>(4096, 0.0), s), 0.0);
    const auto u = mesh.sample([](double r) { return 1.0 - r * r; });
    EXPECT_NEAR(varexp::modular(mesh, u, s) / closed_forms::cube, 1.0, 1e-6);
}

TEST(Modular, QuadraticExponentIsL2) {
    const auto mesh = build_mesh(3, 256);
    const auto u = mesh.sample([](double r) { return std::cos(3.0 * r) * (1.0 - r); });
    const std::vector<double> s(256, 2.0);
    std::vector<double> sq(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
    EXPECT_NEAR(varexp::modular(mesh, u, s), integrate(mesh, sq), 1e-12);
    EXPECT_NEAR(varexp::luxemburg_norm(mesh, u, s), std::sqrt(integrate(mesh, sq)), 1e-10);
    // nodal and element quadrature agree to discretization accuracy
    EXPECT_NEAR(varexp::modular(mesh, u, s), l2_sq(mesh, u), 1e-4 * l2_sq(mesh, u));
}

TEST(Modular, RejectsExponentBelowOne) {
    const std::vector<double> w{1.0}, u{1.0}, s{0.5};
    EXPECT_THROW(varexp::modular(w, u, s), std::invalid_argument);
}

TEST(Luxemburg, TwoRegionClosedForm) {
    // half the measure with s = 2, half with s = 4, u = 2: (2/l)^2/2 + (2/l)^4/2 = 1 at l = 2
    const std::vector<double> w{0.5, 0.5}, u{2.0, 2.0}, s{2.0, 4.0};
    EXPECT_NEAR(varexp::luxemburg_norm(w, u, s), 2.0, 1e-10);
}

TEST(Luxemburg, ZeroState) {
    const std::vector<double> w{0.5, 0.5}, u{0.0, 0.0}, s{2.0, 4.0};
    EXPECT_EQ(varexp::luxemburg_norm(w, u, s), 0.0);
}

TEST(Luxemburg, ConstantExponentReducesToLebesgueNorm) {
    const auto mesh = build_mesh(3, 200, 1.5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-5, 5), e(1.0, 6.0);
    std::vector<double> u(200), s(200);
    for (int trial = 0; trial < 50; ++trial) {
        const double q = e(rng);
        for (auto& v : u) v = d(rng);
        std::fill(s.begin(), s.end(), q);
        const double expected = std::pow(varexp::modular(mesh, u, s), 1.0 / q);
        EXPECT_NEAR(varexp::luxemburg_norm(mesh, u, s) / expected, 1.0, 1e-8);
    }
}

TEST(Luxemburg, HomogeneousAndUnitOnSphere) {
    const auto mesh = build_mesh(3, 128);
    const auto u = mesh.sample([](double r) { return 3.0 * (1.0 - r); });
    const auto s = mesh.sample([](double r) { return 2.5 + r; });
    const double norm = varexp::luxemburg_norm(mesh, u, s);
    std::vector<double> v(u);
    for (auto& x : v) x *= 7.0;
    EXPECT_NEAR(varexp::luxemburg_norm(mesh, v, s) / norm, 7.0, 1e-9);
    for (auto& x : v) x = x / 7.0 / norm;
    EXPECT_NEAR(varexp::modular(mesh, v, s), 1.0, 1e-9);
}
