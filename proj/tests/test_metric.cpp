#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qddlab/error.hpp"
#include "qddlab/functionals.hpp"
#include "qddlab/metric.hpp"
#include "support.hpp"

using qddlab::Grid;
using qddlab::log_mean;

TEST_CASE("logarithmic mean values") {
    CHECK(log_mean(2.0, 2.0) == 2.0);
    CHECK(log_mean(1.0, std::numbers::e) == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-15));
    CHECK(log_mean(1.0, 2.0) == doctest::Approx(1.0 / std::numbers::ln2).epsilon(1e-15));
    CHECK(log_mean(0.0, 3.0) == 0.0);
    CHECK(log_mean(3.0, 0.0) == 0.0);
    CHECK_THROWS_AS(log_mean(-1.0, 1.0), qddlab::DomainError);
    CHECK_THROWS_AS(log_mean(1.0, NAN), qddlab::DomainError);
}

TEST_CASE("logarithmic mean equals the integral of a^(1-x) b^x") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(0.01, 10.0);
    for (int s = 0; s < 50; ++s) {
        const double a = uni(rng);
        const double b = uni(rng);
        // Simpson with 400 panels
        const int m = 400;
        const double step = 1.0 / (2 * m);
        double sum = a + b;
        for (int i = 1; i < 2 * m; ++i) sum += (i % 2 ? 4.0 : 2.0) * std::pow(a, 1.0 - i * step) * std::pow(b, i * step);
        CHECK(log_mean(a, b) == doctest::Approx(sum * step / 3.0).epsilon(1e-10));
    }
}

TEST_CASE("logarithmic mean: symmetry, homogeneity, bounds") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uni(1e-3, 1e3);
    for (int s = 0; s < 1000; ++s) {
        const double a = uni(rng);
        const double b = uni(rng);
        const double c = uni(rng);
        const double l = log_mean(a, b);
        CHECK(l == log_mean(b, a));
        CHECK(log_mean(c * a, c * b) == doctest::Approx(c * l).epsilon(1e-13));
        CHECK(l > std::min(a, b));
        CHECK(l < 0.5 * (a + b));
    }
}

TEST_CASE("logarithmic mean near the diagonal has no cancellation") {
    for (double eps : {1e-6, 1e-9, 1e-12, 1e-4, 3e-5}) {
        // L(1, 1 + e) = 1 + e/2 - e^2/12 + e^3/24 - 19 e^4/720 + ...
        const double series = 1.0 + eps / 2.0 - eps * eps / 12.0 + eps * eps * eps / 24.0 -
                              19.0 * eps * eps * eps * eps / 720.0;
        CHECK(testing::rel_diff(log_mean(1.0, 1.0 + eps), series) <= 1e-14);
        CHECK(testing::rel_diff(log_mean(1.0 + eps, 1.0), series) <= 1e-14);
    }
}

TEST_CASE("logarithmic mean gradient against central differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.1, 5.0);
    for (int s = 0; s < 200; ++s) {
        const double a = uni(rng);
        const double b = s % 4 == 0 ? a * (1.0 + 1e-3 * uni(rng)) : uni(rng);
        const auto g = qddlab::log_mean_gradient(a, b);
        const double ea = 1e-6 * a;
        const double eb = 1e-6 * b;
        const double fda = (log_mean(a + ea, b) - log_mean(a - ea, b)) / (2 * ea);
        const double fdb = (log_mean(a, b + eb) - log_mean(a, b - eb)) / (2 * eb);
        CHECK(g.da == doctest::Approx(fda).epsilon(1e-7));
        CHECK(g.db == doctest::Approx(fdb).epsilon(1e-7));
    }
    const auto diag = qddlab::log_mean_gradient(2.0, 2.0);
    CHECK(diag.da == 0.5);
    CHECK(diag.db == 0.5);
}

TEST_CASE("log_difference keeps relative accuracy for close arguments") {
    CHECK(qddlab::log_difference(1.0 + 1e-12, 1.0) == doctest::Approx(1e-12).epsilon(1e-10));
    CHECK(qddlab::log_difference(3.0, 1.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(qddlab::log_difference(10.0, 1.0) == doctest::Approx(std::log(10.0)).epsilon(1e-15));
}

TEST_CASE("Onsager form: two-state example, constants, steady ratio") {
    const auto st = qddlab::quadratic_steady_state(Grid(1, 2), 0.0);
    const std::vector<double> u{1.5, 0.5};
    const std::vector<double> p{1.0, 0.0};
    CHECK(qddlab::onsager_form(st, u, p, p) == doctest::Approx(2.0 / std::log(3.0)).epsilon(1e-14));
    CHECK(qddlab::onsager_form(st, u, p, p) == doctest::Approx(1.8205).epsilon(1e-4));

    std::mt19937_64 rng(4);
    const auto st2 = qddlab::quadratic_steady_state(Grid(2, 5), 4.0);
    const auto v = testing::random_density(st2.grid, rng);
    const std::vector<double> c(st2.grid.size(), 3.5);
    const auto q = testing::random_vector(st2.grid.size(), rng);
    CHECK(qddlab::onsager_form(st2, v, c, q) == 0.0);

    // at U = Pi every mobility is sqrt(Pi_i Pi_j)
    double expected = 0.0;
    for (std::size_t e = 0; e < st2.grid.edges().size(); ++e) {
        const auto& edge = st2.grid.edges()[e];
        const double d = q[edge.lo] - q[edge.hi];
        expected += std::sqrt(st2.values[edge.lo] * st2.values[edge.hi]) * d * d;
    }
    expected *= st2.grid.cell_volume() * 25.0;
    CHECK(qddlab::onsager_form(st2, st2.values.values(), q, q) == doctest::Approx(expected).epsilon(1e-13));

    const std::vector<double> zero{1.0, 0.0};
    CHECK_THROWS_AS(qddlab::onsager_form(st, zero, p, p), qddlab::DomainError);
}

TEST_CASE("Onsager operator: symmetry, positivity, pairing, gauge, mass") {
    std::mt19937_64 rng(5);
    for (int d = 1; d <= 3; ++d) {
        const auto st = qddlab::quadratic_steady_state(Grid(d, 4), 2.0);
        for (int s = 0; s < 20; ++s) {
            const auto u = testing::random_density(st.grid, rng);
            const auto p = testing::random_vector(u.size(), rng);
            const auto q = testing::random_vector(u.size(), rng);
            const double pq = qddlab::onsager_form(st, u, p, q);
            CHECK(pq == doctest::Approx(qddlab::onsager_form(st, u, q, p)).epsilon(1e-14));
            CHECK(qddlab::onsager_form(st, u, p, p) > 0.0);

            const auto kp = qddlab::onsager_apply(st, u, p);
            CHECK(testing::rel_diff(qddlab::pairing(st.grid, q, kp), pq) <= 1e-13);

            std::vector<double> shifted = p;
            for (double& x : shifted) x += 7.25;
            const auto ks = qddlab::onsager_apply(st, u, shifted);
            double scale = 0.0;
            double sum = 0.0;
            for (std::size_t i = 0; i < kp.size(); ++i) {
                scale = std::max(scale, std::abs(kp[i]));
                CHECK(std::abs(ks[i] - kp[i]) <= 1e-13 * scale + 1e-12);
                sum += kp[i];
            }
            CHECK(std::abs(sum) <= 1e-13 * scale * kp.size());

            const std::vector<double> c(u.size(), -2.0);
            for (double x : qddlab::onsager_apply(st, u, c)) CHECK(x == 0.0);
        }
    }
}

TEST_CASE("Onsager operator applied to the entropy gradient reproduces the generator") {
    std::mt19937_64 rng(6);
    for (int d = 1; d <= 2; ++d) {
        for (int n : {4, 8}) {
            const auto st = qddlab::quadratic_steady_state(Grid(d, n), 3.0);
            const auto gen = qddlab::make_generator(st);
            for (int s = 0; s < 100; ++s) {
                const auto u = testing::random_density(st.grid, rng);
                const auto k = qddlab::onsager_apply(st, u, qddlab::entropy_gradient(u, st));
                const auto mu = gen.apply(u);
                double scale = 0.0;
                for (double x : mu) scale = std::max(scale, std::abs(x));
                for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(-k[i] - mu[i]) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("directional split of the Onsager form") {
    std::mt19937_64 rng(7);
    const auto st1 = qddlab::quadratic_steady_state(Grid(1, 6), 1.0);
    const auto u1 = testing::random_density(st1.grid, rng);
    const auto p1 = testing::random_vector(6, rng);
    const auto parts1 = qddlab::onsager_split(st1, u1, p1, p1);
    REQUIRE(parts1.size() == 1);
    CHECK(parts1[0] == doctest::Approx(qddlab::onsager_form(st1, u1, p1, p1)).epsilon(1e-15));

    const auto st = qddlab::quadratic_steady_state(Grid(2, 6), 1.0);
    const auto u = testing::random_density(st.grid, rng);
    std::vector<double> p(st.grid.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::sin(1.0 + st.grid.coordinate(i, 0));
    const auto parts = qddlab::onsager_split(st, u, p, p);
    CHECK(parts[1] == 0.0);
    CHECK(parts[0] > 0.0);

    for (int s = 0; s < 20; ++s) {
        const auto v = testing::random_density(st.grid, rng);
        const auto a = testing::random_vector(v.size(), rng);
        const auto b = testing::random_vector(v.size(), rng);
        const auto split = qddlab::onsager_split(st, v, a, b);
        CHECK(std::abs(split[0] + split[1] - qddlab::onsager_form(st, v, a, b)) <=
              1e-13 * (std::abs(split[0]) + std::abs(split[1])));
    }
}

TEST_CASE("Onsager form vanishes only on constants") {
    const auto st = qddlab::quadratic_steady_state(Grid(2, 4), 1.0);
    const std::vector<double> u(st.grid.size(), 1.0);
    for (std::size_t i = 0; i < st.grid.size(); ++i) {
        std::vector<double> p(st.grid.size(), 0.0);
        p[i] = 1.0;
        CHECK(qddlab::onsager_form(st, u, p, p) > 0.0);
    }
}
