#include <doctest.h>

#include <cmath>
#include <random>

#include "qddlab/error.hpp"
#include "qddlab/functionals.hpp"
#include "qddlab/potential.hpp"
#include "support.hpp"

using qddlab::Grid;
using qddlab::Potential1D;

namespace {

// Composite Simpson rule with m panels on [a, b].
template <class F>
double simpson(F f, double a, double b, int m) {
    const double step = (b - a) / (2 * m);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * step);
    return s * step / 3.0;
}

}  // namespace

TEST_CASE("cell averages of quadratics") {
    for (double v : qddlab::cell_averages(Potential1D::quadratic(0.0), 5)) CHECK(v == 0.0);

    const auto two = qddlab::cell_averages(Potential1D::quadratic(8.0, 0.5), 2);
    CHECK(two[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(two[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const int n = 17;
    const auto sym = qddlab::cell_averages(Potential1D::quadratic(3.0, 0.5), n);
    for (int j = 0; j < n; ++j) CHECK(sym[j] == doctest::Approx(sym[n - 1 - j]).epsilon(1e-14));

    // against quadrature of the pointwise potential
    const Potential1D pot = Potential1D::quadratic(7.0, 0.3);
    const auto avg = qddlab::cell_averages(pot, 10);
    for (int j = 0; j < 10; ++j) {
        const double a = j / 10.0;
        CHECK(avg[j] == doctest::Approx(10.0 * simpson([&](double x) { return pot(x); }, a, a + 0.1, 8)).epsilon(1e-13));
    }
}

TEST_CASE("tabulated potentials") {
    const Potential1D t = Potential1D::tabulated({0.1, 0.2, 0.3}, 1.0);
    CHECK(qddlab::cell_averages(t, 3) == std::vector<double>{0.1, 0.2, 0.3});
    CHECK_THROWS_AS(qddlab::cell_averages(t, 4), qddlab::ConfigError);
    CHECK_THROWS_AS(t(0.5), qddlab::UnsupportedOperation);
    const std::vector<Potential1D> pots{t};
    CHECK_THROWS_AS(qddlab::w_from_v(pots), qddlab::UnsupportedOperation);
}

TEST_CASE("steady state for V = 0") {
    const Grid g(2, 6);
    const auto st = qddlab::quadratic_steady_state(g, 0.0);
    for (const auto& f : st.factors) {
        for (double v : f) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    }
    for (double z : st.z_h) CHECK(z == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.gamma_h == 0.0);
    CHECK(st.lambda_h == 0.0);
}

TEST_CASE("equal cell averages give a uniform factor") {
    const auto st = qddlab::quadratic_steady_state(Grid(1, 2), 8.0);
    CHECK(st.factors[0][0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.factors[0][1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("factors have unit mass and the steady state is their exact product") {
    std::mt19937_64 rng(7);
    const std::vector<double> xbar{0.3, 0.65, 0.5};
    for (int d = 1; d <= 3; ++d) {
        const Grid g(d, 6);
        const auto st = qddlab::quadratic_steady_state(g, 4.0, std::span(xbar).first(static_cast<std::size_t>(d)));
        for (const auto& f : st.factors) {
            double s = 0.0;
            for (double v : f) s += v;
            CHECK(s * g.h() == doctest::Approx(1.0).epsilon(1e-14));
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            double p = 1.0;
            for (int k = 0; k < d; ++k) p *= st.factors[k][static_cast<std::size_t>(g.coordinate(i, k) - 1)];
            CHECK(st.values[i] == p);
        }
        CHECK(st.values.mass(g) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("gamma_h matches log(Z / Z^h) and decreases to zero under refinement") {
    const double lambda = 10.0;
    double previous = INFINITY;
    for (int n : {5, 10, 20, 40}) {
        const auto st = qddlab::quadratic_steady_state(Grid(2, n), lambda);
        const double z = simpson([&](double x) { return std::exp(-0.5 * lambda * (x - 0.5) * (x - 0.5)); }, 0.0, 1.0, 2000);
        double zh = 0.0;
        for (double v : qddlab::cell_averages(Potential1D::quadratic(lambda), n)) zh += std::exp(-v) / n;
        CHECK(st.gamma_h == doctest::Approx(2.0 * std::log(z / zh)).epsilon(1e-8));
        CHECK(st.gamma_h >= 0.0);
        CHECK(st.gamma_h < previous);
        previous = st.gamma_h;
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("shift invariance of the steady state") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    std::vector<double> table(9);
    for (double& v : table) v = uni(rng);
    std::vector<double> shifted = table;
    for (double& v : shifted) v += 250.0;
    const Grid g(1, 9);
    const std::vector<Potential1D> a{Potential1D::tabulated(table, 0.0)};
    const std::vector<Potential1D> b{Potential1D::tabulated(shifted, 0.0)};
    const auto sa = qddlab::steady_state(a, g);
    const auto sb = qddlab::steady_state(b, g);
    for (std::size_t i = 0; i < 9; ++i) CHECK(sa.values[i] == doctest::Approx(sb.values[i]).epsilon(1e-13));
}

TEST_CASE("potentials beyond the exponent guard are rejected") {
    CHECK_THROWS_AS(qddlab::quadratic_steady_state(Grid(1, 10), 2e4), qddlab::RangeError);
    // the largest cell average at lambda = 6000 is about 607
    CHECK_NOTHROW(qddlab::quadratic_steady_state(Grid(1, 10), 6000.0));
}

TEST_CASE("lambda_h closed form") {
    CHECK(qddlab::lambda_h(0.0, 0.1) == 0.0);
    CHECK(qddlab::lambda_h(8.0, 0.5) == doctest::Approx(8.0 * (1.0 - std::exp(-1.0))).epsilon(1e-15));
    CHECK(qddlab::lambda_h(8.0, 0.5) == doctest::Approx(5.056964).epsilon(1e-7));
    const double h = 1.0 / 30.0;
    const double l1 = qddlab::lambda_h(1.0, h);
    // lambda - lambda^2 h^2 / 4 + lambda^3 h^4 / 24 - lambda^4 h^6 / 192
    CHECK(l1 == doctest::Approx(1.0 - h * h / 4.0 + h * h * h * h / 24.0 - std::pow(h, 6) / 192.0).epsilon(1e-14));
    CHECK(l1 == doctest::Approx(0.9997222).epsilon(1e-7));
    CHECK(1.0 - l1 <= h * h / 4.0);
    CHECK(qddlab::lambda_h(1e-20, 0.1) == doctest::Approx(1e-20).epsilon(1e-12));
    CHECK_THROWS_AS(qddlab::lambda_h(1.0, 0.0), qddlab::DomainError);
}

TEST_CASE("lambda_h is nondecreasing in lambda and converges at rate h^2") {
    for (double h : {0.5, 0.1, 0.01}) {
        double prev = 0.0;
        for (double lambda = 0.0; lambda <= 200.0; lambda += 0.5) {
            const double lh = qddlab::lambda_h(lambda, h);
            CHECK(lh >= prev);
            CHECK(lh <= lambda);
            prev = lh;
        }
    }
    for (double lambda : {1.0, 10.0}) {
        for (int n : {10, 20, 40}) {
            const double h = 1.0 / n;
            const double ratio = (lambda - qddlab::lambda_h(lambda, h)) / (h * h);
            CHECK(std::abs(ratio / (lambda * lambda / 4.0) - 1.0) < 0.1);
        }
    }
}

TEST_CASE("W = |grad V|^2 - 2 Laplace V") {
    const std::vector<Potential1D> flat{Potential1D::quadratic(0.0), Potential1D::quadratic(0.0)};
    const std::vector<double> p{0.2, 0.9};
    CHECK(qddlab::w_from_v(flat)(p) == 0.0);

    const std::vector<Potential1D> steep{Potential1D::quadratic(100.0), Potential1D::quadratic(100.0)};
    const std::vector<double> centre{0.5, 0.5};
    CHECK(qddlab::w_from_v(steep)(centre) == doctest::Approx(-400.0));
    const std::vector<double> off{0.7, 0.4};
    CHECK(qddlab::w_from_v(steep)(off) == doctest::Approx(1e4 * (0.04 + 0.01) - 400.0));

    const std::vector<Potential1D> line{Potential1D::quadratic(2.0, 0.0)};
    const std::vector<double> one{1.0};
    CHECK(qddlab::w_from_v(line)(one) == doctest::Approx(0.0));
}

TEST_CASE("the steady state minimises the entropy among densities of unit mass") {
    std::mt19937_64 rng(11);
    const Grid g(2, 5);
    const auto st = qddlab::quadratic_steady_state(g, 3.0);
    CHECK(qddlab::entropy(st.values.values(), st) == 0.0);
    for (int s = 0; s < 100; ++s) {
        const auto u = testing::random_density(g, rng, 0.5);
        double dist = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) dist = std::max(dist, std::abs(u[i] - st.values[i]));
        const double h = qddlab::entropy(u, st);
        CHECK(h >= 0.0);
        if (dist >= 1e-3) CHECK(h >= 1e-12);
    }
}
