#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "semiflow/error.hpp"
#include "semiflow/spaces.hpp"

using namespace semiflow;
using namespace std::complex_literals;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

std::vector<cplx> random_coeffs(std::mt19937_64& rng, int degree) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<cplx> c(static_cast<std::size_t>(degree) + 1);
    for (auto& x : c) x = cplx(n(rng), n(rng));
    return c;
}

// int_0^1 r^{2n} (alpha+1)(1-r^2)^alpha 2r dr
double monomial_norm_sq(int n, double alpha) {
    tanh_sinh<double> ts;
    return ts.integrate([&](double r) { return std::pow(r, 2 * n) * (alpha + 1.0) * std::pow(1.0 - r * r, alpha) * 2.0 * r; },
                        0.0, 1.0);
}

// omega(S(a)) as an iterated integral over the angular window and radial range
double carleson_oracle(const std::function<double(double)>& omega, double a) {
    const double half = (1.0 - a) / 2.0;
    const double radial = gauss_kronrod<double, 61>::integrate([&](double r) { return omega(r) * r; }, a, 1.0, 15, 1e-13);
    const double angular = gauss_kronrod<double, 15>::integrate([](double) { return 1.0; }, -half, half);
    return radial * angular / kPi;
}

}  // namespace

TEST_CASE("hardy_norm examples") {
    CHECK(std::abs(hardy_norm(polynomial({1.0, 1.0}), 2.0) - std::sqrt(2.0)) < 1e-6);
    for (double p : {1.0, 1.5, 2.0, 4.0}) CHECK(std::abs(hardy_norm(constant(2.0 - 1.0i), p) - std::abs(2.0 - 1.0i)) < 1e-12);
    CHECK(std::abs(hardy_norm(geometric(0.5), 2.0) - std::sqrt(4.0 / 3.0)) < 1e-6);
    CHECK_THROWS_AS(hardy_norm(constant(1.0), 0.5), InvalidInput);
}

TEST_CASE("Parseval agreement for random polynomials") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> deg(0, 20);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_coeffs(rng, deg(rng));
        double l2 = 0.0;
        for (const auto& x : c) l2 += std::norm(x);
        CHECK(std::abs(hardy_norm(polynomial(c), 2.0) - std::sqrt(l2)) < 1e-8 * std::max(1.0, std::sqrt(l2)));
    }
}

TEST_CASE("circle means are nondecreasing in the radius") {
    const AnalyticFn f = geometric(0.8 + 0.1i);
    for (double p : {1.0, 2.0, 3.0}) {
        double prev = 0.0;
        for (double r : {0.2, 0.5, 0.9, 0.99, 0.999}) {
            const double v = circle_mean(f, p, r, 2048);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("bergman_norm examples") {
    for (double alpha : {-0.5, 0.0, 0.5, 1.0, 2.0})
        for (double p : {1.0, 2.0, 3.0})
            CHECK(std::abs(bergman_norm(constant(1.0), p, RadialWeight::standard(alpha)) - 1.0) < 1e-12);
    CHECK(std::abs(bergman_norm(identity_fn(), 2.0, RadialWeight::standard(0.0)) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(bergman_norm(identity_fn(), 2.0, RadialWeight::standard(1.0)) - std::sqrt(monomial_norm_sq(1, 1.0))) <
          1e-12);
    CHECK(std::abs(monomial_norm_sq(1, 1.0) - 1.0 / 3.0) < 1e-14);
}

TEST_CASE("monomial Bergman norms match the radial oracle") {
    for (double alpha : {0.0, 0.5, 1.0, 2.0})
        for (int n = 0; n <= 15; ++n)
            CHECK(std::abs(bergman_norm(monomial(n), 2.0, RadialWeight::standard(alpha)) -
                           std::sqrt(monomial_norm_sq(n, alpha))) < 1e-8);
}

TEST_CASE("custom weights reproduce the standard ones") {
    const RadialWeight flat = RadialWeight::custom("one", [](double) { return 1.0; });
    CHECK(std::abs(flat.total_mass() - 1.0) < 1e-12);
    CHECK(std::abs(bergman_norm(identity_fn(), 2.0, flat) - std::sqrt(0.5)) < 1e-10);
    const RadialWeight lin = RadialWeight::custom("2(1-r^2)", [](double r) { return 2.0 * (1.0 - r * r); });
    CHECK(std::abs(bergman_norm(monomial(3), 2.0, lin) - std::sqrt(monomial_norm_sq(3, 1.0))) < 1e-10);
    const RadialWeight table = RadialWeight::from_table("table", {0.0, 0.5, 0.99}, {1.0, 1.0, 1.0});
    CHECK(std::abs(table(0.3) - 1.0) < 1e-15);
    CHECK(std::abs(bergman_norm(identity_fn(), 2.0, table) - std::sqrt(0.5)) < 1e-10);
    CHECK_THROWS_AS(RadialWeight::from_table("bad", {0.0, 0.5}, {1.0, -1.0}), InvalidInput);
    CHECK_THROWS_AS(RadialWeight::standard(-1.0), InvalidInput);
}

TEST_CASE("focused quadrature on test functions matches the coefficient series") {
    // ||(1 - a z)^{-3}||^2 in A^2_0 = sum_n C(n+2, 2)^2 a^{2n} / (n + 1)
    const RadialWeight w = RadialWeight::standard(0.0);
    for (double a : {0.3, 0.9, 0.99, 1.0 - std::ldexp(1.0, -10)}) {
        const double mu = carleson_measure(w, a);
        double series = 0.0;
        for (int n = 0; n < 200000; ++n) {
            const double c = 0.5 * (n + 1.0) * (n + 2.0);
            const double term = c * c * std::pow(a, 2 * n) / (n + 1.0);
            series += term;
            if (term < 1e-18 * series) break;
        }
        const double expected = std::pow(1.0 - a, 6.0) / mu * series;
        const double got = std::pow(bergman_norm(test_function(a, 2.0, 5.0, w), 2.0, w), 2.0);
        CHECK(std::abs(got - expected) < 1e-8 * expected);
    }
}

TEST_CASE("regularity") {
    for (double alpha : {0.0, 0.5, 1.0, 2.0, 5.0}) CHECK(is_regular(RadialWeight::standard(alpha)).regular);

    const auto flat = is_regular(RadialWeight::standard(0.0));
    for (double v : flat.ratios) CHECK(std::abs(v - 1.0) < 1e-12);

    // ratio for Standard(1) is (2 + r) / (3 (1 + r))
    const auto lin = is_regular(RadialWeight::standard(1.0));
    for (std::size_t i = 0; i < lin.r_grid.size(); ++i) {
        const double r = lin.r_grid[i];
        CHECK(std::abs(lin.ratios[i] - (2.0 + r) / (3.0 * (1.0 + r))) < 1e-10);
    }
    CHECK(lin.min_ratio >= 0.5);
    CHECK(lin.max_ratio <= 2.0);

    const RadialWeight fast = RadialWeight::custom_log("exp(-1/(1-r))", [](double r) { return -1.0 / (1.0 - r); });
    const auto rep = is_regular(fast);
    CHECK_FALSE(rep.regular);
    CHECK(rep.min_ratio < 1e-3);
    CHECK(rep.tail_slope < -0.5);

    const RadialWeight hole = RadialWeight::custom("gap", [](double r) { return r < 0.6 ? 1.0 : 0.0; });
    CHECK_THROWS_AS(is_regular(hole), InvalidInput);
}

TEST_CASE("carleson_measure") {
    const RadialWeight w0 = RadialWeight::standard(0.0);
    CHECK(std::abs(carleson_measure(w0, 0.9) - 0.0095 / kPi) < 1e-15);
    CHECK(std::abs(carleson_measure(w0, 0.9) - carleson_oracle([](double) { return 1.0; }, 0.9)) < 1e-13);
    CHECK(std::abs(carleson_measure(w0, 0.99i) - 0.01 * (1.0 - 0.99 * 0.99) / 2.0 / kPi) < 1e-15);
    const RadialWeight w1 = RadialWeight::standard(1.5);
    for (double a : {0.2, 0.5, 0.9}) {
        const double oracle = carleson_oracle([](double r) { return 2.5 * std::pow(1.0 - r * r, 1.5); }, a);
        CHECK(std::abs(carleson_measure(w1, std::polar(a, 1.0)) - oracle) < 1e-12 * std::max(oracle, 1e-3));
    }
    const RadialWeight bump = RadialWeight::custom("1+r", [](double r) { return 1.0 + r; });
    CHECK(std::abs(carleson_measure(bump, 0.7) - carleson_oracle([](double r) { return 1.0 + r; }, 0.7)) < 1e-13);
    double prev = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double v = carleson_measure(w1, 1.0 - std::ldexp(1.0, -k));
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(carleson_measure(w0, 0.0), InvalidInput);
    CHECK_THROWS_AS(carleson_measure(w0, 1.0), InvalidInput);
}

TEST_CASE("test functions") {
    const RadialWeight w0 = RadialWeight::standard(0.0);
    const AnalyticFn f = test_function(0.5, 2.0, 3.0, w0);
    CHECK(std::abs(f(0.0) - 0.25 / std::sqrt(carleson_measure(w0, 0.5))) < 1e-14);
    CHECK(std::abs(test_function_power(0.5, 2.0, 3.0, carleson_measure(w0, 0.5), 0.3i) - std::norm(f(0.3i))) < 1e-12);

    double prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double a = 1.0 - std::ldexp(1.0, -k);
        const double v = std::abs(test_function(a, 2.0, default_gamma(2.0, 0.0), w0)(a));
        CHECK(v > prev);
        prev = v;
    }

    for (auto [p, alpha] : {std::pair{2.0, 0.0}, std::pair{2.0, 1.0}, std::pair{3.0, 0.5}}) {
        const RadialWeight w = RadialWeight::standard(alpha);
        const double gamma = default_gamma(p, alpha);
        std::vector<double> vals;
        for (double a : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) vals.push_back(bergman_norm(test_function(a, p, gamma, w), p, w));
        // flat as |a| -> 1
        CHECK(std::abs(vals.back() / vals[vals.size() - 2] - 1.0) < 0.02);
        for (double v : vals) CHECK(v < 10.0);
    }
    CHECK_THROWS_AS(test_function(0.0, 2.0, 3.0, w0), InvalidInput);
    CHECK_THROWS_AS(test_function(0.5, 2.0, 0.0, w0), InvalidInput);
}

TEST_CASE("pairing") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    CHECK(std::abs(pairing(identity_fn(), identity_fn(), h2) - 1.0) < 1e-14);
    CHECK(std::abs(pairing(identity_fn(), constant(1.0), h2)) < 1e-14);
    CHECK(std::abs(pairing(geometric(0.5), geometric(0.5), h2) - 4.0 / 3.0) < 1e-8);
    const SpaceSpec a2 = SpaceSpec::bergman(2.0, RadialWeight::standard(0.0));
    CHECK(std::abs(pairing(identity_fn(), identity_fn(), a2) - 0.5) < 1e-14);
    CHECK(std::abs(pairing(monomial(2), identity_fn(), a2)) < 1e-14);
    CHECK_THROWS_AS(pairing(identity_fn(), identity_fn(), SpaceSpec::hardy(1.0)), Unsupported);
    CHECK(std::abs(SpaceSpec::hardy(3.0).conjugate() - 1.5) < 1e-15);
}

TEST_CASE("growth_bound_check") {
    const auto grid = growth_grid();
    CHECK(std::abs(growth_bound_check(constant(1.0), 2.0, 0.0, grid).max_ratio - 1.0) < 1e-12);
    CHECK(growth_bound_check(geometric(0.9), 2.0, 0.0, grid).max_ratio <= 1.05);
    CHECK(growth_bound_check(monomial(10), 2.0, 0.0, grid).max_ratio <= 1.05);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> deg(0, 12);
    for (auto [p, alpha] : {std::pair{2.0, 0.0}, std::pair{2.0, 1.0}, std::pair{4.0, 0.0}}) {
        for (int i = 0; i < 20; ++i) {
            const auto c = random_coeffs(rng, deg(rng));
            CHECK(growth_bound_check(polynomial(c), p, alpha, grid).max_ratio <= 1.05);
        }
    }
    CHECK_THROWS_AS(growth_bound_check(constant(0.0), 2.0, 0.0, grid), InvalidInput);
}

TEST_CASE("parse_space") {
    const SpaceSpec h = parse_space("hardy:2");
    CHECK(h.kind() == SpaceSpec::Kind::Hardy);
    CHECK(h.name() == "hardy:2");
    const SpaceSpec b = parse_space("bergman:3:0.5");
    CHECK(b.kind() == SpaceSpec::Kind::Bergman);
    CHECK(b.p() == 3.0);
    CHECK(b.weight().alpha() == 0.5);
    CHECK(b.name() == "bergman:3:0.5");
    CHECK_THROWS_AS(parse_space("hardy"), InvalidInput);
    CHECK_THROWS_AS(parse_space("hardy:x"), InvalidInput);
    CHECK_THROWS_AS(parse_space("dirichlet:2"), InvalidInput);
    CHECK_THROWS_AS(parse_space("hardy:0.5"), InvalidInput);

    const std::string path = "test_spaces_weight.csv";
    {
        std::ofstream out(path);
        out << "r,omega\n0,1\n0.5,1\n0.99,1\n";
    }
    const SpaceSpec c = parse_space("bergman:2:custom:" + path);
    CHECK_FALSE(c.weight().is_standard());
    CHECK(std::abs(bergman_norm(identity_fn(), 2.0, c.weight()) - std::sqrt(0.5)) < 1e-10);
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_space("bergman:2:custom:/nonexistent/file.csv"), InvalidInput);
}

TEST_CASE("boundary_max_profile") {
    const auto bounded = boundary_max_profile(geometric(0.5), {1e-2, 1e-3, 1e-4});
    for (double v : bounded) CHECK(v < 2.0 + 1e-12);
    const AnalyticFn pole([](cplx z) { return 1.0 / (1.0 - z); });
    const auto grows = boundary_max_profile(pole, {1e-2, 1e-3, 1e-4});
    CHECK(grows[2] > 5.0 * grows[0]);
}
