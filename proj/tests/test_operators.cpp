#include <doctest.h>

#include <Eigen/SVD>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "semiflow/error.hpp"
#include "semiflow/operators.hpp"
#include "semiflow/parallel.hpp"

using namespace semiflow;
using namespace std::complex_literals;

namespace {

std::vector<AnalyticFn> polynomial_family(std::uint64_t seed, int count, int max_degree) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::vector<AnalyticFn> out;
    for (int i = 0; i < count; ++i) {
        std::vector<cplx> c(static_cast<std::size_t>(deg(rng)) + 1);
        for (auto& x : c) x = cplx(nd(rng), nd(rng));
        out.push_back(polynomial(std::move(c)));
    }
    return out;
}

double svd_norm(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

struct Pair {
    Semiflow flow;
    Cocycle cocycle;
};

std::vector<Pair> gallery_pairs() {
    const Semiflow d = gallery::dilation();
    const Semiflow r = gallery::rotation(2.0);
    const Semiflow a = gallery::attraction();
    return {
        {d, make_coboundary("w=z", monomial(1), d, {0.0})},
        {r, make_coboundary("w=z", monomial(1), r, {0.0})},
        {a, Cocycle::derivative(a)},
        {d, gallery::exp_time(-1.0)},
    };
}

}  // namespace

TEST_CASE("apply examples") {
    const AnalyticFn f = geometric(0.4 - 0.2i);
    const AnalyticFn id = apply(identity_op(), f);
    const AnalyticFn f2 = apply(weighted_composition(identity_fn(), scale(identity_fn(), 0.5)), monomial(2));
    const double t = 0.7;
    const AnalyticFn f3 = apply(weighted_composition(constant(std::exp(-t)), scale(identity_fn(), std::exp(-t))),
                                AnalyticFn([](cplx z) { return 1.0 / (1.0 - z); }));
    for (cplx z : {cplx(0.0), cplx(0.3, 0.4), cplx(-0.9, 0.1)}) {
        CHECK(std::abs(id(z) - f(z)) < 1e-15);
        CHECK(std::abs(f2(z) - z * z * z / 4.0) < 1e-15);
        CHECK(std::abs(f3(z) - std::exp(-t) / (1.0 - std::exp(-t) * z)) < 1e-14);
    }
}

TEST_CASE("matrix examples") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    CHECK((matrix(identity_op(), h2, 8).entries - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);

    const Matrix shift = matrix(multiplication_op(identity_fn()), h2, 4).entries;
    Matrix expected = Matrix::Zero(4, 4);
    for (int i = 1; i < 4; ++i) expected(i, i - 1) = 1.0;
    CHECK((shift - expected).cwiseAbs().maxCoeff() < 1e-8);

    const Matrix half = matrix(composition_op(scale(identity_fn(), 0.5)), h2, 4).entries;
    CHECK((half - Eigen::Vector4cd(1.0, 0.5, 0.25, 0.125).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-8);

    // weighted shift on A^2_0, with ||z^n||^2 from an independent radial quadrature
    boost::math::quadrature::tanh_sinh<double> ts;
    auto nsq = [&](int n) { return ts.integrate([n](double r) { return std::pow(r, 2 * n) * 2.0 * r; }, 0.0, 1.0); };
    const SpaceSpec a2 = SpaceSpec::bergman(2.0, RadialWeight::standard(0.0));
    const Matrix ws = matrix(multiplication_op(identity_fn()), a2, 4).entries;
    for (int n = 0; n < 3; ++n) {
        CHECK(std::abs(ws(n + 1, n) - std::sqrt(nsq(n + 1) / nsq(n))) < 1e-6);
        CHECK(std::abs(ws(n + 1, n) - std::sqrt((n + 1.0) / (n + 2.0))) < 1e-6);
    }
    CHECK_THROWS_AS(matrix(identity_op(), h2, 1), InvalidInput);
    CHECK_THROWS_AS(matrix(identity_op(), SpaceSpec::hardy(3.0), 4), InvalidInput);
}

TEST_CASE("monomial norms for custom weights agree with the standard formula") {
    const auto std_norms = monomial_norms(SpaceSpec::bergman(2.0, RadialWeight::standard(1.0)), 12);
    const auto custom = monomial_norms(
        SpaceSpec::bergman(2.0, RadialWeight::custom("lin", [](double r) { return 2.0 * (1.0 - r * r); })), 12);
    for (std::size_t n = 0; n < 12; ++n) CHECK(std::abs(std_norms[n] - custom[n]) < 1e-10);
}

TEST_CASE("norm2 examples and SVD oracle") {
    CHECK(std::abs(norm2(Matrix(Matrix::Identity(8, 8))).value - 1.0) < 1e-12);
    Matrix d = Matrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) d(i, i) = std::ldexp(1.0, -i);
    const NormEstimate de = norm2(d);
    CHECK(de.converged);
    CHECK(std::abs(de.value - 1.0) < 1e-12);

    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    const AnalyticFn g([](cplx z) { return 1.0 / (2.0 - z); });
    double boundary_max = 0.0;
    for (int k = 0; k < 4096; ++k) boundary_max = std::max(boundary_max, std::abs(1.0 / (2.0 - std::polar(1.0, kTwoPi * k / 4096))));
    const OperatorMatrix mg = matrix(multiplication_op(g), h2, 32);
    CHECK(std::abs(norm2(mg).value - boundary_max) < 0.02 * boundary_max);
    CHECK(std::abs(norm2(mg).value - svd_norm(mg.entries)) < 1e-8);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a(12, 12);
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(nd(rng), nd(rng));
        const NormEstimate e = norm2(a);
        CHECK(e.converged);
        CHECK(std::abs(e.value - svd_norm(a)) < 1e-8 * svd_norm(a));
    }
    CHECK(norm2(Matrix(Matrix::Zero(3, 3))).value == 0.0);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(norm2(bad), InvalidInput);
}

TEST_CASE("norm2 is nondecreasing in N") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    for (const auto& pr : gallery_pairs()) {
        const WeightedCompOp op = semigroup_op(pr.flow, pr.cocycle, 0.5);
        const OperatorMatrix full = matrix(op, h2, 64);
        double prev = 0.0;
        for (int n : {8, 16, 32, 64}) {
            const double v = norm2(Matrix(full.entries.topLeftCorner(n, n))).value;
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("matrix-function agreement on H^2") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    std::vector<WeightedCompOp> ops = {weighted_composition(exponential(1.0), scale(identity_fn(), 0.7))};
    for (const auto& pr : gallery_pairs()) ops.push_back(semigroup_op(pr.flow, pr.cocycle, 0.3));
    const auto family = polynomial_family(5, 10, 15);
    for (const auto& op : ops) {
        const OperatorMatrix A = matrix(op, h2, 32);
        for (const auto& f : family) {
            Eigen::VectorXcd x = Eigen::VectorXcd::Zero(32);
            const auto c = taylor(f, 32, 1.0);
            for (int i = 0; i < 32; ++i) x(i) = c[i];
            const Eigen::VectorXcd y = A.entries * x;
            const auto direct = taylor(apply(op, f), 32, 0.9);
            for (int i = 0; i < 32; ++i) CHECK(std::abs(y(i) - direct[i]) < 1e-6);
        }
    }
}

TEST_CASE("column tails") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    const OperatorMatrix exact = matrix(composition_op(scale(identity_fn(), 0.5)), h2, 8);
    for (double t : exact.column_tail) CHECK(t < 1e-6);
    // M_{1/(2-z)} z^j has tail energy sum_{n >= N-j} 4^{-n-1} r^{2(n+j)}
    const OperatorMatrix mg = matrix(multiplication_op(AnalyticFn([](cplx z) { return 1.0 / (2.0 - z); })), h2, 8);
    const double r = 1.0 - 1e-3;
    for (int j = 0; j < 8; ++j) {
        double tail = 0.0;
        for (int n = 8 - j; n < 400; ++n) tail += std::pow(0.25, n + 1) * std::pow(r, 2.0 * (n + j));
        CHECK(std::abs(mg.column_tail[static_cast<std::size_t>(j)] - std::sqrt(tail)) < 1e-6);
    }
}

TEST_CASE("semigroup_op") {
    const auto family = polynomial_family(9, 10, 8);
    const auto pts = default_point_grid();
    for (const auto& pr : gallery_pairs()) {
        const AnalyticFn g0 = apply(semigroup_op(pr.flow, pr.cocycle, 0.0), family[0]);
        for (cplx z : pts) CHECK(std::abs(g0(z) - family[0](z)) < 1e-10);
        double worst = 0.0;
        for (double t : {0.0, 0.25, 0.5, 1.0})
            for (double s : {0.0, 0.3, 0.75, 1.0})
                for (const auto& f : family) {
                    const AnalyticFn lhs = apply(semigroup_op(pr.flow, pr.cocycle, t + s), f);
                    const AnalyticFn rhs =
                        apply(semigroup_op(pr.flow, pr.cocycle, t), apply(semigroup_op(pr.flow, pr.cocycle, s), f));
                    for (cplx z : pts) worst = std::max(worst, std::abs(lhs(z) - rhs(z)));
                }
        CHECK_MESSAGE(worst < 1e-8, pr.flow.name() << " / " << pr.cocycle.name());
    }
    const Semiflow d = gallery::dilation();
    const AnalyticFn out = apply(semigroup_op(d, make_coboundary("w=z", monomial(1), d, {0.0}), std::log(2.0)), identity_fn());
    for (cplx z : pts) CHECK(std::abs(out(z) - z / 4.0) < 1e-15);

    const Semiflow r = gallery::rotation(1.0);
    CHECK_THROWS_AS(semigroup_op(d, make_coboundary("w=z", monomial(1), r, {0.0}), 0.5), InvalidInput);
    CHECK_THROWS_AS(semigroup_op(d, gallery::exp_time(1.0), -1.0), InvalidInput);
}

TEST_CASE("norm_lower_bound") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    const SpaceSpec a2 = SpaceSpec::bergman(2.0, RadialWeight::standard(0.0));
    CHECK(norm_lower_bound(identity_op(), h2, 5, 1) >= 1.0 - 1e-8);
    CHECK(norm_lower_bound(identity_op(), a2, 5, 1) >= 1.0 - 1e-8);
    CHECK(std::abs(norm_lower_bound(multiplication_op(constant(0.3 - 0.4i)), h2, 5, 1) - 0.5) < 1e-8);
    CHECK(std::abs(norm_lower_bound(multiplication_op(constant(2.0)), a2, 5, 1) - 2.0) < 1e-8);

    const WeightedCompOp half = composition_op(scale(identity_fn(), 0.5));
    const double h4 = norm_lower_bound(half, SpaceSpec::hardy(4.0), 10, 42);
    CHECK(h4 > 0.0);
    CHECK(h4 <= 1.0 + 1e-9);
    CHECK(norm_lower_bound(half, SpaceSpec::hardy(4.0), 10, 42) == h4);

    for (const auto& pr : gallery_pairs()) {
        const WeightedCompOp op = semigroup_op(pr.flow, pr.cocycle, 0.5);
        const double lb = norm_lower_bound(op, h2, 10, 7);
        const double n2 = norm2(matrix(op, h2, 64)).value;
        CHECK_MESSAGE(lb <= n2 + 1e-6, pr.flow.name() << ": " << lb << " vs " << n2);
    }
    CHECK_THROWS_AS(norm_lower_bound(half, h2, 0, 1), InvalidInput);
}

TEST_CASE("norm2_stability") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    const auto fast = norm2_stability(composition_op(scale(identity_fn(), 0.5)), h2, 64);
    CHECK_FALSE(fast.slow);
    CHECK(fast.change < 1e-12);
}

TEST_CASE("matrix csv round trip") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix a(5, 5);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(nd(rng), nd(rng));
    const std::string path = "test_operators_matrix.csv";
    write_matrix_csv(path, a);
    CHECK((read_matrix_csv(path) - a).cwiseAbs().maxCoeff() == 0.0);
    {
        std::ofstream out(path);
        out << "1,0,2\n";
    }
    CHECK_THROWS_AS(read_matrix_csv(path), InvalidInput);
    {
        std::ofstream out(path);
        out << "1,x\n";
    }
    CHECK_THROWS_AS(read_matrix_csv(path), InvalidInput);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_matrix_csv("/nonexistent/matrix.csv"), InvalidInput);
}

TEST_CASE("parallel assembly is deterministic") {
    const SpaceSpec h2 = SpaceSpec::hardy(2.0);
    const auto pr = gallery_pairs()[2];
    const WeightedCompOp op = semigroup_op(pr.flow, pr.cocycle, 0.4);
    set_thread_count(1);
    const Matrix serial = matrix(op, h2, 32).entries;
    set_thread_count(4);
    const Matrix threaded = matrix(op, h2, 32).entries;
    set_thread_count(1);
    CHECK((serial - threaded).cwiseAbs().maxCoeff() == 0.0);
}
