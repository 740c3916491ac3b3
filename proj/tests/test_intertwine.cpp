#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "semiflow/error.hpp"
#include "semiflow/intertwine.hpp"

using namespace semiflow;

namespace {

const SpaceSpec h2 = SpaceSpec::hardy(2.0);
const SpaceSpec a2 = SpaceSpec::bergman(2.0, RadialWeight::standard(0.0));

AnalyticFn moebius(double b) {
    return AnalyticFn([b](cplx z) { return (z + b) / (1.0 + b * z); }).certify_boundary_continuity();
}

AbstractOperator differentiation() {
    return AbstractOperator::from_action(
        "d/dz",
        [](const AnalyticFn& f) {
            return AnalyticFn([f](cplx z) { return derivative(f, z, 0.5 * (1.0 - std::abs(z)), 64); });
        },
        h2);
}

AbstractOperator zero_op(const SpaceSpec& s) {
    return AbstractOperator::from_action("0", [](const AnalyticFn&) { return constant(0.0); }, s);
}

double max_error(const AnalyticFn& f, const std::function<cplx(cplx)>& g) {
    double worst = 0.0;
    for (cplx z : intertwine_grid()) worst = std::max(worst, std::abs(f(z) - g(z)));
    return worst;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("semiflow_intertwine_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("abstract operators are linear on the test family") {
    const auto fam = intertwine_family();
    CHECK(fam.size() == 12);
    const AbstractOperator f = AbstractOperator::from_weighted(weighted_composition(exponential(), scale(identity_fn(), 0.7)), h2);
    CHECK(linearity_residual(f, fam, intertwine_grid()) < 1e-9);
    const Semiflow d = gallery::dilation();
    const OperatorMatrix m = matrix(semigroup_op(d, gallery::exp_time(-1.0), 0.4), a2, 48);
    const AbstractOperator g = AbstractOperator::from_matrix("S", m.entries, a2);
    CHECK(g.matrix_backed());
    CHECK(linearity_residual(g, fam, intertwine_grid()) < 1e-9);
    CHECK_THROWS_AS(AbstractOperator::from_matrix("bad", Matrix::Identity(4, 4), SpaceSpec::hardy(3.0)), InvalidInput);
    CHECK_THROWS_AS(AbstractOperator::from_matrix("bad", Matrix::Identity(4, 3), h2), InvalidInput);
}

TEST_CASE("matrix-backed operators agree with the function action") {
    const Semiflow a = gallery::attraction();
    const WeightedCompOp op = semigroup_op(a, Cocycle::derivative(a), 0.3);
    for (const SpaceSpec& s : {h2, a2}) {
        const AbstractOperator T = AbstractOperator::from_matrix("S", matrix(op, s, 64).entries, s);
        for (const AnalyticFn& f : intertwine_family()) {
            const AnalyticFn tf = T(f);
            CHECK(max_error(tf, [&](cplx z) { return apply(op, f)(z); }) < 1e-10);
        }
        CHECK((T.section(8) - matrix(op, s, 8).entries).norm() < 1e-10);
    }
}

TEST_CASE("commutant_check") {
    const AnalyticFn g = geometric(0.5);  // 1 / (1 - z/2)
    const CommutantReport mult = commutant_check(AbstractOperator::from_weighted(multiplication_op(scale(g, 0.5)), h2));
    CHECK(mult.consistent);
    CHECK(mult.commutation_residual < 1e-9);
    CHECK(mult.multiplier_residual < 1e-9);
    CHECK(max_error(mult.multiplier, [](cplx z) { return 1.0 / (2.0 - z); }) < 1e-12);

    const CommutantReport comp = commutant_check(AbstractOperator::from_weighted(composition_op(scale(identity_fn(), 0.5)), h2));
    CHECK_FALSE(comp.consistent);
    // C_{z/2} z = z/2 while (B1) z = z: the gap at |z| = 0.95 is 0.475
    CHECK(comp.multiplier_residual > 0.4);

    const CommutantReport shift = commutant_check(AbstractOperator::from_weighted(multiplication_op(identity_fn()), h2));
    CHECK(shift.consistent);
    CHECK(max_error(shift.multiplier, [](cplx z) { return z; }) < 1e-15);
}

TEST_CASE("recover_symbols") {
    const AbstractOperator T = AbstractOperator::from_weighted(
        weighted_composition(scale(geometric(0.5), 0.5), scale(identity_fn(), 0.5)), h2);
    const RecoveredSymbols s = recover_symbols(T);
    CHECK(max_error(s.m, [](cplx z) { return 1.0 / (2.0 - z); }) < 1e-9);
    CHECK(max_error(s.phi, [](cplx z) { return 0.5 * z; }) < 1e-9);
    CHECK(s.masked.empty());

    std::vector<cplx> grid = intertwine_grid();
    grid.push_back(0.0);
    const RecoveredSymbols shift = recover_symbols(AbstractOperator::from_weighted(multiplication_op(identity_fn()), h2), grid);
    REQUIRE(shift.masked.size() == 1);
    CHECK(shift.masked[0] == cplx(0.0));
    CHECK(std::abs(shift.phi(0.0)) < 1e-12);
    CHECK(max_error(shift.phi, [](cplx z) { return z; }) < 1e-12);

    const RecoveredSymbols id = recover_symbols(AbstractOperator::from_weighted(identity_op(), a2));
    CHECK(max_error(id.m, [](cplx) { return cplx(1.0); }) == 0.0);
    CHECK(max_error(id.phi, [](cplx z) { return z; }) == 0.0);

    CHECK_THROWS_AS(recover_symbols(zero_op(h2)), DegenerateOperator);
}

TEST_CASE("check_intertwiner examples") {
    const IntertwinerReport good = check_intertwiner(
        AbstractOperator::from_weighted(weighted_composition(exponential(), scale(identity_fn(), 0.7)), a2));
    CHECK(good.pass);
    CHECK(max_error(*good.phi, [](cplx z) { return 0.7 * z; }) < 1e-8);
    CHECK(good.self_map_max < 0.7);
    CHECK(good.power_residuals.size() == 4);
    CHECK(good.form_residual < 1e-12);

    const IntertwinerReport mob = check_intertwiner(AbstractOperator::from_weighted(composition_op(moebius(0.3)), h2));
    CHECK(mob.pass);
    CHECK(max_error(*mob.phi, [](cplx z) { return (z + 0.3) / (1.0 + 0.3 * z); }) < 1e-8);

    const IntertwinerReport diff = check_intertwiner(differentiation());
    CHECK_FALSE(diff.pass);
    CHECK(diff.degenerate);
    CHECK(diff.intertwining_residual > 1e-2);
    CHECK(diff.multiplier_residual > 1e-2);

    // f -> f(1): phi is the unimodular constant 1
    const IntertwinerReport edge = check_intertwiner(AbstractOperator::from_weighted(composition_op(constant(1.0)), h2));
    CHECK(edge.intertwining_residual < 1e-12);
    CHECK(edge.self_map_max >= 1.0 - 1e-9);
    CHECK_FALSE(edge.pass);

    const IntertwinerReport blow = check_intertwiner(AbstractOperator::from_weighted(
        multiplication_op(AnalyticFn([](cplx z) { return 1.0 / (1.0 - z); })), h2));
    CHECK(blow.m_growing);
    CHECK_FALSE(blow.pass);

    CHECK_THROWS_AS(check_intertwiner(differentiation(), {cplx(1.0)}), InvalidInput);
}

TEST_CASE("intertwining implies the weighted-composition form") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const cplx a(0.45 * u(rng), 0.45 * u(rng));
        const cplx b(0.35 * u(rng), 0.35 * u(rng));
        const AnalyticFn phi = polynomial({b, a});
        const AnalyticFn m = polynomial({cplx(1.5, 0.0), cplx(u(rng), u(rng)), cplx(u(rng), 0.0)});
        const SpaceSpec& s = trial % 2 == 0 ? h2 : a2;
        const AbstractOperator T = trial % 3 == 0 ? AbstractOperator::from_matrix("W", matrix(weighted_composition(m, phi), s, 64).entries, s)
                                                  : AbstractOperator::from_weighted(weighted_composition(m, phi), s);
        const IntertwinerReport r = check_intertwiner(T);
        REQUIRE(r.intertwining_residual < 1e-8);
        CHECK_FALSE(r.degenerate);
        CHECK(r.form_residual < 1e-6);
        CHECK(r.pass);
        double min_m = 1e300;
        for (cplx z : intertwine_grid()) min_m = std::min(min_m, std::abs((*r.m)(z)));
        CHECK(min_m > 0.0);
    }
}

TEST_CASE("extract_semigroup recovers the dilation semigroup") {
    const Semiflow d = gallery::dilation();
    const Cocycle c = gallery::exp_time(-1.0);
    const Extraction ex = extract_semigroup([&](double t) { return AbstractOperator::from_weighted(semigroup_op(d, c, t), h2); });
    CHECK(ex.report.pass);
    CHECK(ex.report.semiflow_residual < 1e-12);
    CHECK(ex.report.cocycle_residual < 1e-12);
    CHECK(ex.report.continuity_residual < 1e-8);
    CHECK(ex.report.norm_surrogate_available);
    CHECK(std::abs(ex.report.norm_surrogate - 1.0) < 1e-12);
    CHECK_FALSE(ex.report.caveat.empty());
    for (double t : {0.1, 0.3, 0.7}) {
        for (cplx z : intertwine_grid()) {
            CHECK(std::abs(ex.flow(t, z) - std::exp(-t) * z) < 1e-8);
            CHECK(std::abs(ex.cocycle(t, z) - std::exp(-t)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(ex.flow(0.15, 0.5), InvalidInput);
}

TEST_CASE("extract_semigroup from matrix bundles") {
    const Semiflow a = gallery::attraction();
    const Cocycle der = Cocycle::derivative(a);
    const std::vector<double> times = default_extraction_times();
    for (const SpaceSpec& s : {h2, a2}) {
        const OperatorBundle b = make_bundle(a, der, s, 64, times);
        const Extraction ex = extract_semigroup(bundle_family(b), times);
        CHECK(ex.report.pass);
        CHECK(ex.report.semiflow_residual < 1e-7);
        CHECK(ex.report.cocycle_residual < 1e-7);
        for (double t : {0.1, 0.3, 0.7}) {
            for (cplx z : intertwine_grid()) {
                CHECK(std::abs(ex.flow(t, z) - a(t, z)) < 1e-7);
                CHECK(std::abs(ex.cocycle(t, z) - der(t, z)) < 1e-7);
            }
        }
    }
}

TEST_CASE("extract_semigroup locates a corrupted time") {
    const Semiflow r = gallery::rotation(1.0);
    const Cocycle c = gallery::exp_time(0.5);
    std::vector<double> times = default_extraction_times();
    times.push_back(0.5);
    const OperatorFamily family = [&](double t) {
        if (t == 0.5) return zero_op(h2);
        return AbstractOperator::from_weighted(semigroup_op(r, c, t), h2);
    };
    try {
        extract_semigroup(family, times);
        FAIL("expected an extraction error");
    } catch (const ExtractionError& e) {
        CHECK(e.time() == 0.5);
    }

    // a family that intertwines at every t but breaks the semigroup law
    const OperatorFamily skewed = [&](double t) {
        const double s = t == 0.3 ? 0.31 : t;
        return AbstractOperator::from_weighted(semigroup_op(r, c, s), h2);
    };
    const Extraction bad = extract_semigroup(skewed);
    CHECK_FALSE(bad.report.pass);
    CHECK(bad.report.semiflow_residual > 1e-3);
    const auto [t, s] = bad.report.worst_pair;
    CHECK((t == 0.3 || s == 0.3 || t + s == doctest::Approx(0.3)));

    CHECK_THROWS_AS(extract_semigroup(family, {0.1, 0.2, 0.3}), InvalidInput);
    CHECK_THROWS_AS(extract_semigroup(family, {0.0, 0.1, 0.2, 0.3}), InvalidInput);
}

TEST_CASE("bundle files") {
    const auto dir = scratch("roundtrip");
    const OperatorBundle b = make_bundle(gallery::dilation(), gallery::exp_time(-1.0), a2, 8, {0.0, 0.25, 0.5});
    write_bundle(dir.string(), b);
    const OperatorBundle back = read_bundle(dir.string());
    CHECK(back.space == "bergman:2:0");
    CHECK(back.n == 8);
    CHECK(back.t_values == b.t_values);
    for (std::size_t k = 0; k < b.matrices.size(); ++k) CHECK((back.matrices[k] - b.matrices[k]).norm() == 0.0);
    CHECK_THROWS_AS(bundle_family(back)(0.75), ExtractionError);

    {
        std::ofstream out(dir / "manifest.json");
        out << "{\"space\": \"hardy:2\", \"N\": 8, \"t_values\": [0, 1]}";
    }
    CHECK_THROWS_AS(read_bundle(dir.string()), InvalidInput);
    {
        std::ofstream out(dir / "manifest.json");
        out << "{\"space\": \"hardy:2\", \"N\": 4, \"t_values\": [0], \"matrices\": [\"t_0.csv\"]}";
    }
    CHECK_THROWS_AS(read_bundle(dir.string()), InvalidInput);
    {
        std::ofstream out(dir / "manifest.json");
        out << "not json";
    }
    CHECK_THROWS_AS(read_bundle(dir.string()), InvalidInput);
    CHECK_THROWS_AS(read_bundle((dir / "missing").string()), InvalidInput);
    std::filesystem::remove_all(dir);
}
