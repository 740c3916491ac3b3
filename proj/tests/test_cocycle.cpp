#include <doctest.h>

#include <cmath>

#include "semiflow/cocycle.hpp"
#include "semiflow/error.hpp"

using namespace semiflow;
using namespace std::complex_literals;

namespace {

Cocycle z_coboundary(const Semiflow& s) { return make_coboundary("w=z", monomial(1), s, {0.0}); }

}  // namespace

TEST_CASE("cocycle_eval examples") {
    const Cocycle cz = z_coboundary(gallery::dilation());
    for (double t : {0.3, 1.0}) CHECK(std::abs(cz(t, 0.4 + 0.2i) - std::exp(-t)) < 1e-15);

    const Cocycle deriv = Cocycle::derivative(gallery::attraction());
    for (cplx z : {cplx(0.0), cplx(0.5, -0.3), cplx(-0.9)}) CHECK(std::abs(deriv(0.7, z) - std::exp(-0.7)) < 1e-12);

    const cplx z0(0.3, 0.2);
    CHECK(cz(0.0, z0) == 1.0);
    CHECK(deriv(0.0, z0) == 1.0);
    CHECK(gallery::exp_time(-1.0)(0.0, z0) == 1.0);
}

TEST_CASE("coboundary evaluation at a zero of w is rejected") {
    const Cocycle cz = z_coboundary(gallery::dilation());
    CHECK_THROWS_AS(cz(0.5, 0.0), DivisionByZero);
    // undeclared zero
    const Cocycle undeclared = make_coboundary("w=z^2-0.25", polynomial({-0.25, 0.0, 1.0}), gallery::identity(), {});
    CHECK_THROWS_AS(undeclared(0.5, 0.5), DivisionByZero);
}

TEST_CASE("make_coboundary admissibility") {
    const Cocycle sq = make_coboundary("w=z^2", monomial(2), gallery::dilation(), {0.0});
    CHECK(std::abs(sq(0.4, 0.3 - 0.1i) - std::exp(-0.8)) < 1e-14);
    CHECK_THROWS_AS(make_coboundary("w=z-0.5", polynomial({-0.5, 1.0}), gallery::dilation(), {0.5}),
                    AdmissibilityError);

    // (1 - z)^1.5 over the attraction flow: (1 - phi_t(z)) / (1 - z) = e^{-t} pointwise
    const Cocycle pw = make_coboundary("w=(1-z)^1.5", gallery::one_minus_power(1.5), gallery::attraction(), {});
    for (cplx z : default_point_grid()) {
        const cplx ratio = (1.0 - gallery::attraction()(0.6, z)) / (1.0 - z);
        CHECK(std::abs(ratio - std::exp(-0.6)) < 1e-14);
        CHECK(std::abs(pw(0.6, z) - std::pow(ratio, 1.5)) < 1e-12);
    }
}

TEST_CASE("verify_cocycle") {
    const auto ts = default_time_grid();
    const auto zs = default_point_grid();
    for (const Semiflow& s : {gallery::dilation(), gallery::rotation(2.0)}) {
        const auto rep = verify_cocycle(z_coboundary(s), s, ts, zs, 1e-10);
        CHECK_MESSAGE(rep.pass, s.name());
    }
    const auto d = verify_cocycle(Cocycle::derivative(gallery::dilation()), gallery::dilation(), ts, zs, 1e-8);
    CHECK(d.pass);
    CHECK(d.law_residual < 1e-8);

    const Cocycle broken = Cocycle::closed_form("1+t", [](double t, cplx) { return cplx(1.0 + t); });
    const auto b = verify_cocycle(broken, gallery::dilation(), ts, zs, 1e-8);
    CHECK_FALSE(b.pass);
    // worst case t = s = 2: |(1 + 4) - 3 * 3| = 4 = t s
    CHECK(std::abs(b.law_residual - 4.0) < 1e-12);
}

TEST_CASE("sup_norm") {
    const auto radii = default_sup_radii();
    CHECK(std::abs(sup_norm(gallery::exp_time(-1.0), 0.5, radii) - std::exp(-0.5)) < 1e-15);
    CHECK(sup_norm(gallery::exp_cayley(1.0), 0.0, radii) == 1.0);
    const Cocycle pw = make_coboundary("w=(1-z)^1.5", gallery::one_minus_power(1.5), gallery::attraction(), {});
    CHECK(std::abs(sup_norm(pw, 0.2, radii) - std::exp(-0.3)) < 1e-12);
    CHECK_THROWS_AS(sup_norm(pw, 0.2, radii, 64), InvalidInput);
}

TEST_CASE("sup_norm is nondecreasing in the radius") {
    const Cocycle deriv = Cocycle::derivative(gallery::rotation(1.0));
    const Cocycle cay = gallery::exp_cayley(1.0);
    const Cocycle mixed = Cocycle::closed_form("1/(2-z) weight", [](double t, cplx z) {
        return std::exp(t * std::log(2.0 / (2.0 - z)));
    });
    for (const Cocycle& m : {deriv, cay, mixed}) {
        double prev = 0.0;
        for (double r : {0.9, 0.99, 0.999}) {
            const double v = sup_norm(m, 0.3, {r});
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("m_0 is exactly one for every variant") {
    const Semiflow s = gallery::attraction();
    const Cocycle variants[] = {
        gallery::exp_time(2.0), Cocycle::derivative(s),
        make_coboundary("w=(1-z)^1.5", gallery::one_minus_power(1.5), s, {})};
    for (const Cocycle& m : variants)
        for (cplx z : default_point_grid()) CHECK(std::abs(m(0.0, z) - 1.0) < 1e-12);
}

TEST_CASE("limsup_probe regimes") {
    const auto ts = default_limsup_times();
    const auto radii = default_sup_radii();
    const auto decay = limsup_probe(gallery::exp_time(-1.0), ts, radii);
    CHECK(decay.regime == LimsupRegime::AtMostOne);
    CHECK(decay.tail_max < 1.0);

    const auto grow = limsup_probe(gallery::exp_time(1.0), ts, radii);
    CHECK(grow.regime == LimsupRegime::Finite);
    CHECK(std::abs(grow.tail_max - std::exp(std::ldexp(1.0, -6))) < 1e-14);

    const auto rot = limsup_probe(z_coboundary(gallery::rotation(2.0)), ts, radii);
    CHECK(rot.regime == LimsupRegime::AtMostOne);
    for (double v : rot.values) CHECK(std::abs(v - 1.0) < 1e-14);

    const auto blow = limsup_probe(gallery::exp_cayley(1.0), ts, radii);
    CHECK(blow.regime == LimsupRegime::Growing);
    CHECK(blow.radial_growth);
}
