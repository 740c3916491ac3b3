#include "semiflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiflow/error.hpp"

namespace semiflow {

namespace {

constexpr double kSelfMapSlack = 1e-9;

bool matches_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::string describe(double t, cplx z) {
    std::ostringstream os;
    os << "t = " << t << ", z = " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

Semiflow Semiflow::closed_form(std::string name, Map map, std::vector<cplx> fixed_points) {
    Semiflow s;
    s.kind_ = Kind::ClosedForm;
    s.name_ = std::move(name);
    s.map_ = std::make_shared<const Map>(std::move(map));
    s.fixed_points_ = std::move(fixed_points);
    return s;
}

Semiflow Semiflow::generator_driven(std::string name, AnalyticFn generator, OdeOptions options,
                                    std::vector<cplx> fixed_points) {
    Semiflow s;
    s.kind_ = Kind::GeneratorDriven;
    s.name_ = std::move(name);
    s.generator_ = std::move(generator);
    s.ode_ = options;
    s.fixed_points_ = std::move(fixed_points);
    return s;
}

Semiflow Semiflow::with_derivative(Map dmap) const {
    Semiflow out = *this;
    out.dmap_ = std::make_shared<const Map>(std::move(dmap));
    return out;
}

Semiflow Semiflow::with_time_domain(std::vector<double> times) const {
    Semiflow copy = *this;
    std::sort(times.begin(), times.end());
    copy.time_domain_ = std::move(times);
    return copy;
}

bool Semiflow::defined_at(double t) const {
    if (t < 0.0) return false;
    if (time_domain_.empty()) return true;
    return std::any_of(time_domain_.begin(), time_domain_.end(), [t](double d) { return matches_time(t, d); });
}

cplx Semiflow::raw(double t, cplx z) const {
    if (!(t >= 0.0)) throw InvalidInput("semiflow: t must be nonnegative");
    if (!defined_at(t)) throw InvalidInput("semiflow '" + name_ + "' is not defined at " + describe(t, z));
    if (kind_ == Kind::ClosedForm) return (*map_)(t, z);
    return integrate_generator(*generator_, t, z, ode_);
}

cplx Semiflow::operator()(double t, cplx z) const {
    if (!(std::abs(z) < 1.0)) throw InvalidInput("semiflow: |z| must be < 1 at " + describe(t, z));
    const cplx w = raw(t, z);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        throw EvaluationError("semiflow '" + name_ + "': non-finite value at " + describe(t, z));
    }
    if (std::abs(w) > 1.0 + kSelfMapSlack) {
        throw InvalidSemiflow("semiflow '" + name_ + "' leaves the disk at " + describe(t, z));
    }
    return w;
}

AnalyticFn Semiflow::at(double t) const {
    Semiflow self = *this;
    return AnalyticFn([self, t](cplx z) { return self(t, z); });
}

cplx integrate_generator(const AnalyticFn& generator, double t, cplx z, const OdeOptions& opt) {
    if (!(t >= 0.0)) throw InvalidInput("integrate_generator: t must be nonnegative");
    if (t == 0.0) return z;

    // Dormand-Prince 5(4) tableau.
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                     b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const auto G = [&generator](cplx w) { return generator.eval_unchecked(w); };
    const double limit = 1.0 - 1e-12 + opt.escape_tol;

    cplx w = z;
    double s = 0.0;
    cplx k1 = G(w);
    double h = std::min(t, 1e-2 / (1.0 + std::abs(k1)));
    std::size_t steps = 0;
    while (s < t) {
        if (++steps > opt.max_steps) {
            throw IntegrationFailure("integrate_generator: step budget exhausted at t = " + std::to_string(s));
        }
        if (s + h > t) h = t - s;
        const cplx k2 = G(w + h * (a21 * k1));
        const cplx k3 = G(w + h * (a31 * k1 + a32 * k2));
        const cplx k4 = G(w + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const cplx k5 = G(w + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const cplx k6 = G(w + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const cplx w_new = w + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const cplx k7 = G(w_new);
        const cplx err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = opt.atol + opt.rtol * std::max(std::abs(w), std::abs(w_new));
        const double ratio = std::abs(err) / scale;
        if (!std::isfinite(ratio)) throw IntegrationFailure("integrate_generator: non-finite stage value");
        if (ratio <= 1.0) {
            s = (t - s - h <= 1e-15 * t) ? t : s + h;
            w = w_new;
            k1 = k7;
            if (std::abs(w) > limit) {
                throw InvalidSemiflow("integrate_generator: trajectory from z = " + std::to_string(z.real()) + "+" +
                                      std::to_string(z.imag()) + "i leaves the disk at s = " + std::to_string(s));
            }
        }
        const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(1.0, t)) throw IntegrationFailure("integrate_generator: step size underflow");
    }
    return w;
}

cplx flow_point(const Semiflow& s, double t, cplx z) { return s(t, z); }

cplx estimate_generator(const Semiflow& s, cplx z, double h) {
    if (!(h > 0.0)) throw InvalidInput("estimate_generator: h must be positive");
    const cplx d_full = (s(h, z) - z) / h;
    const cplx d_half = (s(0.5 * h, z) - z) / (0.5 * h);
    // the one-sided quotient has error c*h + O(h^2); eliminate the linear term
    return 2.0 * d_half - d_full;
}

AnalyticFn fitted_generator(const Semiflow& s, double h) {
    return AnalyticFn([s, h](cplx z) { return estimate_generator(s, z, h); });
}

FlowVerificationReport verify_semiflow(const Semiflow& s, const std::vector<double>& t_grid,
                                       const std::vector<cplx>& z_grid, double tol) {
    FlowVerificationReport rep;
    rep.tolerance = tol;
    const double inf = std::numeric_limits<double>::infinity();
    auto note = [&rep](const std::string& what) {
        if (rep.failures.size() < 8) rep.failures.push_back(what);
    };
    if (t_grid.empty() || z_grid.empty()) {
        note("empty verification grid");
        return rep;
    }

    for (cplx z : z_grid) {
        try {
            rep.identity_residual = std::max(rep.identity_residual, std::abs(s.raw(0.0, z) - z));
        } catch (const Error& e) {
            rep.identity_residual = inf;
            note(e.what());
        }
    }

    for (double t : t_grid) {
        for (double u : t_grid) {
            if (!s.defined_at(t) || !s.defined_at(u) || !s.defined_at(t + u)) continue;
            for (cplx z : z_grid) {
                try {
                    const cplx inner = s.raw(u, z);
                    const cplx lhs = s.raw(t + u, z);
                    const cplx rhs = s.raw(t, inner);
                    rep.semigroup_residual = std::max(rep.semigroup_residual, std::abs(lhs - rhs));
                    rep.self_map_excess = std::max({rep.self_map_excess, std::abs(inner) - 1.0, std::abs(lhs) - 1.0});
                } catch (const Error& e) {
                    rep.semigroup_residual = inf;
                    rep.self_map_excess = std::max(rep.self_map_excess, inf);
                    note(e.what());
                }
            }
        }
    }

    // continuity at 0: extrapolate phi_{t_k}(z) - z along t_k = 2^-k to t = 0
    if (s.defined_at(std::ldexp(1.0, -12)) && s.defined_at(0.5)) {
        rep.continuity_checked = true;
        for (cplx z : z_grid) {
            try {
                std::vector<double> ts;
                std::vector<cplx> ds;
                for (int k = 7; k <= 12; ++k) {
                    const double t = std::ldexp(1.0, -k);
                    ts.push_back(t);
                    ds.push_back(s.raw(t, z) - z);
                }
                rep.continuity_tail = std::max(rep.continuity_tail, std::abs(ds.back()));
                rep.continuity_residual =
                    std::max(rep.continuity_residual, std::abs(neville_extrapolate(ts, ds, 0.0)));
            } catch (const Error& e) {
                rep.continuity_residual = inf;
                note(e.what());
            }
        }
    }

    if (!(rep.identity_residual < tol)) note("phi_0 differs from the identity");
    if (!(rep.semigroup_residual < tol)) note("semigroup law violated");
    if (!(rep.self_map_excess < 0.0)) note("self-map property violated");
    if (!(rep.continuity_residual < tol)) note("phi_t(z) does not tend to z as t -> 0+");
    rep.pass = rep.identity_residual < tol && rep.semigroup_residual < tol && rep.self_map_excess < 0.0 &&
               rep.continuity_residual < tol;
    return rep;
}

std::vector<bool> fixed_points_check(const Semiflow& s, const std::vector<cplx>& candidates,
                                     const std::vector<double>& t_grid, double tol) {
    std::vector<bool> out;
    out.reserve(candidates.size());
    for (cplx z0 : candidates) {
        double worst = 0.0;
        try {
            for (double t : t_grid) worst = std::max(worst, std::abs(s.raw(t, z0) - z0));
        } catch (const Error&) {
            worst = std::numeric_limits<double>::infinity();
        }
        out.push_back(worst < tol);
    }
    return out;
}

std::vector<double> default_time_grid() {
    std::vector<double> ts(8);
    for (int i = 0; i < 8; ++i) ts[i] = 2.0 * i / 7.0;
    return ts;
}

std::vector<cplx> default_point_grid() {
    std::vector<cplx> zs;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < 50; ++i) {
        const double r = 0.1 + 0.85 * (i % 10) / 9.0;
        zs.push_back(std::polar(r, golden * i));
    }
    return zs;
}

namespace gallery {

Semiflow dilation() {
    return Semiflow::closed_form("dilation", [](double t, cplx z) { return std::exp(-t) * z; }, {cplx(0.0)})
        .with_derivative([](double t, cplx) { return cplx(std::exp(-t)); });
}

Semiflow rotation(double a) {
    std::ostringstream name;
    name << "rotation(" << a << ")";
    return Semiflow::closed_form(name.str(), [a](double t, cplx z) { return std::polar(1.0, a * t) * z; },
                                 {cplx(0.0)})
        .with_derivative([a](double t, cplx) { return std::polar(1.0, a * t); });
}

Semiflow attraction() {
    return Semiflow::closed_form("attraction", [](double t, cplx z) {
        const double e = std::exp(-t);
        // 1 - e^{-t} written with expm1 keeps small-t accuracy
        return e * z - std::expm1(-t);
    }).with_derivative([](double t, cplx) { return cplx(std::exp(-t)); });
}

Semiflow identity() {
    return Semiflow::closed_form("identity", [](double, cplx z) { return z; })
        .with_derivative([](double, cplx) { return cplx(1.0); });
}

Semiflow translation() {
    return Semiflow::closed_form("translation", [](double t, cplx z) { return z + t; });
}

AnalyticFn linear_generator(cplx c) {
    return AnalyticFn([c](cplx z) { return c * z; }).certify_boundary_continuity();
}

AnalyticFn attraction_generator() {
    return AnalyticFn([](cplx z) { return 1.0 - z; }).certify_boundary_continuity();
}

}  // namespace gallery

}  // namespace semiflow
