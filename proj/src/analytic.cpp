#include "semiflow/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiflow/error.hpp"

namespace semiflow {

namespace {

// slack for points that land on the domain circle up to rounding
constexpr double kDomainSlack = 1e-14;

void require_finite(cplx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw EvaluationError(std::string(what) + ": non-finite sample");
    }
}

}  // namespace

AnalyticFn::AnalyticFn() : AnalyticFn([](cplx) { return cplx(0.0); }) {}

AnalyticFn::AnalyticFn(Evaluator eval, double r_max)
    : eval_(std::make_shared<const Evaluator>(std::move(eval))), r_max_(r_max) {
    if (!(r_max > 0.0 && r_max <= 1.0)) throw InvalidInput("AnalyticFn: r_max must lie in (0, 1]");
}

cplx AnalyticFn::operator()(cplx z) const {
    if (std::abs(z) > r_max_ + kDomainSlack) {
        std::ostringstream msg;
        msg << "AnalyticFn: |z| = " << std::abs(z) << " exceeds the domain radius " << r_max_;
        throw InvalidInput(msg.str());
    }
    return (*eval_)(z);
}

cplx AnalyticFn::coefficient(std::size_t n) const {
    if (!coeff_) throw InvalidInput("AnalyticFn: no coefficient provider");
    return coeff_(n);
}

AnalyticFn AnalyticFn::with_coefficients(CoefficientProvider coeff) const {
    AnalyticFn copy = *this;
    copy.coeff_ = std::move(coeff);
    return copy;
}

AnalyticFn AnalyticFn::certify_boundary_continuity(bool on) const {
    AnalyticFn copy = *this;
    copy.boundary_continuous_ = on;
    return copy;
}

cplx eval(const AnalyticFn& f, cplx z) { return f(z); }

cplx derivative(const AnalyticFn& f, cplx z, double rho, int nodes) {
    if (!(rho > 0.0)) throw InvalidInput("derivative: rho must be positive");
    if (nodes < 4) throw InvalidInput("derivative: need at least 4 nodes");
    if (std::abs(z) + rho > f.r_max() + kDomainSlack) {
        throw InvalidInput("derivative: Cauchy circle leaves the domain");
    }
    const cplx d = cauchy_derivative([&f](cplx w) { return f.eval_unchecked(w); }, z, rho, nodes);
    require_finite(d, "derivative");
    return d;
}

std::vector<cplx> taylor(const AnalyticFn& f, std::size_t count, double r) {
    if (count < 1) throw InvalidInput("taylor: need at least one coefficient");
    if (!(r > 0.0 && r <= 1.0)) throw InvalidInput("taylor: radius must lie in (0, 1]");
    if (r > f.r_max() + kDomainSlack) throw InvalidInput("taylor: radius exceeds the domain of f");
    std::size_t m = 64;
    while (m < 4 * count) m *= 2;
    std::vector<cplx> samples(m);
    for (std::size_t k = 0; k < m; ++k) {
        samples[k] = f.eval_unchecked(std::polar(r, kTwoPi * static_cast<double>(k) / static_cast<double>(m)));
        require_finite(samples[k], "taylor");
    }
    std::vector<cplx> out(count);
    double rn = 1.0;
    for (std::size_t n = 0; n < count; ++n) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            // e^{-i n theta_k}; index reduction keeps the angle exact
            const std::size_t idx = (n * k) % m;
            acc += samples[k] * std::polar(1.0, -kTwoPi * static_cast<double>(idx) / static_cast<double>(m));
        }
        out[n] = acc / (static_cast<double>(m) * rn);
        rn *= r;
    }
    return out;
}

cplx ipow(cplx z, int n) {
    cplx result = 1.0;
    cplx base = z;
    unsigned e = static_cast<unsigned>(n < 0 ? -n : n);
    while (e) {
        if (e & 1u) result *= base;
        base *= base;
        e >>= 1u;
    }
    return n < 0 ? 1.0 / result : result;
}

cplx horner(std::span<const cplx> coeffs, cplx z) {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

AnalyticFn constant(cplx c) {
    return AnalyticFn([c](cplx) { return c; })
        .with_coefficients([c](std::size_t n) { return n == 0 ? c : cplx(0.0); })
        .certify_boundary_continuity();
}

AnalyticFn identity_fn() { return monomial(1); }

AnalyticFn monomial(int n) {
    if (n < 0) throw InvalidInput("monomial: negative degree");
    return AnalyticFn([n](cplx z) { return ipow(z, n); })
        .with_coefficients([n](std::size_t k) { return k == static_cast<std::size_t>(n) ? cplx(1.0) : cplx(0.0); })
        .certify_boundary_continuity();
}

AnalyticFn polynomial(std::vector<cplx> coeffs) {
    auto shared = std::make_shared<const std::vector<cplx>>(std::move(coeffs));
    return AnalyticFn([shared](cplx z) { return horner(*shared, z); })
        .with_coefficients([shared](std::size_t n) { return n < shared->size() ? (*shared)[n] : cplx(0.0); })
        .certify_boundary_continuity();
}

AnalyticFn geometric(cplx b) {
    if (!(std::abs(b) < 1.0)) throw InvalidInput("geometric: |b| must be < 1");
    return AnalyticFn([b](cplx z) { return 1.0 / (1.0 - b * z); })
        .with_coefficients([b](std::size_t n) { return ipow(b, static_cast<int>(n)); })
        .certify_boundary_continuity();
}

AnalyticFn exponential(cplx s) {
    return AnalyticFn([s](cplx z) { return std::exp(s * z); })
        .with_coefficients([s](std::size_t n) {
            return ipow(s, static_cast<int>(n)) / std::tgamma(static_cast<double>(n) + 1.0);
        })
        .certify_boundary_continuity();
}

AnalyticFn compose(const AnalyticFn& outer, const AnalyticFn& inner) {
    return AnalyticFn([outer, inner](cplx z) { return outer(inner.eval_unchecked(z)); }, inner.r_max());
}

AnalyticFn multiply(const AnalyticFn& a, const AnalyticFn& b) {
    AnalyticFn out([a, b](cplx z) { return a.eval_unchecked(z) * b.eval_unchecked(z); },
                   std::min(a.r_max(), b.r_max()));
    return out.certify_boundary_continuity(a.boundary_continuous() && b.boundary_continuous());
}

AnalyticFn add(const AnalyticFn& a, const AnalyticFn& b) {
    AnalyticFn out([a, b](cplx z) { return a.eval_unchecked(z) + b.eval_unchecked(z); },
                   std::min(a.r_max(), b.r_max()));
    if (a.has_coefficients() && b.has_coefficients()) {
        out = out.with_coefficients([a, b](std::size_t n) { return a.coefficient(n) + b.coefficient(n); });
    }
    return out.certify_boundary_continuity(a.boundary_continuous() && b.boundary_continuous());
}

AnalyticFn scale(const AnalyticFn& a, cplx c) {
    AnalyticFn out([a, c](cplx z) { return c * a.eval_unchecked(z); }, a.r_max());
    if (a.has_coefficients()) out = out.with_coefficients([a, c](std::size_t n) { return c * a.coefficient(n); });
    return out.certify_boundary_continuity(a.boundary_continuous());
}

AnalyticFn principal_power(const AnalyticFn& g, double gamma) {
    // branch safety: sample a polar grid up to the domain radius
    const double rmax = g.r_max();
    for (int i = 0; i <= 20; ++i) {
        const double r = rmax * (1.0 - 1e-9) * i / 20.0;
        for (int k = 0; k < 64; ++k) {
            const cplx v = g.eval_unchecked(std::polar(r, kTwoPi * k / 64.0));
            if (v.real() <= 0.0 && std::abs(v.imag()) <= 1e-14 * (1.0 + std::abs(v))) {
                throw InvalidInput("principal_power: base touches the negative real axis");
            }
        }
    }
    return AnalyticFn([g, gamma](cplx z) { return std::pow(g.eval_unchecked(z), gamma); }, rmax);
}

}  // namespace semiflow
