#include "semiflow/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semiflow/error.hpp"

namespace semiflow {

namespace {

bool matches_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

Cocycle Cocycle::closed_form(std::string name, Map map) {
    Cocycle c;
    c.kind_ = Kind::ClosedForm;
    c.name_ = std::move(name);
    c.map_ = std::make_shared<const Map>(std::move(map));
    return c;
}

Cocycle Cocycle::derivative(Semiflow flow, double rho) {
    if (!(rho > 0.0)) throw InvalidInput("derivative cocycle: rho must be positive");
    Cocycle c;
    c.kind_ = Kind::Derivative;
    c.name_ = "derivative";
    c.flow_ = std::move(flow);
    c.rho_ = rho;
    return c;
}

Cocycle make_coboundary(std::string name, AnalyticFn w, Semiflow s, std::vector<cplx> zero_candidates,
                        double fixed_point_tol) {
    const auto fixed = fixed_points_check(s, zero_candidates, default_time_grid(), fixed_point_tol);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (!fixed[i]) {
            std::ostringstream msg;
            msg << "coboundary '" << name << "': declared zero " << zero_candidates[i].real() << "+"
                << zero_candidates[i].imag() << "i is not a fixed point of '" << s.name() << "'";
            throw AdmissibilityError(msg.str());
        }
    }
    Cocycle c;
    c.kind_ = Cocycle::Kind::Coboundary;
    c.name_ = std::move(name);
    c.w_ = std::move(w);
    c.flow_ = std::move(s);
    c.zeros_ = std::move(zero_candidates);
    return c;
}

bool Cocycle::defined_at(double t) const {
    if (t < 0.0) return false;
    if (time_domain_.empty()) return true;
    return std::any_of(time_domain_.begin(), time_domain_.end(), [t](double d) { return matches_time(t, d); });
}

Cocycle Cocycle::with_time_domain(std::vector<double> times) const {
    Cocycle copy = *this;
    copy.time_domain_ = std::move(times);
    return copy;
}

cplx Cocycle::operator()(double t, cplx z) const {
    if (!(t >= 0.0)) throw InvalidInput("cocycle: t must be nonnegative");
    if (!(std::abs(z) < 1.0)) throw InvalidInput("cocycle: |z| must be < 1");
    if (!defined_at(t)) throw InvalidInput("cocycle '" + name_ + "' is not defined at t = " + std::to_string(t));
    if (t == 0.0) return 1.0;
    switch (kind_) {
        case Kind::ClosedForm:
            return (*map_)(t, z);
        case Kind::Coboundary: {
            for (cplx z0 : zeros_) {
                if (std::abs(z - z0) <= 1e-12) {
                    throw DivisionByZero("coboundary '" + name_ + "': evaluation at a declared zero of w");
                }
            }
            const cplx denom = w_->eval_unchecked(z);
            if (std::abs(denom) == 0.0) {
                std::ostringstream msg;
                msg << "coboundary '" << name_ << "': w vanishes at z = " << z.real() << "+" << z.imag()
                    << "i, which is not a declared zero";
                throw DivisionByZero(msg.str());
            }
            return (*w_)((*flow_)(t, z)) / denom;
        }
        case Kind::Derivative: {
            const Semiflow& s = *flow_;
            if (const auto* dmap = s.derivative_map(); dmap != nullptr && s.defined_at(t)) return (*dmap)(t, z);
            const double rho = std::min(rho_, 0.5 * (1.0 - std::abs(z)));
            const cplx d = cauchy_derivative([&s, t](cplx u) { return s.raw(t, u); }, z, rho);
            if (!std::isfinite(d.real()) || !std::isfinite(d.imag())) {
                throw EvaluationError("derivative cocycle: non-finite derivative");
            }
            return d;
        }
    }
    return 1.0;
}

AnalyticFn Cocycle::at(double t) const {
    Cocycle self = *this;
    return AnalyticFn([self, t](cplx z) { return self(t, z); });
}

cplx cocycle_eval(const Cocycle& m, double t, cplx z) { return m(t, z); }

CocycleVerificationReport verify_cocycle(const Cocycle& m, const Semiflow& s, const std::vector<double>& t_grid,
                                         const std::vector<cplx>& z_grid, double tol) {
    CocycleVerificationReport rep;
    rep.tolerance = tol;
    rep.admissible = m.admissible();
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
            rep.unit_residual = std::max(rep.unit_residual, std::abs(m(0.0, z) - 1.0));
        } catch (const Error& e) {
            rep.unit_residual = inf;
            note(e.what());
        }
    }
    for (double t : t_grid) {
        for (double u : t_grid) {
            if (!m.defined_at(t) || !m.defined_at(u) || !m.defined_at(t + u) || !s.defined_at(t)) continue;
            for (cplx z : z_grid) {
                try {
                    const cplx lhs = m(t + u, z);
                    const cplx rhs = m(t, z) * m(u, s(t, z));
                    rep.law_residual = std::max(rep.law_residual, std::abs(lhs - rhs));
                } catch (const Error& e) {
                    rep.law_residual = inf;
                    note(e.what());
                }
            }
        }
    }
    if (!(rep.law_residual < tol)) note("cocycle law violated");
    if (!(rep.unit_residual < tol)) note("m_0 differs from 1");
    rep.pass = rep.law_residual < tol && rep.unit_residual < tol && rep.admissible;
    return rep;
}

std::vector<double> default_sup_radii() { return {0.99, 0.999, 0.9999}; }

double sup_norm(const Cocycle& m, double t, const std::vector<double>& radii, int nodes) {
    if (nodes < 256) throw InvalidInput("sup_norm: need at least 256 angular nodes");
    double best = 0.0;
    for (double r : radii) {
        if (!(r > 0.0 && r < 1.0)) throw InvalidInput("sup_norm: radii must lie in (0, 1)");
        for (int k = 0; k < nodes; ++k) {
            const double v = std::abs(m(t, std::polar(r, kTwoPi * k / nodes)));
            if (std::isnan(v)) throw EvaluationError("sup_norm: NaN sample");
            best = std::max(best, v);
        }
    }
    return best;
}

std::string to_string(LimsupRegime r) {
    switch (r) {
        case LimsupRegime::AtMostOne:
            return "at-most-one";
        case LimsupRegime::Finite:
            return "finite";
        case LimsupRegime::Growing:
            return "growing";
    }
    return "unknown";
}

bool grows_steadily(const std::vector<double>& values, double factor) {
    if (values.size() < 2) return false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (std::isinf(values[i])) continue;
        if (!(values[i] > factor * values[i - 1])) return false;
    }
    return true;
}

std::vector<double> default_limsup_times() {
    std::vector<double> ts;
    for (int k = 1; k <= 10; ++k) ts.push_back(std::ldexp(1.0, -k));
    return ts;
}

LimsupProbe limsup_probe(const Cocycle& m, const std::vector<double>& t_seq, const std::vector<double>& radii,
                         int nodes, double tol) {
    if (t_seq.empty()) throw InvalidInput("limsup_probe: empty time sequence");
    if (radii.empty()) throw InvalidInput("limsup_probe: empty radius list");
    std::vector<double> sorted_radii = radii;
    std::sort(sorted_radii.begin(), sorted_radii.end());

    LimsupProbe probe;
    probe.times = t_seq;
    const std::size_t tail_start = t_seq.size() / 2;
    std::vector<double> tail_values;
    for (std::size_t i = 0; i < t_seq.size(); ++i) {
        std::vector<double> per_radius;
        for (double r : sorted_radii) {
            double v;
            try {
                v = sup_norm(m, t_seq[i], {r}, nodes);
            } catch (const EvaluationError&) {
                v = std::numeric_limits<double>::infinity();
            }
            per_radius.push_back(v);
        }
        const double top = per_radius.back();
        probe.values.push_back(top);
        if (i >= tail_start) {
            tail_values.push_back(top);
            probe.tail_max = std::max(probe.tail_max, top);
            if (std::isinf(top) || grows_steadily(per_radius)) probe.radial_growth = true;
        }
    }
    probe.time_growth = grows_steadily(tail_values);
    if (probe.radial_growth || probe.time_growth || !std::isfinite(probe.tail_max)) {
        probe.regime = LimsupRegime::Growing;
    } else if (probe.tail_max <= 1.0 + tol) {
        probe.regime = LimsupRegime::AtMostOne;
    } else {
        probe.regime = LimsupRegime::Finite;
    }
    return probe;
}

namespace gallery {

Cocycle exp_time(double c) {
    std::ostringstream name;
    name << "exp_time(" << c << ")";
    return Cocycle::closed_form(name.str(), [c](double t, cplx) { return cplx(std::exp(c * t)); });
}

Cocycle exp_cayley(double c) {
    std::ostringstream name;
    name << "exp_cayley(" << c << ")";
    return Cocycle::closed_form(name.str(),
                                [c](double t, cplx z) { return std::exp(c * t * (1.0 + z) / (1.0 - z)); });
}

AnalyticFn monomial_weight(int n) { return monomial(n); }

AnalyticFn one_minus_power(double gamma) {
    // 1 - z has positive real part on the disk, so the principal branch is safe
    return principal_power(AnalyticFn([](cplx z) { return 1.0 - z; }), gamma);
}

}  // namespace gallery

}  // namespace semiflow
