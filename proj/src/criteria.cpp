#include "semiflow/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "semiflow/error.hpp"
#include "semiflow/parallel.hpp"

namespace semiflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int pow2_at_least(double n) {
    int m = 1;
    while (m < n && m < (1 << 24)) m <<= 1;
    return m;
}

double log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

std::string describe_point(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

void check_scan(const SupScanConfig& scan) {
    if (scan.radii.empty() || scan.angles < 1) throw InvalidInput("sup scan: empty a-grid");
    for (double r : scan.radii) {
        if (!(r > 0.0 && r < 1.0)) throw InvalidInput("sup scan: a-grid radii must lie in (0, 1)");
    }
    if (scan.eps.empty()) throw InvalidInput("sup scan: empty eps ladder");
    if (!(scan.contraction > 0.0 && scan.contraction < 1.0)) throw InvalidInput("sup scan: contraction must lie in (0, 1)");
}

struct ScanResult {
    double value = -kInf;
    cplx witness = 0.0;
    std::vector<double> corrections;
    std::vector<double> radial_profile;
    double a_slope = 0.0;
    std::vector<cplx> grid;
    std::vector<double> grid_values;
};

// Grid maximum followed by local pattern refinement in (log(1 - |a|), arg a).
ScanResult scan_sup(const std::function<double(cplx)>& value, const SupScanConfig& scan) {
    std::vector<double> radii = scan.radii;
    std::sort(radii.begin(), radii.end());
    const double r_lo = radii.front();
    const double r_hi = radii.back();

    std::vector<cplx> grid;
    for (double r : radii)
        for (int j = 0; j < scan.angles; ++j) grid.push_back(std::polar(r, kTwoPi * j / scan.angles));
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { vals[i] = value(grid[i]); });

    ScanResult res;
    res.grid = grid;
    res.grid_values = vals;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (vals[i] > res.value) {
            res.value = vals[i];
            res.witness = grid[i];
        }
    }

    const double s_lo = std::log(1.0 - r_hi);
    const double s_hi = std::log(1.0 - r_lo);
    double s = std::log(1.0 - std::abs(res.witness));
    double th = std::arg(res.witness);
    double step_s = 0.5 * std::log(2.0);
    double step_t = kPi / scan.angles;
    for (int round = 0; round < scan.refine_rounds; ++round) {
        std::vector<std::pair<double, double>> cand;
        for (int ds = -1; ds <= 1; ++ds)
            for (int dt = -1; dt <= 1; ++dt) {
                if (ds == 0 && dt == 0) continue;
                const double ns = std::clamp(s + ds * step_s, s_lo, s_hi);
                cand.emplace_back(ns, th + dt * step_t);
            }
        std::vector<double> cv(cand.size());
        parallel_for(cand.size(), [&](std::size_t i) { cv[i] = value(std::polar(1.0 - std::exp(cand[i].first), cand[i].second)); });
        const double before = res.value;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (cv[i] > res.value) {
                res.value = cv[i];
                s = cand[i].first;
                th = cand[i].second;
            }
        }
        res.witness = std::polar(1.0 - std::exp(s), th);
        res.corrections.push_back(before > 0.0 ? (res.value - before) / before : 0.0);
        step_s *= scan.contraction;
        step_t *= scan.contraction;
    }

    const std::size_t k0 = radii.size() >= 3 ? radii.size() - 3 : 0;
    std::vector<double> xs, ys;
    for (std::size_t k = k0; k < radii.size(); ++k) {
        const double v = value(std::polar(radii[k], th));
        res.radial_profile.push_back(v);
        xs.push_back(-std::log(1.0 - radii[k]));
        ys.push_back(std::log(std::max(v, 1e-300)));
    }
    res.a_slope = xs.size() >= 2 ? log_slope(xs, ys) : 0.0;
    return res;
}

}  // namespace

SupScanConfig::SupScanConfig() {
    radii = {0.05, 0.25};
    for (int k = 1; k <= 10; ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
    disk.radial_nodes = 32;
    disk.angular_nodes = 64;
    disk.rtol = 1e-6;
    disk.max_levels = 4;
}

// ---------------------------------------------------------------- Hardy

CriterionValue hardy_criterion(const Semiflow& sf, const Cocycle& cc, double p, double t, const SupScanConfig& scan) {
    if (!(p > 1.0)) throw InvalidInput("hardy_criterion: p must exceed 1");
    if (!(t >= 0.0)) throw InvalidInput("hardy_criterion: t must be nonnegative");
    check_scan(scan);
    const double r_top = *std::max_element(scan.radii.begin(), scan.radii.end());
    const int m_max = pow2_at_least(std::max<double>(scan.min_circle_nodes, scan.circle_scale / (1.0 - r_top)));
    const std::size_t ne = scan.eps.size();
    std::vector<double> eps(ne);
    for (std::size_t e = 0; e < ne; ++e) eps[e] = scan.eps[e] * (1.0 - r_top);

    // |m_t|^p and phi_t on every circle, shared by all a
    std::vector<std::vector<double>> mp(ne, std::vector<double>(static_cast<std::size_t>(m_max)));
    std::vector<std::vector<cplx>> ph(ne, std::vector<cplx>(static_cast<std::size_t>(m_max)));
    for (std::size_t e = 0; e < ne; ++e) {
        const double r = 1.0 - eps[e];
        parallel_for(static_cast<std::size_t>(m_max), [&](std::size_t k) {
            const cplx z = std::polar(r, kTwoPi * static_cast<double>(k) / m_max);
            const double m = std::abs(cc(t, z));
            const cplx w = sf(t, z);
            const double v = p == 2.0 ? m * m : std::pow(m, p);
            if (!std::isfinite(v) || !std::isfinite(w.real()) || !std::isfinite(w.imag())) {
                throw SingularIntegrand("hardy_criterion: non-finite integrand at z = " + describe_point(z));
            }
            mp[e][k] = v;
            ph[e][k] = w;
        });
    }

    auto per_eps = [&](cplx a) {
        const double ra = std::abs(a);
        const int ma = std::min(m_max, pow2_at_least(std::max<double>(scan.min_circle_nodes, scan.circle_scale / (1.0 - ra))));
        const std::size_t stride = static_cast<std::size_t>(m_max / ma);
        const cplx ab = std::conj(a);
        const double pk = (1.0 - ra) * (1.0 + ra);
        std::vector<double> out(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            double acc = 0.0;
            for (std::size_t k = 0; k < static_cast<std::size_t>(m_max); k += stride) acc += mp[e][k] / std::norm(1.0 - ab * ph[e][k]);
            out[e] = pk * acc / ma;
        }
        return out;
    };
    auto value = [&](cplx a) {
        const auto v = per_eps(a);
        const double x = ne == 1 ? v[0] : neville_extrapolate(eps, v, 0.0);
        if (!std::isfinite(x)) throw SingularIntegrand("hardy_criterion: non-finite value at a = " + describe_point(a));
        return x;
    };

    const ScanResult sr = scan_sup(value, scan);
    CriterionValue out;
    out.t = t;
    out.value = sr.value;
    out.witness = sr.witness;
    out.eps_values = per_eps(sr.witness);
    out.radial_profile = sr.radial_profile;
    out.a_slope = sr.a_slope;
    out.corrections = sr.corrections;
    out.grid_points = sr.grid;
    out.grid_values = sr.grid_values;
    return out;
}

// ---------------------------------------------------------------- Bergman

CriterionValue bergman_criterion(const Semiflow& sf, const Cocycle& cc, double p, const RadialWeight& w, double gamma,
                                 double t, const SupScanConfig& scan) {
    if (!(p > 1.0)) throw InvalidInput("bergman_criterion: p must exceed 1");
    if (!(t >= 0.0)) throw InvalidInput("bergman_criterion: t must be nonnegative");
    check_scan(scan);
    if (!is_regular(w).regular) throw PreconditionError("bergman_criterion: weight '" + w.name() + "' is not regular");
    const double g0 = default_gamma(p, effective_alpha(w));
    if (gamma < g0 - 1e-12) {
        std::ostringstream msg;
        msg << "bergman_criterion: gamma = " << gamma << " is below the default " << g0;
        throw PreconditionError(msg.str());
    }

    auto value = [&](cplx a) {
        const double mu = carleson_measure(w, a);
        auto F = [&](cplx z) {
            const double m = std::abs(cc(t, z));
            const double mpow = p == 2.0 ? m * m : std::pow(m, p);
            return test_function_power(a, p, gamma, mu, sf(t, z)) * mpow;
        };
        QuadratureConfig cfg = scan.disk;
        cfg.hints.push_back(a);
        const double v = weighted_area_integral(F, w, cfg);
        if (!std::isfinite(v)) throw SingularIntegrand("bergman_criterion: non-finite value at a = " + describe_point(a));
        return v;
    };

    const ScanResult sr = scan_sup(value, scan);
    CriterionValue out;
    out.t = t;
    out.value = sr.value;
    out.witness = sr.witness;
    out.radial_profile = sr.radial_profile;
    out.a_slope = sr.a_slope;
    out.corrections = sr.corrections;
    out.grid_points = sr.grid;
    out.grid_values = sr.grid_values;
    return out;
}

// ---------------------------------------------------------------- verdicts

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "BOUNDED";
        case Verdict::UnboundedTrend: return "UNBOUNDED-TREND";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

std::vector<double> default_verdict_times() {
    std::vector<double> t;
    for (int i = 0; i <= 9; ++i) t.push_back(0.1 * i);
    t.push_back(0.95);
    t.push_back(0.99);
    return t;
}

CriterionReport uniform_bound_verdict(const Semiflow& sf, const Cocycle& cc, const SpaceSpec& space,
                                      const std::vector<double>& t_grid, const SupScanConfig& scan) {
    if (!(space.p() > 1.0)) {
        throw PreconditionError("uniform_bound_verdict: the criteria need p > 1; use the decay probe for p = 1");
    }
    if (t_grid.size() < 8) throw PreconditionError("uniform_bound_verdict: the t-grid needs at least 8 points");
    for (double t : t_grid) {
        if (!(t >= 0.0 && t < 1.0)) throw PreconditionError("uniform_bound_verdict: t-grid must lie in [0, 1)");
    }
    check_scan(scan);

    CriterionReport rep;
    rep.space = space.name();
    rep.flow = sf.name();
    rep.cocycle = cc.name();
    rep.p = space.p();
    rep.config = scan;
    const bool hardy = space.kind() == SpaceSpec::Kind::Hardy;
    if (!hardy) {
        const RadialWeight& w = space.weight();
        if (!is_regular(w).regular) {
            throw PreconditionError("uniform_bound_verdict: weight '" + w.name() + "' is not regular");
        }
        rep.gamma = default_gamma(space.p(), effective_alpha(w));
    }

    for (double t : t_grid) {
        CriterionValue cv;
        try {
            cv = hardy ? hardy_criterion(sf, cc, space.p(), t, scan)
                       : bergman_criterion(sf, cc, space.p(), space.weight(), rep.gamma, t, scan);
        } catch (const Error& e) {
            cv = CriterionValue{};
            cv.t = t;
            cv.value = kInf;
            cv.singular = true;
            cv.note = e.what();
        }
        rep.values.push_back(std::move(cv));
    }

    bool unbounded = false;
    bool withheld = false;
    rep.sup = 0.0;
    for (const auto& cv : rep.values) {
        rep.sup = std::max(rep.sup, cv.value);
        std::ostringstream tag;
        tag << "t = " << cv.t << ": ";
        if (cv.singular) {
            unbounded = true;
            rep.reasons.push_back(tag.str() + "singular integrand (" + cv.note + ")");
            continue;
        }
        if (!(cv.value <= scan.threshold)) {
            unbounded = true;
            rep.reasons.push_back(tag.str() + "value above threshold");
        }
        if (cv.eps_values.size() >= 2 && grows_steadily(cv.eps_values, scan.eps_growth)) {
            unbounded = true;
            rep.reasons.push_back(tag.str() + "value grows along the eps ladder");
        }
        if (cv.a_slope > scan.a_slope_limit) {
            unbounded = true;
            rep.reasons.push_back(tag.str() + "value grows as |a| -> 1");
        }
        if (!cv.corrections.empty() && cv.corrections.back() > 1e-2) {
            withheld = true;
            rep.reasons.push_back(tag.str() + "refinement has not settled");
        }
    }

    std::vector<double> tt, lv;
    for (std::size_t i = rep.values.size() >= 3 ? rep.values.size() - 3 : 0; i < rep.values.size(); ++i) {
        tt.push_back(-std::log(1.0 - rep.values[i].t));
        lv.push_back(std::log(std::max(rep.values[i].value, 1e-300)));
    }
    rep.trend = log_slope(tt, lv);
    if (!std::isfinite(rep.trend)) rep.trend = kInf;
    if (!unbounded && rep.trend > scan.t_slope_limit) {
        withheld = true;
        rep.reasons.push_back("values increase toward t = 1");
    }

    if (unbounded) {
        rep.verdict = Verdict::UnboundedTrend;
    } else if (withheld) {
        rep.verdict = Verdict::Inconclusive;
    } else {
        rep.verdict = Verdict::Bounded;
    }
    return rep;
}

// ---------------------------------------------------------------- sufficiency and decay

std::string to_string(Sufficiency s) {
    switch (s) {
        case Sufficiency::LimsupAtMostOne: return "LIMSUP-LE-1";
        case Sufficiency::LimsupFinite: return "LIMSUP-FINITE";
        case Sufficiency::None: return "NONE";
    }
    return "NONE";
}

SufficiencyResult sufficiency_probe(const Cocycle& cc, const std::vector<double>& t_seq, double tol) {
    for (std::size_t i = 1; i < t_seq.size(); ++i) {
        if (!(t_seq[i] < t_seq[i - 1])) throw InvalidInput("sufficiency_probe: times must decrease");
    }
    if (t_seq.empty() || !(t_seq.back() > 0.0)) throw InvalidInput("sufficiency_probe: need positive decreasing times");
    SufficiencyResult out;
    try {
        out.probe = limsup_probe(cc, t_seq, default_sup_radii(), 512, tol);
    } catch (const Error&) {
        out.tag = Sufficiency::None;
        return out;
    }
    switch (out.probe.regime) {
        case LimsupRegime::AtMostOne: out.tag = Sufficiency::LimsupAtMostOne; break;
        case LimsupRegime::Finite: out.tag = Sufficiency::LimsupFinite; break;
        case LimsupRegime::Growing: out.tag = Sufficiency::None; break;
    }
    return out;
}

DecayTable direct_decay_probe(const Semiflow& sf, const Cocycle& cc, const SpaceSpec& space,
                              const std::vector<AnalyticFn>& family, const std::vector<double>& t_seq, double tol) {
    if (family.empty()) throw InvalidInput("direct_decay_probe: empty function family");
    if (t_seq.empty()) throw InvalidInput("direct_decay_probe: empty time sequence");
    for (std::size_t i = 1; i < t_seq.size(); ++i) {
        if (!(t_seq[i] < t_seq[i - 1])) throw InvalidInput("direct_decay_probe: times must decrease");
    }
    DecayTable table;
    table.t_values = t_seq;
    table.tol = tol;
    table.rows.assign(family.size(), std::vector<double>(t_seq.size(), 0.0));
    parallel_for(family.size() * t_seq.size(), [&](std::size_t idx) {
        const std::size_t i = idx / t_seq.size();
        const std::size_t k = idx % t_seq.size();
        const double t = t_seq[k];
        const AnalyticFn& f = family[i];
        const AnalyticFn diff([&sf, &cc, f, t](cplx z) { return cc(t, z) * f(sf(t, z)) - f(z); });
        double v = kInf;
        try {
            v = norm(diff, space);
        } catch (const Error&) {
            v = kInf;
        }
        table.rows[i][k] = std::isfinite(v) ? v : kInf;
    });
    table.decays = true;
    for (const auto& row : table.rows) {
        if (!(row.back() < tol)) table.decays = false;
    }
    return table;
}

std::vector<AnalyticFn> decay_family(const SpaceSpec& space, int count, std::uint64_t seed, double target_norm) {
    if (count < 1) throw InvalidInput("decay_family: count must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<int> degree(0, 3);
    std::vector<AnalyticFn> out;
    for (int i = 0; i < count; ++i) {
        std::vector<cplx> c(static_cast<std::size_t>(degree(rng)) + 1);
        for (auto& x : c) x = cplx(nd(rng), nd(rng));
        const AnalyticFn f = polynomial(c);
        const double n = norm(f, space);
        for (auto& x : c) x *= target_norm / n;
        out.push_back(polynomial(std::move(c)));
    }
    return out;
}

}  // namespace semiflow
