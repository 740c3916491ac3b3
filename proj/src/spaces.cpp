#include "semiflow/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "semiflow/error.hpp"

namespace semiflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool finite(double x) { return std::isfinite(x); }

std::string format_number(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidInput("cannot parse " + what + " from '" + s + "'");
    }
    if (used != s.size()) throw InvalidInput("cannot parse " + what + " from '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

void require_p(double p) {
    if (!(p >= 1.0) || !finite(p)) throw InvalidInput("exponent p must be >= 1");
}

// Least-squares slope of ys against xs.
double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
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

double integrate_disk(const DiskGrid& g, const std::function<double(cplx)>& F) {
    double acc = 0.0;
    const auto& pts = g.points();
    const auto& wts = g.weights();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (wts[k] == 0.0) continue;
        const double v = F(pts[k]);
        if (!finite(v)) {
            std::ostringstream msg;
            msg << "non-finite integrand at z = " << pts[k].real() << (pts[k].imag() < 0 ? "" : "+") << pts[k].imag()
                << "i";
            throw SingularIntegrand(msg.str());
        }
        acc += wts[k] * v;
    }
    return acc;
}

struct Refinement {
    double value = 0.0;
    double change = std::numeric_limits<double>::infinity();
};

}  // namespace

// ---------------------------------------------------------------- RadialWeight

RadialWeight RadialWeight::standard(double alpha) {
    if (!(alpha > -1.0) || !finite(alpha)) throw InvalidInput("standard weight requires alpha > -1");
    RadialWeight w;
    w.standard_ = true;
    w.alpha_ = alpha;
    w.name_ = format_number(alpha);
    const double c = std::log(alpha + 1.0);
    w.log_omega_ = std::make_shared<const LogProfile>([alpha, c](double r) {
        if (alpha == 0.0) return c;
        return c + alpha * std::log1p(-r * r);
    });
    return w;
}

RadialWeight RadialWeight::custom(std::string name, std::function<double(double)> omega) {
    return custom_log(std::move(name), [omega = std::move(omega)](double r) {
        const double v = omega(r);
        if (v < 0.0) throw InvalidInput("weight must be nonnegative");
        return v > 0.0 ? std::log(v) : kNegInf;
    });
}

RadialWeight RadialWeight::custom_log(std::string name, LogProfile log_omega) {
    RadialWeight w;
    w.standard_ = false;
    w.alpha_ = std::numeric_limits<double>::quiet_NaN();
    w.name_ = std::move(name);
    w.log_omega_ = std::make_shared<const LogProfile>(std::move(log_omega));
    return w;
}

RadialWeight RadialWeight::from_table(std::string name, std::vector<double> r, std::vector<double> omega) {
    if (r.size() != omega.size() || r.size() < 2) throw InvalidInput("weight table needs at least two (r, omega) rows");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] >= 0.0 && r[i] < 1.0)) throw InvalidInput("weight table radii must lie in [0, 1)");
        if (!(omega[i] >= 0.0) || !finite(omega[i])) throw InvalidInput("weight table values must be finite and >= 0");
        if (i > 0 && !(r[i] > r[i - 1])) throw InvalidInput("weight table radii must be increasing");
    }
    auto table = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(std::move(r), std::move(omega));
    return custom(std::move(name), [table](double x) {
        const auto& [rs, ws] = *table;
        if (x <= rs.front()) return ws.front();
        if (x >= rs.back()) return ws.back();
        const auto it = std::upper_bound(rs.begin(), rs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - rs.begin());
        const double s = (x - rs[j - 1]) / (rs[j] - rs[j - 1]);
        return (1.0 - s) * ws[j - 1] + s * ws[j];
    });
}

RadialWeight RadialWeight::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open weight table '" + path + "'");
    std::vector<double> r, w;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, ',');
        if (cols.size() != 2) throw InvalidInput("weight table '" + path + "': expected two columns in '" + line + "'");
        try {
            r.push_back(parse_number(cols[0], "radius"));
            w.push_back(parse_number(cols[1], "weight"));
        } catch (const InvalidInput&) {
            if (!first) throw;
        }
        first = false;
    }
    return from_table(path, std::move(r), std::move(w));
}

double RadialWeight::log_value(double r) const { return (*log_omega_)(r); }

double RadialWeight::operator()(double r) const { return std::exp(log_value(r)); }

Rule1D RadialWeight::radial_rule(int n) const {
    if (n < 1) throw InvalidInput("radial_rule: need at least one node");
    Rule1D out;
    if (standard_) {
        const Rule1D gj = gauss_jacobi(n, alpha_);
        out.nodes.resize(gj.nodes.size());
        out.weights.resize(gj.nodes.size());
        for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
            out.nodes[i] = std::sqrt(1.0 - gj.nodes[i]);
            out.weights[i] = (alpha_ + 1.0) * gj.weights[i];
        }
        return out;
    }
    const int per_panel = std::max(4, n / 6);
    out = graded_rule(0.0, 1.0, 30, per_panel);
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        const double lw = log_value(out.nodes[i]);
        out.weights[i] *= (lw == kNegInf ? 0.0 : std::exp(lw)) * 2.0 * out.nodes[i];
    }
    return out;
}

double RadialWeight::total_mass() const {
    const Rule1D rule = radial_rule(64);
    double m = 0.0;
    for (double w : rule.weights) m += w;
    if (!finite(m) || !(m > 0.0)) throw InvalidInput("weight '" + name_ + "' has no finite positive mass");
    return m;
}

// ---------------------------------------------------------------- SpaceSpec

SpaceSpec SpaceSpec::hardy(double p, QuadratureConfig cfg) {
    require_p(p);
    SpaceSpec s;
    s.kind_ = Kind::Hardy;
    s.p_ = p;
    s.cfg_ = std::move(cfg);
    return s;
}

SpaceSpec SpaceSpec::bergman(double p, RadialWeight w, QuadratureConfig cfg) {
    require_p(p);
    w.total_mass();
    SpaceSpec s;
    s.kind_ = Kind::Bergman;
    s.p_ = p;
    s.weight_ = std::move(w);
    s.cfg_ = std::move(cfg);
    return s;
}

double SpaceSpec::conjugate() const {
    if (!(p_ > 1.0)) throw Unsupported("conjugate exponent is not defined for p = 1");
    return p_ / (p_ - 1.0);
}

const RadialWeight& SpaceSpec::weight() const {
    if (!weight_) throw InvalidInput("Hardy spaces carry no area weight");
    return *weight_;
}

std::string SpaceSpec::name() const {
    if (kind_ == Kind::Hardy) return "hardy:" + format_number(p_);
    if (weight_->is_standard()) return "bergman:" + format_number(p_) + ":" + weight_->name();
    return "bergman:" + format_number(p_) + ":custom:" + weight_->name();
}

SpaceSpec parse_space(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "hardy") return SpaceSpec::hardy(parse_number(parts[1], "p"));
    if (parts.size() == 3 && parts[0] == "bergman") {
        return SpaceSpec::bergman(parse_number(parts[1], "p"), RadialWeight::standard(parse_number(parts[2], "alpha")));
    }
    if (parts.size() >= 4 && parts[0] == "bergman" && parts[2] == "custom") {
        // the path may itself contain ':'
        std::string path = parts[3];
        for (std::size_t i = 4; i < parts.size(); ++i) path += ":" + parts[i];
        return SpaceSpec::bergman(parse_number(parts[1], "p"), RadialWeight::from_csv(path));
    }
    throw InvalidInput("unrecognized space '" + text + "' (expected hardy:p, bergman:p:alpha or bergman:p:custom:file)");
}

// ---------------------------------------------------------------- Hardy

double circle_mean(const AnalyticFn& f, double p, double r, int nodes) {
    const CircleGrid grid(r, nodes);
    double acc = 0.0;
    for (const cplx& z : grid.points()) {
        const double v = std::abs(f(z));
        if (!finite(v)) throw EvaluationError("non-finite sample on the circle r = " + format_number(r));
        acc += p == 2.0 ? v * v : std::pow(v, p);
    }
    return std::pow(acc * grid.weight(), 1.0 / p);
}

double hardy_norm(const AnalyticFn& f, double p, const QuadratureConfig& cfg) {
    require_p(p);
    if (f.boundary_continuous()) return circle_mean(f, p, 1.0, cfg.circle_nodes);
    if (cfg.eps.empty()) throw InvalidInput("hardy_norm: empty epsilon ladder");
    std::vector<double> vals;
    vals.reserve(cfg.eps.size());
    for (double e : cfg.eps) vals.push_back(circle_mean(f, p, 1.0 - e, cfg.circle_nodes));
    const double v = neville_extrapolate(cfg.eps, vals, 0.0);
    if (!finite(v)) throw EvaluationError("hardy_norm: extrapolation produced a non-finite value");
    return v;
}

// ---------------------------------------------------------------- Bergman

DiskGrid focused_grid(const RadialWeight& w, cplx b, int radial_nodes, int angular_nodes) {
    const DiskGrid base = DiskGrid::polar(w.radial_rule(radial_nodes), angular_nodes, kPi / angular_nodes);
    if (b == 0.0) return base;
    const double nb = 1.0 - std::norm(b);
    std::vector<cplx> pts(base.size());
    std::vector<double> wts(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        const cplx v = base.points()[k];
        const cplx den = 1.0 + std::conj(b) * v;
        const cplx z = (v + b) / den;
        // 1 - |z|^2 = K (1 - |v|^2) with K = |tau'(v)|
        const double K = nb / std::norm(den);
        double factor = 0.0;
        if (w.is_standard()) {
            factor = std::pow(K, w.alpha() + 2.0);
        } else {
            const double lv = w.log_value(std::abs(v));
            const double lz = w.log_value(std::min(std::abs(z), 1.0));
            factor = lv == kNegInf ? 0.0 : K * K * std::exp(lz - lv);
        }
        pts[k] = z;
        wts[k] = base.weights()[k] * factor;
    }
    return DiskGrid(std::move(pts), std::move(wts));
}

cplx locate_focus(const std::function<double(cplx)>& F, double alpha, const std::vector<cplx>& hints) {
    const double expo = 2.0 + alpha;
    // points the integrand rejects (e.g. declared zeros of a coboundary) score lowest
    auto score = [&](cplx z) {
        double v = -1.0;
        try {
            v = F(z) * std::pow((1.0 - std::abs(z)) * (1.0 + std::abs(z)), expo);
        } catch (const Error&) {
            return -1.0;
        }
        return finite(v) ? v : -1.0;
    };
    std::vector<double> radii = {0.1, 0.25, 0.5, 0.75};
    for (int k = 2; k <= 14; ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
    const int angles = 128;
    cplx best = 0.0;
    double best_score = -1.0;
    for (double r : radii) {
        for (int j = 0; j < angles; ++j) {
            const cplx z = std::polar(r, kTwoPi * j / angles);
            const double s = score(z);
            if (s > best_score) {
                best_score = s;
                best = z;
            }
        }
    }
    for (const cplx& h : hints) {
        if (!(std::abs(h) < 1.0)) continue;
        const double s = score(h);
        if (s > best_score) {
            best_score = s;
            best = h;
        }
    }
    // pattern search in (log(1 - r), theta)
    double lr = std::log(1.0 - std::abs(best));
    double th = std::arg(best);
    double step_r = 0.5;
    double step_t = kTwoPi / angles;
    for (int it = 0; it < 80 && (step_r > 1e-6 || step_t > 1e-9); ++it) {
        bool moved = false;
        const double scale = std::max(1e-12, std::exp(lr));
        const double dr[4] = {step_r, -step_r, 0.0, 0.0};
        const double dt[4] = {0.0, 0.0, step_t * std::min(1.0, 4.0 * scale), -step_t * std::min(1.0, 4.0 * scale)};
        for (int d = 0; d < 4; ++d) {
            const double nlr = std::min(lr + dr[d], -1e-12);
            const cplx z = std::polar(1.0 - std::exp(nlr), th + dt[d]);
            const double s = score(z);
            if (s > best_score) {
                best_score = s;
                lr = nlr;
                th += dt[d];
                moved = true;
                break;
            }
        }
        if (!moved) {
            step_r *= 0.5;
            step_t *= 0.5;
        }
    }
    best = std::polar(1.0 - std::exp(lr), th);
    return std::abs(best) < 0.25 ? cplx(0.0) : best;
}

double weighted_area_integral(const std::function<double(cplx)>& F, const RadialWeight& w,
                              const QuadratureConfig& cfg) {
    const int levels = std::max(2, cfg.max_levels);
    auto converged = [&](const Refinement& r) { return r.change <= cfg.rtol * std::abs(r.value); };
    // levels [from, to) of the grid focused at b
    auto refine = [&](cplx b, Refinement r, int from, int to) {
        for (int l = from; l < to && !converged(r); ++l) {
            const double v = integrate_disk(focused_grid(w, b, cfg.radial_nodes << l, cfg.angular_nodes << l), F);
            r.change = l == 0 ? std::numeric_limits<double>::infinity() : std::abs(v - r.value);
            r.value = v;
        }
        return r;
    };

    if (cfg.focus) return refine(*cfg.focus, {}, 0, levels).value;
    // Both the plain grid and the focused grid are tried on two levels; the
    // better converged one is refined further.
    Refinement centred = refine(0.0, {}, 0, 2);
    if (converged(centred)) return centred.value;
    const cplx b = locate_focus(F, w.is_standard() ? w.alpha() : effective_alpha(w), cfg.hints);
    if (b == 0.0) return refine(0.0, centred, 2, levels).value;
    Refinement focused = refine(b, {}, 0, 2);
    if (focused.change <= centred.change) {
        focused = refine(b, focused, 2, levels);
        return focused.value;
    }
    return refine(0.0, centred, 2, levels).value;
}

double bergman_norm(const AnalyticFn& f, double p, const RadialWeight& w, const QuadratureConfig& cfg) {
    require_p(p);
    auto F = [&f, p](cplx z) {
        const double v = std::abs(f(z));
        return p == 2.0 ? v * v : std::pow(v, p);
    };
    double I = 0.0;
    try {
        I = weighted_area_integral(F, w, cfg);
    } catch (const SingularIntegrand& e) {
        throw EvaluationError(std::string("bergman_norm: ") + e.what());
    }
    return std::pow(I, 1.0 / p);
}

double norm(const AnalyticFn& f, const SpaceSpec& space) {
    if (space.kind() == SpaceSpec::Kind::Hardy) return hardy_norm(f, space.p(), space.config());
    return bergman_norm(f, space.p(), space.weight(), space.config());
}

// ---------------------------------------------------------------- regularity

std::vector<double> default_regularity_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 14; ++k) g.push_back(1.0 - std::ldexp(1.0, -k));
    return g;
}

RegularityReport is_regular(const RadialWeight& w, const std::vector<double>& r_grid, double constant) {
    if (r_grid.size() < 4) throw InvalidInput("is_regular: need at least four radii");
    if (!(constant > 1.0)) throw InvalidInput("is_regular: constant must exceed 1");
    RegularityReport rep;
    rep.r_grid = r_grid;
    rep.constant = constant;
    for (double r : r_grid) {
        if (!(r >= 0.0 && r < 1.0)) throw InvalidInput("is_regular: radii must lie in [0, 1)");
        const double lr = w.log_value(r);
        if (lr == kNegInf) throw InvalidInput("is_regular: omega vanishes at r = " + format_number(r));
        // int_r^1 omega(s) ds / (omega(r)(1 - r)) with s = r + (1 - r) x
        auto g = [&](double x) {
            const double ls = w.log_value(r + (1.0 - r) * x);
            return ls == kNegInf ? 0.0 : std::exp(ls - lr);
        };
        const double head = integrate_graded([&](double y) { return g(0.5 - y); }, 0.0, 0.5, 40, 16);
        const double tail = integrate_graded(g, 0.5, 1.0, 40, 16);
        rep.ratios.push_back(head + tail);
    }
    rep.min_ratio = *std::min_element(rep.ratios.begin(), rep.ratios.end());
    rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    std::vector<double> xs, ys;
    for (std::size_t i = r_grid.size() - 4; i < r_grid.size(); ++i) {
        xs.push_back(-std::log(1.0 - r_grid[i]));
        ys.push_back(std::log(std::max(rep.ratios[i], 1e-300)));
    }
    rep.tail_slope = slope(xs, ys);
    rep.regular = rep.min_ratio > 1.0 / constant && rep.max_ratio < constant && std::abs(rep.tail_slope) <= 0.25;
    return rep;
}

// ---------------------------------------------------------------- Carleson squares and test functions

double carleson_measure(const RadialWeight& w, cplx a) {
    const double r = std::abs(a);
    if (!(r > 0.0 && r < 1.0)) throw InvalidInput("carleson_measure: need 0 < |a| < 1");
    const double width = 1.0 - r;
    if (w.is_standard()) {
        // (alpha + 1) int_r^1 (1 - s^2)^alpha s ds = (1 - r^2)^{alpha + 1} / 2
        return width / kPi * std::pow(width * (1.0 + r), w.alpha() + 1.0) / 2.0;
    }
    const double radial = integrate_graded(
        [&](double s) {
            const double l = w.log_value(s);
            return l == kNegInf ? 0.0 : std::exp(l) * s;
        },
        r, 1.0, 40, 16);
    return width / kPi * radial;
}

double default_gamma(double p, double alpha) { return p * (alpha + 2.0) + 1.0; }

double effective_alpha(const RadialWeight& w) {
    if (w.is_standard()) return w.alpha();
    const auto rep = is_regular(w);
    const double ratio = rep.ratios.back();
    return std::max(-0.9, 1.0 / ratio - 1.0);
}

AnalyticFn test_function(cplx a, double p, double gamma, const RadialWeight& w) {
    require_p(p);
    if (!(gamma > 0.0)) throw InvalidInput("test_function: gamma must be positive");
    const double mu = carleson_measure(w, a);
    const double s = (gamma + 1.0) / p;
    const double c = std::pow(1.0 - std::abs(a), s) / std::pow(mu, 1.0 / p);
    const cplx ab = std::conj(a);
    return AnalyticFn([c, s, ab](cplx z) { return c * std::exp(-s * std::log(1.0 - ab * z)); })
        .certify_boundary_continuity();
}

double test_function_power(cplx a, double p, double gamma, double carleson, cplx z) {
    const double d = std::abs(1.0 - std::conj(a) * z);
    const double ratio = (1.0 - std::abs(a)) / d;
    (void)p;
    return std::pow(ratio, gamma + 1.0) / carleson;
}

// ---------------------------------------------------------------- pairing and growth

cplx pairing(const AnalyticFn& f, const AnalyticFn& g, const SpaceSpec& space) {
    if (!(space.p() > 1.0)) throw Unsupported("pairing: the dual of p = 1 is not implemented");
    const auto& cfg = space.config();
    if (space.kind() == SpaceSpec::Kind::Hardy) {
        auto on_circle = [&](double r) {
            const CircleGrid grid(r, cfg.circle_nodes);
            cplx acc = 0.0;
            for (const cplx& z : grid.points()) acc += f(z) * std::conj(g(z));
            return acc * grid.weight();
        };
        if (f.boundary_continuous() && g.boundary_continuous()) return on_circle(1.0);
        std::vector<cplx> vals;
        for (double e : cfg.eps) vals.push_back(on_circle(1.0 - e));
        return neville_extrapolate(cfg.eps, vals, 0.0);
    }
    const DiskGrid grid = DiskGrid::polar(space.weight().radial_rule(cfg.radial_nodes), cfg.angular_nodes);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx z = grid.points()[k];
        acc += grid.weights()[k] * f(z) * std::conj(g(z));
    }
    return acc;
}

std::vector<cplx> growth_grid() {
    std::vector<double> radii;
    for (int i = 0; i <= 9; ++i) radii.push_back(0.1 * i);
    for (int k = 4; k <= 12; ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
    std::vector<cplx> pts;
    for (double r : radii) {
        if (r == 0.0) {
            pts.push_back(0.0);
            continue;
        }
        for (int j = 0; j < 64; ++j) pts.push_back(std::polar(r, kTwoPi * (j + 0.5) / 64.0));
    }
    return pts;
}

GrowthCheck growth_bound_check(const AnalyticFn& f, double p, double alpha, const std::vector<cplx>& grid) {
    GrowthCheck out;
    out.norm = bergman_norm(f, p, RadialWeight::standard(alpha));
    if (!(out.norm > 0.0)) throw InvalidInput("growth_bound_check: zero norm makes the ratio undefined");
    const double expo = (2.0 + alpha) / p;
    for (const cplx& z : grid) {
        const double r = std::abs(z);
        const double v = std::pow((1.0 - r) * (1.0 + r), expo) * std::abs(f(z)) / out.norm;
        if (v > out.max_ratio) {
            out.max_ratio = v;
            out.witness = z;
        }
    }
    return out;
}

std::vector<double> boundary_max_profile(const AnalyticFn& f, const std::vector<double>& eps, int nodes) {
    std::vector<double> out;
    for (double e : eps) {
        const CircleGrid grid(1.0 - e, nodes);
        double m = 0.0;
        for (const cplx& z : grid.points()) {
            const double v = std::abs(f.eval_unchecked(z));
            if (!finite(v)) {
                m = std::numeric_limits<double>::infinity();
                break;
            }
            m = std::max(m, v);
        }
        out.push_back(m);
    }
    return out;
}

}  // namespace semiflow
