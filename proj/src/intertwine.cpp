#include "semiflow/intertwine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "semiflow/error.hpp"
#include "semiflow/parallel.hpp"

namespace semiflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSelfMapMargin = 1e-9;
constexpr double kContinuityTol = 1e-6;
constexpr std::size_t kSurrogateN = 32;
const std::vector<int> kPowers = {1, 2, 5, 10};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double rel_diff(cplx a, cplx b) {
    if (!finite(a) || !finite(b)) return kInf;
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<cplx> sample(const AnalyticFn& f, const std::vector<cplx>& grid) {
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = f(grid[k]);
    return out;
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

std::vector<cplx> probe_grid() {
    std::vector<cplx> g;
    for (double r : {0.3, 0.6}) {
        for (int k = 0; k < 10; ++k) g.push_back(std::polar(r, kTwoPi * (k + 0.25) / 10.0));
    }
    return g;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

}  // namespace

AbstractOperator::AbstractOperator(std::string label, Action action, SpaceSpec space)
    : label_(std::move(label)), action_(std::move(action)), space_(std::move(space)) {}

AbstractOperator AbstractOperator::from_action(std::string label, Action action, SpaceSpec space) {
    if (!action) throw InvalidInput("AbstractOperator: empty action");
    return AbstractOperator(std::move(label), std::move(action), std::move(space));
}

AbstractOperator AbstractOperator::from_weighted(const WeightedCompOp& op, SpaceSpec space) {
    return from_action(op.label, [op](const AnalyticFn& f) { return apply(op, f); }, std::move(space));
}

AbstractOperator AbstractOperator::from_matrix(std::string label, Matrix entries, SpaceSpec space) {
    if (space.p() != 2.0) throw InvalidInput("AbstractOperator: matrix sections need a p = 2 space");
    if (entries.rows() != entries.cols() || entries.rows() < 2) {
        throw InvalidInput("AbstractOperator: section must be square with N >= 2");
    }
    if (!entries.allFinite()) throw InvalidInput("AbstractOperator: section has non-finite entries");
    const std::size_t n = static_cast<std::size_t>(entries.rows());
    const std::vector<double> norms = monomial_norms(space, n);
    auto shared = std::make_shared<const Matrix>(entries);
    Action action = [shared, norms, n](const AnalyticFn& f) {
        std::vector<cplx> a(n);
        if (f.has_coefficients()) {
            for (std::size_t j = 0; j < n; ++j) a[j] = f.coefficient(j);
        } else {
            a = taylor(f, n, f.boundary_continuous() ? 1.0 : std::min(0.9, f.r_max()));
        }
        Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) x(static_cast<Eigen::Index>(j)) = a[j] * norms[j];
        const Eigen::VectorXcd y = (*shared) * x;
        std::vector<cplx> b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = y(static_cast<Eigen::Index>(i)) / norms[i];
        return polynomial(std::move(b));
    };
    AbstractOperator out(std::move(label), std::move(action), std::move(space));
    out.section_ = std::move(entries);
    return out;
}

AnalyticFn AbstractOperator::operator()(const AnalyticFn& f) const { return action_(f); }

Matrix AbstractOperator::section(std::size_t n) const {
    if (section_) {
        if (static_cast<Eigen::Index>(n) > section_->rows()) {
            throw InvalidInput("AbstractOperator: stored section is smaller than the requested N");
        }
        const auto k = static_cast<Eigen::Index>(n);
        return section_->topLeftCorner(k, k);
    }
    return matrix_of(action_, space_, n).entries;
}

std::vector<cplx> intertwine_grid() {
    std::vector<cplx> g;
    for (int i = 0; i < 10; ++i) {
        const double r = 0.05 + 0.1 * i;
        for (int k = 0; k < 10; ++k) g.push_back(std::polar(r, kTwoPi * (k + 0.5 * (i % 2)) / 10.0));
    }
    return g;
}

std::vector<AnalyticFn> intertwine_family(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<AnalyticFn> fam;
    for (int i = 0; i < 10; ++i) {
        std::vector<cplx> c(static_cast<std::size_t>(i % 9) + 1);
        for (auto& x : c) x = cplx(nd(rng), nd(rng));
        fam.push_back(polynomial(std::move(c)));
    }
    fam.push_back(geometric(0.5));
    fam.push_back(scale(geometric(-0.5), 0.5));
    return fam;
}

double linearity_residual(const AbstractOperator& T, const std::vector<AnalyticFn>& family,
                          const std::vector<cplx>& grid) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        const AnalyticFn& f = family[i];
        const AnalyticFn& g = family[i + 1];
        const std::vector<cplx> tf = sample(T(f), grid);
        const std::vector<cplx> tg = sample(T(g), grid);
        for (cplx lambda : {cplx(1.0), cplx(-0.5, 2.0)}) {
            const std::vector<cplx> tc = sample(T(add(f, scale(g, lambda))), grid);
            for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, rel_diff(tc[k], tf[k] + lambda * tg[k]));
        }
    }
    return worst;
}

CommutantReport commutant_check(const AbstractOperator& B, double tol, const std::vector<cplx>& grid,
                                const std::vector<AnalyticFn>& family) {
    CommutantReport rep;
    rep.multiplier = B(constant(1.0));
    const std::vector<cplx> g = sample(rep.multiplier, grid);
    const AnalyticFn z = identity_fn();
    for (const AnalyticFn& f : family) {
        const std::vector<cplx> bf = sample(B(f), grid);
        const std::vector<cplx> bzf = sample(B(multiply(z, f)), grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const cplx fz = f(grid[k]);
            rep.commutation_residual = std::max(rep.commutation_residual, rel_diff(bzf[k], grid[k] * bf[k]));
            rep.multiplier_residual = std::max(rep.multiplier_residual, rel_diff(bf[k], g[k] * fz));
        }
    }
    rep.consistent = rep.commutation_residual < tol && rep.multiplier_residual < tol;
    return rep;
}

RecoveredSymbols recover_symbols(const AbstractOperator& T, const std::vector<cplx>& grid) {
    const AnalyticFn m = T(constant(1.0));
    const AnalyticFn tz = T(identity_fn());
    double scale_m = 0.0;
    for (cplx z : probe_grid()) scale_m = std::max(scale_m, std::abs(m(z)));
    if (!(scale_m > 1e-14)) {
        throw DegenerateOperator("recover_symbols: T1 vanishes on the probe grid of '" + T.label() + "'");
    }
    const double guard = 1e-10 * scale_m;
    RecoveredSymbols out;
    out.m = m;
    const double rmax = std::min(m.r_max(), tz.r_max());
    out.phi = AnalyticFn(
        [m, tz, guard, rmax](cplx z) {
            const cplx d = m.eval_unchecked(z);
            if (std::abs(d) > guard) return tz.eval_unchecked(z) / d;
            // removable singularity: mean of phi over a small circle
            const double rho = std::min(0.05, 0.5 * (rmax - std::abs(z)));
            cplx acc = 0.0;
            constexpr int nodes = 16;
            for (int k = 0; k < nodes; ++k) {
                const cplx w = z + std::polar(rho, kTwoPi * (k + 0.5) / nodes);
                acc += tz.eval_unchecked(w) / m.eval_unchecked(w);
            }
            return acc / static_cast<double>(nodes);
        },
        rmax);
    for (cplx z : grid) {
        if (std::abs(m(z)) <= guard) out.masked.push_back(z);
    }
    return out;
}

IntertwinerReport check_intertwiner(const AbstractOperator& T, const std::vector<cplx>& grid, double tol,
                                    const std::vector<AnalyticFn>& family) {
    IntertwinerReport rep;
    rep.label = T.label();
    rep.tolerance = tol;
    if (grid.empty()) throw InvalidInput("check_intertwiner: empty grid");
    for (cplx z : grid) {
        if (!(std::abs(z) < 1.0)) throw InvalidInput("check_intertwiner: grid points must lie in the open disk");
    }
    if (family.size() < 12) throw InvalidInput("check_intertwiner: the test family needs at least 12 functions");

    std::optional<RecoveredSymbols> sym;
    try {
        sym = recover_symbols(T, grid);
    } catch (const DegenerateOperator& e) {
        rep.degenerate = true;
        rep.failures.push_back(e.what());
    }

    const std::size_t nf = family.size();
    const std::size_t ng = grid.size();
    std::vector<std::vector<cplx>> tf(nf);
    std::map<int, std::vector<std::vector<cplx>>> tzf;
    for (int n : kPowers) tzf[n].resize(nf);
    parallel_for(nf, [&](std::size_t i) {
        tf[i] = sample(T(family[i]), grid);
        for (int n : kPowers) tzf[n][i] = sample(T(multiply(monomial(n), family[i])), grid);
    });
    const std::vector<cplx> t1 = sample(T(constant(1.0)), grid);
    const std::vector<cplx> tz = sample(T(identity_fn()), grid);

    std::vector<cplx> phi(ng, 0.0);
    if (sym) {
        rep.m = sym->m;
        rep.phi = sym->phi;
        rep.masked = sym->masked;
        for (std::size_t k = 0; k < ng; ++k) phi[k] = sym->phi(grid[k]);
    } else {
        for (std::size_t k = 0; k < ng; ++k) {
            cplx num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < nf; ++i) {
                num += std::conj(tf[i][k]) * tzf[1][i][k];
                den += std::norm(tf[i][k]);
            }
            phi[k] = den > 0.0 ? num / den : cplx(0.0);
        }
    }

    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t k = 0; k < ng; ++k) {
            rep.multiplier_residual = std::max(rep.multiplier_residual, rel_diff(tzf[1][i][k] * t1[k], tz[k] * tf[i][k]));
        }
    }
    for (int n : kPowers) {
        double worst = 0.0;
        for (std::size_t i = 0; i < nf; ++i) {
            for (std::size_t k = 0; k < ng; ++k) worst = std::max(worst, rel_diff(tzf[n][i][k], ipow(phi[k], n) * tf[i][k]));
        }
        rep.power_residuals[n] = worst;
    }
    rep.intertwining_residual = rep.power_residuals[1];

    for (cplx w : phi) rep.self_map_max = std::max(rep.self_map_max, finite(w) ? std::abs(w) : kInf);

    if (sym && rep.self_map_max < 1.0) {
        for (std::size_t i = 0; i < nf; ++i) {
            for (std::size_t k = 0; k < ng; ++k) {
                cplx composed;
                try {
                    composed = t1[k] * family[i](phi[k]);
                } catch (const Error&) {
                    composed = cplx(kInf, 0.0);
                }
                rep.form_residual = std::max(rep.form_residual, rel_diff(tf[i][k], composed));
            }
        }
    } else {
        rep.form_residual = kInf;
    }

    if (sym) {
        try {
            rep.m_boundary_profile = boundary_max_profile(sym->m, {1e-1, 1e-2, 1e-3});
            rep.m_growing = grows_steadily(rep.m_boundary_profile, 1.1);
            for (double v : rep.m_boundary_profile) {
                if (!std::isfinite(v)) rep.m_growing = true;
            }
        } catch (const Error& e) {
            rep.m_growing = true;
            rep.failures.push_back(std::string("m is not bounded near the circle: ") + e.what());
        }
    }

    auto check = [&](double value, const char* what) {
        if (!(value < tol)) {
            std::ostringstream msg;
            msg << what << " residual " << value << " exceeds " << tol;
            rep.failures.push_back(msg.str());
        }
    };
    check(rep.multiplier_residual, "commuting-multiplier");
    for (const auto& [n, r] : rep.power_residuals) {
        const std::string what = n == 1 ? "intertwining" : "power-" + std::to_string(n);
        check(r, what.c_str());
    }
    if (!(rep.self_map_max < 1.0 - kSelfMapMargin)) {
        std::ostringstream msg;
        msg << "recovered phi is not a self-map of the disk: max |phi| = " << rep.self_map_max;
        rep.failures.push_back(msg.str());
    }
    check(rep.form_residual, "weighted-composition form");
    if (rep.m_growing) rep.failures.push_back("max |m| grows along the boundary ladder");
    rep.pass = rep.failures.empty();
    return rep;
}

std::vector<double> default_extraction_times() {
    std::vector<double> t = {0.0};
    for (int k = 10; k >= 1; --k) t.push_back(std::ldexp(1.0, -k));
    for (double v : {0.1, 0.2, 0.3, 0.7, 1.0}) t.push_back(v);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

Extraction extract_semigroup(const OperatorFamily& family, const std::vector<double>& t_grid, double tol,
                             const std::vector<cplx>& grid) {
    std::vector<double> times = t_grid;
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(), same_time), times.end());
    if (times.empty() || times.front() != 0.0) throw InvalidInput("extract_semigroup: the time grid must contain 0");
    if (times.size() < 4 || times[1] > 1e-2) {
        throw InvalidInput("extract_semigroup: the time grid needs at least three positive times accumulating at 0");
    }
    if (grid.empty()) throw InvalidInput("extract_semigroup: empty grid");

    const std::size_t nt = times.size();
    std::vector<IntertwinerReport> reports(nt);
    std::vector<AnalyticFn> ms(nt);
    std::vector<AnalyticFn> phis(nt);
    std::vector<double> norms(nt, 0.0);
    std::vector<char> has_norm(nt, 0);
    parallel_for(nt, [&](std::size_t k) {
        const double t = times[k];
        try {
            const AbstractOperator T = family(t);
            IntertwinerReport r = check_intertwiner(T, grid, tol);
            if (!r.pass) throw ExtractionError(t, "T_t is not an abelian intertwiner: " + join(r.failures));
            ms[k] = *r.m;
            phis[k] = *r.phi;
            if (t < 1.0 && T.space().p() == 2.0) {
                norms[k] = norm2(T.section(kSurrogateN)).value;
                has_norm[k] = 1;
            }
            reports[k] = std::move(r);
        } catch (const ExtractionError&) {
            throw;
        } catch (const Error& e) {
            throw ExtractionError(t, e.what());
        }
    });

    ExtractionReport rep;
    rep.t_values = times;
    rep.tolerance = tol;
    rep.caveat =
        "the uniform bound sup_{0<=t<1} ||T_t|| is only surrogated by p = 2 finite sections and is not enforced";

    const std::size_t ng = grid.size();
    std::vector<std::vector<cplx>> pv(nt, std::vector<cplx>(ng));
    std::vector<std::vector<cplx>> mv(nt, std::vector<cplx>(ng));
    for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t j = 0; j < ng; ++j) {
            pv[k][j] = phis[k](grid[j]);
            mv[k][j] = ms[k](grid[j]);
        }
    }

    double worst_law = 0.0;
    auto note = [&](double r, double& slot, double t, double s) {
        slot = std::max(slot, r);
        if (r > worst_law) {
            worst_law = r;
            rep.worst_pair = {t, s};
        }
    };
    for (std::size_t j = 0; j < ng; ++j) {
        note(rel_diff(pv[0][j], grid[j]), rep.semiflow_residual, 0.0, 0.0);
        note(rel_diff(mv[0][j], 1.0), rep.cocycle_residual, 0.0, 0.0);
    }
    for (std::size_t a = 1; a < nt; ++a) {
        for (std::size_t b = 1; b < nt; ++b) {
            const double sum = times[a] + times[b];
            const auto it = std::find_if(times.begin(), times.end(), [sum](double u) { return same_time(u, sum); });
            if (it == times.end()) continue;
            const std::size_t c = static_cast<std::size_t>(it - times.begin());
            for (std::size_t j = 0; j < ng; ++j) {
                const cplx inner = pv[a][j];
                cplx phi_s = cplx(kInf, 0.0);
                cplx m_s = cplx(kInf, 0.0);
                if (std::abs(inner) < 1.0) {
                    try {
                        phi_s = phis[b](inner);
                        m_s = ms[b](inner);
                    } catch (const Error&) {
                    }
                }
                note(rel_diff(pv[c][j], phi_s), rep.semiflow_residual, times[a], times[b]);
                note(rel_diff(mv[c][j], mv[a][j] * m_s), rep.cocycle_residual, times[a], times[b]);
            }
        }
    }

    rep.min_abs_m = kInf;
    for (std::size_t k = 1; k < nt; ++k) {
        for (cplx v : mv[k]) rep.min_abs_m = std::min(rep.min_abs_m, std::abs(v));
    }

    const std::vector<double> ts = {times[1], times[2], times[3]};
    for (std::size_t j = 0; j < ng; ++j) {
        const std::vector<cplx> ds = {pv[1][j] - grid[j], pv[2][j] - grid[j], pv[3][j] - grid[j]};
        rep.continuity_residual = std::max(rep.continuity_residual, std::abs(neville_extrapolate(ts, ds, 0.0)));
    }

    for (std::size_t k = 0; k < nt; ++k) {
        if (has_norm[k]) {
            rep.norm_surrogate = std::max(rep.norm_surrogate, norms[k]);
            rep.norm_surrogate_available = true;
        }
    }

    std::ostringstream msg;
    if (!(rep.semiflow_residual < tol)) {
        msg << "semiflow law residual " << rep.semiflow_residual << " at (t, s) = (" << rep.worst_pair.first << ", "
            << rep.worst_pair.second << ")";
        rep.failures.push_back(msg.str());
        msg.str("");
    }
    if (!(rep.cocycle_residual < tol)) {
        msg << "cocycle law residual " << rep.cocycle_residual << " at (t, s) = (" << rep.worst_pair.first << ", "
            << rep.worst_pair.second << ")";
        rep.failures.push_back(msg.str());
        msg.str("");
    }
    if (!(rep.min_abs_m > tol)) {
        msg << "m_t vanishes on the grid: min |m_t| = " << rep.min_abs_m;
        rep.failures.push_back(msg.str());
        msg.str("");
    }
    if (!(rep.continuity_residual < kContinuityTol)) {
        msg << "phi_t does not tend to the identity as t -> 0+: residual " << rep.continuity_residual;
        rep.failures.push_back(msg.str());
    }
    rep.pass = rep.failures.empty();
    rep.per_t = std::move(reports);

    auto shared_phis = std::make_shared<const std::vector<AnalyticFn>>(phis);
    auto shared_ms = std::make_shared<const std::vector<AnalyticFn>>(ms);
    auto shared_times = std::make_shared<const std::vector<double>>(times);
    auto index_of = [shared_times](double t) {
        for (std::size_t k = 0; k < shared_times->size(); ++k) {
            if (same_time((*shared_times)[k], t)) return k;
        }
        throw InvalidInput("extracted family is not defined at t = " + std::to_string(t));
    };
    Semiflow flow = Semiflow::closed_form("extracted", [shared_phis, index_of](double t, cplx z) {
                        return (*shared_phis)[index_of(t)](z);
                    }).with_time_domain(times);
    Cocycle cocycle = Cocycle::closed_form("extracted", [shared_ms, index_of](double t, cplx z) {
                          return (*shared_ms)[index_of(t)](z);
                      }).with_time_domain(times);
    return Extraction{std::move(flow), std::move(cocycle), std::move(rep)};
}

OperatorBundle make_bundle(const Semiflow& sf, const Cocycle& cc, const SpaceSpec& space, std::size_t n,
                           const std::vector<double>& t_values) {
    if (t_values.empty()) throw InvalidInput("make_bundle: no times");
    OperatorBundle b;
    b.space = space.name();
    b.n = n;
    b.t_values = t_values;
    for (double t : t_values) b.matrices.push_back(matrix(semigroup_op(sf, cc, t), space, n).entries);
    return b;
}

void write_bundle(const std::string& dir, const OperatorBundle& bundle) {
    namespace fs = std::filesystem;
    if (bundle.matrices.size() != bundle.t_values.size()) throw InvalidInput("write_bundle: one matrix per time expected");
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["space"] = bundle.space;
    manifest["N"] = bundle.n;
    manifest["t_values"] = bundle.t_values;
    manifest["matrices"] = nlohmann::json::array();
    for (std::size_t k = 0; k < bundle.matrices.size(); ++k) {
        const std::string file = "t_" + std::to_string(k) + ".csv";
        write_matrix_csv((fs::path(dir) / file).string(), bundle.matrices[k]);
        manifest["matrices"].push_back(file);
    }
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw InvalidInput("write_bundle: cannot write the manifest in '" + dir + "'");
    out << manifest.dump(2) << '\n';
}

OperatorBundle read_bundle(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path manifest_path = path;
    if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw InvalidInput("bundle: cannot open '" + manifest_path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("bundle: malformed manifest: " + std::string(e.what()));
    }
    OperatorBundle b;
    try {
        b.space = j.at("space").get<std::string>();
        b.n = j.at("N").get<std::size_t>();
        b.t_values = j.at("t_values").get<std::vector<double>>();
        const auto files = j.at("matrices").get<std::vector<std::string>>();
        if (files.size() != b.t_values.size()) throw InvalidInput("bundle: one matrix per time expected");
        for (const auto& f : files) {
            Matrix m = read_matrix_csv((manifest_path.parent_path() / f).string());
            if (static_cast<std::size_t>(m.rows()) != b.n) {
                throw InvalidInput("bundle: matrix '" + f + "' does not have N = " + std::to_string(b.n) + " rows");
            }
            b.matrices.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("bundle: malformed manifest: " + std::string(e.what()));
    }
    for (double t : b.t_values) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("bundle: times must be finite and nonnegative");
    }
    parse_space(b.space);
    return b;
}

OperatorFamily bundle_family(const OperatorBundle& bundle) {
    auto shared = std::make_shared<const OperatorBundle>(bundle);
    const SpaceSpec space = parse_space(bundle.space);
    return [shared, space](double t) {
        for (std::size_t k = 0; k < shared->t_values.size(); ++k) {
            if (same_time(shared->t_values[k], t)) {
                std::ostringstream label;
                label << "T_" << t;
                return AbstractOperator::from_matrix(label.str(), shared->matrices[k], space);
            }
        }
        throw ExtractionError(t, "the bundle has no matrix for this time");
    };
}

}  // namespace semiflow
