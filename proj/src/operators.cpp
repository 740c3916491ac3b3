#include "semiflow/operators.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "semiflow/error.hpp"
#include "semiflow/parallel.hpp"

namespace semiflow {

namespace {

constexpr double kTailRadius = 1.0 - 1e-3;
constexpr std::uint64_t kStartSeed = 0x5eed5eedULL;

double mean_square_on_circle(const AnalyticFn& f, double r, int nodes) {
    const CircleGrid grid(r, nodes);
    double acc = 0.0;
    for (const cplx& z : grid.points()) acc += std::norm(f(z));
    return acc * grid.weight();
}

}  // namespace

WeightedCompOp weighted_composition(AnalyticFn m, AnalyticFn phi, std::string label) {
    return WeightedCompOp{std::move(m), std::move(phi), std::move(label)};
}

WeightedCompOp multiplication_op(AnalyticFn m, std::string label) {
    return weighted_composition(std::move(m), identity_fn(), std::move(label));
}

WeightedCompOp composition_op(AnalyticFn phi, std::string label) {
    return weighted_composition(constant(1.0), std::move(phi), std::move(label));
}

WeightedCompOp identity_op() { return weighted_composition(constant(1.0), identity_fn(), "I"); }

AnalyticFn apply(const WeightedCompOp& op, const AnalyticFn& f) {
    const AnalyticFn m = op.m;
    const AnalyticFn phi = op.phi;
    AnalyticFn out([m, phi, f](cplx z) { return m(z) * f(phi(z)); }, std::min(m.r_max(), phi.r_max()));
    return out.certify_boundary_continuity(m.boundary_continuous() && phi.boundary_continuous() &&
                                           f.boundary_continuous());
}

std::vector<double> monomial_norms(const SpaceSpec& space, std::size_t count) {
    std::vector<double> out(count, 1.0);
    if (space.kind() == SpaceSpec::Kind::Hardy) return out;
    const RadialWeight& w = space.weight();
    if (w.is_standard()) {
        // (alpha + 1) B(n + 1, alpha + 1)
        const double a = w.alpha();
        for (std::size_t n = 0; n < count; ++n) {
            const double dn = static_cast<double>(n);
            out[n] = std::exp(0.5 * (std::lgamma(dn + 1.0) + std::lgamma(a + 2.0) - std::lgamma(dn + a + 2.0)));
        }
        return out;
    }
    const Rule1D rule = w.radial_rule(240);
    for (std::size_t n = 0; n < count; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * std::pow(rule.nodes[k], 2.0 * n);
        out[n] = std::sqrt(acc);
    }
    return out;
}

OperatorMatrix matrix_of(const std::function<AnalyticFn(const AnalyticFn&)>& action, const SpaceSpec& space,
                         std::size_t n) {
    if (n < 2) throw InvalidInput("matrix: N must be at least 2");
    if (space.p() != 2.0) throw InvalidInput("matrix: finite sections need a p = 2 space");
    const std::vector<double> norms = monomial_norms(space, n);
    OperatorMatrix out;
    out.entries = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.space = space.name();
    out.column_tail.assign(n, 0.0);
    const int tail_nodes = static_cast<int>(std::max<std::size_t>(1024, 8 * n));
    parallel_for(n, [&](std::size_t j) {
        const AnalyticFn col = action(monomial(static_cast<int>(j)));
        const double r = col.boundary_continuous() ? 1.0 : 0.9;
        const std::vector<cplx> c = taylor(col, n, r);
        for (std::size_t i = 0; i < n; ++i) {
            out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i] * norms[i] / norms[j];
        }
        const double rt = col.boundary_continuous() ? 1.0 : kTailRadius;
        double head = 0.0;
        for (std::size_t i = 0; i < n; ++i) head += std::norm(c[i]) * std::pow(rt, 2.0 * i);
        const double total = mean_square_on_circle(col, rt, tail_nodes);
        out.column_tail[j] = std::sqrt(std::max(0.0, total - head)) / norms[j];
    });
    return out;
}

OperatorMatrix matrix(const WeightedCompOp& op, const SpaceSpec& space, std::size_t n) {
    return matrix_of([&op](const AnalyticFn& f) { return apply(op, f); }, space, n);
}

NormEstimate norm2(const Matrix& a, int max_iters, double tol) {
    NormEstimate est;
    if (!a.allFinite()) throw InvalidInput("norm2: matrix has non-finite entries");
    if (a.size() == 0 || a.norm() == 0.0) {
        est.converged = true;
        return est;
    }
    std::mt19937_64 rng(kStartSeed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXcd v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
    v.normalize();
    double lambda = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        const Eigen::VectorXcd av = a * v;
        const double next = av.squaredNorm();
        Eigen::VectorXcd w = a.adjoint() * av;
        est.iterations = it;
        const double wn = w.norm();
        if (wn == 0.0) {
            est.converged = true;
            lambda = 0.0;
            break;
        }
        v = w / wn;
        if (std::abs(next - lambda) <= tol * next) {
            lambda = next;
            est.converged = true;
            break;
        }
        lambda = next;
    }
    est.value = std::sqrt(lambda);
    return est;
}

NormEstimate norm2(const OperatorMatrix& a, int max_iters, double tol) { return norm2(a.entries, max_iters, tol); }

NormStability norm2_stability(const WeightedCompOp& op, const SpaceSpec& space, std::size_t n) {
    if (n < 4) throw InvalidInput("norm2_stability: N must be at least 4");
    const OperatorMatrix full = matrix(op, space, n);
    NormStability s;
    s.value = norm2(full).value;
    const std::size_t h = n / 2;
    s.half_value = norm2(Matrix(full.entries.topLeftCorner(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h))))
                       .value;
    s.change = std::abs(s.value - s.half_value);
    s.slow = s.change > 1e-3 * std::max(s.value, 1e-300);
    return s;
}

double norm_lower_bound(const WeightedCompOp& op, const SpaceSpec& space, int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidInput("norm_lower_bound: trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<int> degree(0, 12);
    std::vector<AnalyticFn> family;
    for (int i = 0; i < trials; ++i) {
        std::vector<cplx> c(static_cast<std::size_t>(degree(rng)) + 1);
        for (auto& x : c) x = cplx(nd(rng), nd(rng));
        family.push_back(polynomial(std::move(c)));
    }
    const double p = space.p();
    for (double r : {0.5, 0.9, 0.99}) {
        for (int k = 0; k < 8; ++k) {
            const cplx a = std::polar(r, kTwoPi * k / 8.0);
            if (space.kind() == SpaceSpec::Kind::Hardy) {
                // ((1 - |a|^2) / (1 - conj(a) z)^2)^{1/p} has unit H^p norm
                const double s = 2.0 / p;
                const double c = std::pow(1.0 - std::norm(a), 1.0 / p);
                const cplx ab = std::conj(a);
                family.push_back(AnalyticFn([c, s, ab](cplx z) { return c * std::exp(-s * std::log(1.0 - ab * z)); })
                                     .certify_boundary_continuity());
            } else {
                const RadialWeight& w = space.weight();
                family.push_back(test_function(a, p, default_gamma(p, effective_alpha(w)), w));
            }
        }
    }
    std::vector<double> ratios(family.size(), 0.0);
    parallel_for(family.size(), [&](std::size_t i) {
        const double nf = norm(family[i], space);
        if (nf > 0.0) ratios[i] = norm(apply(op, family[i]), space) / nf;
    });
    double best = 0.0;
    for (double r : ratios) best = std::max(best, r);
    return best;
}

WeightedCompOp semigroup_op(const Semiflow& sf, const Cocycle& cc, double t) {
    if (!(t >= 0.0)) throw InvalidInput("semigroup_op: t must be nonnegative");
    if (cc.flow() && cc.flow()->name() != sf.name()) {
        throw InvalidInput("semigroup_op: cocycle '" + cc.name() + "' is bound to flow '" + cc.flow()->name() +
                           "', not '" + sf.name() + "'");
    }
    std::ostringstream label;
    label << "S_" << t;
    if (t == 0.0) return weighted_composition(constant(1.0), identity_fn(), label.str());
    return weighted_composition(cc.at(t), sf.at(t), label.str());
}

void write_matrix_csv(const std::string& path, const Matrix& a) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write matrix file '" + path + "'");
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j > 0) out << ',';
            out << a(i, j).real() << ',' << a(i, j).imag();
        }
        out << '\n';
    }
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw InvalidInput("matrix file '" + path + "': bad number '" + cell + "'");
            }
            if (used != cell.size()) throw InvalidInput("matrix file '" + path + "': bad number '" + cell + "'");
            vals.push_back(v);
        }
        rows.push_back(std::move(vals));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw InvalidInput("matrix file '" + path + "' is empty");
    Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != 2 * n) throw InvalidInput("matrix file '" + path + "': expected a square matrix of re,im pairs");
        for (std::size_t j = 0; j < n; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cplx(rows[i][2 * j], rows[i][2 * j + 1]);
        }
    }
    return a;
}

}  // namespace semiflow
