#include "semiflow/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "semiflow/error.hpp"

namespace semiflow {

Rule1D gauss_legendre(int n) {
    if (n < 1) throw InvalidInput("gauss_legendre: n must be positive");
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] to [0, 1]
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

Rule1D gauss_jacobi(int n, double alpha) {
    if (n < 1) throw InvalidInput("gauss_jacobi: n must be positive");
    if (!(alpha > -1.0)) throw InvalidInput("gauss_jacobi: alpha must exceed -1");
    // Golub-Welsch on the Jacobi matrix of P^(0, alpha) on [-1, 1], weight
    // (1 + x)^alpha; then u = (1 + x) / 2 carries weight u^alpha on [0, 1].
    const double a = 0.0, b = alpha;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        if (k == 0) {
            J(0, 0) = (b - a) / (a + b + 2.0);
        } else {
            J(k, k) = (b * b - a * a) / (s * (s + 2.0));
        }
        if (k + 1 < n) {
            const double kk = k + 1.0;
            const double s1 = 2.0 * kk + a + b;
            const double num = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b);
            const double den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
            const double off = std::sqrt(num / den);
            J(k, k + 1) = off;
            J(k + 1, k) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::pow(2.0, a + b + 1.0) * std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                                             std::lgamma(a + b + 2.0));
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        const double x = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.nodes[k] = 0.5 * (1.0 + x);
        // dx = 2 du and (1 + x)^alpha = 2^alpha u^alpha
        rule.weights[k] = mu0 * v0 * v0 / std::pow(2.0, alpha + 1.0);
    }
    return rule;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b, int panels,
                        int nodes_per_panel) {
    if (!(b > a)) return 0.0;
    static thread_local int cached_n = -1;
    static thread_local Rule1D cached;
    if (cached_n != nodes_per_panel) {
        cached = gauss_legendre(nodes_per_panel);
        cached_n = nodes_per_panel;
    }
    double total = 0.0;
    double lo = a;
    const double len = b - a;
    for (int k = 1; k <= panels; ++k) {
        // the stub [b - len 2^-panels, b] is dropped
        const double hi = b - len * std::ldexp(1.0, -k);
        const double h = hi - lo;
        if (h <= 0.0) break;
        for (std::size_t i = 0; i < cached.nodes.size(); ++i) {
            total += h * cached.weights[i] * f(lo + h * cached.nodes[i]);
        }
        lo = hi;
    }
    return total;
}

Rule1D graded_rule(double a, double b, int panels, int nodes_per_panel) {
    if (!(b > a) || panels < 1 || panels > 40) throw InvalidInput("graded_rule: bad interval or panel count");
    const Rule1D gl = gauss_legendre(nodes_per_panel);
    Rule1D out;
    const double len = b - a;
    double lo = a;
    for (int k = 1; k <= panels; ++k) {
        const double hi = k == panels ? b : b - len * std::ldexp(1.0, -k);
        const double h = hi - lo;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            out.nodes.push_back(lo + h * gl.nodes[i]);
            out.weights.push_back(h * gl.weights[i]);
        }
        lo = hi;
    }
    return out;
}

namespace {

template <class T>
T neville(std::span<const double> xs, std::span<const T> ys, double x0) {
    if (xs.size() != ys.size() || xs.empty()) throw InvalidInput("neville_extrapolate: bad sample sizes");
    std::vector<T> p(ys.begin(), ys.end());
    const std::size_t n = xs.size();
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t i = 0; i + m < n; ++i) {
            p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + m]);
        }
    }
    return p[0];
}

}  // namespace

cplx neville_extrapolate(std::span<const double> xs, std::span<const cplx> ys, double x0) {
    return neville<cplx>(xs, ys, x0);
}

double neville_extrapolate(std::span<const double> xs, std::span<const double> ys, double x0) {
    return neville<double>(xs, ys, x0);
}

CircleGrid::CircleGrid(double radius, int nodes) : radius_(radius) {
    if (!(radius > 0.0 && radius <= 1.0)) throw InvalidInput("CircleGrid: radius must lie in (0, 1]");
    if (nodes < 1) throw InvalidInput("CircleGrid: node count must be positive");
    points_.resize(nodes);
    for (int k = 0; k < nodes; ++k) points_[k] = std::polar(radius, kTwoPi * k / nodes);
}

DiskGrid::DiskGrid(std::vector<cplx> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) throw InvalidInput("DiskGrid: size mismatch");
}

DiskGrid DiskGrid::area(int radial_nodes, int angular_nodes) {
    Rule1D r = gauss_legendre(radial_nodes);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) r.weights[i] *= 2.0 * r.nodes[i];
    return polar(r, angular_nodes);
}

DiskGrid DiskGrid::polar(const Rule1D& radial, int angular_nodes, double angle_offset) {
    if (angular_nodes < 1) throw InvalidInput("DiskGrid: angular node count must be positive");
    std::vector<cplx> pts;
    std::vector<double> wts;
    pts.reserve(radial.nodes.size() * angular_nodes);
    wts.reserve(radial.nodes.size() * angular_nodes);
    std::vector<cplx> dirs(angular_nodes);
    for (int k = 0; k < angular_nodes; ++k) dirs[k] = std::polar(1.0, angle_offset + kTwoPi * k / angular_nodes);
    for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
        for (int k = 0; k < angular_nodes; ++k) {
            pts.push_back(radial.nodes[i] * dirs[k]);
            wts.push_back(radial.weights[i] / angular_nodes);
        }
    }
    return DiskGrid(std::move(pts), std::move(wts));
}

double DiskGrid::total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

}  // namespace semiflow
