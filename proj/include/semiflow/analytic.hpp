#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semiflow/quadrature.hpp"

namespace semiflow {

/// A function analytic on the disk |z| < r_max, given by an evaluation
/// callback and optionally by its Taylor coefficients.
///
/// Evaluation outside the closed disk of radius r_max is rejected. Values on
/// |z| = 1 are only requested by the library when the function is marked
/// continuous up to the boundary (see certify_boundary_continuity()).
class AnalyticFn {
public:
    using Evaluator = std::function<cplx(cplx)>;
    using CoefficientProvider = std::function<cplx(std::size_t)>;

    AnalyticFn();
    explicit AnalyticFn(Evaluator eval, double r_max = 1.0);

    cplx operator()(cplx z) const;

    /// Evaluation without the domain check; for hot loops on validated grids.
    cplx eval_unchecked(cplx z) const { return (*eval_)(z); }

    double r_max() const noexcept { return r_max_; }
    bool has_coefficients() const noexcept { return static_cast<bool>(coeff_); }
    cplx coefficient(std::size_t n) const;
    bool boundary_continuous() const noexcept { return boundary_continuous_; }

    AnalyticFn with_coefficients(CoefficientProvider coeff) const;
    AnalyticFn certify_boundary_continuity(bool on = true) const;

private:
    std::shared_ptr<const Evaluator> eval_;
    CoefficientProvider coeff_;
    double r_max_ = 1.0;
    bool boundary_continuous_ = false;
};

cplx eval(const AnalyticFn& f, cplx z);

/// f'(z) from the Cauchy integral over the circle |w - z| = rho with
/// `nodes` uniform points. The circle must stay inside the domain of f.
cplx derivative(const AnalyticFn& f, cplx z, double rho, int nodes = 32);

/// Cauchy-integral derivative of any callable analytic on |w - z| <= rho.
template <class F>
cplx cauchy_derivative(F&& f, cplx z, double rho, int nodes = 32) {
    cplx acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const cplx e = std::polar(1.0, kTwoPi * k / nodes);
        acc += f(z + rho * e) / e;
    }
    return acc / (static_cast<double>(nodes) * rho);
}

/// Taylor coefficients a_0..a_{N-1} from a discrete Fourier transform of f on
/// |z| = r with at least max(4N, 64) nodes.
std::vector<cplx> taylor(const AnalyticFn& f, std::size_t count, double r);

// Constructors for frequently used functions.
AnalyticFn constant(cplx c);
AnalyticFn identity_fn();
AnalyticFn monomial(int n);
/// Polynomial with coefficients c[0] + c[1] z + ...; continuous on the closed disk.
AnalyticFn polynomial(std::vector<cplx> coeffs);
/// 1 / (1 - b z) for |b| < 1.
AnalyticFn geometric(cplx b);
AnalyticFn exponential(cplx scale = 1.0);

// Pointwise algebra. The results keep the smaller domain radius.
AnalyticFn compose(const AnalyticFn& outer, const AnalyticFn& inner);
AnalyticFn multiply(const AnalyticFn& a, const AnalyticFn& b);
AnalyticFn add(const AnalyticFn& a, const AnalyticFn& b);
AnalyticFn scale(const AnalyticFn& a, cplx c);

/// Principal branch of g^gamma. Before returning, checks that g avoids the
/// closed negative real axis on a sample grid of the disk.
AnalyticFn principal_power(const AnalyticFn& g, double gamma);

/// Integer power by repeated squaring.
cplx ipow(cplx z, int n);

/// Polynomial evaluation by Horner's rule.
cplx horner(std::span<const cplx> coeffs, cplx z);

}  // namespace semiflow
