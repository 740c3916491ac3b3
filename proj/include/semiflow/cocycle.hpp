#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semiflow/flow.hpp"

namespace semiflow {

/// A family (m_t) with m_0 = 1 and m_{t+s}(z) = m_t(z) m_s(phi_t(z)).
class Cocycle {
public:
    using Map = std::function<cplx(double, cplx)>;

    enum class Kind { ClosedForm, Coboundary, Derivative };

    static Cocycle closed_form(std::string name, Map map);
    /// m_t = phi_t' computed by Cauchy differentiation with radius
    /// min(rho, (1 - |z|) / 2).
    static Cocycle derivative(Semiflow flow, double rho = 0.1);

    /// m_t(z); t = 0 returns exactly 1.
    cplx operator()(double t, cplx z) const;

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    /// The semiflow a coboundary or derivative cocycle is bound to.
    const std::optional<Semiflow>& flow() const noexcept { return flow_; }
    const std::vector<cplx>& declared_zeros() const noexcept { return zeros_; }
    bool admissible() const noexcept { return admissible_; }
    bool defined_at(double t) const;

    Cocycle with_time_domain(std::vector<double> times) const;
    AnalyticFn at(double t) const;

private:
    friend Cocycle make_coboundary(std::string, AnalyticFn, Semiflow, std::vector<cplx>, double);

    Cocycle() = default;

    Kind kind_ = Kind::ClosedForm;
    std::string name_;
    std::shared_ptr<const Map> map_;
    std::optional<AnalyticFn> w_;
    std::optional<Semiflow> flow_;
    double rho_ = 0.1;
    std::vector<cplx> zeros_;
    bool admissible_ = true;
    std::vector<double> time_domain_;
};

cplx cocycle_eval(const Cocycle& m, double t, cplx z);

/// m_t = (w o phi_t) / w. Every declared zero of w must be a fixed point of
/// the flow (checked on the default time grid), otherwise AdmissibilityError.
Cocycle make_coboundary(std::string name, AnalyticFn w, Semiflow s, std::vector<cplx> zero_candidates,
                        double fixed_point_tol = 1e-10);

struct CocycleVerificationReport {
    double law_residual = 0.0;
    double unit_residual = 0.0;
    bool admissible = true;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::string> failures;
};

CocycleVerificationReport verify_cocycle(const Cocycle& m, const Semiflow& s, const std::vector<double>& t_grid,
                                         const std::vector<cplx>& z_grid, double tol);

/// Boundary-approaching radii used for H^infinity estimates.
std::vector<double> default_sup_radii();

/// max_{r in radii, k < M} |m_t(r e^{2 pi i k / M})|: a lower estimate of
/// ||m_t||_{H^infinity}.
double sup_norm(const Cocycle& m, double t, const std::vector<double>& radii, int nodes = 512);

enum class LimsupRegime { AtMostOne, Finite, Growing };

std::string to_string(LimsupRegime r);

struct LimsupProbe {
    /// max of the sup-norm estimates over the tail half of t_seq.
    double tail_max = 0.0;
    LimsupRegime regime = LimsupRegime::Finite;
    std::vector<double> times;
    /// sup-norm estimate per time at the largest radius.
    std::vector<double> values;
    bool radial_growth = false;
    bool time_growth = false;
};

/// Probes limsup_{t->0+} ||m_t||_{H^infinity} along a decreasing sequence.
/// Growth along the radius ladder or as t decreases marks the Growing regime.
LimsupProbe limsup_probe(const Cocycle& m, const std::vector<double>& t_seq, const std::vector<double>& radii,
                         int nodes = 512, double tol = 1e-9);

/// 2^-k for k = 1..10.
std::vector<double> default_limsup_times();

/// True when every step of the sequence grows by more than `factor`.
bool grows_steadily(const std::vector<double>& values, double factor = 1.1);

namespace gallery {

/// m_t = e^{c t}; a cocycle for every semiflow.
Cocycle exp_time(double c);
/// m_t(z) = exp(c t (1 + z) / (1 - z)); a cocycle for the identity flow.
Cocycle exp_cayley(double c);

/// w(z) = z^n (declared zero at 0 for n > 0).
AnalyticFn monomial_weight(int n);
/// w(z) = (1 - z)^gamma on the principal branch.
AnalyticFn one_minus_power(double gamma);

}  // namespace gallery

}  // namespace semiflow
