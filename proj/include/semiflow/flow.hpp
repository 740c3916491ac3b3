#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semiflow/analytic.hpp"

namespace semiflow {

/// Tolerances for generator-driven flows (embedded Runge-Kutta 5(4)).
struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 200000;
    /// Trajectories may exceed |w| = 1 - 1e-12 by at most this much.
    double escape_tol = 1e-9;
};

/// A one-parameter family (phi_t)_{t >= 0} of self-maps of the disk, given in
/// closed form or as the flow of an infinitesimal generator G.
class Semiflow {
public:
    using Map = std::function<cplx(double, cplx)>;

    enum class Kind { ClosedForm, GeneratorDriven };

    static Semiflow closed_form(std::string name, Map map, std::vector<cplx> fixed_points = {});
    static Semiflow generator_driven(std::string name, AnalyticFn generator, OdeOptions options = {},
                                     std::vector<cplx> fixed_points = {});

    /// Restricts evaluation to a finite set of times (used for families
    /// recovered from operators, which are only known on a grid).
    Semiflow with_time_domain(std::vector<double> times) const;

    /// phi_t(z), checked: t >= 0, |z| < 1 and the result inside the closed disk.
    cplx operator()(double t, cplx z) const;

    /// phi_t(z) without the self-map check on the result. Generator-driven
    /// flows still reject trajectories that escape the disk.
    cplx raw(double t, cplx z) const;

    bool defined_at(double t) const;

    /// Attaches the exact z-derivative of phi_t; used by derivative cocycles
    /// in place of numerical differentiation.
    Semiflow with_derivative(Map dmap) const;
    const Map* derivative_map() const noexcept { return dmap_.get(); }

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<cplx>& fixed_points() const noexcept { return fixed_points_; }
    const std::optional<AnalyticFn>& generator() const noexcept { return generator_; }
    const OdeOptions& ode_options() const noexcept { return ode_; }

    /// phi_t as an analytic function of z for fixed t.
    AnalyticFn at(double t) const;

private:
    Semiflow() = default;

    Kind kind_ = Kind::ClosedForm;
    std::string name_;
    std::shared_ptr<const Map> map_;
    std::shared_ptr<const Map> dmap_;
    std::optional<AnalyticFn> generator_;
    OdeOptions ode_;
    std::vector<cplx> fixed_points_;
    std::vector<double> time_domain_;
};

/// Solves dw/ds = G(w), w(0) = z on [0, t] with an adaptive Dormand-Prince 5(4) scheme.
cplx integrate_generator(const AnalyticFn& generator, double t, cplx z, const OdeOptions& options);

cplx flow_point(const Semiflow& s, double t, cplx z);

/// Second-order one-sided estimate of G(z) = d/dt phi_t(z) at t = 0 from the
/// difference quotients with steps h and h/2.
cplx estimate_generator(const Semiflow& s, cplx z, double h = 1e-3);

/// The generator of s, estimated pointwise with estimate_generator.
AnalyticFn fitted_generator(const Semiflow& s, double h = 1e-3);

struct FlowVerificationReport {
    double identity_residual = 0.0;
    double semigroup_residual = 0.0;
    /// max over the grid of |phi_t(z)| - 1; negative for a self-map.
    double self_map_excess = -1.0;
    /// |lim_{t->0+} phi_t(z) - z| extrapolated from t_k = 2^-k, k = 1..12.
    double continuity_residual = 0.0;
    /// max |phi_t(z) - z| at the last ladder time t = 2^-12, for reference.
    double continuity_tail = 0.0;
    bool continuity_checked = false;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::string> failures;
};

/// Checks phi_0 = id, phi_{t+s} = phi_t o phi_s, the self-map property and
/// continuity at t = 0 over all grid pairs. Never throws on an analytic failure.
FlowVerificationReport verify_semiflow(const Semiflow& s, const std::vector<double>& t_grid,
                                       const std::vector<cplx>& z_grid, double tol);

std::vector<bool> fixed_points_check(const Semiflow& s, const std::vector<cplx>& candidates,
                                     const std::vector<double>& t_grid, double tol);

/// Default verification grids: 8 times in [0, 2] and 50 interior points
/// with 0.1 <= |z| <= 0.95.
std::vector<double> default_time_grid();
std::vector<cplx> default_point_grid();

namespace gallery {

/// e^{-t} z, generator -z.
Semiflow dilation();
/// e^{iat} z, generator iaz.
Semiflow rotation(double a);
/// e^{-t} z + 1 - e^{-t}, generator 1 - z.
Semiflow attraction();
/// phi_t = id.
Semiflow identity();
/// z + t: not a semiflow of the disk; used to exercise failure reporting.
Semiflow translation();

/// Exact generators of the closed-form gallery flows.
AnalyticFn linear_generator(cplx c);
AnalyticFn attraction_generator();

}  // namespace gallery

}  // namespace semiflow
