#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semiflow/analytic.hpp"
#include "semiflow/quadrature.hpp"

namespace semiflow {

/// Radial weight omega(|z|) on the disk. Standard(alpha) is
/// (alpha + 1)(1 - |z|^2)^alpha, normalized to unit mass for dA = dx dy / pi.
/// Custom weights are stored through log omega so that rapidly vanishing
/// weights such as exp(-1 / (1 - r)) keep their ratios.
class RadialWeight {
public:
    using LogProfile = std::function<double(double)>;

    static RadialWeight standard(double alpha);
    static RadialWeight custom(std::string name, std::function<double(double)> omega);
    static RadialWeight custom_log(std::string name, LogProfile log_omega);
    /// Piecewise linear interpolation of (r, omega) samples, constant past the last r.
    static RadialWeight from_table(std::string name, std::vector<double> r, std::vector<double> omega);
    /// Two-column CSV file "r,omega"; lines starting with '#' and a non-numeric header are skipped.
    static RadialWeight from_csv(const std::string& path);

    bool is_standard() const noexcept { return standard_; }
    double alpha() const noexcept { return alpha_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double r) const;
    double log_value(double r) const;

    /// Radial rule for F -> int_D F(|z|) omega dA, i.e. weights carry omega(r) 2r dr.
    /// Gauss-Jacobi in u = 1 - r^2 for standard weights, graded panels otherwise.
    Rule1D radial_rule(int n) const;

    /// int_D omega dA, checked finite.
    double total_mass() const;

private:
    RadialWeight() = default;

    bool standard_ = true;
    double alpha_ = 0.0;
    std::string name_;
    std::shared_ptr<const LogProfile> log_omega_;
};

/// Discretization parameters shared by the norm routines.
struct QuadratureConfig {
    int circle_nodes = 512;
    int radial_nodes = 48;
    int angular_nodes = 128;
    std::vector<double> eps = {1e-2, 1e-3, 1e-4};
    /// Relative agreement required between successive refinements of a disk integral.
    double rtol = 1e-10;
    int max_levels = 4;
    /// Centre of the Moebius-focused disk grid; chosen automatically when empty.
    std::optional<cplx> focus;
    /// Extra focus candidates tried by the automatic choice.
    std::vector<cplx> hints;
};

class SpaceSpec {
public:
    enum class Kind { Hardy, Bergman };

    static SpaceSpec hardy(double p, QuadratureConfig cfg = {});
    static SpaceSpec bergman(double p, RadialWeight w, QuadratureConfig cfg = {});

    Kind kind() const noexcept { return kind_; }
    double p() const noexcept { return p_; }
    /// p' with 1/p + 1/p' = 1; requires p > 1.
    double conjugate() const;
    const RadialWeight& weight() const;
    const QuadratureConfig& config() const noexcept { return cfg_; }
    QuadratureConfig& config() noexcept { return cfg_; }
    /// "hardy:2", "bergman:2:0", "bergman:2:custom:<name>".
    std::string name() const;

private:
    SpaceSpec() = default;

    Kind kind_ = Kind::Hardy;
    double p_ = 2.0;
    std::optional<RadialWeight> weight_;
    QuadratureConfig cfg_;
};

/// Parses "hardy:p", "bergman:p:alpha" or "bergman:p:custom:<csv path>".
SpaceSpec parse_space(const std::string& text);

/// p-mean of |f| on the circle of radius r with M uniform nodes.
double circle_mean(const AnalyticFn& f, double p, double r, int nodes);

double hardy_norm(const AnalyticFn& f, double p, const QuadratureConfig& cfg = {});

/// int_D F omega dA for a nonnegative integrand F, with a Moebius-focused grid
/// and refinement until two levels agree to cfg.rtol.
double weighted_area_integral(const std::function<double(cplx)>& F, const RadialWeight& w,
                              const QuadratureConfig& cfg = {});

/// Moebius-focused disk rule around b for the weight w at refinement level `level`.
DiskGrid focused_grid(const RadialWeight& w, cplx b, int radial_nodes, int angular_nodes);

/// Point where |F| (1 - |z|^2)^{2 + alpha} is largest on a boundary-graded polar grid.
cplx locate_focus(const std::function<double(cplx)>& F, double alpha, const std::vector<cplx>& hints = {});

double bergman_norm(const AnalyticFn& f, double p, const RadialWeight& w, const QuadratureConfig& cfg = {});

double norm(const AnalyticFn& f, const SpaceSpec& space);

struct RegularityReport {
    std::vector<double> r_grid;
    std::vector<double> ratios;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    /// Slope of log ratio against log(1 / (1 - r)) over the last four grid points.
    double tail_slope = 0.0;
    double constant = 10.0;
    bool regular = false;
};

std::vector<double> default_regularity_grid();

RegularityReport is_regular(const RadialWeight& w, const std::vector<double>& r_grid = default_regularity_grid(),
                            double constant = 10.0);

/// omega(S(a)) with |I_a| read as the arc length 1 - |a|.
double carleson_measure(const RadialWeight& w, cplx a);

/// gamma_default(p, alpha) = p (alpha + 2) + 1.
double default_gamma(double p, double alpha);
/// Exponent used for a weight: alpha itself for standard weights, otherwise
/// the value matching the tail of the regularity ratio (ratio -> 1 / (alpha + 1)).
double effective_alpha(const RadialWeight& w);

/// f_{a,p}(z) = (1 - |a|)^{(gamma+1)/p} / ((1 - conj(a) z)^{(gamma+1)/p} omega(S(a))^{1/p}).
AnalyticFn test_function(cplx a, double p, double gamma, const RadialWeight& w);

/// |f_{a,p}(z)|^p without forming the complex power.
double test_function_power(cplx a, double p, double gamma, double carleson, cplx z);

/// <f, g> in H^2 (boundary circle) or A^2_omega (disk). p = 1 is rejected.
cplx pairing(const AnalyticFn& f, const AnalyticFn& g, const SpaceSpec& space);

struct GrowthCheck {
    double max_ratio = 0.0;
    cplx witness = 0.0;
    double norm = 0.0;
};

/// max over the grid of (1 - |z|^2)^{(2 + alpha)/p} |f(z)| / ||f||_{A^p_alpha}.
GrowthCheck growth_bound_check(const AnalyticFn& f, double p, double alpha, const std::vector<cplx>& grid);

/// Sampling grid for growth checks: radii 1 - 2^{-k} and 0..0.9, 64 angles.
std::vector<cplx> growth_grid();

/// Maximum of |f| on the circles r = 1 - eps for each eps; a steadily growing
/// profile signals an unbounded function.
std::vector<double> boundary_max_profile(const AnalyticFn& f, const std::vector<double>& eps, int nodes = 1024);

}  // namespace semiflow
