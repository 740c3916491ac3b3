#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semiflow/cocycle.hpp"
#include "semiflow/operators.hpp"

namespace semiflow {

/// A linear operator known only through its action on analytic functions,
/// optionally backed by a finite section in the normalized monomial basis
/// of a p = 2 space.
class AbstractOperator {
public:
    using Action = std::function<AnalyticFn(const AnalyticFn&)>;

    static AbstractOperator from_action(std::string label, Action action, SpaceSpec space);
    static AbstractOperator from_weighted(const WeightedCompOp& op, SpaceSpec space);
    /// f -> A f on the first N Taylor coefficients; the result is a polynomial of degree < N.
    static AbstractOperator from_matrix(std::string label, Matrix entries, SpaceSpec space);

    AnalyticFn operator()(const AnalyticFn& f) const;

    const std::string& label() const noexcept { return label_; }
    const SpaceSpec& space() const noexcept { return space_; }
    bool matrix_backed() const noexcept { return section_.has_value(); }
    /// The stored section, or one computed from the action.
    Matrix section(std::size_t n) const;

private:
    AbstractOperator(std::string label, Action action, SpaceSpec space);

    std::string label_;
    Action action_;
    SpaceSpec space_;
    std::optional<Matrix> section_;
};

/// Interior sample grid: 10 radii 0.05..0.95 times 10 angles, 100 points.
std::vector<cplx> intertwine_grid();

/// Ten seeded polynomials of degree <= 8 and the rational functions
/// 1 / (1 - z / 2) and 1 / (2 + z).
std::vector<AnalyticFn> intertwine_family(std::uint64_t seed = 0x1417);

/// max over f, g in the family, lambda in {1, -0.5 + 2i} and z of
/// |T(f + lambda g) - Tf - lambda Tg|, relative to the size of the values.
double linearity_residual(const AbstractOperator& T, const std::vector<AnalyticFn>& family,
                          const std::vector<cplx>& grid);

struct CommutantReport {
    AnalyticFn multiplier;
    /// max |B(zf)(z) - z Bf(z)|, relative.
    double commutation_residual = 0.0;
    /// max |Bf(z) - g(z) f(z)| with g = B1, relative.
    double multiplier_residual = 0.0;
    bool consistent = false;
};

CommutantReport commutant_check(const AbstractOperator& B, double tol = 1e-8,
                                const std::vector<cplx>& grid = intertwine_grid(),
                                const std::vector<AnalyticFn>& family = intertwine_family());

struct RecoveredSymbols {
    AnalyticFn m;
    AnalyticFn phi;
    /// Grid points where T1 vanishes; phi is evaluated there by a mean over a small circle.
    std::vector<cplx> masked;
};

/// m = T1, phi = Tz / T1. Throws DegenerateOperator if T1 vanishes on the
/// whole 20-point probe grid.
RecoveredSymbols recover_symbols(const AbstractOperator& T, const std::vector<cplx>& grid = intertwine_grid());

struct IntertwinerReport {
    std::string label;
    std::optional<AnalyticFn> m;
    std::optional<AnalyticFn> phi;
    bool degenerate = false;
    std::vector<cplx> masked;
    /// max |T(zf) T1 - Tz Tf|, the division-free form of T M_z = M_phi T.
    double multiplier_residual = 0.0;
    /// max |T(zf)(z) - phi(z) Tf(z)|. For a degenerate recovery phi is the
    /// pointwise least-squares fit over the family.
    double intertwining_residual = 0.0;
    /// max |T(z^n f) - phi^n Tf| for each n of {1, 2, 5, 10}.
    std::map<int, double> power_residuals;
    /// max |phi| over the grid.
    double self_map_max = 0.0;
    /// max |Tf(z) - m(z) f(phi(z))|.
    double form_residual = 0.0;
    /// max |m| on circles r = 1 - eps, eps in {1e-1, 1e-2, 1e-3}.
    std::vector<double> m_boundary_profile;
    bool m_growing = false;
    double tolerance = 1e-8;
    bool pass = false;
    std::vector<std::string> failures;
};

/// All residuals are relative: each difference is divided by max(1, the
/// largest modulus of the compared values for that f).
IntertwinerReport check_intertwiner(const AbstractOperator& T, const std::vector<cplx>& grid = intertwine_grid(),
                                    double tol = 1e-8, const std::vector<AnalyticFn>& family = intertwine_family());

using OperatorFamily = std::function<AbstractOperator(double)>;

struct ExtractionReport {
    std::vector<double> t_values;
    std::vector<IntertwinerReport> per_t;
    /// max |phi_{t+s} - phi_s o phi_t| over grid pairs with t + s on the grid.
    double semiflow_residual = 0.0;
    /// max |m_{t+s} - m_t (m_s o phi_t)|.
    double cocycle_residual = 0.0;
    /// The (t, s) pair with the largest law residual.
    std::pair<double, double> worst_pair{0.0, 0.0};
    /// min |m_t| over the grid and the positive times.
    double min_abs_m = 0.0;
    /// |lim_{t->0+} phi_t(z) - z| extrapolated along the three smallest positive times.
    double continuity_residual = 0.0;
    /// max over t in [0, 1) of the p = 2 finite-section norm of T_t (N = 32).
    double norm_surrogate = 0.0;
    bool norm_surrogate_available = false;
    std::string caveat;
    double tolerance = 1e-8;
    bool pass = false;
    std::vector<std::string> failures;
};

struct Extraction {
    Semiflow flow;
    Cocycle cocycle;
    ExtractionReport report;
};

/// 0, 2^-10, ..., 2^-1, 0.1, 0.2, 0.3, 0.5, 0.7, 1.
std::vector<double> default_extraction_times();

/// Recovers (phi_t, m_t) from each T_t and checks the semiflow and cocycle
/// laws across the grid. Per-t failures raise ExtractionError at the
/// smallest failing t; law failures are reported.
Extraction extract_semigroup(const OperatorFamily& family, const std::vector<double>& t_grid = default_extraction_times(),
                             double tol = 1e-8, const std::vector<cplx>& grid = intertwine_grid());

/// Matrix sections of an operator family on disk: a JSON manifest
/// {"space", "N", "t_values", "matrices"} next to one CSV per time.
struct OperatorBundle {
    std::string space;
    std::size_t n = 0;
    std::vector<double> t_values;
    std::vector<Matrix> matrices;
};

OperatorBundle make_bundle(const Semiflow& sf, const Cocycle& cc, const SpaceSpec& space, std::size_t n,
                           const std::vector<double>& t_values);
/// Writes manifest.json and t_<k>.csv into dir (created if missing).
void write_bundle(const std::string& dir, const OperatorBundle& bundle);
/// Reads a bundle from its manifest path or directory. Throws InvalidInput when malformed.
OperatorBundle read_bundle(const std::string& path);
/// T_t looked up by time; times not in the bundle raise ExtractionError.
OperatorFamily bundle_family(const OperatorBundle& bundle);

}  // namespace semiflow
