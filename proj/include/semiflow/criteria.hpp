#pragma once

#include <string>
#include <vector>

#include "semiflow/cocycle.hpp"
#include "semiflow/spaces.hpp"

namespace semiflow {

/// Discretization of sup over a in D.
struct SupScanConfig {
    /// Radii of the a-grid: {0.05, 0.25} and 1 - 2^-k for k = 1..10.
    std::vector<double> radii;
    int angles = 16;
    int refine_rounds = 3;
    double contraction = 0.618;
    /// Boundary ladder, measured in units of 1 - max(radii): circle radius
    /// 1 - eps * (1 - r_top) stays well inside the Poisson scale of every a.
    std::vector<double> eps = {1e-2, 1e-3, 1e-4};
    int min_circle_nodes = 512;
    /// Angular nodes max(min_circle_nodes, circle_scale / (1 - |a|)), rounded up to a power of two.
    double circle_scale = 32.0;
    /// Disk quadrature for the Bergman criterion.
    QuadratureConfig disk;
    /// Criterion values above this count as unbounded.
    double threshold = 1e6;
    /// Slope of log value against log(1 / (1 - |a|)) along the top radii above which the sup is growing.
    double a_slope_limit = 0.25;
    /// Steady growth factor per step along the eps ladder.
    double eps_growth = 1.1;
    /// Slope of log value against log(1 / (1 - t)) at the top of the t-grid above which the verdict is withheld.
    double t_slope_limit = 0.5;

    SupScanConfig();
};

/// One criterion value at fixed t.
struct CriterionValue {
    double t = 0.0;
    double value = 0.0;
    cplx witness = 0.0;
    /// Values at the witness for each eps of the ladder (Hardy only), largest eps first.
    std::vector<double> eps_values;
    /// Values at the witness angle along the three largest ladder radii.
    std::vector<double> radial_profile;
    double a_slope = 0.0;
    /// Relative increase of the running sup in each refinement round.
    std::vector<double> corrections;
    /// Every a of the base grid with its value.
    std::vector<cplx> grid_points;
    std::vector<double> grid_values;
    bool singular = false;
    std::string note;
};

CriterionValue hardy_criterion(const Semiflow& sf, const Cocycle& cc, double p, double t,
                               const SupScanConfig& scan = {});

CriterionValue bergman_criterion(const Semiflow& sf, const Cocycle& cc, double p, const RadialWeight& w, double gamma,
                                 double t, const SupScanConfig& scan = {});

enum class Verdict { Bounded, UnboundedTrend, Inconclusive };
std::string to_string(Verdict v);

struct CriterionReport {
    std::string space;
    std::string flow;
    std::string cocycle;
    double p = 2.0;
    double gamma = 0.0;
    std::vector<CriterionValue> values;
    double sup = 0.0;
    /// Slope of log value against log(1 / (1 - t)) over the last three grid times.
    double trend = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> reasons;
    SupScanConfig config;
};

/// 0, 0.1, ..., 0.9, 0.95, 0.99.
std::vector<double> default_verdict_times();

/// Evaluates the criterion of the space on every t and classifies the sup.
/// Requires p > 1 and at least eight times in [0, 1).
CriterionReport uniform_bound_verdict(const Semiflow& sf, const Cocycle& cc, const SpaceSpec& space,
                                      const std::vector<double>& t_grid = default_verdict_times(),
                                      const SupScanConfig& scan = {});

/// Sufficient conditions read from limsup_{t->0+} ||m_t||_{H^infinity}:
/// at most one, finite, or neither.
enum class Sufficiency { LimsupAtMostOne, LimsupFinite, None };
std::string to_string(Sufficiency s);

struct SufficiencyResult {
    Sufficiency tag = Sufficiency::None;
    LimsupProbe probe;
};

SufficiencyResult sufficiency_probe(const Cocycle& cc, const std::vector<double>& t_seq = default_limsup_times(),
                                    double tol = 1e-9);

struct DecayTable {
    std::vector<double> t_values;
    /// rows[i][k] = ||S_{t_k} f_i - f_i||.
    std::vector<std::vector<double>> rows;
    double tol = 1e-3;
    bool decays = false;
};

DecayTable direct_decay_probe(const Semiflow& sf, const Cocycle& cc, const SpaceSpec& space,
                              const std::vector<AnalyticFn>& family,
                              const std::vector<double>& t_seq = default_limsup_times(), double tol = 1e-3);

/// Seeded polynomials of degree <= 3 scaled to the given norm in the space.
std::vector<AnalyticFn> decay_family(const SpaceSpec& space, int count, std::uint64_t seed, double target_norm = 0.1);

}  // namespace semiflow
