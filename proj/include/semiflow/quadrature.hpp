#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace semiflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Nodes and weights of a one-dimensional rule.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [0, 1].
Rule1D gauss_legendre(int n);

/// Gauss-Jacobi rule on [0, 1] for the weight u^alpha, alpha > -1.
/// The weights sum to 1 / (alpha + 1).
Rule1D gauss_jacobi(int n, double alpha);

/// Composite Gauss-Legendre integral over [a, b] with panels that shrink
/// geometrically toward b. Handles integrable endpoint singularities at b.
double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        int panels = 48, int nodes_per_panel = 16);

/// Composite Gauss-Legendre rule on [a, b] whose panels halve toward b; the
/// last panel ends at b. At most 40 panels.
Rule1D graded_rule(double a, double b, int panels, int nodes_per_panel);

/// Polynomial (Neville) extrapolation of the samples (x_i, y_i) to x = x0.
cplx neville_extrapolate(std::span<const double> xs, std::span<const cplx> ys, double x0 = 0.0);
double neville_extrapolate(std::span<const double> xs, std::span<const double> ys, double x0 = 0.0);

/// Uniform grid on the circle |z| = r with normalized weights 1/M.
class CircleGrid {
public:
    CircleGrid(double radius, int nodes);

    double radius() const noexcept { return radius_; }
    int size() const noexcept { return static_cast<int>(points_.size()); }
    double weight() const noexcept { return 1.0 / static_cast<double>(points_.size()); }
    double angle(int k) const noexcept { return kTwoPi * k / static_cast<double>(points_.size()); }
    const std::vector<cplx>& points() const noexcept { return points_; }

private:
    double radius_;
    std::vector<cplx> points_;
};

/// Weighted point set on the disk: sum_k w_k F(z_k) approximates an area
/// integral against the normalized measure dA = dx dy / pi, possibly with a
/// weight folded into w_k.
class DiskGrid {
public:
    DiskGrid() = default;
    DiskGrid(std::vector<cplx> points, std::vector<double> weights);

    /// Radial Gauss-Legendre (in r, carrying the 2r dr factor) times uniform angles.
    static DiskGrid area(int radial_nodes, int angular_nodes);

    /// Polar product grid from a radial rule already carrying the radial
    /// measure (weights sum to the total mass) and M uniform angles.
    static DiskGrid polar(const Rule1D& radial, int angular_nodes, double angle_offset = 0.0);

    const std::vector<cplx>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return points_.size(); }
    double total_weight() const;

private:
    std::vector<cplx> points_;
    std::vector<double> weights_;
};

}  // namespace semiflow
