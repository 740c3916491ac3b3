#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "semiflow/cocycle.hpp"
#include "semiflow/spaces.hpp"

namespace semiflow {

/// f -> m (f o phi).
struct WeightedCompOp {
    AnalyticFn m;
    AnalyticFn phi;
    std::string label;
};

WeightedCompOp weighted_composition(AnalyticFn m, AnalyticFn phi, std::string label = "M_m C_phi");
WeightedCompOp multiplication_op(AnalyticFn m, std::string label = "M_m");
WeightedCompOp composition_op(AnalyticFn phi, std::string label = "C_phi");
WeightedCompOp identity_op();

AnalyticFn apply(const WeightedCompOp& op, const AnalyticFn& f);

using Matrix = Eigen::MatrixXcd;

/// Finite section in the orthonormal monomial basis of a p = 2 space.
struct OperatorMatrix {
    Matrix entries;
    std::string space;
    /// H^2-norm estimate of the part of T e_j beyond degree N, per column.
    std::vector<double> column_tail;

    Eigen::Index size() const { return entries.rows(); }
};

/// ||z^n|| for n < count in the space (1 for Hardy, the A^2_omega norm otherwise).
std::vector<double> monomial_norms(const SpaceSpec& space, std::size_t count);

/// A[i][j] = <T e_j, e_i>, from the Taylor coefficients of T z^j.
OperatorMatrix matrix(const WeightedCompOp& op, const SpaceSpec& space, std::size_t n);

/// Matrix of any linear map given through its action on functions.
OperatorMatrix matrix_of(const std::function<AnalyticFn(const AnalyticFn&)>& action, const SpaceSpec& space,
                         std::size_t n);

struct NormEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Largest singular value by power iteration on A* A from a fixed start vector.
NormEstimate norm2(const Matrix& a, int max_iters = 20000, double tol = 1e-12);
NormEstimate norm2(const OperatorMatrix& a, int max_iters = 20000, double tol = 1e-12);

struct NormStability {
    double value = 0.0;
    double half_value = 0.0;
    double change = 0.0;
    bool slow = false;
};

/// |norm2(N) - norm2(N / 2)|, flagged as slow when above 1e-3 relative.
NormStability norm2_stability(const WeightedCompOp& op, const SpaceSpec& space, std::size_t n = 64);

/// max ||T f|| / ||f|| over seeded random polynomials (degree <= 12) and
/// normalized reproducing-kernel type test functions.
double norm_lower_bound(const WeightedCompOp& op, const SpaceSpec& space, int trials, std::uint64_t seed);

/// S_t: m = m_t, phi = phi_t. A cocycle bound to a flow must be bound to sf.
WeightedCompOp semigroup_op(const Semiflow& sf, const Cocycle& cc, double t);

void write_matrix_csv(const std::string& path, const Matrix& a);
Matrix read_matrix_csv(const std::string& path);

}  // namespace semiflow
