#ifndef KPP_DYNAMICS_HPP
#define KPP_DYNAMICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "kpp/curves.hpp"
#include "kpp/field.hpp"

namespace kpp::dynamics {

struct LatticeState {
    double t = 0.0;
    long long lo = 0; // window [lo, lo + u.size() - 1]
    std::vector<double> u;

    long long hi() const { return lo + static_cast<long long>(u.size()) - 1; }
    double at(long long i) const { return u[static_cast<std::size_t>(i - lo)]; }
    double& at(long long i) { return u[static_cast<std::size_t>(i - lo)]; }
};

// u = 1 on [block_lo, block_hi], 0 elsewhere
LatticeState block_initial(const Window& window, long long block_lo, long long block_hi);

struct IntegrationPolicy {
    double dt_factor = 0.2;    // dt0 = dt_factor / (2 D + C)
    double clamp_tol = 1e-14;  // clamp guard: larger violations abort
    double sentinel_tol = 1e-10;
    std::vector<double> snapshot_times;  // strictly increasing, > initial time
    std::vector<double> levels = {0.1, 0.5, 0.9};
};

std::vector<double> uniform_times(double t0, double t1, double interval);

struct FrontTrack {
    double level = 0.5;
    int direction = +1;
    std::vector<double> t;
    std::vector<double> position; // NaN when no front present
};

struct Trajectory {
    std::vector<LatticeState> snapshots;
    std::vector<FrontTrack> tracks;
    double dt = 0.0;
    double diffusion_sup = 0.0;   // D
    double diffusion_inf = 0.0;   // D_lower
    double c_sup = 0.0;

    const LatticeState& at_time(double t) const; // throws if no snapshot matches
    bool has_time(double t) const;
};

Trajectory integrate(const CoefficientField& field, const Nonlinearity& nl,
                     const LatticeState& initial, double horizon,
                     const IntegrationPolicy& policy);

// Rightmost (direction +1) or leftmost (-1) level crossing with linear
// interpolation; max{i : u_i >= level} + (u_i - level)/(u_i - u_{i+1}).
// A crossing cell at the window edge returns the edge index itself.
// Returns nullopt when every value is below the level.
std::optional<double> front_position(const LatticeState& state, double level, int direction);

struct SpeedFit {
    double level = 0.5;
    int direction = +1;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double t_begin = 0.0, t_end = 0.0;
    int points = 0;
};

SpeedFit empirical_speed(const Trajectory& traj, double level, double t0, double t1,
                         int direction);

struct SamplingPlan {
    long long count = 1000;
    std::uint64_t seed = 2024;
    double min_value = 1e-100; // sample sites where u(t) clears this floor
};

struct HarnackReport {
    double lag = 0.0;
    double theta = 0.0; // e^{2 D T} / min{1, Dlow T}
    double max_ratio = 0.0;
    long long samples = 0;
    bool pass = false;
};

HarnackReport harnack_check(const Trajectory& traj, double T, const SamplingPlan& plan);

struct HomogenizationRow {
    double t = 0.0, x = 0.0;
    double z_eps = 0.0;  // eps * ln u(t/eps, [x/eps])
    double bound = 0.0;  // min{-t H*(-x/t), 0}
    double slack = 0.0;  // z_eps - bound
};

struct HomogenizationTable {
    double eps = 0.0;
    std::vector<HomogenizationRow> rows;
    double min_slack = 0.0;
};

// Samples the rescaled log-density z_eps on macro points (t, v t) and compares
// it with the Hamilton-Jacobi lower bound.  The trajectory must contain
// snapshots at t/eps for each requested macro time.
HomogenizationTable homogenization_diag(const Trajectory& traj, double eps,
                                        const ConjugateCurve& hstar,
                                        const std::vector<double>& t_samples,
                                        const std::vector<double>& velocity_samples);

} // namespace kpp::dynamics

#endif
