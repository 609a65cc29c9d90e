#include "kpp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpp/errors.hpp"
#include "kpp/rng.hpp"

namespace kpp::dynamics {

namespace {
constexpr double kTimeMatchTol = 1e-9;
}

LatticeState block_initial(const Window& window, long long block_lo, long long block_hi) {
    if (block_lo < window.lo || block_hi > window.hi || block_lo > block_hi)
        throw config_error("dynamics: initial block must sit inside the window");
    LatticeState s;
    s.t = 0.0;
    s.lo = window.lo;
    s.u.assign(static_cast<std::size_t>(window.size()), 0.0);
    for (long long i = block_lo; i <= block_hi; ++i) s.at(i) = 1.0;
    return s;
}

std::vector<double> uniform_times(double t0, double t1, double interval) {
    if (!(interval > 0.0) || !(t1 > t0))
        throw config_error("dynamics: bad snapshot schedule parameters");
    std::vector<double> out;
    long long n = static_cast<long long>(std::ceil((t1 - t0) / interval - 1e-12));
    for (long long k = 1; k <= n; ++k) out.push_back(t0 + interval * static_cast<double>(k));
    out.back() = t1;
    return out;
}

const LatticeState& Trajectory::at_time(double t) const {
    for (const auto& s : snapshots)
        if (std::abs(s.t - t) < kTimeMatchTol) return s;
    throw config_error("dynamics: no snapshot at requested time");
}

bool Trajectory::has_time(double t) const {
    for (const auto& s : snapshots)
        if (std::abs(s.t - t) < kTimeMatchTol) return true;
    return false;
}

namespace {

struct Stencil {
    std::vector<double> dp, dd, cc;
};

// zero-flux ghost cells: both uniform equilibria stay exact, and the sentinel
// guard keeps fronts from ever feeling the walls
void derivative(const Stencil& st, const Nonlinearity& nl, const std::vector<double>& u,
                std::vector<double>& out) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        double right = (i + 1 < n) ? u[i + 1] : u[i];
        double left = (i > 0) ? u[i - 1] : u[i];
        out[i] = st.dp[i] * (right - u[i]) + st.dd[i] * (left - u[i]) + nl(st.cc[i], u[i]);
    }
}

} // namespace

Trajectory integrate(const CoefficientField& field, const Nonlinearity& nl,
                     const LatticeState& initial, double horizon,
                     const IntegrationPolicy& policy) {
    if (!(horizon > 0.0)) throw config_error("dynamics: horizon must be > 0");
    if (policy.snapshot_times.empty())
        throw config_error("dynamics: snapshot schedule is empty");
    for (std::size_t k = 0; k + 1 < policy.snapshot_times.size(); ++k)
        if (!(policy.snapshot_times[k] < policy.snapshot_times[k + 1]))
            throw config_error("dynamics: snapshot times must be strictly increasing");
    if (policy.snapshot_times.front() <= initial.t ||
        policy.snapshot_times.back() > initial.t + horizon + kTimeMatchTol)
        throw config_error("dynamics: snapshot times must lie in (t0, t0 + horizon]");
    for (double v : initial.u)
        if (!(v >= 0.0) || !(v <= 1.0))
            throw config_error("dynamics: initial data must lie in [0,1]");

    const Window win{initial.lo, initial.hi()};
    Stencil st{field.sample_dprime(win), field.sample_d(win), field.sample_c(win)};

    FieldBounds fb = field.bounds();
    const double stiff = 2.0 * fb.D() + std::max(fb.C(), 0.0);
    const double dt0 = policy.dt_factor / stiff;

    Trajectory traj;
    traj.diffusion_sup = fb.D();
    traj.diffusion_inf = fb.D_lower();
    traj.c_sup = fb.C();
    traj.dt = dt0;
    traj.snapshots.reserve(policy.snapshot_times.size() + 1);
    traj.snapshots.push_back(initial);

    const std::size_t n = initial.u.size();
    std::vector<double> u = initial.u;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    double t = initial.t;
    for (double target : policy.snapshot_times) {
        long long steps = std::max<long long>(
            1, static_cast<long long>(std::ceil((target - t) / dt0 - 1e-12)));
        double h = (target - t) / static_cast<double>(steps);
        for (long long s = 0; s < steps; ++s) {
            derivative(st, nl, u, k1);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
            derivative(st, nl, tmp, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
            derivative(st, nl, tmp, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
            derivative(st, nl, tmp, k4);
            for (std::size_t i = 0; i < n; ++i) {
                double v = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if (!std::isfinite(v))
                    throw numeric_error("dynamics", "non-finite value during integration");
                if (v < -policy.clamp_tol || v > 1.0 + policy.clamp_tol)
                    throw numeric_error("dynamics", "state left [0,1] beyond the clamp guard at t=" +
                                                        std::to_string(t));
                u[i] = std::clamp(v, 0.0, 1.0);
            }
        }
        t = target;
        if (u.front() > policy.sentinel_tol || u.back() > policy.sentinel_tol)
            throw numeric_error("dynamics",
                                "front reached the sentinel cells: window buffer too small");
        LatticeState snap;
        snap.t = t;
        snap.lo = initial.lo;
        snap.u = u;
        traj.snapshots.push_back(std::move(snap));
    }

    for (double level : policy.levels) {
        for (int dir : {+1, -1}) {
            FrontTrack track;
            track.level = level;
            track.direction = dir;
            for (const auto& s : traj.snapshots) {
                track.t.push_back(s.t);
                auto pos = front_position(s, level, dir);
                track.position.push_back(pos ? *pos
                                             : std::numeric_limits<double>::quiet_NaN());
            }
            traj.tracks.push_back(std::move(track));
        }
    }
    return traj;
}

std::optional<double> front_position(const LatticeState& state, double level, int direction) {
    if (!(level > 0.0) || !(level < 1.0))
        throw config_error("dynamics: front level must lie in (0,1)");
    if (direction != +1 && direction != -1)
        throw config_error("dynamics: front direction must be +1 or -1");
    const long long lo = state.lo, hi = state.hi();
    if (direction == +1) {
        for (long long i = hi; i >= lo; --i) {
            if (state.at(i) >= level) {
                if (i == hi) return static_cast<double>(i); // saturated to the edge
                double ui = state.at(i), un = state.at(i + 1);
                return static_cast<double>(i) + (ui - level) / (ui - un);
            }
        }
    } else {
        for (long long i = lo; i <= hi; ++i) {
            if (state.at(i) >= level) {
                if (i == lo) return static_cast<double>(i);
                double ui = state.at(i), un = state.at(i - 1);
                return static_cast<double>(i) - (ui - level) / (ui - un);
            }
        }
    }
    return std::nullopt;
}

SpeedFit empirical_speed(const Trajectory& traj, double level, double t0, double t1,
                         int direction) {
    const FrontTrack* track = nullptr;
    for (const auto& tr : traj.tracks)
        if (tr.level == level && tr.direction == direction) track = &tr;
    if (!track) throw config_error("dynamics: no front track for requested level/direction");

    std::vector<double> ts, xs;
    for (std::size_t k = 0; k < track->t.size(); ++k) {
        if (track->t[k] < t0 || track->t[k] > t1) continue;
        if (std::isnan(track->position[k])) continue;
        ts.push_back(track->t[k]);
        xs.push_back(track->position[k]);
    }
    const int n = static_cast<int>(ts.size());
    if (n < 10)
        throw config_error("dynamics: not enough snapshots with a front in the fit window (" +
                           std::to_string(n) + " < 10)");

    double tm = 0.0, xm = 0.0;
    for (int i = 0; i < n; ++i) {
        tm += ts[i];
        xm += xs[i];
    }
    tm /= n;
    xm /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (ts[i] - tm) * (ts[i] - tm);
        sxy += (ts[i] - tm) * (xs[i] - xm);
    }
    double slope = sxy / sxx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = xs[i] - xm - slope * (ts[i] - tm);
        ss += r * r;
    }
    SpeedFit fit;
    fit.level = level;
    fit.direction = direction;
    fit.slope = slope;
    fit.stderr_slope = (n > 2) ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    fit.t_begin = ts.front();
    fit.t_end = ts.back();
    fit.points = n;
    return fit;
}

HarnackReport harnack_check(const Trajectory& traj, double T, const SamplingPlan& plan) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < traj.snapshots.size(); ++a)
        for (std::size_t b = a + 1; b < traj.snapshots.size(); ++b)
            if (std::abs(traj.snapshots[b].t - traj.snapshots[a].t - T) < kTimeMatchTol)
                pairs.emplace_back(a, b);
    if (pairs.empty())
        throw config_error("dynamics: snapshot schedule contains no pair at lag T");

    HarnackReport rep;
    rep.lag = T;
    const double D = traj.diffusion_sup, Dl = traj.diffusion_inf;
    rep.theta = std::exp(2.0 * D * T) / std::min(1.0, Dl * T);

    long long made = 0;
    double worst = 0.0;
    for (long long s = 0; s < plan.count; ++s) {
        const auto& pr = pairs[index_hash(plan.seed, 1, s) % pairs.size()];
        const LatticeState& early = traj.snapshots[pr.first];
        const LatticeState& late = traj.snapshots[pr.second];
        // sample inside the hull of {u(t) >= floor}
        long long first = early.hi() + 1, last = early.lo - 1;
        for (long long i = early.lo; i <= early.hi(); ++i)
            if (early.at(i) >= plan.min_value) {
                first = std::min(first, i);
                last = std::max(last, i);
            }
        if (first > last) continue;
        first = std::max(first, early.lo + 1);
        last = std::min(last, early.hi() - 1);
        if (first > last) continue;
        long long span = last - first + 1;
        long long i = first + static_cast<long long>(index_hash(plan.seed, 2, s) %
                                                     static_cast<std::uint64_t>(span));
        int off = static_cast<int>(index_hash(plan.seed, 3, s) % 3ULL) - 1;
        long long j = i + off;
        double num = early.at(i), den = late.at(j);
        double ratio;
        if (den > 0.0)
            ratio = num / den;
        else
            ratio = (num > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
        worst = std::max(worst, ratio);
        ++made;
    }
    rep.samples = made;
    rep.max_ratio = worst;
    rep.pass = made > 0 && worst <= rep.theta * (1.0 + 1e-9);
    return rep;
}

HomogenizationTable homogenization_diag(const Trajectory& traj, double eps,
                                        const ConjugateCurve& hstar,
                                        const std::vector<double>& t_samples,
                                        const std::vector<double>& velocity_samples) {
    if (!(eps > 0.0)) throw config_error("dynamics: eps must be > 0");
    HomogenizationTable table;
    table.eps = eps;
    table.min_slack = std::numeric_limits<double>::infinity();
    for (double t : t_samples) {
        if (!(t > 0.0)) throw config_error("dynamics: homogenization samples need t > 0");
        const LatticeState& snap = traj.at_time(t / eps);
        for (double v : velocity_samples) {
            double x = v * t;
            long long j = static_cast<long long>(std::floor(x / eps));
            if (j < snap.lo || j > snap.hi())
                throw config_error("dynamics: homogenization sample outside the window");
            double u = snap.at(j);
            if (!(u > 0.0))
                throw numeric_error("dynamics",
                                    "u = 0 at positive time in the sampled region: integrator bug");
            HomogenizationRow row;
            row.t = t;
            row.x = x;
            row.z_eps = eps * std::log(u);
            row.bound = std::min(-t * hstar.eval(-x / t), 0.0);
            row.slack = row.z_eps - row.bound;
            table.rows.push_back(row);
            table.min_slack = std::min(table.min_slack, row.slack);
        }
    }
    return table;
}

} // namespace kpp::dynamics
