#include "kpp/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "kpp/errors.hpp"
#include "kpp/spectral.hpp"

namespace kpp::speeds {

namespace {

const char* media_class_name(const CoefficientField& field, SpeedMethod method) {
    if (method == SpeedMethod::Envelope) return "arbitrary";
    switch (field.kind()) {
    case FieldKind::Homogeneous: return "homogeneous";
    case FieldKind::Periodic: return "periodic";
    case FieldKind::Quasiperiodic: return "almost-periodic";
    case FieldKind::RandomShift:
        return field.spec().tie_dprime ? "random-ergodic" : "random-general";
    }
    return "?";
}

SpeedMethod resolve_auto(const CoefficientField& field) {
    switch (field.kind()) {
    case FieldKind::Homogeneous: return SpeedMethod::Closed;
    case FieldKind::Periodic: return SpeedMethod::Periodic;
    case FieldKind::Quasiperiodic: return SpeedMethod::Cell;
    case FieldKind::RandomShift:
        // general random d' has no mu cross-check; cell values are reported
        return field.spec().tie_dprime ? SpeedMethod::Random : SpeedMethod::Cell;
    }
    return SpeedMethod::Closed;
}

// golden-section minimize on [a,b]; f assumed unimodal there
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol) {
    const double R = 0.6180339887498949, C = 1.0 - R;
    double x1 = R * a + C * b, x2 = C * a + R * b;
    double f1 = f(x1), f2 = f(x2);
    while (b - a > rel_tol * (std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = R * a + C * b;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = C * a + R * b;
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

} // namespace

SpeedMethod parse_method(const std::string& name) {
    if (name == "auto") return SpeedMethod::Auto;
    if (name == "closed") return SpeedMethod::Closed;
    if (name == "periodic") return SpeedMethod::Periodic;
    if (name == "cell") return SpeedMethod::Cell;
    if (name == "random") return SpeedMethod::Random;
    if (name == "envelope") return SpeedMethod::Envelope;
    throw config_error("speed.method: unknown method '" + name + "'");
}

HamiltonianEvaluator::HamiltonianEvaluator(const CoefficientField& field, SpeedMethod method,
                                           const EigenOptions& opt)
    : field_(field), reflected_(field.reflected()), method_(method), opt_(opt) {
    if (method_ == SpeedMethod::Auto) method_ = resolve_auto(field_);
    if (method_ == SpeedMethod::Envelope) bounds_only_ = true;
    if (method_ == SpeedMethod::Random) {
        spectral::RandomCurveOptions ro;
        ro.range = opt_.random_range;
        ro.gamma_k_max = opt_.gamma_k_max;
        std::vector<long long> ks;
        for (long long k = 64; k <= opt_.gamma_k_max; k *= 2) ks.push_back(k);
        if (ks.empty() || ks.back() < 512) ks.push_back(512);
        double sched = spectral::gamma_infinity(field_, ks).value;
        gamma_est_ = std::max(sched, spectral::realization_gamma_floor(field_, ro.range));
        p_plateau_right_ = spectral::plateau_endpoint(field_, gamma_est_, ro);
        p_plateau_left_ = spectral::plateau_endpoint(reflected_, gamma_est_, ro);
    }
}

HamiltonianPoint HamiltonianEvaluator::point(double p) const {
    HamiltonianPoint pt;
    switch (method_) {
    case SpeedMethod::Closed:
        pt.lower = pt.upper =
            spectral::lambda_closed_form(field_.dprime(0), field_.d(0), field_.c(0), p);
        pt.tag = EigenMethod::ClosedForm;
        return pt;
    case SpeedMethod::Periodic: {
        int N = field_.kind() == FieldKind::Periodic ? field_.spec().period : 1;
        spectral::EigenEstimate est = spectral::lambda_periodic(field_, p, N);
        pt.lower = pt.upper = est.lambda;
        pt.residual = est.residual;
        pt.tag = est.method;
        return pt;
    }
    case SpeedMethod::Cell: {
        spectral::EigenEstimate est =
            spectral::lambda_limit(field_, p, opt_.eps_schedule, opt_.cell_window);
        pt.lower = pt.upper = est.lambda;
        pt.residual = est.residual;
        pt.eps = est.eps;
        pt.tag = EigenMethod::CellProblem;
        return pt;
    }
    case SpeedMethod::Random: {
        spectral::RandomCurveOptions ro;
        ro.range = opt_.random_range;
        ro.gamma_k_max = opt_.gamma_k_max;
        EigenMethod tag;
        if (p >= 0.0)
            pt.lower = spectral::lambda_random_point(field_, p, gamma_est_, p_plateau_right_, ro,
                                                     &tag);
        else
            pt.lower = spectral::lambda_random_point(reflected_, -p, gamma_est_, p_plateau_left_,
                                                     ro, &tag);
        pt.upper = pt.lower;
        pt.tag = tag;
        return pt;
    }
    case SpeedMethod::Envelope: {
        auto env = spectral::h_envelope(field_, opt_.cell_window, p);
        double gamma = spectral::lambda_dirichlet_window(field_, p, opt_.cell_window);
        pt.lower = std::max(env.first, gamma);
        pt.upper = env.second;
        pt.tag = EigenMethod::DirichletWindow;
        return pt;
    }
    case SpeedMethod::Auto: break;
    }
    throw numeric_error("speed", "unresolved hamiltonian method");
}

HamiltonianCurve hamiltonian_curve(const CoefficientField& field,
                                   const std::vector<double>& p_grid, SpeedMethod method,
                                   const EigenOptions& opt) {
    if (p_grid.size() < 3) throw config_error("speed: p grid needs at least 3 points");
    for (std::size_t i = 0; i + 1 < p_grid.size(); ++i)
        if (!(p_grid[i] < p_grid[i + 1]))
            throw config_error("speed: p grid must be strictly increasing");

    HamiltonianEvaluator eval(field, method, opt);
    HamiltonianCurve curve;
    curve.bounds_only = eval.bounds_only();
    curve.window_lo = opt.cell_window.lo;
    curve.window_hi = opt.cell_window.hi;
    for (double p : p_grid) {
        HamiltonianPoint pt = eval.point(p);
        curve.p.push_back(p);
        curve.h_lower.push_back(pt.lower);
        curve.h_upper.push_back(pt.upper);
        curve.method.push_back(pt.tag);
        curve.residual.push_back(pt.residual);
        curve.eps.push_back(pt.eps);
    }

    // invariants: ordering, the explicit growth bound, midpoint convexity
    FieldBounds fb = field.bounds();
    const double a0 = fb.D();
    const double a1 = (2.0 * fb.D_lower() - fb.C()) / fb.D();
    ValidationReport vr = validate_field(field, Nonlinearity::logistic(),
                                         Window{opt.cell_window.lo, opt.cell_window.hi});
    const double eps0 = vr.margin;
    for (std::size_t i = 0; i < curve.p.size(); ++i) {
        double lo = curve.h_lower[i], hi = curve.h_upper[i], p = curve.p[i];
        double slack = 1e-9 * (1.0 + std::abs(hi));
        if (lo > hi + slack)
            throw numeric_error("speed", "H_lower exceeded H_upper at p=" + std::to_string(p));
        if (!(lo > 0.0) || lo < eps0 - slack)
            throw numeric_error("speed", "H dropped below its positive floor at p=" +
                                             std::to_string(p));
        double growth = a0 * (std::exp(p) + std::exp(-p) - a1);
        if (hi > growth + slack)
            throw numeric_error("speed",
                                "H exceeded the a0(e^p + e^-p - a1) bound at p=" +
                                    std::to_string(p));
    }
    for (std::size_t i = 1; i + 1 < curve.p.size(); ++i) {
        double dl = curve.p[i] - curve.p[i - 1];
        double dr = curve.p[i + 1] - curve.p[i];
        if (std::abs(dl - dr) > 1e-12 * (dl + dr)) continue; // uniform triples only
        double mid = curve.h_upper[i];
        double chord = 0.5 * (curve.h_upper[i - 1] + curve.h_upper[i + 1]);
        if (mid > chord + 1e-6)
            throw numeric_error("speed", "H violated midpoint convexity at p=" +
                                             std::to_string(curve.p[i]));
    }
    return curve;
}

ConjugateCurve convex_conjugate(const HamiltonianCurve& curve, const std::vector<double>& q_grid) {
    if (curve.p.size() < 3) throw config_error("speed: conjugate needs a sampled curve");
    ConjugateCurve out;
    for (double q : q_grid) {
        std::size_t best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < curve.p.size(); ++k) {
            double v = curve.p[k] * q - curve.h_lower[k];
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        if (best == 0 || best + 1 == curve.p.size()) {
            double suggestion = 2.0 * std::max(std::abs(curve.p.front()), curve.p.back());
            throw config_error("speed: conjugate argmax at the grid edge for q=" +
                               std::to_string(q) + "; widen the p grid to about +-" +
                               std::to_string(suggestion));
        }
        // parabolic refinement through the three points around the argmax
        double x0 = curve.p[best - 1], x1 = curve.p[best], x2 = curve.p[best + 1];
        double f0 = x0 * q - curve.h_lower[best - 1];
        double f1 = x1 * q - curve.h_lower[best];
        double f2 = x2 * q - curve.h_lower[best + 1];
        double denom = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
        double value = f1;
        if (std::abs(denom) > 1e-300) {
            double xv = x1 - 0.5 *
                                 ((x1 - x0) * (x1 - x0) * (f1 - f2) -
                                  (x1 - x2) * (x1 - x2) * (f1 - f0)) /
                                 denom;
            if (xv > x0 && xv < x2) {
                // Lagrange evaluation at the vertex
                double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
                double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
                double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
                value = std::max(value, f0 * l0 + f1 * l1 + f2 * l2);
            }
        }
        ConjugateSample s;
        s.q = q;
        s.value = value;
        s.argmax_index = static_cast<int>(best);
        out.samples.push_back(s);
    }
    return out;
}

namespace {

struct DirectionalMin {
    double omega;
    double p_star;
    bool edge_hit;
    bool multimodal;
};

DirectionalMin minimize_speed(const std::function<double(double)>& h_neg, double a0, double a1) {
    // bracket from the explicit growth bound: walk past the point where the
    // bound doubles its own minimum
    auto bound = [&](double p) { return a0 * (std::exp(p) + std::exp(-p) - a1) / p; };
    auto [pb, gb] = golden_min(bound, 1e-3, 20.0, 1e-10);
    double p_max = pb;
    while (bound(p_max) < 2.0 * gb && p_max < 60.0) p_max *= 1.25;

    auto objective = [&](double p) { return h_neg(p) / p; };

    const int coarse_n = 25;
    std::vector<double> ps(coarse_n), fs(coarse_n);
    double lo = std::log(1e-3), hi = std::log(p_max);
    for (int i = 0; i < coarse_n; ++i) {
        ps[i] = std::exp(lo + (hi - lo) * i / (coarse_n - 1));
        fs[i] = objective(ps[i]);
    }
    int minima = 0, best_i = 0;
    for (int i = 1; i + 1 < coarse_n; ++i) {
        if (fs[i] < fs[i - 1] && fs[i] < fs[i + 1]) ++minima;
        if (fs[i] < fs[best_i]) best_i = i;
    }
    if (fs[0] < fs[best_i]) best_i = 0;
    if (fs[coarse_n - 1] < fs[best_i]) best_i = coarse_n - 1;

    DirectionalMin out{};
    out.multimodal = minima > 1;
    if (out.multimodal) {
        // sampling noise can fake extra dips; rescan on a fine grid
        const int fine_n = 400;
        double bestp = ps[best_i], bestf = fs[best_i];
        for (int i = 0; i < fine_n; ++i) {
            double p = std::exp(lo + (hi - lo) * i / (fine_n - 1));
            double f = objective(p);
            if (f < bestf) {
                bestf = f;
                bestp = p;
            }
        }
        double a = std::max(1e-3, bestp * 0.9), b = std::min(p_max, bestp * 1.1);
        auto [pstar, fstar] = golden_min(objective, a, b, 1e-8);
        out.p_star = pstar;
        out.omega = fstar;
    } else {
        double a = best_i > 0 ? ps[best_i - 1] : ps[0];
        double b = best_i + 1 < coarse_n ? ps[best_i + 1] : ps[coarse_n - 1];
        auto [pstar, fstar] = golden_min(objective, a, b, 1e-8);
        out.p_star = pstar;
        out.omega = fstar;
    }
    out.edge_hit = out.p_star < 1.2e-3 || out.p_star > 0.999 * p_max;
    return out;
}

} // namespace

SpeedReport spreading_speeds(const CoefficientField& field, SpeedMethod method,
                             const EigenOptions& opt) {
    ValidationReport vr =
        validate_field(field, Nonlinearity::logistic(), Window{-2048, 2048});
    if (!vr.pass) throw config_error("speed: field failed validation (margin " +
                                     std::to_string(vr.margin) + ")");

    HamiltonianEvaluator eval(field, method, opt);
    FieldBounds fb = field.bounds();
    const double a0 = fb.D();
    const double a1 = (2.0 * fb.D_lower() - fb.C()) / fb.D();

    SpeedReport rep;
    rep.media_class = media_class_name(field, eval.resolved());
    rep.bounds_only = eval.bounds_only();

    auto right_lower = [&](double p) { return eval.lower(-p); };
    auto right_upper = [&](double p) { return eval.upper(-p); };
    DirectionalMin right_lo = minimize_speed(right_lower, a0, a1);
    DirectionalMin right_hi =
        eval.bounds_only() ? minimize_speed(right_upper, a0, a1) : right_lo;

    HamiltonianEvaluator eval_left(field.reflected(), method, opt);
    auto left_lower = [&](double p) { return eval_left.lower(-p); };
    auto left_upper = [&](double p) { return eval_left.upper(-p); };
    DirectionalMin left_lo = minimize_speed(left_lower, a0, a1);
    DirectionalMin left_hi =
        eval_left.bounds_only() ? minimize_speed(left_upper, a0, a1) : left_lo;

    rep.omega_right_lower = right_lo.omega;
    rep.omega_right_upper = right_hi.omega;
    rep.omega_left_lower = left_lo.omega;
    rep.omega_left_upper = left_hi.omega;
    rep.p_star_right = right_lo.p_star;
    rep.p_star_left = left_lo.p_star;
    rep.edge_hit = right_lo.edge_hit || left_lo.edge_hit;
    rep.multimodal_fallback = right_lo.multimodal || left_lo.multimodal;
    rep.gap_diag = (rep.omega_right_upper - rep.omega_right_lower) /
                   std::max(rep.omega_right_upper, 1e-300);

    if (!(rep.omega_right_lower > 0.0) || !(rep.omega_left_lower > 0.0))
        throw numeric_error("speed", "spreading speed came out non-positive");
    if (rep.omega_right_lower > rep.omega_right_upper * (1.0 + 1e-12))
        throw numeric_error("speed", "omega_lower exceeded omega_upper");
    return rep;
}

SandwichReport sandwich_report(const CoefficientField& field, const Nonlinearity& nl,
                               const SimParams& sim, SpeedMethod method,
                               const EigenOptions& opt) {
    if (!(sim.horizon >= 100.0))
        throw config_error("speed: sandwich horizon must be >= 100");

    SandwichReport rep;
    rep.speeds = spreading_speeds(field, method, opt);

    dynamics::IntegrationPolicy policy;
    policy.snapshot_times = dynamics::uniform_times(0.0, sim.horizon, sim.snapshot_interval);
    policy.levels = sim.levels;
    dynamics::LatticeState init =
        dynamics::block_initial(sim.window, sim.initial_lo, sim.initial_hi);
    dynamics::Trajectory traj = dynamics::integrate(field, nl, init, sim.horizon, policy);

    const double t_fit0 = sim.horizon * (1.0 - sim.fit_fraction);
    bool all_inside = true;
    for (double level : sim.levels) {
        for (int dir : {+1, -1}) {
            dynamics::SpeedFit fit = dynamics::empirical_speed(traj, level, t_fit0, sim.horizon, dir);
            SandwichRow row;
            row.level = level;
            row.direction = dir;
            row.fitted_speed = dir > 0 ? fit.slope : -fit.slope;
            row.stderr_slope = fit.stderr_slope;
            row.omega_lower = dir > 0 ? rep.speeds.omega_right_lower : rep.speeds.omega_left_lower;
            row.omega_upper = dir > 0 ? rep.speeds.omega_right_upper : rep.speeds.omega_left_upper;
            row.inside = row.fitted_speed >= row.omega_lower * (1.0 - sim.tolerance) &&
                         row.fitted_speed <= row.omega_upper * (1.0 + sim.tolerance);
            all_inside = all_inside && row.inside;
            rep.rows.push_back(row);
        }
    }

    // the two spreading limits, checked directly at the final time
    const dynamics::LatticeState& fin = traj.snapshots.back();
    const double t_fin = fin.t;
    const double m_right = sim.margin_fraction * rep.speeds.omega_right_upper;
    const double m_left = sim.margin_fraction * rep.speeds.omega_left_upper;
    double ahead_r = 0.0, ahead_l = 0.0;
    double behind = 1.0;
    const auto edge_r = std::max(
        fin.lo, static_cast<long long>(std::ceil((rep.speeds.omega_right_upper + m_right) * t_fin)));
    const auto edge_l = std::min(
        fin.hi(),
        static_cast<long long>(std::ceil((rep.speeds.omega_left_upper + m_left) * t_fin)));
    for (long long i = edge_r; i <= fin.hi(); ++i) ahead_r = std::max(ahead_r, fin.at(i));
    for (long long i = -edge_l; i >= fin.lo; --i) ahead_l = std::max(ahead_l, fin.at(i));
    const auto cone_r = std::min(
        fin.hi(),
        static_cast<long long>(std::floor((rep.speeds.omega_right_lower - m_right) * t_fin)));
    const auto cone_l = std::min(
        fin.hi(),
        static_cast<long long>(std::floor((rep.speeds.omega_left_lower - m_left) * t_fin)));
    for (long long i = std::max(fin.lo, -cone_l); i <= cone_r; ++i)
        behind = std::min(behind, fin.at(i));

    rep.ahead_max_right = ahead_r;
    rep.ahead_max_left = ahead_l;
    rep.behind_min = behind;
    rep.ahead_ok = ahead_r < 0.01 && ahead_l < 0.01;
    rep.behind_ok = behind > 0.99;
    rep.pass = all_inside && rep.ahead_ok && rep.behind_ok;
    return rep;
}

} // namespace kpp::speeds
