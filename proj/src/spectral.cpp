#include "kpp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpp/errors.hpp"

namespace kpp {

const char* eigen_method_name(EigenMethod m) {
    switch (m) {
    case EigenMethod::ClosedForm: return "closed-form";
    case EigenMethod::PeriodicPerron: return "periodic-perron";
    case EigenMethod::CellProblem: return "cell-problem";
    case EigenMethod::LyapunovInverse: return "lyapunov-inverse";
    case EigenMethod::Plateau: return "plateau";
    case EigenMethod::DirichletWindow: return "dirichlet-window";
    }
    return "?";
}

double ConjugateCurve::eval(double q) const {
    if (samples.empty()) throw numeric_error("speed", "empty conjugate curve");
    if (q <= samples.front().q) return samples.front().value;
    if (q >= samples.back().q) return samples.back().value;
    std::size_t lo = 0, hi = samples.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (samples[mid].q <= q ? lo : hi) = mid;
    }
    double t = (q - samples[lo].q) / (samples[hi].q - samples[lo].q);
    return samples[lo].value + t * (samples[hi].value - samples[lo].value);
}

} // namespace kpp

namespace kpp::spectral {

namespace {

// ---------------------------------------------------------------- tridiag --

// (diag, lower, upper) x = rhs by the Thomas recurrence.  Valid for the
// definite and strictly dominant systems used here.
std::vector<double> thomas_solve(const std::vector<double>& diag,
                                 const std::vector<double>& lower,
                                 const std::vector<double>& upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> cp(n, 0.0);
    double piv = diag[0];
    if (piv == 0.0) throw numeric_error("eigen", "tridiagonal pivot breakdown");
    if (n > 1) cp[0] = upper[0] / piv;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i - 1] * cp[i - 1];
        if (piv == 0.0) throw numeric_error("eigen", "tridiagonal pivot breakdown");
        if (i + 1 < n) cp[i] = upper[i] / piv;
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
    return rhs;
}

int sturm_count_below(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    // number of eigenvalues < x via the LDL^T inertia recurrence
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        double b = off[i - 1];
        if (q == 0.0) q = -1e-300;
        q = diag[i] - x - b * b / q;
        if (q < 0.0) ++count;
    }
    return count;
}

double sturm_largest(const std::vector<double>& diag, const std::vector<double>& off) {
    const std::size_t n = diag.size();
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const int k = static_cast<int>(n);
    const double tol = 1e-12;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count_below(diag, off, mid) == k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Inverse iteration with the shift placed just above the top eigenvalue, so
// the shifted matrix is negative definite and the unpivoted solve is stable.
std::vector<double> inverse_iteration(const std::vector<double>& diag,
                                      const std::vector<double>& off, double lambda) {
    const std::size_t n = diag.size();
    double scale = std::abs(lambda) + 1.0;
    double shift = lambda + 1e-11 * scale;
    std::vector<double> sh(n), low(off), up(off);
    for (std::size_t i = 0; i < n; ++i) sh[i] = diag[i] - shift;
    std::vector<double> x(n, 1.0);
    for (int it = 0; it < 4; ++it) {
        x = thomas_solve(sh, low, up, std::move(x));
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        if (!(m > 0.0) || !std::isfinite(m))
            throw numeric_error("eigen", "inverse iteration breakdown");
        for (double& v : x) v /= m;
    }
    double mx = 0.0;
    for (double v : x)
        if (std::abs(v) > std::abs(mx)) mx = v;
    if (mx < 0.0)
        for (double& v : x) v = -v;
    double peak = *std::max_element(x.begin(), x.end());
    for (double& v : x) v /= peak;
    return x;
}

void require_tied(const CoefficientField& field, long long lo, long long hi) {
    for (long long i = lo; i <= hi; ++i)
        if (field.dprime(i) != field.d(i + 1))
            throw config_error("eigen: field violates d'_i = d_{i+1} at index " +
                               std::to_string(i));
}

struct TiedWindowData {
    long long lo; // d,c sampled on [lo, hi+1]
    std::vector<double> d;
    std::vector<double> c;
    double dv(long long i) const { return d[static_cast<std::size_t>(i - lo)]; }
    double cv(long long i) const { return c[static_cast<std::size_t>(i - lo)]; }
};

TiedWindowData sample_tied(const CoefficientField& field, long long lo, long long hi) {
    TiedWindowData w;
    w.lo = lo;
    w.d.reserve(static_cast<std::size_t>(hi - lo + 2));
    w.c.reserve(static_cast<std::size_t>(hi - lo + 2));
    for (long long i = lo; i <= hi + 1; ++i) {
        w.d.push_back(field.d(i));
        w.c.push_back(field.c(i));
    }
    return w;
}

// Backward continued-fraction sweep for the forward ratios s_i = u_{i+1}/u_i
// of the decaying solution.  Seeding s = 0 at the far right makes the sweep
// identical (in exact arithmetic) to the nested Dirichlet problems w^{(k)}
// with w_{k+1} = 0, and the backward direction is the stable one for the
// minimal solution.  g_i = gamma + d_i + d_{i+1} - c_i.
std::vector<double> ratio_sweep(const TiedWindowData& w, double gamma, long long lo, long long hi,
                                long long far_right) {
    auto advance = [&](double s, long long i) {
        double g = gamma + w.dv(i) + w.dv(i + 1) - w.cv(i);
        double denom = g - w.dv(i + 1) * s;
        if (!(denom > 0.0))
            throw numeric_error("eigen", "decaying solution lost positivity; gamma too close to "
                                         "Gamma_infty for this window");
        return w.dv(i) / denom;
    };
    double s = 0.0;
    for (long long i = far_right; i > hi; --i) s = advance(s, i); // s becomes s_{i-1}
    std::vector<double> out(static_cast<std::size_t>(hi - lo + 1));
    out[static_cast<std::size_t>(hi - lo)] = s;
    for (long long i = hi; i > lo; --i) {
        s = advance(s, i);
        out[static_cast<std::size_t>(i - 1 - lo)] = s;
    }
    return out;
}

constexpr long long kMaxRatioBuffer = 1 << 13;

// ratios on [lo,hi] with the Dirichlet buffer doubled until they settle
std::vector<double> stable_ratios(const CoefficientField& field, double gamma, long long lo,
                                  long long hi) {
    long long buffer = 128;
    TiedWindowData w = sample_tied(field, lo, hi + buffer + 2);
    std::vector<double> prev = ratio_sweep(w, gamma, lo, hi, hi + buffer);
    while (buffer < kMaxRatioBuffer) {
        buffer *= 2;
        w = sample_tied(field, lo, hi + buffer + 2);
        std::vector<double> next = ratio_sweep(w, gamma, lo, hi, hi + buffer);
        double worst = 0.0;
        for (std::size_t k = 0; k < next.size(); ++k)
            worst = std::max(worst, std::abs(next[k] - prev[k]) / next[k]);
        prev = std::move(next);
        if (worst < 1e-13) return prev;
    }
    throw numeric_error("eigen", "decaying-solution ratios failed to settle");
}

// u_1(gamma, .) of the shifted field from independent nested Dirichlet solves
double local_u1(const CoefficientField& field, double gamma) {
    long long K = 64;
    double prev = -1.0, u1 = 0.0;
    for (int round = 0; round < 20; ++round, K *= 2) {
        std::vector<double> diag(static_cast<std::size_t>(K)), lower, upper,
            rhs(static_cast<std::size_t>(K), 0.0);
        lower.reserve(static_cast<std::size_t>(K));
        upper.reserve(static_cast<std::size_t>(K));
        for (long long i = 1; i <= K; ++i) {
            double di = field.d(i), di1 = field.d(i + 1);
            diag[static_cast<std::size_t>(i - 1)] = gamma + di + di1 - field.c(i);
            if (i < K) {
                upper.push_back(-di1);
                lower.push_back(-di1);
            }
        }
        rhs[0] = field.d(1);
        u1 = thomas_solve(diag, lower, upper, std::move(rhs))[0];
        if (prev >= 0.0 && std::abs(u1 - prev) <= 1e-13 * u1) return u1;
        prev = u1;
    }
    return u1;
}

struct MuResult {
    double mu, nu;
};

MuResult mu_from_chain(const CoefficientField& field, double gamma, long long range) {
    std::vector<double> s = stable_ratios(field, gamma, -range, range);
    double acc = 0.0;
    for (long long i = 0; i < range; ++i) acc += std::log(s[static_cast<std::size_t>(i + range)]);
    double mu = -acc / static_cast<double>(range);
    acc = 0.0;
    for (long long i = -range; i < 0; ++i)
        acc += std::log(s[static_cast<std::size_t>(i + range)]);
    double nu = -acc / static_cast<double>(range);
    return {mu, nu};
}

} // namespace

// ------------------------------------------------------------- envelopes --

double h_value(double dprime, double d, double c, double p) {
    return dprime * std::exp(p) + d * std::exp(-p) - dprime - d + c;
}

std::pair<double, double> h_envelope(const CoefficientField& field, const Window& w, double p) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (long long i = w.lo; i <= w.hi; ++i) {
        double h = h_value(field.dprime(i), field.d(i), field.c(i), p);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    return {lo, hi};
}

double lambda_closed_form(double dprime, double d, double c, double p) {
    if (!(dprime > 0.0) || !(d > 0.0))
        throw config_error("eigen: closed form needs positive diffusion rates");
    return h_value(dprime, d, c, p);
}

double realization_gamma_floor(const CoefficientField& field, long long range) {
    long long reach = range + kMaxRatioBuffer + 2;
    std::vector<double> diag(static_cast<std::size_t>(2 * reach + 1)), off;
    off.reserve(diag.size());
    for (long long i = -reach; i <= reach; ++i) {
        double di = field.d(i), di1 = field.d(i + 1);
        diag[static_cast<std::size_t>(i + reach)] = field.c(i) - di - di1;
        if (i < reach) off.push_back(di1);
    }
    return sturm_largest(diag, off);
}

// -------------------------------------------------------- certificates ----

void CertificateFunction::measure() {
    max_ratio_up = max_ratio_down = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        double diff = values[i + 1] - values[i];
        max_ratio_up = std::max(max_ratio_up, std::abs(diff) / values[i]);
        max_ratio_down = std::max(max_ratio_down, std::abs(diff) / values[i + 1]);
    }
    auto end_slope = [&](long long i) {
        if (i == 0) return 0.0;
        return std::log(at(i)) / static_cast<double>(i);
    };
    end_log_slope_left = end_slope(window.lo);
    end_log_slope_right = end_slope(window.hi);
}

AdmissibilityReport admissibility_check(const CertificateFunction& cand,
                                        const AdmissibilityTolerances& tol) {
    AdmissibilityReport r;
    r.positive = std::all_of(cand.values.begin(), cand.values.end(),
                             [](double v) { return v > 0.0 && std::isfinite(v); });
    r.max_ratio_up = cand.max_ratio_up;
    r.max_ratio_down = cand.max_ratio_down;
    r.end_log_slope_left = cand.end_log_slope_left;
    r.end_log_slope_right = cand.end_log_slope_right;
    r.ratios_bounded = r.positive && cand.max_ratio_up <= tol.ratio_bound &&
                       cand.max_ratio_down <= tol.ratio_bound;
    r.log_slope_ok = std::abs(cand.end_log_slope_left) <= tol.log_slope_tol &&
                     std::abs(cand.end_log_slope_right) <= tol.log_slope_tol;
    r.pass = r.positive && r.ratios_bounded && r.log_slope_ok;
    return r;
}

// --------------------------------------------------------------- Perron ---

EigenEstimate lambda_periodic(const CoefficientField& field, double p, int N,
                              CertificateFunction* certificate) {
    if (N < 1) throw config_error("eigen: period must be >= 1");
    if (field.kind() == FieldKind::Periodic && field.spec().period != N)
        throw config_error("eigen: period " + std::to_string(N) + " does not match field period " +
                           std::to_string(field.spec().period));
    if (field.kind() != FieldKind::Periodic && field.kind() != FieldKind::Homogeneous)
        throw config_error("eigen: lambda_periodic needs a periodic field");

    const std::size_t n = static_cast<std::size_t>(N);
    std::vector<double> dp(n), dd(n), cc(n);
    for (std::size_t i = 0; i < n; ++i) {
        dp[i] = field.dprime(static_cast<long long>(i));
        dd[i] = field.d(static_cast<long long>(i));
        cc[i] = field.c(static_cast<long long>(i));
    }
    const double ep = std::exp(p), em = std::exp(-p);

    // dense N x N cyclic wrap; row i couples to (i+1)%N and (i-1+N)%N
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        M[i][i] += cc[i] - dp[i] - dd[i];
        M[i][(i + 1) % n] += dp[i] * ep;
        M[i][(i + n - 1) % n] += dd[i] * em;
        shift = std::max(shift, dp[i] * ep + dd[i] * em + std::abs(cc[i]));
    }
    shift += 1.0;

    std::vector<double> x(n, 1.0), y(n);
    double lambda = 0.0;
    bool converged = false;
    double gap_hint = 0.0;
    const long long max_iter = 100000;
    for (long long it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = shift * x[i];
            for (std::size_t j = 0; j < n; ++j) acc += M[i][j] * x[j];
            y[i] = acc;
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += y[i] * x[i];
            den += x[i] * x[i];
        }
        double mu = num / den; // Rayleigh quotient of M + shift I
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::abs(y[i] - mu * x[i]));
        double peak = 0.0;
        for (double v : y) peak = std::max(peak, std::abs(v));
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / peak;
        double prev = lambda;
        lambda = mu - shift;
        if (resid < 5e-14 * mu && it > 2) {
            converged = true;
            break;
        }
        gap_hint = std::abs(lambda - prev);
    }
    if (!converged)
        throw numeric_error("eigen", "periodic Perron power iteration did not converge; last "
                                     "eigenvalue increment " +
                                         std::to_string(gap_hint));

    double xmin = *std::min_element(x.begin(), x.end());
    if (!(xmin > 0.0))
        throw numeric_error("eigen", "Perron eigenvector not strictly positive");

    EigenEstimate est;
    est.p = p;
    est.lambda = lambda;
    est.method = (N == 1) ? EigenMethod::ClosedForm : EigenMethod::PeriodicPerron;
    est.window = {0, std::max<long long>(4LL * N, 16)};

    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lp = dp[i] * ep * x[(i + 1) % n] + dd[i] * em * x[(i + n - 1) % n] +
                    (cc[i] - dp[i] - dd[i]) * x[i];
        resid = std::max(resid, std::abs(lp - lambda * x[i]) / x[i]);
    }
    est.residual = resid;
    if (resid >= 1e-8)
        throw numeric_error("eigen", "periodic Perron residual " + std::to_string(resid) +
                                         " above the 1e-8 contract");

    auto env = h_envelope(field, {0, N - 1}, p);
    const double slack = 1e-9 * (1.0 + std::abs(lambda));
    if (lambda < env.first - slack || lambda > env.second + slack)
        throw numeric_error("eigen", "periodic eigenvalue escaped the h_i(p) envelope");

    if (certificate) {
        CertificateFunction cert;
        cert.window = est.window;
        cert.values.resize(static_cast<std::size_t>(cert.window.size()));
        for (long long i = cert.window.lo; i <= cert.window.hi; ++i)
            cert.values[static_cast<std::size_t>(i - cert.window.lo)] =
                x[static_cast<std::size_t>(((i % N) + N) % N)];
        cert.measure();
        *certificate = std::move(cert);
    }
    return est;
}

// --------------------------------------------------------- cell problem ---

namespace {

struct CellRing {
    std::vector<double> a;  // d'_i e^p
    std::vector<double> b;  // d_i e^-p
    std::vector<double> ct; // c_i - d'_i - d_i
};

CellRing sample_ring(const CoefficientField& field, double p, const Window& win) {
    const auto L = static_cast<std::size_t>(win.size());
    CellRing r;
    r.a.resize(L);
    r.b.resize(L);
    r.ct.resize(L);
    const double ep = std::exp(p), em = std::exp(-p);
    for (long long i = win.lo; i <= win.hi; ++i) {
        auto k = static_cast<std::size_t>(i - win.lo);
        double dp = field.dprime(i), dd = field.d(i), cc = field.c(i);
        r.a[k] = dp * ep;
        r.b[k] = dd * em;
        r.ct[k] = cc - dp - dd;
    }
    return r;
}

double cell_residual_norm(const CellRing& r, const std::vector<double>& w, double eps,
                          std::vector<double>* out = nullptr) {
    const std::size_t L = w.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        std::size_t ip = (i + 1) % L, im = (i + L - 1) % L;
        double f = eps * w[i] - r.a[i] * std::exp(w[ip] - w[i]) - r.b[i] * std::exp(w[im] - w[i]) -
                   r.ct[i];
        if (out) (*out)[i] = f;
        worst = std::max(worst, std::abs(f));
    }
    return worst;
}

// cyclic tridiagonal solve (Sherman-Morrison over Thomas)
std::vector<double> cyclic_solve(std::vector<double> diag, const std::vector<double>& lower,
                                 const std::vector<double>& upper, double corner_lo,
                                 double corner_hi, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    const double gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= corner_lo * corner_hi / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner_hi;
    std::vector<double> y = thomas_solve(diag, lower, upper, std::move(rhs));
    std::vector<double> z = thomas_solve(diag, lower, upper, std::move(u));
    double vy = y[0] + (corner_lo / gamma) * y[n - 1];
    double vz = z[0] + (corner_lo / gamma) * z[n - 1];
    double factor = vy / (1.0 + vz);
    for (std::size_t i = 0; i < n; ++i) y[i] -= factor * z[i];
    return y;
}

} // namespace

// The design note calls for per-site monotone sweeps; a damped Newton solve of
// the same ring system reaches the identical fixed point (the comparison
// principle gives uniqueness) in a few iterations independent of eps, so the
// sweep is kept as a fallback only.
CellSolution solve_cell_problem(const CoefficientField& field, double p, double eps,
                                const Window& window, const std::vector<double>* warm_start) {
    if (!(eps > 0.0)) throw config_error("eigen: cell problem needs eps > 0");
    if (window.size() < 64) throw config_error("eigen: cell window length must be >= 64");
    const auto L = static_cast<std::size_t>(window.size());
    if (window.lo > 0 || window.hi < 0)
        throw config_error("eigen: cell window must contain the origin");
    CellRing ring = sample_ring(field, p, window);

    std::vector<double> w(L, 0.0);
    if (warm_start && warm_start->size() == L) w = *warm_start;

    double cmax = 0.0;
    for (double v : ring.ct) cmax = std::max(cmax, std::abs(v));
    const double tol = 1e-12 * (1.0 + cmax);
    std::vector<double> f(L);
    double fn = cell_residual_norm(ring, w, eps, &f);

    bool converged = fn < tol;
    for (int it = 0; it < 200 && !converged; ++it) {
        std::vector<double> diag(L), lower(L - 1), upper(L - 1), rhs(L);
        double corner_lo = 0.0, corner_hi = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            std::size_t ip = (i + 1) % L, im = (i + L - 1) % L;
            double Ea = ring.a[i] * std::exp(w[ip] - w[i]);
            double Eb = ring.b[i] * std::exp(w[im] - w[i]);
            diag[i] = eps + Ea + Eb;
            rhs[i] = -f[i];
            if (i + 1 < L)
                upper[i] = -Ea;
            else
                corner_hi = -Ea; // row L-1 wraps to column 0
            if (i > 0)
                lower[i - 1] = -Eb;
            else
                corner_lo = -Eb; // row 0 wraps to column L-1
        }
        std::vector<double> step = cyclic_solve(std::move(diag), lower, upper, corner_lo,
                                                corner_hi, std::move(rhs));
        double damp = 1.0;
        for (int half = 0; half < 40; ++half) {
            std::vector<double> trial(L);
            for (std::size_t i = 0; i < L; ++i) trial[i] = w[i] + damp * step[i];
            double ft = cell_residual_norm(ring, trial, eps);
            if (ft < fn || ft < tol) {
                w = std::move(trial);
                fn = ft;
                break;
            }
            damp *= 0.5;
        }
        fn = cell_residual_norm(ring, w, eps, &f);
        if (fn < tol) converged = true;
    }

    if (!converged) {
        // fallback: Gauss-Seidel sweeps, scalar monotone root-solve per site
        long long sweeps = 0;
        while (fn >= tol && sweeps < 1000000) {
            for (std::size_t i = 0; i < L; ++i) {
                std::size_t ip = (i + 1) % L, im = (i + L - 1) % L;
                double x = w[i];
                for (int nit = 0; nit < 60; ++nit) {
                    double Ea = ring.a[i] * std::exp(w[ip] - x);
                    double Eb = ring.b[i] * std::exp(w[im] - x);
                    double g = eps * x - Ea - Eb - ring.ct[i];
                    double gp = eps + Ea + Eb;
                    double dx = g / gp;
                    x -= dx;
                    if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
                }
                w[i] = x;
            }
            fn = cell_residual_norm(ring, w, eps);
            ++sweeps;
        }
        if (fn >= tol)
            throw numeric_error("eigen", "cell problem did not converge (residual " +
                                             std::to_string(fn) + ")");
    }

    CellSolution sol;
    sol.p = p;
    sol.eps = eps;
    sol.window = window;
    sol.residual = fn;
    sol.lambda_estimate = eps * w[static_cast<std::size_t>(0 - window.lo)];

    double csup = 0.0, dbar = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        csup = std::max(csup, std::abs(ring.ct[i]));
        dbar = std::max(dbar, std::max(ring.a[i], ring.b[i]));
    }
    auto [wmin_it, wmax_it] = std::minmax_element(w.begin(), w.end());
    if (*wmin_it < -csup / eps - 1e-9 || *wmax_it > (2.0 * dbar + csup) / eps + 1e-9)
        throw numeric_error("eigen", "cell solution escaped its Perron bounds");

    sol.oscillation_full = eps * (*wmax_it - *wmin_it);

    // the ring seam carries a boundary layer when the field is not truly
    // window-periodic; the core oscillation is the headline diagnostic
    std::size_t q = L / 4;
    double lo2 = std::numeric_limits<double>::infinity(), hi2 = -lo2;
    for (std::size_t i = q; i < L - q; ++i) {
        lo2 = std::min(lo2, w[i]);
        hi2 = std::max(hi2, w[i]);
    }
    sol.oscillation = eps * (hi2 - lo2);

    double interior = 0.0;
    for (std::size_t i = 0; i + 1 < L; ++i)
        interior = std::max(interior, std::abs(w[i + 1] - w[i]));
    sol.interior_increment = interior;
    sol.seam_increment = std::abs(w[0] - w[L - 1]);
    sol.seam_warning = sol.seam_increment > 10.0 * std::max(interior, 1e-300);

    sol.w = std::move(w);
    return sol;
}

EigenEstimate lambda_limit(const CoefficientField& field, double p,
                           const std::vector<double>& eps_schedule, const Window& window,
                           CertificateFunction* certificate) {
    if (eps_schedule.size() < 3)
        throw config_error("eigen: eps schedule needs at least 3 entries");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] > eps_schedule[i + 1]))
            throw config_error("eigen: eps schedule must be strictly decreasing");

    EigenEstimate est;
    est.p = p;
    est.method = EigenMethod::CellProblem;
    est.window = window;
    est.eps_schedule = eps_schedule;

    std::vector<double> warm;
    CellSolution last;
    for (double eps : eps_schedule) {
        if (!warm.empty()) {
            double ratio = last.eps / eps; // w scales like lambda/eps
            for (double& v : warm) v *= ratio;
        }
        last = solve_cell_problem(field, p, eps, window, warm.empty() ? nullptr : &warm);
        warm = last.w;
        est.raw_values.push_back(last.lambda_estimate);
        est.oscillations.push_back(last.oscillation);
    }
    est.eps = eps_schedule.back();

    // oscillation diags growing as eps shrinks suggests the window is too
    // small for the almost-periodic structure
    for (std::size_t i = 0; i + 1 < est.oscillations.size(); ++i)
        if (est.oscillations[i + 1] > est.oscillations[i] * (1.0 + 1e-9) + 1e-12)
            est.almost_periodic_suspect = true;

    // linear-in-eps Richardson from the last two entries
    const std::size_t m = est.raw_values.size();
    double e1 = eps_schedule[m - 2], e2 = eps_schedule[m - 1];
    double v1 = est.raw_values[m - 2], v2 = est.raw_values[m - 1];
    est.lambda = v2 + (v2 - v1) * e2 / (e1 - e2);

    // phi = exp(w - w_0) turns the site equation into L_p phi / phi = eps w_i,
    // so the eigen-relation defect on the core is |eps w_i - lambda|
    const auto L = static_cast<std::size_t>(window.size());
    std::size_t q = L / 4;
    double resid = 0.0;
    for (std::size_t i = q; i < L - q; ++i)
        resid = std::max(resid, std::abs(est.eps * last.w[i] - est.lambda));
    est.residual = resid;
    if (resid >= 10.0 * est.eps)
        throw numeric_error("eigen", "cell-problem residual " + std::to_string(resid) +
                                         " exceeded 10 eps; window too small for this medium");

    auto env = h_envelope(field, window, p);
    const double slack = 1e-9 * (1.0 + std::abs(est.lambda));
    if (est.lambda < env.first - slack || est.lambda > env.second + slack)
        throw numeric_error("eigen", "cell-problem eigenvalue escaped the h_i(p) envelope");

    if (certificate) {
        CertificateFunction cert;
        cert.window = window;
        cert.values.resize(L);
        double w0 = last.w[static_cast<std::size_t>(0 - window.lo)];
        for (std::size_t i = 0; i < L; ++i) cert.values[i] = std::exp(last.w[i] - w0);
        cert.measure();
        if (!admissibility_check(cert).pass)
            throw numeric_error("eigen", "cell certificate failed the admissibility conditions");
        *certificate = std::move(cert);
    }
    return est;
}

// ------------------------------------------------- random-media pipeline --

double tridiag_principal(const CoefficientField& field, long long l, long long k,
                         std::vector<double>* eigenvector) {
    if (k < 1) throw config_error("eigen: block size k must be >= 1");
    require_tied(field, l, l + k + 1);
    std::vector<double> diag(static_cast<std::size_t>(k)), off;
    off.reserve(static_cast<std::size_t>(k));
    for (long long i = l + 1; i <= l + k; ++i) {
        double di = field.d(i), di1 = field.d(i + 1);
        diag[static_cast<std::size_t>(i - l - 1)] = field.c(i) - di - di1;
        if (i < l + k) off.push_back(di1);
    }
    double lambda = sturm_largest(diag, off);
    if (eigenvector) {
        if (k == 1) {
            *eigenvector = {1.0};
        } else {
            *eigenvector = inverse_iteration(diag, off, lambda);
            for (double v : *eigenvector)
                if (!(v > 0.0))
                    throw numeric_error("eigen", "Dirichlet principal eigenvector not positive");
        }
    }
    return lambda;
}

GammaEstimate gamma_infinity(const CoefficientField& field,
                             const std::vector<long long>& k_schedule) {
    if (k_schedule.empty() || k_schedule.back() < 512)
        throw config_error("eigen: gamma_infinity schedule must reach k >= 512");
    for (std::size_t i = 0; i + 1 < k_schedule.size(); ++i)
        if (!(k_schedule[i] < k_schedule[i + 1]))
            throw config_error("eigen: gamma_infinity schedule must be increasing");

    GammaEstimate g;
    g.k_schedule = k_schedule;
    double prev = -std::numeric_limits<double>::infinity();
    for (long long k : k_schedule) {
        double v = tridiag_principal(field, 0, k);
        if (v < prev - 1e-12)
            throw numeric_error("eigen", "Gamma_{0,k} not monotone in k: solver bug");
        g.gamma_0k.push_back(v);
        prev = v;
    }
    g.value = g.gamma_0k.back();
    long long kmax = k_schedule.back();
    g.gamma_symmetric = tridiag_principal(field, -kmax, kmax);
    g.gamma_centered = tridiag_principal(field, -kmax, 2 * kmax);
    g.window_family_gap = std::abs(g.value - g.gamma_symmetric);
    return g;
}

DecaySolution decaying_solution(const CoefficientField& field, double gamma, const Window& window,
                                double gamma_infinity_estimate, double margin) {
    if (!(gamma > gamma_infinity_estimate + margin))
        throw config_error("eigen: no positive decaying solution below Gamma_infty (need gamma > "
                           "estimate + margin)");
    if (window.lo > 0 || window.hi < 1)
        throw config_error("eigen: decay window must contain the origin");
    require_tied(field, window.lo - 1, window.hi + 1);

    DecaySolution sol;
    sol.gamma = gamma;
    sol.window = window;

    std::vector<double> s = stable_ratios(field, gamma, window.lo, window.hi);
    sol.log_ratio.resize(static_cast<std::size_t>(window.size() - 1));
    for (std::size_t i = 0; i + 1 < s.size(); ++i) sol.log_ratio[i] = std::log(s[i]);

    // log-accumulate so wide windows cannot overflow silently
    const auto L = static_cast<std::size_t>(window.size());
    const auto zero_pos = static_cast<std::size_t>(0 - window.lo);
    std::vector<double> logu(L, 0.0);
    for (std::size_t i = zero_pos; i + 1 < L; ++i) logu[i + 1] = logu[i] + std::log(s[i]);
    for (std::size_t i = zero_pos; i-- > 0;) logu[i] = logu[i + 1] - std::log(s[i]);
    double logmax = *std::max_element(logu.begin(), logu.end());
    if (logmax > 700.0)
        throw numeric_error("eigen", "decaying solution overflows double on this window; use the "
                                     "stored log-ratios instead");
    sol.u.resize(L);
    for (std::size_t i = 0; i < L; ++i) sol.u[i] = std::exp(logu[i]);

    // cross-check against the nested Dirichlet construction (tridiagonal
    // solves with increasing k), which is the defining limit
    if (window.hi >= 1) {
        long long k = std::max<long long>(64, 2 * window.hi + 64);
        std::vector<double> diag(static_cast<std::size_t>(k)), lower, upper,
            rhs(static_cast<std::size_t>(k), 0.0);
        lower.reserve(static_cast<std::size_t>(k));
        upper.reserve(static_cast<std::size_t>(k));
        for (long long i = 1; i <= k; ++i) {
            double di = field.d(i), di1 = field.d(i + 1);
            diag[static_cast<std::size_t>(i - 1)] = gamma + di + di1 - field.c(i);
            if (i < k) {
                upper.push_back(-di1);
                lower.push_back(-di1);
            }
        }
        rhs[0] = field.d(1);
        std::vector<double> ucheck = thomas_solve(diag, lower, upper, std::move(rhs));
        for (long long i = 1; i <= window.hi; ++i) {
            double ref = ucheck[static_cast<std::size_t>(i - 1)];
            if (ref > 1e-280) {
                double rel = std::abs(sol.at(i) - ref) / ref;
                if (rel > 1e-9)
                    throw numeric_error("eigen",
                                        "ratio sweep disagrees with the Dirichlet construction");
            }
        }
    }

    // two-sided per-site ratio bound straight from the equation
    FieldBounds fb = field.bounds();
    sol.bound_base = fb.D_lower() / (gamma - fb.c_min + 2.0 * fb.D());
    for (std::size_t i = 0; i + 1 < L; ++i) {
        if (s[i] < sol.bound_base * (1.0 - 1e-12) || 1.0 / s[i] < sol.bound_base * (1.0 - 1e-12))
            throw numeric_error("eigen", "decay solution violated its two-sided ratio bound");
    }

    // explicit exponential-estimate constants from the energy argument:
    // choose delta with C_delta + D(e^d - 1) + Dlow(e^-d - 1) <= (gamma-Gamma)/2,
    // C_delta = sqrt(3) D ((e^d-1)^2 + (1-e^-d)^2 + (e^d-e^-d)^2)^(1/2)
    {
        double D = fb.D(), Dl = fb.D_lower(), C = fb.c_max;
        double target = 0.5 * (gamma - gamma_infinity_estimate);
        auto cost = [&](double de) {
            double a = std::exp(de) - 1.0, b = 1.0 - std::exp(-de);
            double cd = std::sqrt(3.0) * D * std::sqrt(a * a + b * b + (a + b) * (a + b));
            return cd + D * a - Dl * b;
        };
        double lo = 0.0, hi = 1.0;
        while (cost(hi) < target && hi < 50.0) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (cost(mid) <= target ? lo : hi) = mid;
        }
        double delta = lo;
        double beta = gamma - gamma_infinity_estimate - cost(delta);
        if (beta <= 0.0) beta = 0.5 * (gamma - gamma_infinity_estimate);
        double k0 = std::pow(D * (std::exp(delta) + std::exp(-delta) + 2.0) + C + gamma, 2) /
                    (beta * beta) / (std::exp(2.0) - 1.0);
        double epsl = std::min(0.5 * delta, 0.5);
        sol.decay_delta = delta - epsl;
        sol.decay_K = 1.0 + std::sqrt(k0 / (2.0 * std::exp(1.0) * epsl));
        for (long long i = 1; i <= window.hi; ++i) {
            double bound = sol.decay_K * std::exp(-sol.decay_delta * static_cast<double>(i));
            if (sol.at(i) > bound * (1.0 + 1e-12))
                throw numeric_error("eigen", "decay solution violated its exponential estimate");
        }
    }

    double resid = 0.0;
    for (long long i = window.lo + 1; i <= window.hi - 1; ++i) {
        double r = field.d(i + 1) * (sol.at(i + 1) - sol.at(i)) +
                   field.d(i) * (sol.at(i - 1) - sol.at(i)) + (field.c(i) - gamma) * sol.at(i);
        resid = std::max(resid, std::abs(r) / ((std::abs(gamma) + 1.0) * sol.at(i)));
    }
    sol.residual = resid;
    return sol;
}

LyapunovPoint lyapunov_mu(const CoefficientField& field, double gamma, long long range,
                          double gamma_infinity_estimate) {
    if (range < 1000) throw config_error("eigen: lyapunov range must be >= 1000");
    if (!(gamma > gamma_infinity_estimate))
        throw config_error("eigen: lyapunov needs gamma > Gamma_infty estimate");
    require_tied(field, -2, 2);

    MuResult m = mu_from_chain(field, gamma, range);
    LyapunovPoint pt;
    pt.gamma = gamma;
    pt.mu = m.mu;
    pt.nu = m.nu;

    // spot-check multiplicativity: u_1(gamma, pi_k omega) from independent
    // local Dirichlet solves must match the chain ratio at k
    std::vector<double> s = stable_ratios(field, gamma, 0, range);
    double worst = 0.0;
    const int checks = 8;
    for (int c = 0; c < checks; ++c) {
        long long k = (range - 1) * c / checks;
        double u1 = local_u1(field.shifted(k), gamma);
        worst = std::max(worst,
                         std::abs(std::log(u1) - std::log(s[static_cast<std::size_t>(k)])));
    }
    pt.slope_check = worst;
    return pt;
}

LyapunovCurve lyapunov_curve(const CoefficientField& field, const std::vector<double>& gamma_grid,
                             long long range) {
    LyapunovCurve curve;
    std::vector<long long> ks;
    for (long long k = 64; k <= 2048; k *= 2) ks.push_back(k);
    double gamma_sched = gamma_infinity(field, ks).value;
    double floor = realization_gamma_floor(field, range);
    curve.gamma_infinity = std::max(gamma_sched, floor);
    RandomCurveOptions opt;
    opt.range = range;
    curve.p_right = plateau_endpoint(field, curve.gamma_infinity, opt);
    curve.p_left = -plateau_endpoint(field.reflected(), curve.gamma_infinity, opt);
    double prev = -std::numeric_limits<double>::infinity();
    for (double g : gamma_grid) {
        if (!(g > prev)) throw config_error("eigen: gamma grid must be strictly increasing");
        prev = g;
        curve.points.push_back(lyapunov_mu(field, g, range, curve.gamma_infinity));
    }
    return curve;
}

double plateau_endpoint(const CoefficientField& field, double gamma_inf_estimate,
                        const RandomCurveOptions& opt) {
    const double offsets[3] = {1e-1, 1e-2, 1e-3};
    double mu[3];
    for (int i = 0; i < 3; ++i)
        mu[i] = mu_from_chain(field, gamma_inf_estimate + offsets[i], opt.range).mu;

    // fit mu = p_r + a x with x = sqrt(offset) and x = offset; the fit with
    // the smaller residual on the three samples wins
    auto fit = [&](bool use_sqrt) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < 3; ++i) {
            double x = use_sqrt ? std::sqrt(offsets[i]) : offsets[i];
            sx += x;
            sy += mu[i];
            sxx += x * x;
            sxy += x * mu[i];
        }
        double denom = 3.0 * sxx - sx * sx;
        double a = (3.0 * sxy - sx * sy) / denom;
        double b = (sy - a * sx) / 3.0;
        double res = 0.0;
        for (int i = 0; i < 3; ++i) {
            double x = use_sqrt ? std::sqrt(offsets[i]) : offsets[i];
            double e = mu[i] - (b + a * x);
            res += e * e;
        }
        return std::pair<double, double>(b, res);
    };
    auto [b_sqrt, r_sqrt] = fit(true);
    auto [b_lin, r_lin] = fit(false);
    double pr = (r_sqrt <= r_lin) ? b_sqrt : b_lin;
    return std::max(0.0, pr);
}

double lambda_random_point(const CoefficientField& field, double p, double gamma_inf_estimate,
                           double p_plateau, const RandomCurveOptions& opt, EigenMethod* tag) {
    if (p < 0.0) throw config_error("eigen: lambda_random_point takes p >= 0");
    if (p <= p_plateau) {
        if (tag) *tag = EigenMethod::Plateau;
        return gamma_inf_estimate;
    }
    if (tag) *tag = EigenMethod::LyapunovInverse;
    auto mu_at = [&](double g) { return mu_from_chain(field, g, opt.range).mu; };
    double lo = gamma_inf_estimate + opt.inversion_margin;
    if (mu_at(lo) >= p) return lo; // p sits essentially at the plateau edge
    double span = 1.0;
    double hi = lo + span;
    int guard = 0;
    double mu_hi = mu_at(hi);
    while (mu_hi < p) {
        span *= 2.0;
        hi = lo + span;
        if (++guard > 60)
            throw numeric_error("eigen", "mu inversion bracket failure at p=" + std::to_string(p) +
                                             " (gamma in [" + std::to_string(lo) + "," +
                                             std::to_string(hi) + "], mu(hi)=" +
                                             std::to_string(mu_hi) + ")");
        mu_hi = mu_at(hi);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (mu_at(mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

HamiltonianCurve speed_curve_random(const CoefficientField& field,
                                    const std::vector<double>& p_grid,
                                    const RandomCurveOptions& opt) {
    std::vector<long long> ks;
    for (long long k = 64; k <= opt.gamma_k_max; k *= 2) ks.push_back(k);
    if (ks.empty() || ks.back() < 512) ks.push_back(std::max<long long>(512, opt.gamma_k_max));
    double gamma_sched = gamma_infinity(field, ks).value;
    double gamma_est = std::max(gamma_sched, realization_gamma_floor(field, opt.range));

    CoefficientField refl = field.reflected();
    double p_right = plateau_endpoint(field, gamma_est, opt);
    double p_left = plateau_endpoint(refl, gamma_est, opt);

    FieldBounds fb = field.bounds();
    HamiltonianCurve curve;
    curve.window_lo = -opt.range;
    curve.window_hi = opt.range;
    for (double p : p_grid) {
        EigenMethod tag;
        double lam;
        if (p >= 0.0)
            lam = lambda_random_point(field, p, gamma_est, p_right, opt, &tag);
        else
            lam = lambda_random_point(refl, -p, gamma_est, p_left, opt, &tag);
        if (lam < gamma_est - 1e-9)
            throw numeric_error("eigen", "random-media lambda fell below Gamma_infty");
        double hi_env = fb.dprime_max * std::exp(p) + fb.d_max * std::exp(-p) - fb.dprime_min -
                        fb.d_min + fb.c_max;
        if (lam > hi_env + 1e-9 * (1.0 + std::abs(lam)))
            throw numeric_error("eigen", "random-media lambda escaped the h envelope");
        curve.p.push_back(p);
        curve.h_lower.push_back(lam);
        curve.h_upper.push_back(lam);
        curve.method.push_back(tag);
        curve.residual.push_back(0.0);
        curve.eps.push_back(0.0);
    }
    return curve;
}

// ------------------------------------------- nonlinear certificate --------

NonlinearCertificate nonlinear_cell_certificate(const CoefficientField& field, double p,
                                                const Window& window,
                                                double gamma_infinity_estimate) {
    require_tied(field, window.lo - 1, window.hi + 1);
    NonlinearCertificate out;
    out.lambda_shift = std::max(0.0, -gamma_infinity_estimate + 1.0);
    const double gamma_shifted = gamma_infinity_estimate + out.lambda_shift;

    const auto L = static_cast<std::size_t>(window.size());
    if (L < 257) throw config_error("eigen: certificate window too small");
    if (window.lo > 0 || window.hi < 0)
        throw config_error("eigen: certificate window must contain the origin");
    const double ep = std::exp(p), em = std::exp(-p);

    std::vector<double> a(L), b(L), ct(L);
    for (long long i = window.lo; i <= window.hi; ++i) {
        auto k = static_cast<std::size_t>(i - window.lo);
        double di = field.d(i), di1 = field.d(i + 1);
        a[k] = di1 * ep;
        b[k] = di * em;
        ct[k] = di1 * (ep - 1.0) + di * (em - 1.0) + field.c(i) + out.lambda_shift;
    }
    double sup_ct = *std::max_element(ct.begin(), ct.end());
    double inf_ct = *std::min_element(ct.begin(), ct.end());
    if (!(sup_ct > 0.0))
        throw numeric_error("eigen", "certificate supersolution not positive (sup ctilde <= 0)");
    out.sup_ctilde = sup_ct;

    // any constant >= sup ctilde is a supersolution; bump it above the block
    // eigenvalue for media where the d-terms dip below c
    const double phi_bar = std::max(sup_ct, gamma_shifted + 1.0);
    // M makes t -> (M + ctilde - t) t increasing on [0, phi_bar]
    double M = 2.0 * phi_bar + 1.0 + std::max(0.0, -inf_ct);

    // subsolution from the local Dirichlet eigenpair: smallest centered block
    // whose eigenvalue reaches gamma_bar (shifted field)
    const double gamma_bar = 0.5 * gamma_shifted;
    long long k0 = 1;
    double lam_blk = 0.0;
    std::vector<double> chi;
    for (;; k0 *= 2) {
        std::vector<double> diag(static_cast<std::size_t>(2 * k0 + 1)), off;
        for (long long i = -k0; i <= k0; ++i) {
            double di = field.d(i), di1 = field.d(i + 1);
            diag[static_cast<std::size_t>(i + k0)] = field.c(i) + out.lambda_shift - di - di1;
            if (i < k0) off.push_back(di1);
        }
        lam_blk = sturm_largest(diag, off);
        if (lam_blk >= gamma_bar) {
            chi = (diag.size() == 1) ? std::vector<double>{1.0}
                                     : inverse_iteration(diag, off, lam_blk);
            break;
        }
        if (k0 > (window.hi - window.lo) / 8)
            throw numeric_error("eigen", "certificate subsolution block exceeded the window");
    }
    std::vector<double> sub(L, 0.0);
    for (long long i = -k0; i <= k0; ++i) {
        double expo =
            -p * (static_cast<double>(i) + (p >= 0.0 ? 1.0 : -1.0) * static_cast<double>(k0));
        sub[static_cast<std::size_t>(i - window.lo)] =
            lam_blk * chi[static_cast<std::size_t>(i + k0)] * std::exp(expo);
    }

    // monotone iteration downward from the constant supersolution
    std::vector<double> u(L, phi_bar);
    std::vector<double> diag(L), lower(L - 1), upper(L - 1), rhs(L);
    for (std::size_t i = 0; i < L; ++i) {
        diag[i] = M + a[i] + b[i];
        if (i + 1 < L) upper[i] = -a[i];
        if (i > 0) lower[i - 1] = -b[i];
    }
    int iterations = 0;
    const double mono_tol = 1e-12 * (1.0 + phi_bar);
    for (; iterations < 4000; ++iterations) {
        for (std::size_t i = 0; i < L; ++i) rhs[i] = (M + ct[i] - u[i]) * u[i];
        std::vector<double> next = thomas_solve(diag, lower, upper, rhs);
        double drop = 0.0, rise = 0.0, sub_gap = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            rise = std::max(rise, next[i] - u[i]);
            drop = std::max(drop, u[i] - next[i]);
            sub_gap = std::max(sub_gap, sub[i] - next[i]);
        }
        if (rise > mono_tol || sub_gap > mono_tol)
            throw numeric_error("eigen",
                                "certificate iteration lost its sub/supersolution sandwich");
        u = std::move(next);
        if (drop < 1e-14 * (1.0 + phi_bar)) break;
    }
    out.iterations = iterations;

    // residual |L_p u - u^2| on the core (the Dirichlet walls reach only
    // exponentially far inward)
    const std::size_t buf = std::min<std::size_t>(L / 4, 192);
    double resid = 0.0;
    for (std::size_t i = buf; i + buf < L; ++i) {
        double lp = a[i] * (u[i + 1] - u[i]) + b[i] * (u[i - 1] - u[i]) + ct[i] * u[i];
        resid = std::max(resid, std::abs(lp - u[i] * u[i]));
    }
    out.residual = resid;
    if (resid > 1e-10)
        throw numeric_error("eigen", "certificate residual stalled at " + std::to_string(resid));

    double umin = std::numeric_limits<double>::infinity(), umax = 0.0;
    for (std::size_t i = buf; i + buf < L; ++i) {
        umin = std::min(umin, u[i]);
        umax = std::max(umax, u[i]);
    }
    if (!(umin > 0.0) || umax > sup_ct * (1.0 + 1e-12))
        throw numeric_error("eigen", "certificate left the (0, sup ctilde] band");

    // u > 0 with L_p^shift u = u^2 >= 0 certifies lambda_1_lower(p) >= 0 for
    // the shifted operator, hence >= -lambda_shift for the original one
    out.certified_lower_bound = -out.lambda_shift;

    out.phi.window = {window.lo + static_cast<long long>(buf),
                      window.hi - static_cast<long long>(buf)};
    out.phi.values.assign(u.begin() + static_cast<long>(buf), u.end() - static_cast<long>(buf));
    out.phi.measure();
    return out;
}

double lambda_dirichlet_window(const CoefficientField& field, double /*p*/, const Window& window) {
    // the gauge similarity e^{p i} makes the Dirichlet spectrum p-independent;
    // the window eigenvalue is the monotone lower envelope for arbitrary media
    long long k = window.size() - 2;
    if (k < 1) throw config_error("eigen: dirichlet window too small");
    std::vector<double> diag(static_cast<std::size_t>(k)), off;
    for (long long i = window.lo + 1; i <= window.lo + k; ++i) {
        diag[static_cast<std::size_t>(i - window.lo - 1)] =
            field.c(i) - field.dprime(i) - field.d(i);
        if (i < window.lo + k) off.push_back(std::sqrt(field.dprime(i) * field.d(i + 1)));
    }
    return sturm_largest(diag, off);
}

} // namespace kpp::spectral
