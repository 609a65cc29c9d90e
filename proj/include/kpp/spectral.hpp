#ifndef KPP_SPECTRAL_HPP
#define KPP_SPECTRAL_HPP

#include <optional>
#include <utility>
#include <vector>

#include "kpp/curves.hpp"
#include "kpp/field.hpp"

namespace kpp::spectral {

// h_i(p) = d'_i e^p + d_i e^-p - d'_i - d_i + c_i; every generalized principal
// eigenvalue lies between inf_i h_i(p) and sup_i h_i(p) on its window.
double h_value(double dprime, double d, double c, double p);
std::pair<double, double> h_envelope(const CoefficientField& field, const Window& w, double p);

double lambda_closed_form(double dprime, double d, double c, double p);

struct CertificateFunction {
    Window window;
    std::vector<double> values; // phi_i > 0, indexed from window.lo
    double max_ratio_up = 0.0;   // max |phi_{i+1}-phi_i| / phi_i
    double max_ratio_down = 0.0; // max |phi_{i+1}-phi_i| / phi_{i+1}
    double end_log_slope_left = 0.0;  // ln(phi_i)/i at the left end
    double end_log_slope_right = 0.0; // ln(phi_i)/i at the right end
    double at(long long i) const { return values[static_cast<std::size_t>(i - window.lo)]; }
    void measure(); // fills the ratio/log-slope diagnostics from values
};

struct AdmissibilityTolerances {
    double ratio_bound = 1e6;     // the two bounded-ratio conditions
    double log_slope_tol = 0.05;  // |ln phi_i / i| at window ends
};

struct AdmissibilityReport {
    bool positive = false;
    bool ratios_bounded = false;
    bool log_slope_ok = false;
    double max_ratio_up = 0.0, max_ratio_down = 0.0;
    double end_log_slope_left = 0.0, end_log_slope_right = 0.0;
    bool pass = false;
};

AdmissibilityReport admissibility_check(const CertificateFunction& cand,
                                        const AdmissibilityTolerances& tol = {});

struct EigenEstimate {
    double p = 0.0;
    double lambda = 0.0;
    EigenMethod method = EigenMethod::ClosedForm;
    double residual = 0.0; // max over window of |L_p phi - lambda phi| / phi
    Window window;
    double eps = 0.0;                      // smallest eps (cell problem), else 0
    std::vector<double> eps_schedule;      // metadata from lambda_limit
    std::vector<double> raw_values;        // eps * w_0 per schedule entry
    std::vector<double> oscillations;      // eps * (max w - min w) per entry
    bool almost_periodic_suspect = false;  // oscillation grew as eps shrank
};

// Perron eigenvalue of the N x N cyclic matrix M(p): superdiagonal d'_i e^p,
// subdiagonal d_i e^-p, diagonal c_i - d'_i - d_i.
EigenEstimate lambda_periodic(const CoefficientField& field, double p, int N,
                              CertificateFunction* certificate = nullptr);

struct CellSolution {
    double p = 0.0;
    double eps = 0.0;
    Window window;                 // closed into a ring
    std::vector<double> w;
    double lambda_estimate = 0.0;  // eps * w_0
    double oscillation = 0.0;      // eps*(max-min) over the seam-excluded core
    double oscillation_full = 0.0; // eps*(max-min) over the whole ring
    double residual = 0.0;         // max site residual of eps w - Bw - ctilde
    double seam_increment = 0.0;   // |w jump across the wrap bond|
    double interior_increment = 0.0;
    bool seam_warning = false;     // seam increment > 10x interior
};

CellSolution solve_cell_problem(const CoefficientField& field, double p, double eps,
                                const Window& window,
                                const std::vector<double>* warm_start = nullptr);

EigenEstimate lambda_limit(const CoefficientField& field, double p,
                           const std::vector<double>& eps_schedule, const Window& window,
                           CertificateFunction* certificate = nullptr);

// Largest eigenvalue of the symmetric tridiagonal block D_{l,k} (diagonal
// Gamma_i = c_i - d_i - d_{i+1}, i = l+1..l+k) by Sturm-sequence bisection.
// Requires d'_i = d_{i+1}.  The positive eigenvector (max-normalized) is
// returned through `eigenvector` when non-null.
double tridiag_principal(const CoefficientField& field, long long l, long long k,
                         std::vector<double>* eigenvector = nullptr);

struct GammaEstimate {
    double value = 0.0;                 // last Gamma_{0,k}
    std::vector<long long> k_schedule;
    std::vector<double> gamma_0k;       // monotone increasing
    double gamma_symmetric = 0.0;       // Gamma_{-k,k} at max k
    double gamma_centered = 0.0;        // Gamma_{-k,2k} at max k
    double window_family_gap = 0.0;     // |Gamma_{0,k} - Gamma_{-k,k}| at max k
};

GammaEstimate gamma_infinity(const CoefficientField& field,
                             const std::vector<long long>& k_schedule);

struct DecaySolution {
    double gamma = 0.0;
    Window window;
    std::vector<double> u;         // u_0 = 1
    std::vector<double> log_ratio; // r_i = ln(u_{i+1}/u_i), i = window.lo .. window.hi-1
    double bound_base = 0.0;       // Dlow/(gamma - inf c + 2 D) of the two-sided ratio bound
    double decay_K = 0.0;          // exponential estimate constants (explicit from the
    double decay_delta = 0.0;      // energy argument; loose but certified)
    double residual = 0.0;         // max relative residual of (Au)_i + (c_i-gamma)u_i
    double at(long long i) const { return u[static_cast<std::size_t>(i - window.lo)]; }
    double ratio_at(long long i) const { // u_{i+1}/u_i in log form
        return log_ratio[static_cast<std::size_t>(i - window.lo)];
    }
};

DecaySolution decaying_solution(const CoefficientField& field, double gamma, const Window& window,
                                double gamma_infinity_estimate, double margin = 1e-3);

struct LyapunovPoint {
    double gamma = 0.0;
    double mu = 0.0;          // right Lyapunov exponent, -E ln u_1
    double nu = 0.0;          // left analogue
    double slope_check = 0.0; // max gap between chain ratios and independent local solves
};

LyapunovPoint lyapunov_mu(const CoefficientField& field, double gamma, long long range,
                          double gamma_infinity_estimate);

struct LyapunovCurve {
    double gamma_infinity = 0.0;
    std::vector<LyapunovPoint> points; // gamma strictly increasing
    double p_right = 0.0;              // plateau endpoint from mu near Gamma_infty
    double p_left = 0.0;               // <= 0, from the reflected field
};

LyapunovCurve lyapunov_curve(const CoefficientField& field, const std::vector<double>& gamma_grid,
                             long long range);

struct RandomCurveOptions {
    long long range = 1 << 14;       // realization length for mu
    long long gamma_k_max = 2048;    // k schedule cap for Gamma_infty
    double inversion_margin = 1e-3;  // bracket floor above Gamma_infty
};

// lambda(p) over a grid: k(|p|) by monotone bisection of mu beyond the plateau
// endpoint, Gamma_infty on the plateau; negative momenta go through the
// reflected field.
HamiltonianCurve speed_curve_random(const CoefficientField& field,
                                    const std::vector<double>& p_grid,
                                    const RandomCurveOptions& opt = {});

// Inverts mu(gamma) = p for a single momentum (p >= 0 against the given field).
double lambda_random_point(const CoefficientField& field, double p, double gamma_inf_estimate,
                           double p_plateau, const RandomCurveOptions& opt, EigenMethod* tag);

// Dirichlet principal eigenvalue over the whole stretch the ratio sweeps can
// touch; gammas above it keep every nested sweep positive.
double realization_gamma_floor(const CoefficientField& field, long long range);

// Plateau endpoint lim_{gamma->Gamma_infty+} mu(gamma): evaluates mu at
// Gamma_infty + {1e-1,1e-2,1e-3} and extrapolates (sqrt vs linear fit,
// better-conditioned wins).
double plateau_endpoint(const CoefficientField& field, double gamma_inf_estimate,
                        const RandomCurveOptions& opt);

struct NonlinearCertificate {
    CertificateFunction phi;        // positive solution of L_p u = u^2 (shift-adjusted)
    double residual = 0.0;          // max over core of |L_p u - u^2|
    double certified_lower_bound = 0.0; // lambda_1_lower(p) >= this
    double lambda_shift = 0.0;
    double sup_ctilde = 0.0;
    int iterations = 0;
};

NonlinearCertificate nonlinear_cell_certificate(const CoefficientField& field, double p,
                                                const Window& window,
                                                double gamma_infinity_estimate);

// Principal eigenvalue of L_p with Dirichlet walls on the window
// (diagonally-symmetrizable similarity + Sturm bisection).  Used as the
// monotone windowed surrogate for media with no proven limit identity.
double lambda_dirichlet_window(const CoefficientField& field, double p, const Window& window);

} // namespace kpp::spectral

#endif
