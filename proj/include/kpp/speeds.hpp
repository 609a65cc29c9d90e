#ifndef KPP_SPEEDS_HPP
#define KPP_SPEEDS_HPP

#include <string>
#include <vector>

#include "kpp/curves.hpp"
#include "kpp/dynamics.hpp"
#include "kpp/field.hpp"

namespace kpp::speeds {

enum class SpeedMethod { Auto, Closed, Periodic, Cell, Random, Envelope };

SpeedMethod parse_method(const std::string& name); // throws config_error on unknown names

struct EigenOptions {
    Window cell_window{-(1 << 13), (1 << 13) - 1};
    std::vector<double> eps_schedule{0.1, 0.05, 0.025};
    long long random_range = 1 << 14;
    long long gamma_k_max = 2048;
};

struct HamiltonianPoint {
    double lower = 0.0;
    double upper = 0.0;
    double residual = 0.0;
    double eps = 0.0;
    EigenMethod tag = EigenMethod::ClosedForm;
};

// Evaluates lambda(p) for one field with the method fixed up front; caches the
// random-pipeline context so sweeps over p stay cheap.
class HamiltonianEvaluator {
public:
    HamiltonianEvaluator(const CoefficientField& field, SpeedMethod method,
                         const EigenOptions& opt);

    HamiltonianPoint point(double p) const;
    double lower(double p) const { return point(p).lower; }
    double upper(double p) const { return point(p).upper; }
    bool bounds_only() const { return bounds_only_; }
    SpeedMethod resolved() const { return method_; }
    const EigenOptions& options() const { return opt_; }

private:
    CoefficientField field_;
    CoefficientField reflected_;
    SpeedMethod method_;
    EigenOptions opt_;
    bool bounds_only_ = false;
    // random pipeline context
    double gamma_est_ = 0.0;
    double p_plateau_right_ = 0.0;
    double p_plateau_left_ = 0.0;
};

HamiltonianCurve hamiltonian_curve(const CoefficientField& field,
                                   const std::vector<double>& p_grid,
                                   SpeedMethod method = SpeedMethod::Auto,
                                   const EigenOptions& opt = {});

// Discrete Legendre transform with parabolic refinement around the grid
// argmax; rejects q values whose sup is attained at the grid edge.
ConjugateCurve convex_conjugate(const HamiltonianCurve& curve, const std::vector<double>& q_grid);

struct SpeedReport {
    double omega_right_upper = 0.0;
    double omega_right_lower = 0.0;
    double omega_left_upper = 0.0;
    double omega_left_lower = 0.0;
    double p_star_right = 0.0;
    double p_star_left = 0.0;
    std::string media_class;
    double gap_diag = 0.0;   // (upper-lower)/upper on the right speed
    bool bounds_only = false;
    bool edge_hit = false;           // minimizer pinned at the search bracket
    bool multimodal_fallback = false;
};

SpeedReport spreading_speeds(const CoefficientField& field, SpeedMethod method = SpeedMethod::Auto,
                             const EigenOptions& opt = {});

struct SimParams {
    double horizon = 200.0;
    Window window{-600, 600};
    double snapshot_interval = 0.25;
    long long initial_lo = 0, initial_hi = 0;
    double fit_fraction = 1.0 / 3.0; // fit window = last fraction of the horizon
    double tolerance = 0.03;         // band around [omega_lower, omega_upper]
    double margin_fraction = 0.05;   // tail margins, fraction of omega_upper
    std::vector<double> levels{0.1, 0.5, 0.9};
};

struct SandwichRow {
    double level = 0.5;
    int direction = +1;
    double fitted_speed = 0.0;
    double stderr_slope = 0.0;
    double omega_lower = 0.0, omega_upper = 0.0;
    bool inside = false;
};

struct SandwichReport {
    SpeedReport speeds;
    std::vector<SandwichRow> rows;
    double ahead_max_right = 0.0, ahead_max_left = 0.0; // u beyond (1+m) omega t
    double behind_min = 1.0;                            // u inside the slow cone
    bool ahead_ok = false;
    bool behind_ok = false;
    bool pass = false;
};

SandwichReport sandwich_report(const CoefficientField& field, const Nonlinearity& nl,
                               const SimParams& sim, SpeedMethod method = SpeedMethod::Auto,
                               const EigenOptions& opt = {});

} // namespace kpp::speeds

#endif
