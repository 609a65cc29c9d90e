#ifndef KPP_CURVES_HPP
#define KPP_CURVES_HPP

#include <string>
#include <vector>

namespace kpp {

enum class EigenMethod {
    ClosedForm,
    PeriodicPerron,
    CellProblem,
    LyapunovInverse,
    Plateau,
    DirichletWindow, // windowed surrogate for arbitrary media (bounds, not values)
};

const char* eigen_method_name(EigenMethod m);

// Sampled p -> H(p), upper and lower variants (equal when the media class
// guarantees it), with per-point method provenance.
struct HamiltonianCurve {
    std::vector<double> p;
    std::vector<double> h_lower;
    std::vector<double> h_upper;
    std::vector<EigenMethod> method;
    std::vector<double> residual;
    std::vector<double> eps; // smallest regularization used per point (0 if none)
    long long window_lo = 0, window_hi = 0;
    bool bounds_only = false; // honesty flag: windowed surrogate, not proven values
};

struct ConjugateSample {
    double q;
    double value;      // H*(q) = sup_p (p q - H(p))
    int argmax_index;  // index into the source p grid
};

struct ConjugateCurve {
    std::vector<ConjugateSample> samples;
    double eval(double q) const; // linear interpolation in q
};

} // namespace kpp

#endif
