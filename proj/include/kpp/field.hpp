#ifndef KPP_FIELD_HPP
#define KPP_FIELD_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace kpp {

struct Window {
    long long lo = 0;
    long long hi = 0; // inclusive
    long long size() const { return hi - lo + 1; }
    bool empty() const { return hi < lo; }
};

enum class FieldKind { Homogeneous, Periodic, Quasiperiodic, RandomShift };

enum class MarginalKind { Constant, Uniform, TwoState };

struct Marginal {
    MarginalKind kind = MarginalKind::Constant;
    double a = 1.0; // constant value, or lower end / first state
    double b = 1.0; // upper end / second state
    double sample(std::uint64_t seed, std::uint64_t stream, long long i) const;
    double lower() const { return kind == MarginalKind::Constant ? a : (a < b ? a : b); }
    double upper() const { return kind == MarginalKind::Constant ? a : (a < b ? b : a); }
};

struct CosineSum {
    double mean = 1.0;
    std::vector<double> amplitude;
    std::vector<double> frequency; // cycles per lattice step
    std::vector<double> phase;
    double eval(long long i) const;
    double lower() const;
    double upper() const;
};

// Generator law for the triple (d', d, c).  Only the members matching `kind`
// are meaningful.
struct FieldSpec {
    FieldKind kind = FieldKind::Homogeneous;

    // homogeneous
    double dprime = 1.0;
    double d = 1.0;
    double c = 1.0;

    // periodic
    int period = 1;
    std::vector<double> dprime_table;
    std::vector<double> d_table;
    std::vector<double> c_table;

    // quasiperiodic
    CosineSum qp_dprime;
    CosineSum qp_d;
    CosineSum qp_c;

    // random shift
    std::uint64_t seed = 1;
    Marginal rand_d;
    Marginal rand_c;
    Marginal rand_dprime;     // used only when !tie_dprime
    bool tie_dprime = true;   // d'_i = d_{i+1}

    void validate() const; // throws config_error naming the offending parameter
};

// Exact bounds derived from the law itself (not window-sampled).
struct FieldBounds {
    double dprime_min, dprime_max;
    double d_min, d_max;
    double c_min, c_max;
    double D() const { return dprime_max > d_max ? dprime_max : d_max; }
    double D_lower() const { return dprime_min < d_min ? dprime_min : d_min; }
    double C() const { return c_max; }
    double c_abs_sup() const { return c_max > -c_min ? c_max : -c_min; }
};

// A heterogeneous coefficient field on the lattice.  Immutable; reflection and
// shift are exact index transforms over a shared base law, so
// reflect(reflect(F)) == F and shift(shift(F,a),b) == shift(F,a+b) samplewise.
class CoefficientField {
public:
    explicit CoefficientField(FieldSpec spec);

    double dprime(long long i) const;
    double d(long long i) const;
    double c(long long i) const;

    CoefficientField reflected() const;
    CoefficientField shifted(long long j) const;

    FieldKind kind() const { return law_->kind; }
    const FieldSpec& spec() const { return *law_; }
    bool is_reflected() const { return sign_ < 0; }
    long long offset() const { return offset_; }
    FieldBounds bounds() const;

    // d'_i == d_{i+1} bit-exact on the window (required by the random-media
    // eigen pipeline).
    bool has_tied_dprime(const Window& w) const;

    // columns i,dprime,d,c with a header row
    std::string dump_csv(const Window& w) const;

    std::vector<double> sample_dprime(const Window& w) const;
    std::vector<double> sample_d(const Window& w) const;
    std::vector<double> sample_c(const Window& w) const;

private:
    CoefficientField(std::shared_ptr<const FieldSpec> law, int sign, long long offset)
        : law_(std::move(law)), sign_(sign), offset_(offset) {}

    long long map(long long i) const { return sign_ * i + offset_; }
    double base_dprime(long long j) const;
    double base_d(long long j) const;
    double base_c(long long j) const;

    std::shared_ptr<const FieldSpec> law_;
    int sign_ = 1;          // -1 after an odd number of reflections
    long long offset_ = 0;
};

// Reaction term f(i,s) with linearization f'_s(i,0) = c_i.
class Nonlinearity {
public:
    enum class Family { Logistic, Table };

    static Nonlinearity logistic();
    // f(i,s) = c_i * g(s), g sampled on a uniform s-grid, linear interpolation;
    // requires g(0)=g(1)=0, 0<g(s)<=s inside, g'(0)=1 within grid resolution.
    static Nonlinearity table(std::vector<double> g_values, double holder_exponent);

    double operator()(double c_i, double s) const;
    Family family() const { return family_; }
    double holder_exponent() const { return holder_exponent_; }

private:
    Family family_ = Family::Logistic;
    double holder_exponent_ = 1.0;
    std::vector<double> g_;
};

struct ValidationReport {
    Window window;
    double dprime_inf, dprime_sup;
    double d_inf, d_sup;
    double c_inf, c_sup;
    double margin;             // min over the outer quarters of c_i - (sqrt(d'_i)-sqrt(d_i))^2
    long long worst_index;     // where the margin is attained
    bool diffusion_bounds_ok;  // 0 < inf d <= sup d < inf, same for d'
    bool c_bounded_ok;
    bool margin_ok;            // margin > 0 strictly
    bool nonlinearity_ok;      // sampled KPP checks
    bool tie_ok;               // d'_i = d_{i+1} when the law requests it
    bool pass;
};

ValidationReport validate_field(const CoefficientField& field, const Nonlinearity& nl,
                                const Window& window);

} // namespace kpp

#endif
