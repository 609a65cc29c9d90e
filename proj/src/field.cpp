#include "kpp/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpp/csv.hpp"
#include "kpp/errors.hpp"
#include "kpp/rng.hpp"

namespace kpp {

namespace {
constexpr std::uint64_t STREAM_D = 0x64ULL;
constexpr std::uint64_t STREAM_C = 0x63ULL;
constexpr std::uint64_t STREAM_DPRIME = 0x64 + 0x1000ULL;

long long floor_mod(long long i, long long n) {
    long long r = i % n;
    return r < 0 ? r + n : r;
}
} // namespace

double Marginal::sample(std::uint64_t seed, std::uint64_t stream, long long i) const {
    switch (kind) {
    case MarginalKind::Constant:
        return a;
    case MarginalKind::Uniform:
        return a + (b - a) * uniform01(seed, stream, i);
    case MarginalKind::TwoState:
        return (index_hash(seed, stream, i) & 1ULL) ? b : a;
    }
    return a;
}

double CosineSum::eval(long long i) const {
    double v = mean;
    for (std::size_t k = 0; k < amplitude.size(); ++k)
        v += amplitude[k] * std::cos(2.0 * M_PI * frequency[k] * static_cast<double>(i) + phase[k]);
    return v;
}

double CosineSum::lower() const {
    double s = 0.0;
    for (double a : amplitude) s += std::abs(a);
    return mean - s;
}

double CosineSum::upper() const {
    double s = 0.0;
    for (double a : amplitude) s += std::abs(a);
    return mean + s;
}

void FieldSpec::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw config_error(std::string("field: ") + name + " must be positive and finite");
    };
    auto finite = [](double v, const char* name) {
        if (!std::isfinite(v))
            throw config_error(std::string("field: ") + name + " must be finite");
    };
    switch (kind) {
    case FieldKind::Homogeneous:
        positive(dprime, "dprime");
        positive(d, "d");
        finite(c, "c");
        break;
    case FieldKind::Periodic: {
        if (period < 1) throw config_error("field: period must be >= 1");
        auto check_table = [&](const std::vector<double>& t, const char* name, bool pos) {
            if (static_cast<int>(t.size()) != period)
                throw config_error(std::string("field: ") + name + " length must equal period");
            for (double v : t) {
                if (!std::isfinite(v) || (pos && !(v > 0.0)))
                    throw config_error(std::string("field: ") + name + " entries must be " +
                                       (pos ? "positive and finite" : "finite"));
            }
        };
        check_table(dprime_table, "dprime_table", true);
        check_table(d_table, "d_table", true);
        check_table(c_table, "c_table", false);
        break;
    }
    case FieldKind::Quasiperiodic: {
        auto check = [&](const CosineSum& s, const char* name, bool pos) {
            if (s.amplitude.size() != s.frequency.size() || s.amplitude.size() != s.phase.size())
                throw config_error(std::string("field: ") + name +
                                   " amplitude/frequency/phase lengths differ");
            if (!std::isfinite(s.mean))
                throw config_error(std::string("field: ") + name + " mean must be finite");
            if (pos && !(s.lower() > 0.0))
                throw config_error(std::string("field: ") + name +
                                   " must stay positive (mean - sum|amplitude| <= 0)");
        };
        check(qp_dprime, "dprime", true);
        check(qp_d, "d", true);
        check(qp_c, "c", false);
        break;
    }
    case FieldKind::RandomShift: {
        auto check = [&](const Marginal& m, const char* name, bool pos) {
            if (!std::isfinite(m.a) || !std::isfinite(m.b))
                throw config_error(std::string("field: ") + name + " marginal must be finite");
            if (pos && !(m.lower() > 0.0))
                throw config_error(std::string("field: ") + name + " marginal must be positive");
        };
        check(rand_d, "d", true);
        check(rand_c, "c", false);
        if (!tie_dprime) check(rand_dprime, "dprime", true);
        break;
    }
    }
}

CoefficientField::CoefficientField(FieldSpec spec) : sign_(1), offset_(0) {
    spec.validate();
    law_ = std::make_shared<const FieldSpec>(std::move(spec));
}

double CoefficientField::base_dprime(long long j) const {
    const FieldSpec& s = *law_;
    switch (s.kind) {
    case FieldKind::Homogeneous: return s.dprime;
    case FieldKind::Periodic: return s.dprime_table[floor_mod(j, s.period)];
    case FieldKind::Quasiperiodic: return s.qp_dprime.eval(j);
    case FieldKind::RandomShift:
        if (s.tie_dprime) return base_d(j + 1);
        return s.rand_dprime.sample(s.seed, STREAM_DPRIME, j);
    }
    return 0.0;
}

double CoefficientField::base_d(long long j) const {
    const FieldSpec& s = *law_;
    switch (s.kind) {
    case FieldKind::Homogeneous: return s.d;
    case FieldKind::Periodic: return s.d_table[floor_mod(j, s.period)];
    case FieldKind::Quasiperiodic: return s.qp_d.eval(j);
    case FieldKind::RandomShift: return s.rand_d.sample(s.seed, STREAM_D, j);
    }
    return 0.0;
}

double CoefficientField::base_c(long long j) const {
    const FieldSpec& s = *law_;
    switch (s.kind) {
    case FieldKind::Homogeneous: return s.c;
    case FieldKind::Periodic: return s.c_table[floor_mod(j, s.period)];
    case FieldKind::Quasiperiodic: return s.qp_c.eval(j);
    case FieldKind::RandomShift: return s.rand_c.sample(s.seed, STREAM_C, j);
    }
    return 0.0;
}

// Reflection swaps the forward/backward roles: the forward coefficient of F^-
// at i is d_{-i} of F and the backward one is d'_{-i}.
double CoefficientField::dprime(long long i) const {
    return sign_ > 0 ? base_dprime(map(i)) : base_d(map(i));
}

double CoefficientField::d(long long i) const {
    return sign_ > 0 ? base_d(map(i)) : base_dprime(map(i));
}

double CoefficientField::c(long long i) const { return base_c(map(i)); }

CoefficientField CoefficientField::reflected() const {
    return CoefficientField(law_, -sign_, offset_);
}

CoefficientField CoefficientField::shifted(long long j) const {
    return CoefficientField(law_, sign_, offset_ + sign_ * j);
}

FieldBounds CoefficientField::bounds() const {
    const FieldSpec& s = *law_;
    FieldBounds b{};
    auto table_minmax = [](const std::vector<double>& t) {
        auto [lo, hi] = std::minmax_element(t.begin(), t.end());
        return std::pair<double, double>(*lo, *hi);
    };
    switch (s.kind) {
    case FieldKind::Homogeneous:
        b = {s.dprime, s.dprime, s.d, s.d, s.c, s.c};
        break;
    case FieldKind::Periodic: {
        auto dp = table_minmax(s.dprime_table);
        auto dd = table_minmax(s.d_table);
        auto cc = table_minmax(s.c_table);
        b = {dp.first, dp.second, dd.first, dd.second, cc.first, cc.second};
        break;
    }
    case FieldKind::Quasiperiodic:
        b = {s.qp_dprime.lower(), s.qp_dprime.upper(), s.qp_d.lower(), s.qp_d.upper(),
             s.qp_c.lower(), s.qp_c.upper()};
        break;
    case FieldKind::RandomShift: {
        const Marginal& mp = s.tie_dprime ? s.rand_d : s.rand_dprime;
        b = {mp.lower(), mp.upper(), s.rand_d.lower(), s.rand_d.upper(),
             s.rand_c.lower(), s.rand_c.upper()};
        break;
    }
    }
    if (sign_ < 0) {
        std::swap(b.dprime_min, b.d_min);
        std::swap(b.dprime_max, b.d_max);
    }
    return b;
}

bool CoefficientField::has_tied_dprime(const Window& w) const {
    for (long long i = w.lo; i <= w.hi; ++i)
        if (dprime(i) != d(i + 1)) return false;
    return true;
}

std::string CoefficientField::dump_csv(const Window& w) const {
    CsvWriter csv("i,dprime,d,c");
    for (long long i = w.lo; i <= w.hi; ++i) {
        csv.field(i).field(dprime(i)).field(d(i)).field(c(i));
        csv.end_row();
    }
    return csv.str();
}

std::vector<double> CoefficientField::sample_dprime(const Window& w) const {
    std::vector<double> v(static_cast<std::size_t>(w.size()));
    for (long long i = w.lo; i <= w.hi; ++i) v[static_cast<std::size_t>(i - w.lo)] = dprime(i);
    return v;
}

std::vector<double> CoefficientField::sample_d(const Window& w) const {
    std::vector<double> v(static_cast<std::size_t>(w.size()));
    for (long long i = w.lo; i <= w.hi; ++i) v[static_cast<std::size_t>(i - w.lo)] = d(i);
    return v;
}

std::vector<double> CoefficientField::sample_c(const Window& w) const {
    std::vector<double> v(static_cast<std::size_t>(w.size()));
    for (long long i = w.lo; i <= w.hi; ++i) v[static_cast<std::size_t>(i - w.lo)] = c(i);
    return v;
}

Nonlinearity Nonlinearity::logistic() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::table(std::vector<double> g_values, double holder_exponent) {
    if (g_values.size() < 3) throw config_error("nonlinearity: table needs at least 3 samples");
    if (g_values.front() != 0.0 || g_values.back() != 0.0)
        throw config_error("nonlinearity: table must vanish at s=0 and s=1");
    if (!(holder_exponent > 0.0) || holder_exponent > 1.0)
        throw config_error("nonlinearity: holder exponent must lie in (0,1]");
    const double ds = 1.0 / static_cast<double>(g_values.size() - 1);
    for (std::size_t k = 1; k + 1 < g_values.size(); ++k) {
        double s = ds * static_cast<double>(k);
        if (!(g_values[k] > 0.0) || g_values[k] > s)
            throw config_error("nonlinearity: table must satisfy 0 < g(s) <= s on (0,1)");
    }
    if (std::abs(g_values[1] / ds - 1.0) > 0.5)
        throw config_error("nonlinearity: table slope at 0 must be 1 (linearization c_i)");
    Nonlinearity nl;
    nl.family_ = Family::Table;
    nl.holder_exponent_ = holder_exponent;
    nl.g_ = std::move(g_values);
    return nl;
}

double Nonlinearity::operator()(double c_i, double s) const {
    if (family_ == Family::Logistic) return c_i * s * (1.0 - s);
    const double n = static_cast<double>(g_.size() - 1);
    double x = s * n;
    if (x <= 0.0) return 0.0;
    if (x >= n) return 0.0;
    auto k = static_cast<std::size_t>(x);
    double frac = x - static_cast<double>(k);
    return c_i * (g_[k] + frac * (g_[k + 1] - g_[k]));
}

ValidationReport validate_field(const CoefficientField& field, const Nonlinearity& nl,
                                const Window& window) {
    if (window.empty()) throw config_error("validate: window is empty");
    ValidationReport r{};
    r.window = window;
    r.dprime_inf = r.d_inf = r.c_inf = std::numeric_limits<double>::infinity();
    r.dprime_sup = r.d_sup = r.c_sup = -std::numeric_limits<double>::infinity();
    r.margin = std::numeric_limits<double>::infinity();
    r.worst_index = window.lo;

    // "liminf as |i| -> inf" is approximated by the minimum over the two outer
    // quarters of the window.
    const long long n = window.size();
    const long long q = n / 4;
    const long long tail_left_hi = window.lo + (q > 0 ? q - 1 : 0);
    const long long tail_right_lo = window.hi - (q > 0 ? q - 1 : 0);

    for (long long i = window.lo; i <= window.hi; ++i) {
        double dp = field.dprime(i), dd = field.d(i), cc = field.c(i);
        r.dprime_inf = std::min(r.dprime_inf, dp);
        r.dprime_sup = std::max(r.dprime_sup, dp);
        r.d_inf = std::min(r.d_inf, dd);
        r.d_sup = std::max(r.d_sup, dd);
        r.c_inf = std::min(r.c_inf, cc);
        r.c_sup = std::max(r.c_sup, cc);
        if (i <= tail_left_hi || i >= tail_right_lo) {
            double gap = std::sqrt(dp) - std::sqrt(dd);
            double m = cc - gap * gap;
            if (m < r.margin) {
                r.margin = m;
                r.worst_index = i;
            }
        }
    }

    r.diffusion_bounds_ok = r.dprime_inf > 0.0 && r.d_inf > 0.0 &&
                            std::isfinite(r.dprime_sup) && std::isfinite(r.d_sup);
    r.c_bounded_ok = std::isfinite(r.c_inf) && std::isfinite(r.c_sup);
    r.margin_ok = r.margin > 0.0;

    // sampled KPP checks: f(i,0)=f(i,1)=0, 0 < f(i,s) <= c_i s, inf_i f(i,s)>0
    r.nonlinearity_ok = true;
    const int s_samples = 17;
    const long long stride = std::max<long long>(1, n / 64);
    for (long long i = window.lo; i <= window.hi && r.nonlinearity_ok; i += stride) {
        double cc = field.c(i);
        if (nl(cc, 0.0) != 0.0 || nl(cc, 1.0) != 0.0) r.nonlinearity_ok = false;
        for (int k = 1; k < s_samples && r.nonlinearity_ok; ++k) {
            double s = static_cast<double>(k) / s_samples;
            double f = nl(cc, s);
            if (!(f > 0.0) || f > cc * s * (1.0 + 1e-12)) r.nonlinearity_ok = false;
        }
    }

    r.tie_ok = true;
    if (field.kind() == FieldKind::RandomShift && field.spec().tie_dprime)
        r.tie_ok = field.has_tied_dprime(window);

    r.pass = r.diffusion_bounds_ok && r.c_bounded_ok && r.margin_ok && r.nonlinearity_ok && r.tie_ok;
    return r;
}

} // namespace kpp
