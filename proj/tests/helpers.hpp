#ifndef KPP_TESTS_HELPERS_HPP
#define KPP_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "kpp/field.hpp"

namespace kpptest {

inline kpp::CoefficientField homog(double dprime, double d, double c) {
    kpp::FieldSpec s;
    s.kind = kpp::FieldKind::Homogeneous;
    s.dprime = dprime;
    s.d = d;
    s.c = c;
    return kpp::CoefficientField(s);
}

inline kpp::CoefficientField periodic(std::vector<double> c, std::vector<double> d,
                                      std::vector<double> dprime) {
    kpp::FieldSpec s;
    s.kind = kpp::FieldKind::Periodic;
    s.period = static_cast<int>(c.size());
    s.c_table = std::move(c);
    s.d_table = std::move(d);
    s.dprime_table = std::move(dprime);
    return kpp::CoefficientField(s);
}

// c_i = mean + amp cos(2 pi freq i), d = d' = 1
inline kpp::CoefficientField quasiperiodic_c(double mean, double amp, double freq) {
    kpp::FieldSpec s;
    s.kind = kpp::FieldKind::Quasiperiodic;
    s.qp_c.mean = mean;
    s.qp_c.amplitude = {amp};
    s.qp_c.frequency = {freq};
    s.qp_c.phase = {0.0};
    s.qp_d.mean = 1.0;
    s.qp_dprime.mean = 1.0;
    return kpp::CoefficientField(s);
}

// two-state c in {lo, hi}, d = 1, d'_i = d_{i+1}
inline kpp::CoefficientField two_state_c(std::uint64_t seed, double lo, double hi) {
    kpp::FieldSpec s;
    s.kind = kpp::FieldKind::RandomShift;
    s.seed = seed;
    s.rand_c = {kpp::MarginalKind::TwoState, lo, hi};
    s.rand_d = {kpp::MarginalKind::Constant, 1.0, 1.0};
    s.tie_dprime = true;
    return kpp::CoefficientField(s);
}

inline kpp::CoefficientField uniform_cd(std::uint64_t seed, double clo, double chi, double dlo,
                                        double dhi) {
    kpp::FieldSpec s;
    s.kind = kpp::FieldKind::RandomShift;
    s.seed = seed;
    s.rand_c = {kpp::MarginalKind::Uniform, clo, chi};
    s.rand_d = {kpp::MarginalKind::Uniform, dlo, dhi};
    s.tie_dprime = true;
    return kpp::CoefficientField(s);
}

// ---- independent oracles (kept free of the library's solver paths) ----

// golden-section minimum of a unimodal scalar function
inline std::pair<double, double> oracle_minimize(const std::function<double(double)>& f, double a,
                                                 double b, int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// largest eigenvalue of a small dense symmetric matrix by cyclic Jacobi
inline double oracle_sym_eig_max(std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-300) continue;
                double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    double best = m[0][0];
    for (std::size_t i = 1; i < n; ++i) best = std::max(best, m[i][i]);
    return best;
}

} // namespace kpptest

#endif
