#include "kpp.h"

#include <cstring>
#include <string>
#include <vector>

#include "kpp/config.hpp"
#include "kpp/errors.hpp"
#include "kpp/runner.hpp"
#include "kpp/spectral.hpp"
#include "kpp/speeds.hpp"
#include "kpp/version.hpp"

struct kpp_field {
    kpp::CoefficientField field;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_manifest;

kpp_status fail(kpp_status code, const char* msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
kpp_status guarded(Fn&& fn) {
    try {
        fn();
        return KPP_OK;
    } catch (const kpp::config_error& e) {
        g_last_error = e.what();
        return KPP_ERR_CONFIG;
    } catch (const kpp::numeric_error& e) {
        g_last_error = e.what();
        return KPP_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return KPP_ERR_NUMERIC;
    }
}

} // namespace

extern "C" {

const char* kpp_version(void) { return KPP_VERSION_STRING; }

const char* kpp_last_error(void) { return g_last_error.c_str(); }

kpp_status kpp_field_create(const char* spec_text, kpp_field** out) {
    if (!spec_text || !out) return fail(KPP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        kpp::CoefficientField f = kpp::cli::field_from_text(spec_text);
        *out = new kpp_field{std::move(f)};
    });
}

void kpp_field_free(kpp_field* field) { delete field; }

kpp_status kpp_field_sample(const kpp_field* field, long long i, double* dprime, double* d,
                            double* c) {
    if (!field) return fail(KPP_ERR_ARGUMENT, "null field");
    return guarded([&] {
        if (dprime) *dprime = field->field.dprime(i);
        if (d) *d = field->field.d(i);
        if (c) *c = field->field.c(i);
    });
}

kpp_status kpp_field_reflect(const kpp_field* field, kpp_field** out) {
    if (!field || !out) return fail(KPP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new kpp_field{field->field.reflected()}; });
}

kpp_status kpp_field_shift(const kpp_field* field, long long j, kpp_field** out) {
    if (!field || !out) return fail(KPP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new kpp_field{field->field.shifted(j)}; });
}

kpp_status kpp_field_validate(const kpp_field* field, long long window_lo, long long window_hi,
                              int* pass, double* margin) {
    if (!field) return fail(KPP_ERR_ARGUMENT, "null field");
    return guarded([&] {
        kpp::ValidationReport r = kpp::validate_field(
            field->field, kpp::Nonlinearity::logistic(), kpp::Window{window_lo, window_hi});
        if (pass) *pass = r.pass ? 1 : 0;
        if (margin) *margin = r.margin;
    });
}

kpp_status kpp_lambda_closed_form(double dprime, double d, double c, double p, double* out) {
    if (!out) return fail(KPP_ERR_ARGUMENT, "null output");
    return guarded([&] { *out = kpp::spectral::lambda_closed_form(dprime, d, c, p); });
}

kpp_status kpp_lambda_periodic(const kpp_field* field, double p, int period, double* lambda,
                               double* residual) {
    if (!field || !lambda) return fail(KPP_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        kpp::spectral::EigenEstimate est =
            kpp::spectral::lambda_periodic(field->field, p, period);
        *lambda = est.lambda;
        if (residual) *residual = est.residual;
    });
}

kpp_status kpp_lambda_cell(const kpp_field* field, double p, const double* eps_schedule,
                           int n_eps, long long window_lo, long long window_hi, double* lambda) {
    if (!field || !lambda || !eps_schedule || n_eps < 3)
        return fail(KPP_ERR_ARGUMENT, "need a field, an output and >= 3 schedule entries");
    return guarded([&] {
        std::vector<double> sched(eps_schedule, eps_schedule + n_eps);
        kpp::spectral::EigenEstimate est = kpp::spectral::lambda_limit(
            field->field, p, sched, kpp::Window{window_lo, window_hi});
        *lambda = est.lambda;
    });
}

kpp_status kpp_gamma_block(const kpp_field* field, long long l, long long k, double* out) {
    if (!field || !out) return fail(KPP_ERR_ARGUMENT, "null argument");
    return guarded([&] { *out = kpp::spectral::tridiag_principal(field->field, l, k); });
}

kpp_status kpp_lyapunov_mu(const kpp_field* field, double gamma, long long range, double* mu,
                           double* nu) {
    if (!field || !mu) return fail(KPP_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        double floor = kpp::spectral::realization_gamma_floor(field->field, range);
        kpp::spectral::LyapunovPoint pt =
            kpp::spectral::lyapunov_mu(field->field, gamma, range, floor);
        *mu = pt.mu;
        if (nu) *nu = pt.nu;
    });
}

kpp_status kpp_spreading_speeds(const kpp_field* field, const char* method, char** json_out) {
    if (!field || !json_out) return fail(KPP_ERR_ARGUMENT, "null argument");
    *json_out = nullptr;
    return guarded([&] {
        kpp::speeds::SpeedMethod m =
            kpp::speeds::parse_method(method && *method ? method : "auto");
        kpp::speeds::SpeedReport rep = kpp::speeds::spreading_speeds(field->field, m);
        std::string text = "{\n";
        auto num = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        text += "  \"omega_right_upper\": " + num(rep.omega_right_upper) + ",\n";
        text += "  \"omega_right_lower\": " + num(rep.omega_right_lower) + ",\n";
        text += "  \"omega_left_upper\": " + num(rep.omega_left_upper) + ",\n";
        text += "  \"omega_left_lower\": " + num(rep.omega_left_lower) + ",\n";
        text += "  \"p_star_right\": " + num(rep.p_star_right) + ",\n";
        text += "  \"p_star_left\": " + num(rep.p_star_left) + ",\n";
        text += "  \"media_class\": \"" + rep.media_class + "\",\n";
        text += "  \"gap_diag\": " + num(rep.gap_diag) + "\n}\n";
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *json_out = buf;
    });
}

void kpp_string_free(char* s) { std::free(s); }

int kpp_run_task(const char* task, const char* config_path, const char* out_dir,
                 const long long* seeds, int n_seeds, const char* format) {
    if (!config_path) {
        g_last_error = "null config path";
        return KPP_ERR_CONFIG;
    }
    std::vector<long long> seed_vec;
    if (seeds && n_seeds > 0) seed_vec.assign(seeds, seeds + n_seeds);
    kpp::cli::RunResult res =
        kpp::cli::run_task(task ? task : "", config_path, out_dir ? out_dir : "", seed_vec,
                           format ? format : "");
    g_last_error = res.message;
    g_last_manifest = res.manifest_path;
    return res.exit_code;
}

const char* kpp_last_manifest(void) { return g_last_manifest.c_str(); }

} // extern "C"
