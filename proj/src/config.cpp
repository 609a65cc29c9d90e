#include "kpp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kpp/errors.hpp"

namespace kpp::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' expects a real number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw config_error("config: key '" + key + "' expects a comma list");
    return out;
}

std::vector<long long> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<long long> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
    if (out.empty()) throw config_error("config: key '" + key + "' expects a comma list");
    return out;
}

MarginalKind parse_marginal(const std::string& key, const std::string& v) {
    if (v == "constant") return MarginalKind::Constant;
    if (v == "uniform") return MarginalKind::Uniform;
    if (v == "two_state") return MarginalKind::TwoState;
    throw config_error("config: key '" + key + "' expects constant|uniform|two_state");
}

struct KeyValue {
    std::string key, value;
};

std::vector<KeyValue> tokenize(const std::string& text) {
    std::vector<KeyValue> out;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) +
                               " is not of the form key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw config_error("config: empty key on line " + std::to_string(lineno));
        if (!seen.insert(key).second)
            throw config_error("config: duplicate key '" + key + "'");
        out.push_back({key, value});
    }
    return out;
}

struct QpAccum {
    double mean = 1.0;
    bool mean_set = false;
    std::vector<double> amp, freq, phase;
};

void finish_qp(CosineSum& dst, const QpAccum& src, const std::string& name) {
    dst.mean = src.mean;
    dst.amplitude = src.amp;
    dst.frequency = src.freq;
    if (!src.phase.empty() && src.phase.size() != src.amp.size())
        throw config_error("config: field." + name + "_phase length differs from amplitudes");
    dst.phase = src.phase.empty() ? std::vector<double>(src.amp.size(), 0.0) : src.phase;
    if (dst.amplitude.size() != dst.frequency.size())
        throw config_error("config: field." + name + "_amp and field." + name +
                           "_freq lengths differ");
}

struct FieldAccum {
    FieldSpec spec;
    QpAccum qc, qd, qdp;
    bool qdp_touched = false;

    bool consume(const std::string& key, const std::string& value) {
        auto& s = spec;
        if (key == "field.kind") {
            if (value == "homogeneous") s.kind = FieldKind::Homogeneous;
            else if (value == "periodic") s.kind = FieldKind::Periodic;
            else if (value == "quasiperiodic") s.kind = FieldKind::Quasiperiodic;
            else if (value == "random_shift") s.kind = FieldKind::RandomShift;
            else
                throw config_error("config: field.kind expects "
                                   "homogeneous|periodic|quasiperiodic|random_shift");
            return true;
        }
        if (key == "field.dprime") { s.dprime = parse_real(key, value); return true; }
        if (key == "field.d") { s.d = parse_real(key, value); return true; }
        if (key == "field.c") { s.c = parse_real(key, value); return true; }
        if (key == "field.period") {
            s.period = static_cast<int>(parse_int(key, value));
            return true;
        }
        if (key == "field.dprime_table") { s.dprime_table = parse_real_list(key, value); return true; }
        if (key == "field.d_table") { s.d_table = parse_real_list(key, value); return true; }
        if (key == "field.c_table") { s.c_table = parse_real_list(key, value); return true; }
        if (key == "field.c_mean") { qc.mean = parse_real(key, value); qc.mean_set = true; return true; }
        if (key == "field.c_amp") { qc.amp = parse_real_list(key, value); return true; }
        if (key == "field.c_freq") { qc.freq = parse_real_list(key, value); return true; }
        if (key == "field.c_phase") { qc.phase = parse_real_list(key, value); return true; }
        if (key == "field.d_mean") { qd.mean = parse_real(key, value); qd.mean_set = true; return true; }
        if (key == "field.d_amp") { qd.amp = parse_real_list(key, value); return true; }
        if (key == "field.d_freq") { qd.freq = parse_real_list(key, value); return true; }
        if (key == "field.d_phase") { qd.phase = parse_real_list(key, value); return true; }
        if (key == "field.dprime_mean") {
            qdp.mean = parse_real(key, value);
            qdp.mean_set = true;
            qdp_touched = true;
            return true;
        }
        if (key == "field.dprime_amp") { qdp.amp = parse_real_list(key, value); qdp_touched = true; return true; }
        if (key == "field.dprime_freq") { qdp.freq = parse_real_list(key, value); qdp_touched = true; return true; }
        if (key == "field.dprime_phase") { qdp.phase = parse_real_list(key, value); qdp_touched = true; return true; }
        if (key == "field.seed") {
            s.seed = static_cast<std::uint64_t>(parse_int(key, value));
            return true;
        }
        if (key == "field.c_law") { s.rand_c.kind = parse_marginal(key, value); return true; }
        if (key == "field.c_lo") { s.rand_c.a = parse_real(key, value); return true; }
        if (key == "field.c_hi") { s.rand_c.b = parse_real(key, value); return true; }
        if (key == "field.d_law") { s.rand_d.kind = parse_marginal(key, value); return true; }
        if (key == "field.d_lo") { s.rand_d.a = parse_real(key, value); return true; }
        if (key == "field.d_hi") { s.rand_d.b = parse_real(key, value); return true; }
        if (key == "field.tie_dprime") { s.tie_dprime = parse_bool(key, value); return true; }
        if (key == "field.dprime_law") { s.rand_dprime.kind = parse_marginal(key, value); return true; }
        if (key == "field.dprime_lo") { s.rand_dprime.a = parse_real(key, value); return true; }
        if (key == "field.dprime_hi") { s.rand_dprime.b = parse_real(key, value); return true; }
        return false;
    }

    FieldSpec finish() {
        if (spec.kind == FieldKind::Quasiperiodic) {
            finish_qp(spec.qp_c, qc, "c");
            finish_qp(spec.qp_d, qd, "d");
            if (qdp_touched)
                finish_qp(spec.qp_dprime, qdp, "dprime");
            else
                spec.qp_dprime = spec.qp_d; // d' = d unless given separately
        }
        spec.validate();
        return spec;
    }
};

struct NlAccum {
    std::string family = "logistic";
    std::vector<double> table;
    double holder = 1.0;

    bool consume(const std::string& key, const std::string& value) {
        if (key == "nonlinearity.family") {
            if (value != "logistic" && value != "table")
                throw config_error("config: nonlinearity.family expects logistic|table");
            family = value;
            return true;
        }
        if (key == "nonlinearity.table") { table = parse_real_list(key, value); return true; }
        if (key == "nonlinearity.holder") { holder = parse_real(key, value); return true; }
        return false;
    }

    Nonlinearity finish() const {
        if (family == "logistic") return Nonlinearity::logistic();
        return Nonlinearity::table(table, holder);
    }
};

} // namespace

CoefficientField field_from_text(const std::string& text, Nonlinearity* nl) {
    FieldAccum fa;
    NlAccum na;
    for (const auto& kv : tokenize(text)) {
        if (fa.consume(kv.key, kv.value)) continue;
        if (na.consume(kv.key, kv.value)) continue;
        throw config_error("config: unknown key '" + kv.key + "'");
    }
    if (nl) *nl = na.finish();
    return CoefficientField(fa.finish());
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    FieldAccum fa;
    NlAccum na;

    for (const auto& kv : tokenize(text)) {
        cfg.raw.emplace_back(kv.key, kv.value);
        const std::string& key = kv.key;
        const std::string& value = kv.value;
        if (fa.consume(key, value)) continue;
        if (na.consume(key, value)) continue;
        if (key == "task") { cfg.task = value; continue; }
        if (key == "validation.window") {
            cfg.validation_window = parse_int(key, value);
            if (cfg.validation_window < 16)
                throw config_error("config: validation.window must be >= 16");
            continue;
        }
        if (key == "sim.horizon") {
            cfg.sim_horizon = parse_real(key, value);
            if (!(cfg.sim_horizon > 0.0))
                throw config_error("config: sim.horizon must be > 0");
            continue;
        }
        if (key == "sim.window") {
            cfg.sim_window = parse_int(key, value);
            if (cfg.sim_window < 8) throw config_error("config: sim.window must be >= 8");
            continue;
        }
        if (key == "sim.snapshot_interval") {
            cfg.sim_snapshot_interval = parse_real(key, value);
            if (!(cfg.sim_snapshot_interval > 0.0))
                throw config_error("config: sim.snapshot_interval must be > 0");
            continue;
        }
        if (key == "sim.initial_radius") {
            cfg.sim_initial_radius = parse_int(key, value);
            if (cfg.sim_initial_radius < 0)
                throw config_error("config: sim.initial_radius must be >= 0");
            continue;
        }
        if (key == "sim.levels") {
            cfg.sim_levels = parse_real_list(key, value);
            for (double l : cfg.sim_levels)
                if (!(l > 0.0) || !(l < 1.0))
                    throw config_error("config: sim.levels must lie in (0,1)");
            continue;
        }
        if (key == "sim.fit_fraction") {
            cfg.sim_fit_fraction = parse_real(key, value);
            if (!(cfg.sim_fit_fraction > 0.0) || !(cfg.sim_fit_fraction < 1.0))
                throw config_error("config: sim.fit_fraction must lie in (0,1)");
            continue;
        }
        if (key == "sim.harnack_lag") {
            cfg.sim_harnack_lag = parse_real(key, value);
            if (!(cfg.sim_harnack_lag > 0.0))
                throw config_error("config: sim.harnack_lag must be > 0");
            continue;
        }
        if (key == "sim.harnack_samples") {
            cfg.sim_harnack_samples = parse_int(key, value);
            if (cfg.sim_harnack_samples < 1)
                throw config_error("config: sim.harnack_samples must be >= 1");
            continue;
        }
        if (key == "eigen.p_min") { cfg.eigen_p_min = parse_real(key, value); continue; }
        if (key == "eigen.p_max") { cfg.eigen_p_max = parse_real(key, value); continue; }
        if (key == "eigen.p_count") {
            cfg.eigen_p_count = parse_int(key, value);
            if (cfg.eigen_p_count < 3) throw config_error("config: eigen.p_count must be >= 3");
            continue;
        }
        if (key == "eigen.window") {
            cfg.eigen_window = parse_int(key, value);
            if (cfg.eigen_window < 32) throw config_error("config: eigen.window must be >= 32");
            continue;
        }
        if (key == "eigen.eps_schedule") {
            cfg.eigen_eps_schedule = parse_real_list(key, value);
            for (double e : cfg.eigen_eps_schedule)
                if (!(e > 0.0)) throw config_error("config: eigen.eps_schedule must be positive");
            continue;
        }
        if (key == "eigen.method") { cfg.eigen_method = speeds::parse_method(value); continue; }
        if (key == "lyapunov.gamma_offset_min") {
            cfg.lyap_gamma_offset_min = parse_real(key, value);
            if (!(cfg.lyap_gamma_offset_min > 0.0))
                throw config_error("config: lyapunov.gamma_offset_min must be > 0");
            continue;
        }
        if (key == "lyapunov.gamma_offset_max") {
            cfg.lyap_gamma_offset_max = parse_real(key, value);
            continue;
        }
        if (key == "lyapunov.gamma_count") {
            cfg.lyap_gamma_count = parse_int(key, value);
            if (cfg.lyap_gamma_count < 2)
                throw config_error("config: lyapunov.gamma_count must be >= 2");
            continue;
        }
        if (key == "lyapunov.range") {
            cfg.lyap_range = parse_int(key, value);
            if (cfg.lyap_range < 1000)
                throw config_error("config: lyapunov.range must be >= 1000");
            continue;
        }
        if (key == "speed.method") { cfg.speed_method = speeds::parse_method(value); continue; }
        if (key == "speed.random_range") {
            cfg.speed_random_range = parse_int(key, value);
            if (cfg.speed_random_range < 1000)
                throw config_error("config: speed.random_range must be >= 1000");
            continue;
        }
        if (key == "sandwich.tolerance") {
            cfg.sandwich_tolerance = parse_real(key, value);
            if (!(cfg.sandwich_tolerance > 0.0))
                throw config_error("config: sandwich.tolerance must be > 0");
            continue;
        }
        if (key == "sandwich.margin_fraction") {
            cfg.sandwich_margin_fraction = parse_real(key, value);
            if (!(cfg.sandwich_margin_fraction > 0.0))
                throw config_error("config: sandwich.margin_fraction must be > 0");
            continue;
        }
        if (key == "seeds") { cfg.seeds = parse_int_list(key, value); continue; }
        if (key == "output.dir") { cfg.output_dir = value; continue; }
        if (key == "output.format") {
            if (value != "csv" && value != "json")
                throw config_error("config: output.format expects csv|json");
            cfg.output_format = value;
            continue;
        }
        throw config_error("config: unknown key '" + key + "'");
    }

    if (cfg.eigen_p_min >= cfg.eigen_p_max)
        throw config_error("config: eigen.p_min must be < eigen.p_max");
    if (cfg.lyap_gamma_offset_min >= cfg.lyap_gamma_offset_max)
        throw config_error("config: lyapunov.gamma_offset_min must be < gamma_offset_max");
    for (std::size_t i = 0; i + 1 < cfg.eigen_eps_schedule.size(); ++i)
        if (!(cfg.eigen_eps_schedule[i] > cfg.eigen_eps_schedule[i + 1]))
            throw config_error("config: eigen.eps_schedule must be strictly decreasing");

    cfg.field = fa.finish();
    cfg.nonlinearity = na.finish();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

speeds::EigenOptions eigen_options(const RunConfig& cfg) {
    speeds::EigenOptions opt;
    opt.cell_window = Window{-cfg.eigen_window, cfg.eigen_window - 1};
    opt.eps_schedule = cfg.eigen_eps_schedule;
    opt.random_range = cfg.speed_random_range;
    return opt;
}

} // namespace kpp::cli
