#include "kpp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "kpp/csv.hpp"
#include "kpp/dynamics.hpp"
#include "kpp/errors.hpp"
#include "kpp/spectral.hpp"
#include "kpp/speeds.hpp"
#include "kpp/version.hpp"

namespace kpp::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

int worker_count(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    long cap = hw ? hw : 2;
    if (const char* env = std::getenv("KPP_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) cap = v;
    }
    return static_cast<int>(std::min<std::size_t>(jobs, static_cast<std::size_t>(cap)));
}

class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw config_error("output: cannot create directory " + dir_.string());
    }

    // temp file + rename, serialized through one writer
    void write(const std::string& name, const std::string& content) {
        std::lock_guard<std::mutex> lock(mutex_);
        fs::path final_path = dir_ / name;
        fs::path tmp = final_path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw config_error("output: cannot write " + tmp.string());
            out << content;
        }
        fs::rename(tmp, final_path);
        names_.push_back(name);
        bytes_.push_back(content.size());
    }

    ordered_json outputs_json() const {
        ordered_json arr = ordered_json::array();
        for (std::size_t i = 0; i < names_.size(); ++i) {
            ordered_json o;
            o["file"] = names_[i];
            o["bytes"] = bytes_[i];
            arr.push_back(o);
        }
        return arr;
    }

    const std::vector<std::string>& names() const { return names_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::mutex mutex_;
    std::vector<std::string> names_;
    std::vector<std::size_t> bytes_;
};

std::string manifest_text(const RunConfig& cfg, const std::string& task,
                          const std::vector<long long>& seeds, const ArtifactWriter& writer) {
    ordered_json m;
    m["toolkit_version"] = KPP_VERSION_STRING;
    m["task"] = task;
    ordered_json conf = ordered_json::object();
    for (const auto& [k, v] : cfg.raw) conf[k] = v;
    m["config"] = conf;
    ordered_json seed_arr = ordered_json::array();
    for (long long s : seeds) seed_arr.push_back(s);
    m["seeds"] = seed_arr;
    m["outputs"] = writer.outputs_json();
    auto now = std::chrono::system_clock::now().time_since_epoch();
    m["generated_at_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    return m.dump(2) + "\n";
}


// tabular artifact, emitted as CSV or JSON per output.format
class Table {
public:
    Table(std::string name, std::vector<std::string> columns)
        : name_(std::move(name)), columns_(std::move(columns)) {}

    Table& cell(double v) { row_.push_back(format_double(v)); quoted_.push_back(false); return *this; }
    Table& cell(long long v) { row_.push_back(format_int(v)); quoted_.push_back(false); return *this; }
    Table& cell(const std::string& v) { row_.push_back(v); quoted_.push_back(true); return *this; }
    void end_row() {
        rows_.push_back(std::move(row_));
        quoted_rows_.push_back(std::move(quoted_));
        row_.clear();
        quoted_.clear();
    }

    void emit(const RunConfig& cfg, ArtifactWriter& writer) const {
        if (cfg.output_format == "json") {
            std::string out = "{\n  \"columns\": [";
            for (std::size_t c = 0; c < columns_.size(); ++c)
                out += (c ? ", \"" : "\"") + columns_[c] + "\"";
            out += "],\n  \"rows\": [\n";
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                out += "    [";
                for (std::size_t c = 0; c < rows_[r].size(); ++c) {
                    if (c) out += ", ";
                    if (quoted_rows_[r][c]) out += "\"" + rows_[r][c] + "\"";
                    else out += rows_[r][c];
                }
                out += r + 1 < rows_.size() ? "],\n" : "]\n";
            }
            out += "  ]\n}\n";
            writer.write(name_ + ".json", out);
        } else {
            std::string out;
            for (std::size_t c = 0; c < columns_.size(); ++c)
                out += (c ? "," : "") + columns_[c];
            out += '\n';
            for (const auto& row : rows_) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    if (c) out += ',';
                    out += row[c];
                }
                out += '\n';
            }
            writer.write(name_ + ".csv", out);
        }
    }

private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<std::string> row_;
    std::vector<bool> quoted_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::vector<bool>> quoted_rows_;
};

Window sym_window(long long half) { return Window{-half, half}; }

CoefficientField make_field(const RunConfig& cfg) { return CoefficientField(cfg.field); }

speeds::SpeedMethod task_method(const RunConfig& cfg) { return cfg.speed_method; }

std::string speed_report_json(const speeds::SpeedReport& rep) {
    ordered_json j;
    j["omega_right_upper"] = rep.omega_right_upper;
    j["omega_right_lower"] = rep.omega_right_lower;
    j["omega_left_upper"] = rep.omega_left_upper;
    j["omega_left_lower"] = rep.omega_left_lower;
    j["p_star_right"] = rep.p_star_right;
    j["p_star_left"] = rep.p_star_left;
    j["media_class"] = rep.media_class;
    j["gap_diag"] = rep.gap_diag;
    j["bounds_only"] = rep.bounds_only;
    j["edge_hit"] = rep.edge_hit;
    j["multimodal_fallback"] = rep.multimodal_fallback;
    return j.dump(2) + "\n";
}

Table hamiltonian_table(const std::string& name, const HamiltonianCurve& curve) {
    Table t(name, {"p", "lambda", "method", "residual", "window", "eps"});
    for (std::size_t k = 0; k < curve.p.size(); ++k) {
        t.cell(curve.p[k])
            .cell(curve.h_lower[k])
            .cell(std::string(eigen_method_name(curve.method[k])))
            .cell(curve.residual[k])
            .cell(curve.window_hi - curve.window_lo + 1)
            .cell(curve.eps[k]);
        t.end_row();
    }
    return t;
}

void task_simulate(const RunConfig& cfg, ArtifactWriter& writer) {
    Window win = sym_window(cfg.sim_window);
    dynamics::IntegrationPolicy policy;
    policy.snapshot_times = dynamics::uniform_times(0.0, cfg.sim_horizon, cfg.sim_snapshot_interval);
    policy.levels = cfg.sim_levels;
    dynamics::LatticeState init =
        dynamics::block_initial(win, -cfg.sim_initial_radius, cfg.sim_initial_radius);
    CoefficientField field = make_field(cfg);
    dynamics::Trajectory traj =
        dynamics::integrate(field, cfg.nonlinearity, init, cfg.sim_horizon, policy);

    Table ftab("field", {"i", "dprime", "d", "c"});
    for (long long i = win.lo; i <= win.hi; ++i) {
        ftab.cell(i).cell(field.dprime(i)).cell(field.d(i)).cell(field.c(i));
        ftab.end_row();
    }
    ftab.emit(cfg, writer);

    Table ttab("trajectory", {"t", "i", "u"});
    for (const auto& s : traj.snapshots) {
        for (long long i = s.lo; i <= s.hi(); ++i) {
            ttab.cell(s.t).cell(i).cell(s.at(i));
            ttab.end_row();
        }
    }
    ttab.emit(cfg, writer);

    Table tracks("fronts", {"t", "level", "direction", "position"});
    for (const auto& track : traj.tracks) {
        for (std::size_t k = 0; k < track.t.size(); ++k) {
            if (std::isnan(track.position[k])) continue;
            tracks.cell(track.t[k])
                .cell(track.level)
                .cell(std::string(track.direction > 0 ? "+" : "-"))
                .cell(track.position[k]);
            tracks.end_row();
        }
    }
    tracks.emit(cfg, writer);

    if (cfg.sim_harnack_lag > 0.0) {
        dynamics::SamplingPlan plan;
        plan.count = cfg.sim_harnack_samples;
        dynamics::HarnackReport rep = dynamics::harnack_check(traj, cfg.sim_harnack_lag, plan);
        ordered_json j;
        j["lag"] = rep.lag;
        j["theta"] = rep.theta;
        j["max_ratio"] = rep.max_ratio;
        j["samples"] = rep.samples;
        j["pass"] = rep.pass;
        writer.write("harnack.json", j.dump(2) + "\n");
    }
}

void task_speed(const RunConfig& cfg, ArtifactWriter& writer) {
    speeds::EigenOptions opt = eigen_options(cfg);
    speeds::SpeedReport rep = speeds::spreading_speeds(make_field(cfg), task_method(cfg), opt);
    writer.write("speed.json", speed_report_json(rep));

    std::vector<double> grid;
    for (long long k = 0; k < cfg.eigen_p_count; ++k)
        grid.push_back(cfg.eigen_p_min + (cfg.eigen_p_max - cfg.eigen_p_min) *
                                             static_cast<double>(k) /
                                             static_cast<double>(cfg.eigen_p_count - 1));
    HamiltonianCurve curve = speeds::hamiltonian_curve(make_field(cfg), grid, task_method(cfg), opt);
    hamiltonian_table("hamiltonian", curve).emit(cfg, writer);
}

void task_eigen_curve(const RunConfig& cfg, ArtifactWriter& writer) {
    speeds::EigenOptions opt = eigen_options(cfg);
    std::vector<double> grid;
    for (long long k = 0; k < cfg.eigen_p_count; ++k)
        grid.push_back(cfg.eigen_p_min + (cfg.eigen_p_max - cfg.eigen_p_min) *
                                             static_cast<double>(k) /
                                             static_cast<double>(cfg.eigen_p_count - 1));
    HamiltonianCurve curve = speeds::hamiltonian_curve(make_field(cfg), grid, cfg.eigen_method, opt);
    hamiltonian_table("eigen_curve", curve).emit(cfg, writer);
}

void task_lyapunov(const RunConfig& cfg, ArtifactWriter& writer) {
    CoefficientField field = make_field(cfg);
    std::vector<long long> ks;
    for (long long k = 64; k <= 2048; k *= 2) ks.push_back(k);
    double sched = spectral::gamma_infinity(field, ks).value;
    double gamma_inf =
        std::max(sched, spectral::realization_gamma_floor(field, cfg.lyap_range));
    std::vector<double> grid;
    for (long long k = 0; k < cfg.lyap_gamma_count; ++k)
        grid.push_back(gamma_inf + cfg.lyap_gamma_offset_min +
                       (cfg.lyap_gamma_offset_max - cfg.lyap_gamma_offset_min) *
                           static_cast<double>(k) /
                           static_cast<double>(cfg.lyap_gamma_count - 1));
    Table t("lyapunov", {"gamma", "mu", "nu", "slope_check"});
    for (double g : grid) {
        spectral::LyapunovPoint pt = spectral::lyapunov_mu(field, g, cfg.lyap_range, gamma_inf);
        t.cell(pt.gamma).cell(pt.mu).cell(pt.nu).cell(pt.slope_check);
        t.end_row();
    }
    t.emit(cfg, writer);
}

bool task_sandwich(const RunConfig& cfg, ArtifactWriter& writer) {
    speeds::SimParams sim;
    sim.horizon = cfg.sim_horizon;
    sim.window = sym_window(cfg.sim_window);
    sim.snapshot_interval = cfg.sim_snapshot_interval;
    sim.initial_lo = -cfg.sim_initial_radius;
    sim.initial_hi = cfg.sim_initial_radius;
    sim.fit_fraction = cfg.sim_fit_fraction;
    sim.tolerance = cfg.sandwich_tolerance;
    sim.margin_fraction = cfg.sandwich_margin_fraction;
    sim.levels = cfg.sim_levels;

    speeds::SandwichReport rep =
        speeds::sandwich_report(make_field(cfg), cfg.nonlinearity, sim, task_method(cfg),
                                eigen_options(cfg));

    Table t("sandwich", {"level", "direction", "fitted_speed", "stderr", "omega_lower",
                          "omega_upper", "inside"});
    for (const auto& row : rep.rows) {
        t.cell(row.level)
            .cell(std::string(row.direction > 0 ? "+" : "-"))
            .cell(row.fitted_speed)
            .cell(row.stderr_slope)
            .cell(row.omega_lower)
            .cell(row.omega_upper)
            .cell(std::string(row.inside ? "true" : "false"));
        t.end_row();
    }
    t.emit(cfg, writer);

    ordered_json j;
    j["speeds"] = ordered_json::parse(speed_report_json(rep.speeds));
    j["ahead_max_right"] = rep.ahead_max_right;
    j["ahead_max_left"] = rep.ahead_max_left;
    j["behind_min"] = rep.behind_min;
    j["ahead_ok"] = rep.ahead_ok;
    j["behind_ok"] = rep.behind_ok;
    j["pass"] = rep.pass;
    writer.write("sandwich.json", j.dump(2) + "\n");
    return rep.pass;
}

// seed overrides touch only random laws; deterministic laws yield identical
// members, which is the documented degenerate case
void task_ensemble(const RunConfig& cfg, const std::vector<long long>& seeds,
                   ArtifactWriter& writer) {
    if (seeds.size() < 2) throw config_error("ensemble: needs at least 2 seeds");

    struct PerSeed {
        long long seed;
        speeds::SpeedReport rep;
        std::string error;
    };
    std::vector<PerSeed> results(seeds.size());
    std::atomic<std::size_t> next{0};
    int workers = worker_count(seeds.size());
    auto run_one = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= seeds.size()) return;
            results[idx].seed = seeds[idx];
            FieldSpec spec = cfg.field;
            spec.seed = static_cast<std::uint64_t>(seeds[idx]);
            try {
                results[idx].rep = speeds::spreading_speeds(CoefficientField(spec),
                                                            task_method(cfg), eigen_options(cfg));
            } catch (const std::exception& e) {
                results[idx].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_one);
    for (auto& th : pool) th.join();

    for (const auto& r : results)
        if (!r.error.empty())
            throw numeric_error("ensemble", "seed " + std::to_string(r.seed) + ": " + r.error);

    double mean = 0.0, lo = results[0].rep.omega_right_lower, hi = lo;
    ordered_json per_seed = ordered_json::array();
    for (const auto& r : results) {
        double omega = r.rep.omega_right_lower;
        mean += omega;
        lo = std::min(lo, omega);
        hi = std::max(hi, omega);
        ordered_json e;
        e["seed"] = r.seed;
        e["omega"] = omega;
        e["p_star"] = r.rep.p_star_right;
        per_seed.push_back(e);
    }
    mean /= static_cast<double>(results.size());

    ordered_json j;
    j["per_seed"] = per_seed;
    j["mean"] = mean;
    j["min"] = lo;
    j["max"] = hi;
    j["spread_over_mean"] = (hi - lo) / mean;
    writer.write("ensemble.json", j.dump(2) + "\n");
}

} // namespace

RunResult run_task(const std::string& task, const std::string& config_path,
                   const std::string& out_dir, const std::vector<long long>& seeds,
                   const std::string& format) {
    RunResult res;
    try {
        RunConfig cfg = parse_config_file(config_path);
        if (!task.empty()) cfg.task = task;
        if (cfg.task.empty())
            throw config_error("config: no task given (config 'task' key or CLI subcommand)");
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!format.empty()) {
            if (format != "csv" && format != "json")
                throw config_error("config: output format expects csv|json");
            cfg.output_format = format;
        }
        std::vector<long long> effective_seeds = seeds.empty() ? cfg.seeds : seeds;
        if (!effective_seeds.empty() && cfg.task != "ensemble")
            cfg.field.seed = static_cast<std::uint64_t>(effective_seeds.front());
        if (effective_seeds.empty())
            effective_seeds.push_back(static_cast<long long>(cfg.field.seed));

        ArtifactWriter writer(cfg.output_dir);
        bool sandwich_pass = true;
        if (cfg.task == "simulate") {
            task_simulate(cfg, writer);
        } else if (cfg.task == "speed") {
            task_speed(cfg, writer);
        } else if (cfg.task == "eigen-curve") {
            task_eigen_curve(cfg, writer);
        } else if (cfg.task == "lyapunov") {
            task_lyapunov(cfg, writer);
        } else if (cfg.task == "sandwich") {
            sandwich_pass = task_sandwich(cfg, writer);
        } else if (cfg.task == "ensemble") {
            task_ensemble(cfg, effective_seeds, writer);
        } else {
            throw config_error("config: unknown task '" + cfg.task + "'");
        }

        writer.write("manifest.json", manifest_text(cfg, cfg.task, effective_seeds, writer));
        res.manifest_path = (writer.dir() / "manifest.json").string();
        res.artifacts = writer.names();
        if (!sandwich_pass) {
            res.exit_code = 1;
            res.message = "sandwich: acceptance checks failed";
        }
        return res;
    } catch (const config_error& e) {
        res.exit_code = 2;
        res.message = e.what();
        return res;
    } catch (const numeric_error& e) {
        res.exit_code = 3;
        res.message = e.what();
        return res;
    } catch (const std::exception& e) {
        res.exit_code = 3;
        res.message = e.what();
        return res;
    }
}

} // namespace kpp::cli
