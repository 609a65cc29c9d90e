#ifndef KPP_CONFIG_HPP
#define KPP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kpp/field.hpp"
#include "kpp/speeds.hpp"

namespace kpp::cli {

// Flat key=value config with dotted section prefixes.  Unknown keys are
// rejected; every numeric override is range-checked at parse time.
struct RunConfig {
    std::string task; // simulate | speed | eigen-curve | lyapunov | sandwich | ensemble

    FieldSpec field;
    Nonlinearity nonlinearity = Nonlinearity::logistic();

    long long validation_window = 4096;

    // simulate / sandwich
    double sim_horizon = 200.0;
    long long sim_window = 600; // symmetric half-width
    double sim_snapshot_interval = 0.25;
    long long sim_initial_radius = 0;
    std::vector<double> sim_levels{0.1, 0.5, 0.9};
    double sim_fit_fraction = 1.0 / 3.0;
    double sim_harnack_lag = 0.0; // 0 = no harnack report
    long long sim_harnack_samples = 1000;

    // eigen-curve
    double eigen_p_min = -2.0;
    double eigen_p_max = 2.0;
    long long eigen_p_count = 21;
    long long eigen_window = 8192; // half-width of the cell window
    std::vector<double> eigen_eps_schedule{0.1, 0.05, 0.025};
    speeds::SpeedMethod eigen_method = speeds::SpeedMethod::Auto;

    // lyapunov
    double lyap_gamma_offset_min = 0.1;
    double lyap_gamma_offset_max = 1.0;
    long long lyap_gamma_count = 20;
    long long lyap_range = 16384;

    // speed / sandwich / ensemble
    speeds::SpeedMethod speed_method = speeds::SpeedMethod::Auto;
    long long speed_random_range = 16384;
    double sandwich_tolerance = 0.03;
    double sandwich_margin_fraction = 0.05;

    std::vector<long long> seeds;

    std::string output_dir = ".";
    std::string output_format = "csv"; // csv | json

    // raw key/value pairs in file order, replayed into the manifest
    std::vector<std::pair<std::string, std::string>> raw;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Builds just the field/nonlinearity part (accepts only field.* and
// nonlinearity.* keys); used by the C API field constructor.
CoefficientField field_from_text(const std::string& text, Nonlinearity* nl = nullptr);

speeds::EigenOptions eigen_options(const RunConfig& cfg);

} // namespace kpp::cli

#endif
