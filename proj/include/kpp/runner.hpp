#ifndef KPP_RUNNER_HPP
#define KPP_RUNNER_HPP

#include <string>
#include <vector>

#include "kpp/config.hpp"

namespace kpp::cli {

struct RunResult {
    int exit_code = 0;       // 0 ok, 1 sandwich failure, 2 config error, 3 numerical abort
    std::string message;     // error text for nonzero codes
    std::string manifest_path;
    std::vector<std::string> artifacts;
};

// Executes one task.  `task` overrides the config's task line when non-empty;
// `seeds` (from the command line) override the config seed list when
// non-empty.  Artifacts are written atomically under out_dir.
RunResult run_task(const std::string& task, const std::string& config_path,
                   const std::string& out_dir, const std::vector<long long>& seeds,
                   const std::string& format);

} // namespace kpp::cli

#endif
