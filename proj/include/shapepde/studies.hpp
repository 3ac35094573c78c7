#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shapepde/config.hpp"

namespace shapepde {

struct StudyResult {
    int exit_code = 0;  // 0 ok, 2 config, 3 solver failure, 4 failed --check
    std::vector<std::string> artifacts;
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::string> check_failures;
};

// Runs one study, writes its CSV artifacts and summary.txt under cfg.out_dir.
// With `check`, the study's acceptance checks run and failures set exit 4.
StudyResult run_study(const StudyConfig& cfg, bool check);

// Full command-line front end: run <cfg> [--check] [--threads N] [--out DIR].
int run_cli(int argc, const char* const* argv);

}  // namespace shapepde
