#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mmcov::cli {

enum ExitCode : int { kOk = 0, kSchema = 2, kNumeric = 3 };

struct CommonOptions {
    std::string scenario;  // file path or preset name
    std::vector<double> rc;  // overrides the file's sweep
    std::string t_grid;      // "start:stop:step" dB, empty = file/default
    std::string association; // "pathloss" | "power", empty = file
    std::string format = "csv";
    bool with_mc = false;
    std::optional<std::uint64_t> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<double> sigma_be_deg;
};

struct CoverageOptions {
    CommonOptions common;
    std::string mode = "twoball";  // exact | twoball
};

struct RateOptions {
    CommonOptions common;
    std::string mode = "gcq";            // gcq | adaptive | highsnr
    std::string pcov_mode = "twoball";   // exact | twoball
    bool normalize_bw = false;
    std::string baseline;  // preset name, empty = file or uwave-2.5ghz, "none" disables
};

struct FitCommandOptions {
    std::string scenario;
    int starts = 16;
    std::uint64_t seed = 1;
    std::string grid;       // "lo_db:hi_db:points", empty = default
    std::string residuals;  // CSV path, empty = not written
    bool synthetic = false; // fit the scenario's own two-ball intensity
};

struct ValidateOptions {
    std::vector<std::string> presets;  // empty = all
    std::vector<double> rc;            // empty = 50, 100, 150, 200
    std::uint64_t realizations = 100000;
    std::uint64_t seed = 1;
};

// Each command writes results to out and diagnostics to err and returns an
// ExitCode. Exceptions are mapped by run().
int cmd_coverage(const CoverageOptions& o, std::ostream& out, std::ostream& err);
int cmd_rate(const RateOptions& o, std::ostream& out, std::ostream& err);
int cmd_fit_twoball(const FitCommandOptions& o, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err);

// Runs fn, translating schema/usage errors to 2 and numeric failures to 3.
int run(const std::function<int()>& fn, std::ostream& err);

std::string format_number(double v);

}  // namespace mmcov::cli
