#pragma once

// Run configuration: a flat key = value text file (a TOML subset: bare or
// quoted strings, numbers, and [a, b] lists; '#' comments) overridden by
// --key=value command-line flags.

#include "plateau/curvature.hpp"
#include "plateau/geometry.hpp"
#include "plateau/kernels.hpp"
#include "plateau/solver.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plateau {

/// Position-carrying configuration error; what() is "source:line:column: message".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string source, int line, int column);
    [[nodiscard]] const std::string& message() const { return message_; }
    [[nodiscard]] const std::string& source() const { return source_; }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    std::string message_;
    std::string source_;
    int line_;
    int column_;
};

struct RawValue {
    std::string text;  // unquoted; lists keep their elements comma separated
    std::string source;
    int line = 0;
    int column = 0;  // 1-based column of the value
};

using RawConfig = std::map<std::string, RawValue, std::less<>>;

/// Parses a whole config file; later keys override earlier ones.
RawConfig parse_config_text(std::string_view text, const std::string& source);

/// One "key=value" override (a leading "--" is accepted).
void apply_override(RawConfig& raw, std::string_view assignment, const std::string& source, int column = 1);

struct RunConfig {
    std::string domain = "disk 1";
    std::string f = "mean";
    double sigma = 0.5;
    int n_r = 32;
    int n_phi = 64;
    std::string schedule;  // empty: defaults
    std::string out = "out";
    std::uint64_t seed = 1;
    Exec exec = Exec::openmp;
    std::vector<double> sweep_sigma;
    std::vector<double> sweep_theta;
    double oracle_radius = 1.0;
    std::vector<int> oracle_grids = {16, 32, 64};

    [[nodiscard]] Domain make_domain() const;
    [[nodiscard]] CurvatureSpec make_spec() const;
    [[nodiscard]] ContinuationSchedule make_schedule(const Domain& domain, const CurvatureSpec& spec) const;
};

/// Keys: domain, f, sigma, grid, schedule, out, seed, exec, sweep_sigma,
/// sweep_theta, oracle_radius, oracle_grids.  Every value is validated here
/// (sigma in (0,1), grid limits, parseable f, domain and schedule).
RunConfig build_config(const RawConfig& raw);

/// "disk R" | "ellipse a,b" | "star base,amp,mode" | "interval d" |
/// "fourier a0,a1,...[;b1,b2,...]".
Domain parse_domain(std::string_view preset, int n_r, int n_phi);

/// "t=0,0.5,1;theta=0.5,0;eps=0.05,0.025,0.0125;bisections=12"; parts that
/// are left out keep their defaults.
ContinuationSchedule parse_schedule(std::string_view text, ContinuationSchedule defaults);

std::vector<double> parse_number_list(std::string_view text);

}  // namespace plateau
