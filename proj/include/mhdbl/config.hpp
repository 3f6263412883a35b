#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mhdbl/error.hpp"
#include "mhdbl/instability.hpp"
#include "mhdbl/scenarios.hpp"

namespace mhdbl {

enum class Command { simulate, instability, eigen, transform_check, outflow_check };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

/// Syntax error in the config text.
class ParseFailure : public Error {
public:
    ParseFailure(const std::string& what, int line) : Error(ErrorKind::ParseError, what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Every semantic violation found, each as "section.key: reason".
class ValidationFailure : public Error {
public:
    explicit ValidationFailure(std::vector<std::string> list);
    const std::vector<std::string>& violations() const noexcept { return list_; }

private:
    std::vector<std::string> list_;
};

struct GridSection {
    int nx = 32, ny = 65;
    double y_max = 6.0, y_stretch = 0.0;
};

struct RunSection {
    double T = 0.2, dt = 0.01;
    std::string solver = "picard";  // picard | direct
    double tol = 1e-8;
    int max_iter = 30, m_monitor = 2, J = 1;
    double cfl = 0.5;
    bool contraction_search = false;  // halve T until the Picard map contracts
    int max_halvings = 4;
    bool snapshots = true;
    int samples = 5;  // transform-check: random fields
    int levels = 3;   // transform-check, outflow-check: refinement levels
};

struct DataSection {
    std::string kind = "bump";  // zero | bump | manufactured | random
    double amplitude = 1.0;
    double delta0 = 0.0;  // ≤ 0: taken from the data
    /// Gaussian dip subtracted from b at (π, dip_y) with width dip_width.
    double dip = 0.0, dip_y = 1.0, dip_width = 0.3;
};

struct OutflowSection {
    std::string mode = "constant";  // constant | evolved
    double U0 = 0.0, B0 = 1.0, dU = 0.1, dB = 0.1;
    int nt0 = 125;  // outflow-check: coarsest number of time steps
};

struct ScenarioConfig {
    Command command = Command::simulate;
    std::uint64_t seed = 0;
    GridSection grid;
    RunSection run;
    DataSection data;
    OutflowSection outflow;
    /// [profile] and [instability] both fill this.
    InstabilityConfig instability;
    bool eigen_cache = true;
    int collocation_nodes = 120;

    OutflowSpec outflow_spec() const;
};

/// TOML text to a validated config for `command`. A top-level `command` key,
/// when present, must agree. Throws ParseFailure or ValidationFailure.
ScenarioConfig parse_config(const std::string& text, Command command);

}  // namespace mhdbl
