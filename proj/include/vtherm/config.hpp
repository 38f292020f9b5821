// Run configuration: key/value text files with unit-aware parsing and the
// built-in material presets.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vtherm/physics.hpp"
#include "vtherm/vasculature.hpp"

namespace vtherm {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SweepParameter { Q, kappa };

struct SweepSpec {
    SweepParameter parameter = SweepParameter::Q;
    std::vector<double> values;  // SI for Q (m^3/s), W/m/K for kappa
};

struct OutputFlags {
    bool csv = true;
    bool vtk = false;
    bool profile = false;
};

struct RunConfig {
    VascularCase geometry;
    double domain_length = 0.1;  // m
    double domain_height = 0.1;  // m
    int nx = 100;
    int ny = 100;
    Diagonal diagonal = Diagonal::right;

    std::string material = "CFRP";  // preset name, empty when kappa explicit
    PhysicalParams params;          // SI units after parsing
    std::vector<double> q_list;     // m^3/s; params.Q is the first entry

    double solver_tolerance = 1e-10;
    OutputFlags outputs;
    std::optional<SweepSpec> sweep;
    bool fd_check = true;  // compute FD oracles in single-case runs
};

// Table-1 conductivities, W/m/K. Throws ConfigError on an unknown name.
double material_kappa(const std::string& name);

// Parse the documented key = value format. Unknown keys, missing required
// keys and invariant violations raise ConfigError naming the key.
RunConfig parse_config(const std::string& text);

// Exact rational conversions used by the parser.
constexpr double kMlPerMinToM3PerS = 1.0 / 60000000.0;

}  // namespace vtherm
