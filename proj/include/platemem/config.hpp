// Run configuration: flat key = value text files describing one experiment
// (domain, nonlinearity, kernel, scheme, initial data, functional
// coefficients, output directory), with strict parsing — unknown keys and
// cross-field inconsistencies are errors, never warnings.
#pragma once

#include "platemem/diagnostics.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace platemem {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitKind { Zero, Random };

struct RunConfig {
    // domain
    int dimension = 1;
    double side_x = 2.0 * M_PI;
    double side_y = M_PI;
    int modes_x = 32;
    int modes_y = 16;
    double oversampling = 2.0;

    // model
    Nonlinearity f = Nonlinearity::cubic(1.0);
    MemoryKernel kernel = make_exponential(1.0, 1.0);
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;

    // scheme
    SchemeConfig scheme{1e-3, Scheme::ImexCN, 200.0, 100, 1e-8, MemoryRule::PlainWeights};

    // initial data
    InitKind init = InitKind::Random;
    double init_norm = 1.0;
    std::uint64_t seed = 20250823;

    // functional coefficients; audit_functional means run coefficient_audit
    FunctionalConfig functional;
    bool audit_functional = true;

    std::string out_dir = "out";

    DomainSpec domain() const;
    ModelParams model() const;
    StateVector initial_state(const ModalBasis& basis, const KernelQuadrature& quad) const;
};

// the demo experiment: 1D interval of length 2*pi, N = 32 modes,
// f(u) = u^3 - u, exponential kernel (1, 1), imex-cn at dt = 1e-3, T = 200
RunConfig default_config();

// Parses flat `key = value` text ('#' starts a comment; blank lines ignored).
// Unknown keys, duplicate keys, and malformed values throw ConfigError.
RunConfig parse_config_text(const std::string& text);

// reads the file and parses it; missing file throws ConfigError
RunConfig load_config(const std::string& path);

// round-trippable rendering of a config (every supported key, one per line)
std::string config_to_text(const RunConfig& cfg);

} // namespace platemem
