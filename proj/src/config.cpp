#include "platemem/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace platemem {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    }
}

// side lengths accept "pi", "2pi", or a plain number
double parse_length(const std::string& key, const std::string& value) {
    if (value == "pi") return M_PI;
    if (value == "2pi") return 2.0 * M_PI;
    const double x = parse_number(key, value);
    if (!(x > 0.0)) throw ConfigError("key '" + key + "': side length must be positive");
    return x;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty value list");
    return out;
}

} // namespace

DomainSpec RunConfig::domain() const {
    if (dimension == 1) return DomainSpec::interval(side_x, modes_x, oversampling);
    return DomainSpec::rectangle(side_x, side_y, modes_x, modes_y, oversampling);
}

ModelParams RunConfig::model() const {
    ModelParams p;
    p.f = f;
    p.kernel = kernel;
    p.c1 = c1;
    p.c2 = c2;
    p.c3 = c3;
    return p;
}

StateVector RunConfig::initial_state(const ModalBasis& basis, const KernelQuadrature& quad) const {
    if (init == InitKind::Zero) return StateVector(basis, quad);
    return random_state(basis, quad, seed, init_norm);
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg = default_config();
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

        if (key == "dimension") {
            const long long d = parse_integer(key, value);
            if (d != 1 && d != 2) throw ConfigError("key 'dimension': must be 1 or 2");
            cfg.dimension = static_cast<int>(d);
        } else if (key == "side") {
            cfg.side_x = parse_length(key, value);
        } else if (key == "side_y") {
            cfg.side_y = parse_length(key, value);
        } else if (key == "modes") {
            const long long n = parse_integer(key, value);
            if (n < 1) throw ConfigError("key 'modes': must be >= 1");
            cfg.modes_x = static_cast<int>(n);
        } else if (key == "modes_y") {
            const long long n = parse_integer(key, value);
            if (n < 1) throw ConfigError("key 'modes_y': must be >= 1");
            cfg.modes_y = static_cast<int>(n);
        } else if (key == "oversampling") {
            cfg.oversampling = parse_number(key, value);
            if (!(cfg.oversampling >= 1.5)) throw ConfigError("key 'oversampling': must be >= 1.5");
        } else if (key == "nonlinearity") {
            if (value == "zero") {
                cfg.f = Nonlinearity::zero();
            } else if (value.rfind("cubic:", 0) == 0) {
                cfg.f = Nonlinearity::cubic(parse_number(key, trim(value.substr(6))));
            } else if (value.rfind("poly:", 0) == 0) {
                cfg.f = Nonlinearity(parse_number_list(key, trim(value.substr(5))));
            } else {
                throw ConfigError("key 'nonlinearity': expected zero | cubic:BETA | poly:c0,c1,...");
            }
        } else if (key == "kernel") {
            if (value.rfind("exponential:", 0) == 0) {
                const std::vector<double> p = parse_number_list(key, trim(value.substr(12)));
                if (p.size() != 2)
                    throw ConfigError("key 'kernel': exponential needs kappa0,delta");
                cfg.kernel = make_exponential(p[0], p[1]);
            } else if (value.rfind("table:", 0) == 0) {
                try {
                    cfg.kernel = load_table(trim(value.substr(6)));
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("key 'kernel': ") + e.what());
                }
            } else {
                throw ConfigError("key 'kernel': expected exponential:KAPPA0,DELTA | table:PATH");
            }
        } else if (key == "c1") {
            cfg.c1 = parse_number(key, value);
        } else if (key == "c2") {
            cfg.c2 = parse_number(key, value);
        } else if (key == "c3") {
            cfg.c3 = parse_number(key, value);
        } else if (key == "scheme") {
            if (value == "imex1")
                cfg.scheme.scheme = Scheme::Imex1;
            else if (value == "imex-cn")
                cfg.scheme.scheme = Scheme::ImexCN;
            else
                throw ConfigError("key 'scheme': expected imex1 | imex-cn");
        } else if (key == "dt") {
            cfg.scheme.dt = parse_number(key, value);
            if (!(cfg.scheme.dt > 0.0)) throw ConfigError("key 'dt': must be positive");
        } else if (key == "total_time") {
            cfg.scheme.total_time = parse_number(key, value);
            if (cfg.scheme.total_time < 0.0) throw ConfigError("key 'total_time': must be >= 0");
        } else if (key == "sample_stride") {
            const long long n = parse_integer(key, value);
            if (n < 1) throw ConfigError("key 'sample_stride': must be >= 1");
            cfg.scheme.sample_stride = static_cast<int>(n);
        } else if (key == "tail_tol") {
            cfg.scheme.tail_tol = parse_number(key, value);
            if (!(cfg.scheme.tail_tol > 0.0)) throw ConfigError("key 'tail_tol': must be positive");
        } else if (key == "memory_rule") {
            if (value == "plain")
                cfg.scheme.memory_rule = MemoryRule::PlainWeights;
            else if (value == "age-trapezoid")
                cfg.scheme.memory_rule = MemoryRule::AgeTrapezoid;
            else
                throw ConfigError("key 'memory_rule': expected plain | age-trapezoid");
        } else if (key == "init") {
            if (value == "zero")
                cfg.init = InitKind::Zero;
            else if (value == "random")
                cfg.init = InitKind::Random;
            else
                throw ConfigError("key 'init': expected zero | random");
        } else if (key == "init_norm") {
            cfg.init_norm = parse_number(key, value);
            if (!(cfg.init_norm >= 0.0)) throw ConfigError("key 'init_norm': must be >= 0");
        } else if (key == "seed") {
            cfg.seed = parse_u64(key, value);
        } else if (key == "functional") {
            if (value == "audit") {
                cfg.audit_functional = true;
            } else {
                const std::vector<double> p = parse_number_list(key, value);
                if (p.size() != 2)
                    throw ConfigError("key 'functional': expected audit | ALPHA,EPS");
                cfg.functional.alpha = p[0];
                cfg.functional.eps = p[1];
                cfg.audit_functional = false;
            }
        } else if (key == "out") {
            cfg.out_dir = value;
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }

    // cross-field consistency: the collocation grid must dealias f exactly
    const double needed = (cfg.f.degree() + 1) / 2.0;
    if (cfg.oversampling < needed)
        throw ConfigError("oversampling " + std::to_string(cfg.oversampling) +
                          " insufficient for nonlinearity degree " + std::to_string(cfg.f.degree()));
    try {
        cfg.domain().validate();
        cfg.model().validate(build_basis(cfg.domain()));
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "dimension = " << cfg.dimension << "\n";
    out << "side = " << cfg.side_x << "\n";
    if (cfg.dimension == 2) out << "side_y = " << cfg.side_y << "\n";
    out << "modes = " << cfg.modes_x << "\n";
    if (cfg.dimension == 2) out << "modes_y = " << cfg.modes_y << "\n";
    out << "oversampling = " << cfg.oversampling << "\n";
    out << "nonlinearity = poly:";
    for (std::size_t i = 0; i < cfg.f.coeffs().size(); ++i)
        out << (i ? "," : "") << cfg.f.coeffs()[i];
    out << "\n";
    if (cfg.kernel.kind == KernelKind::Exponential)
        out << "kernel = exponential:" << cfg.kernel.kappa0 << "," << cfg.kernel.delta << "\n";
    out << "c1 = " << cfg.c1 << "\n";
    out << "c2 = " << cfg.c2 << "\n";
    out << "c3 = " << cfg.c3 << "\n";
    out << "scheme = " << (cfg.scheme.scheme == Scheme::Imex1 ? "imex1" : "imex-cn") << "\n";
    out << "dt = " << cfg.scheme.dt << "\n";
    out << "total_time = " << cfg.scheme.total_time << "\n";
    out << "sample_stride = " << cfg.scheme.sample_stride << "\n";
    out << "tail_tol = " << cfg.scheme.tail_tol << "\n";
    out << "memory_rule = "
        << (cfg.scheme.memory_rule == MemoryRule::PlainWeights ? "plain" : "age-trapezoid") << "\n";
    out << "init = " << (cfg.init == InitKind::Zero ? "zero" : "random") << "\n";
    out << "init_norm = " << cfg.init_norm << "\n";
    out << "seed = " << cfg.seed << "\n";
    if (cfg.audit_functional)
        out << "functional = audit\n";
    else
        out << "functional = " << cfg.functional.alpha << "," << cfg.functional.eps << "\n";
    out << "out = " << cfg.out_dir << "\n";
    return out.str();
}

} // namespace platemem
