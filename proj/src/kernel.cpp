#include "platemem/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace platemem {

namespace {

// piecewise-linear interpolation clamped to the sampled range
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - t) * ys[i - 1] + t * ys[i];
}

} // namespace

double MemoryKernel::value(double x) const {
    if (kind == KernelKind::Exponential) return kappa0 * delta * std::exp(-delta * x);
    if (x > s.back()) return 0.0;
    return interp(s, mu, x);
}

double MemoryKernel::derivative(double x) const {
    if (kind == KernelKind::Exponential) return -kappa0 * delta * delta * std::exp(-delta * x);
    if (x > s.back()) return 0.0;
    return interp(s, mu_prime, x);
}

double MemoryKernel::total_mass() const {
    if (kind == KernelKind::Exponential) return kappa0;
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
        acc += 0.5 * (mu[i] + mu[i - 1]) * (s[i] - s[i - 1]);
    return acc;
}

MemoryKernel make_exponential(double kappa0, double delta) {
    if (!(kappa0 > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("make_exponential: kappa0 and delta must be positive");
    MemoryKernel k;
    k.kind = KernelKind::Exponential;
    k.kappa0 = kappa0;
    k.delta = delta;
    return k;
}

MemoryKernel make_table(std::vector<double> s, std::vector<double> mu) {
    if (s.size() < 2 || s.size() != mu.size())
        throw std::invalid_argument("make_table: need at least two (s, mu) samples of equal length");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1]))
            throw std::invalid_argument("make_table: s must be strictly increasing");
    MemoryKernel k;
    k.kind = KernelKind::Table;
    k.s = std::move(s);
    k.mu = std::move(mu);
    const std::size_t n = k.s.size();
    k.mu_prime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? i : i + 1;
        k.mu_prime[i] = (k.mu[hi] - k.mu[lo]) / (k.s[hi] - k.s[lo]);
    }
    k.kappa0 = k.total_mass();
    k.delta = 0.0;
    return k;
}

MemoryKernel load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_table: cannot open " + path);
    std::vector<double> s, mu;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double a, b;
        if (ls >> a >> b) {
            s.push_back(a);
            mu.push_back(b);
        }
    }
    return make_table(std::move(s), std::move(mu));
}

AssumptionReport verify_assumptions(const MemoryKernel& kernel, const std::vector<double>& s_grid) {
    if (s_grid.empty()) throw std::invalid_argument("verify_assumptions: empty grid");
    for (std::size_t i = 1; i < s_grid.size(); ++i)
        if (!(s_grid[i] > s_grid[i - 1]))
            throw std::invalid_argument("verify_assumptions: grid must be strictly increasing");

    AssumptionReport rep;
    const int n = static_cast<int>(s_grid.size());
    std::vector<double> m(n), mp(n);
    for (int i = 0; i < n; ++i) {
        m[i] = kernel.value(s_grid[i]);
        mp[i] = kernel.derivative(s_grid[i]);
    }

    // H1: mu, mu' finite and integrable over the sampled range
    {
        double mass = 0.0, dmass = 0.0;
        bool finite = true;
        for (int i = 0; i < n; ++i) finite = finite && std::isfinite(m[i]) && std::isfinite(mp[i]);
        for (int i = 1; i < n; ++i) {
            mass += 0.5 * (m[i] + m[i - 1]) * (s_grid[i] - s_grid[i - 1]);
            dmass += 0.5 * (std::abs(mp[i]) + std::abs(mp[i - 1])) * (s_grid[i] - s_grid[i - 1]);
        }
        rep.h1.pass = finite && std::isfinite(mass) && std::isfinite(dmass);
        rep.h1.margin = dmass;
    }

    // H2: min mu and max mu' over the grid
    {
        double worst = std::numeric_limits<double>::infinity();
        int node = -1;
        for (int i = 0; i < n; ++i) {
            const double margin = std::min(m[i], -mp[i]); // both must be >= 0
            if (margin < worst) {
                worst = margin;
                node = i;
            }
        }
        rep.h2.pass = worst >= 0.0;
        rep.h2.margin = worst;
        rep.h2.worst_node = node;
    }

    // H3: mu' + delta mu <= 0 uniformly
    auto h3_margin = [&](double delta) {
        double worst = -std::numeric_limits<double>::infinity();
        int node = -1;
        for (int i = 0; i < n; ++i) {
            const double v = mp[i] + delta * m[i];
            if (v > worst) {
                worst = v;
                node = i;
            }
        }
        return std::pair<double, int>(worst, node);
    };
    if (kernel.kind == KernelKind::Exponential) {
        rep.h3_delta = kernel.delta;
        auto [worst, node] = h3_margin(kernel.delta);
        rep.h3.pass = worst <= 1e-14 * kernel.value(0.0);
        rep.h3.margin = worst;
        rep.h3.worst_node = node;
    } else {
        // logarithmic sweep for the largest passing delta
        double best_delta = 0.0;
        std::pair<double, int> best{0.0, -1};
        for (double delta = 1e2; delta >= 1e-6; delta *= 0.5) {
            auto res = h3_margin(delta);
            if (res.first <= 0.0) {
                best_delta = delta;
                best = res;
                break;
            }
            best = res;
        }
        rep.h3_delta = best_delta;
        rep.h3.pass = best_delta > 0.0;
        rep.h3.margin = best.first;
        rep.h3.worst_node = best.second;
    }

    // H4: positive total mass
    rep.h4.margin = kernel.total_mass();
    rep.h4.pass = rep.h4.margin > 0.0;

    return rep;
}

double KernelQuadrature::weight_sum() const {
    double acc = 0.0;
    for (double x : w) acc += x;
    return acc;
}

KernelQuadrature build_quadrature(const MemoryKernel& kernel, double ds, double tail_tol) {
    if (!(ds > 0.0)) throw std::invalid_argument("build_quadrature: ds must be positive");
    const double kappa0 = kernel.total_mass();
    if (!(tail_tol > 0.0) || tail_tol >= kappa0)
        throw std::invalid_argument("build_quadrature: tail_tol must lie in (0, kappa0)");

    KernelQuadrature q;
    q.ds = ds;
    q.kappa0 = kappa0;

    if (kernel.kind == KernelKind::Exponential) {
        const double d = kernel.delta;
        // tail(M) = kappa0 e^{-delta M ds} <= tail_tol
        q.nodes = static_cast<int>(std::ceil(-std::log(tail_tol / kappa0) / (d * ds)));
        q.nodes = std::max(q.nodes, 1);
        q.horizon = q.nodes * ds;
        q.tail_mass = kappa0 * std::exp(-d * q.horizon);
        q.geometric = true;
        q.ratio = std::exp(-d * ds);
        q.w.resize(q.nodes);
        q.w_prime.resize(q.nodes);
        const double w1 = kappa0 * (1.0 - q.ratio);
        double wj = w1;
        for (int j = 0; j < q.nodes; ++j) {
            q.w[j] = wj;
            q.w_prime[j] = -d * wj; // mu' = -delta mu, cell integrals scale alike
            wj *= q.ratio;
        }
        return q;
    }

    // table: integrate the piecewise-linear interpolant cell by cell
    const double s_end = kernel.s.back();
    const int max_nodes = static_cast<int>(std::ceil(s_end / ds));
    auto cell = [&](double a, double b, bool deriv) {
        // trapezoid refined to the table resolution inside [a, b]
        const int sub = 8;
        double acc = 0.0;
        for (int i = 0; i < sub; ++i) {
            const double x0 = a + (b - a) * i / sub;
            const double x1 = a + (b - a) * (i + 1) / sub;
            const double f0 = deriv ? kernel.derivative(x0) : kernel.value(x0);
            const double f1 = deriv ? kernel.derivative(x1) : kernel.value(x1);
            acc += 0.5 * (f0 + f1) * (x1 - x0);
        }
        return acc;
    };
    std::vector<double> w, wp;
    double mass = 0.0;
    int M = 0;
    for (int j = 0; j < max_nodes; ++j) {
        w.push_back(cell(j * ds, (j + 1) * ds, false));
        wp.push_back(cell(j * ds, (j + 1) * ds, true));
        mass += w.back();
        M = j + 1;
        if (kappa0 - mass <= tail_tol) break;
    }
    if (kappa0 - mass > tail_tol)
        throw std::invalid_argument("build_quadrature: table range cannot reach the requested tail tolerance");
    q.nodes = M;
    q.horizon = M * ds;
    q.tail_mass = std::max(kappa0 - mass, 0.0);
    q.w = std::move(w);
    q.w_prime = std::move(wp);
    return q;
}

} // namespace platemem
