#include "platemem/history.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace platemem {

namespace {
constexpr long kExactRecomputeStride = 4096; // kills incremental-sum drift
}

HistoryField::HistoryField(const ModalBasis& basis, const KernelQuadrature& quad)
    : basis_(&basis), quad_(&quad), k_(basis.mode_count()) {
    qring_.assign(static_cast<std::size_t>(quad.nodes + 1) * k_, 0.0);
    memint_.assign(k_, 0.0);
}

const double* HistoryField::q_row(long i) const {
    const long ring = quad_->nodes + 1;
    const long slot = ((i % ring) + ring) % ring;
    return &qring_[static_cast<std::size_t>(slot) * k_];
}

double HistoryField::node_value(int j, int k) const {
    const double* qn = q_row(n_);
    const double* qo = q_row(n_ - j);
    double v = qn[k] - qo[k];
    if (!init_.empty() && j > n_)
        v += init_[static_cast<std::size_t>(j - n_ - 1) * k_ + k];
    return v;
}

SpectralField HistoryField::node_field(int j) const {
    SpectralField f(*basis_);
    for (int k = 0; k < k_; ++k) f[k] = node_value(j, k);
    return f;
}

void HistoryField::set_initial_past(const std::function<SpectralField(double)>& phi) {
    if (n_ != 0) throw std::logic_error("set_initial_past: history already advanced");
    const int m = quad_->nodes;
    const double ds = quad_->ds;
    init_.assign(static_cast<std::size_t>(m) * k_, 0.0);
    SpectralField prev = phi(0.0);
    std::vector<double> cum(k_, 0.0);
    for (int j = 1; j <= m; ++j) {
        SpectralField cur = phi(j * ds);
        for (int k = 0; k < k_; ++k) {
            cum[k] += 0.5 * ds * (prev[k] + cur[k]);
            init_[static_cast<std::size_t>(j - 1) * k_ + k] = cum[k];
        }
        prev = cur;
    }
    recompute_memory_integral();
}

void HistoryField::set_initial_nodes(const std::vector<SpectralField>& eta0) {
    if (n_ != 0) throw std::logic_error("set_initial_nodes: history already advanced");
    if (static_cast<int>(eta0.size()) != quad_->nodes)
        throw std::invalid_argument("set_initial_nodes: need one field per grid node");
    init_.assign(static_cast<std::size_t>(quad_->nodes) * k_, 0.0);
    for (int j = 0; j < quad_->nodes; ++j)
        for (int k = 0; k < k_; ++k)
            init_[static_cast<std::size_t>(j) * k_ + k] = eta0[j][k];
    recompute_memory_integral();
}

void HistoryField::recompute_memory_integral() {
    std::fill(memint_.begin(), memint_.end(), 0.0);
    for (int j = 1; j <= quad_->nodes; ++j) {
        const double wj = quad_->w[j - 1];
        const double* qn = q_row(n_);
        const double* qo = q_row(n_ - j);
        const double* ini = (!init_.empty() && j > n_)
                                ? &init_[static_cast<std::size_t>(j - n_ - 1) * k_]
                                : nullptr;
        for (int k = 0; k < k_; ++k) {
            double v = qn[k] - qo[k];
            if (ini) v += ini[k];
            memint_[k] += wj * v;
        }
    }
    steps_since_exact_ = 0;
}

void HistoryField::shifted_memory_sum(std::vector<double>& out) const {
    out.assign(k_, 0.0);
    if (quad_->geometric) {
        const int m = quad_->nodes;
        const double wm = quad_->w[m - 1];
        for (int k = 0; k < k_; ++k)
            out[k] = quad_->ratio * (memint_[k] - wm * node_value(m, k));
        return;
    }
    for (int j = 2; j <= quad_->nodes; ++j) {
        const double wj = quad_->w[j - 1];
        for (int k = 0; k < k_; ++k) out[k] += wj * node_value(j - 1, k);
    }
}

void HistoryField::advance(const SpectralField& theta_old, const SpectralField& theta_new, double dt) {
    if (std::abs(dt - quad_->ds) > 1e-9 * quad_->ds)
        throw std::invalid_argument("HistoryField::advance: dt must equal the quadrature spacing ds");

    std::vector<double> ss;
    shifted_memory_sum(ss);

    const double wsum = quad_->weight_sum();
    const double* qn = q_row(n_);
    const long ring = quad_->nodes + 1;
    const long new_slot = (qhead_ + 1) % ring;
    double* qn1 = &qring_[static_cast<std::size_t>(new_slot) * k_];
    for (int k = 0; k < k_; ++k) {
        const double q = 0.5 * dt * (theta_old[k] + theta_new[k]);
        qn1[k] = qn[k] + q;
        memint_[k] = ss[k] + wsum * q;
    }
    qhead_ = new_slot;
    ++n_;

    if (!quad_->geometric || ++steps_since_exact_ >= kExactRecomputeStride)
        recompute_memory_integral();
}

double HistoryField::m_norm_sq(double r) const {
    std::vector<double> lam(k_);
    for (int k = 0; k < k_; ++k) lam[k] = std::pow(basis_->lambda(k), r);
    double acc = 0.0;
    for (int j = 1; j <= quad_->nodes; ++j) {
        const double* qn = q_row(n_);
        const double* qo = q_row(n_ - j);
        const double* ini = (!init_.empty() && j > n_)
                                ? &init_[static_cast<std::size_t>(j - n_ - 1) * k_]
                                : nullptr;
        double row = 0.0;
        for (int k = 0; k < k_; ++k) {
            double v = qn[k] - qo[k];
            if (ini) v += ini[k];
            row += lam[k] * v * v;
        }
        acc += quad_->w[j - 1] * row;
    }
    return acc;
}

double HistoryField::dissipation_pairing(double r) const {
    std::vector<double> lam(k_);
    for (int k = 0; k < k_; ++k) lam[k] = std::pow(basis_->lambda(k), r);
    double acc = 0.0;
    for (int j = 1; j <= quad_->nodes; ++j) {
        double row = 0.0;
        for (int k = 0; k < k_; ++k) {
            const double v = node_value(j, k);
            row += lam[k] * v * v;
        }
        acc += quad_->w_prime[j - 1] * row;
    }
    return 0.5 * acc;
}

double HistoryField::tail_functional(double y) const {
    if (y < 1.0) throw std::invalid_argument("tail_functional: y must be >= 1");
    double acc = 0.0;
    for (int j = 1; j <= quad_->nodes; ++j) {
        const double s = j * quad_->ds;
        if (!(s < 1.0 / y || s >= y)) continue;
        double row = 0.0;
        for (int k = 0; k < k_; ++k) {
            const double v = node_value(j, k);
            row += basis_->lambda(k) * v * v;
        }
        acc += quad_->w[j - 1] * row;
    }
    // bound for the unstored mass beyond the horizon
    double last = 0.0;
    for (int k = 0; k < k_; ++k) {
        const double v = node_value(quad_->nodes, k);
        last += basis_->lambda(k) * v * v;
    }
    return acc + quad_->tail_mass * last;
}

void HistoryField::save_snapshot(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
    const char magic[4] = {'P', 'M', 'H', 'S'};
    out.write(magic, 4);
    const std::uint64_t m = static_cast<std::uint64_t>(quad_->nodes);
    const std::uint64_t k = static_cast<std::uint64_t>(k_);
    const double ds = quad_->ds;
    out.write(reinterpret_cast<const char*>(&m), 8);
    out.write(reinterpret_cast<const char*>(&k), 8);
    out.write(reinterpret_cast<const char*>(&ds), 8);
    std::vector<double> row(k_);
    for (int j = 1; j <= quad_->nodes; ++j) {
        for (int kk = 0; kk < k_; ++kk) row[kk] = node_value(j, kk);
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(8) * k_);
    }
    if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

HistoryField HistoryField::load_snapshot(const std::string& path, const ModalBasis& basis,
                                         const KernelQuadrature& quad) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "PMHS", 4) != 0)
        throw std::runtime_error("load_snapshot: bad header in " + path);
    std::uint64_t m = 0, k = 0;
    double ds = 0.0;
    in.read(reinterpret_cast<char*>(&m), 8);
    in.read(reinterpret_cast<char*>(&k), 8);
    in.read(reinterpret_cast<char*>(&ds), 8);
    if (!in || m != static_cast<std::uint64_t>(quad.nodes) ||
        k != static_cast<std::uint64_t>(basis.mode_count()) || std::abs(ds - quad.ds) > 1e-12 * quad.ds)
        throw std::runtime_error("load_snapshot: header does not match basis/quadrature");
    HistoryField h(basis, quad);
    h.init_.assign(static_cast<std::size_t>(quad.nodes) * basis.mode_count(), 0.0);
    in.read(reinterpret_cast<char*>(h.init_.data()),
            static_cast<std::streamsize>(8) * static_cast<std::streamsize>(h.init_.size()));
    if (!in) throw std::runtime_error("load_snapshot: truncated data in " + path);
    h.recompute_memory_integral();
    return h;
}

double representation_check(const HistoryField& eta, const std::vector<SpectralField>& theta_series,
                            double sample_dt) {
    const KernelQuadrature& quad = eta.quadrature();
    const double cad = sample_dt / quad.ds;
    const long c = std::lround(cad);
    if (c < 1 || std::abs(cad - static_cast<double>(c)) > 1e-9)
        throw std::invalid_argument("representation_check: sample_dt must be a positive multiple of ds");
    if (theta_series.size() < 2)
        throw std::invalid_argument("representation_check: need at least two theta samples");
    if (eta.has_initial_past())
        throw std::invalid_argument("representation_check: requires a run started from zero history");
    const long n = eta.steps_taken();
    if (n % c != 0 || static_cast<long>(theta_series.size()) - 1 != n / c)
        throw std::invalid_argument("representation_check: series does not cover the elapsed time");

    const int kmodes = eta.modes();
    const long last = static_cast<long>(theta_series.size()) - 1;
    // cumulative trapezoid of theta over [0, t]
    std::vector<std::vector<double>> cum(theta_series.size(), std::vector<double>(kmodes, 0.0));
    for (long i = 1; i <= last; ++i)
        for (int k = 0; k < kmodes; ++k)
            cum[i][k] = cum[i - 1][k] + 0.5 * sample_dt * (theta_series[i - 1][k] + theta_series[i][k]);

    double dev = 0.0;
    for (long m = 1; m * c <= quad.nodes; ++m) {
        const long j = m * c; // aligned grid node
        const long back = std::min(m, last);
        for (int k = 0; k < kmodes; ++k) {
            const double ref = cum[last][k] - cum[last - back][k];
            dev = std::max(dev, std::abs(ref - eta.node_value(static_cast<int>(j), k)));
        }
    }
    return dev;
}

} // namespace platemem
