#include "platemem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platemem {

DomainSpec DomainSpec::interval(double length, int n_modes, double oversampling) {
    DomainSpec s;
    s.dimension = 1;
    s.side = {length, 0.0};
    s.modes = {n_modes, 0};
    s.oversampling = oversampling;
    return s;
}

DomainSpec DomainSpec::rectangle(double lx, double ly, int nx, int ny, double oversampling) {
    DomainSpec s;
    s.dimension = 2;
    s.side = {lx, ly};
    s.modes = {nx, ny};
    s.oversampling = oversampling;
    return s;
}

void DomainSpec::validate() const {
    if (dimension != 1 && dimension != 2)
        throw std::invalid_argument("DomainSpec: dimension must be 1 or 2");
    if (oversampling < 1.5)
        throw std::invalid_argument("DomainSpec: oversampling must be >= 3/2");
    for (int d = 0; d < dimension; ++d) {
        if (!(side[d] > 0.0))
            throw std::invalid_argument("DomainSpec: side length must be positive");
        if (modes[d] < 1)
            throw std::invalid_argument("DomainSpec: modes per dimension must be >= 1");
    }
}

namespace {

// One dimension of the tensor basis: interior nodes of a uniform subdivision,
// where retained sines are discretely orthogonal.
struct Axis {
    double length;
    int n_modes;
    int subdivisions;              // G; interior nodes are i = 1..G-1
    std::vector<double> node;      // x_i
    std::vector<double> lambda1d;  // (k pi / L)^2
    std::vector<double> sine;      // [k][i], L2-normalized
};

Axis make_axis(double length, int n_modes, double oversampling) {
    Axis ax;
    ax.length = length;
    ax.n_modes = n_modes;
    ax.subdivisions = static_cast<int>(std::ceil(oversampling * n_modes)) + 1;
    const int pts = ax.subdivisions - 1;
    ax.node.resize(pts);
    for (int i = 0; i < pts; ++i)
        ax.node[i] = length * (i + 1) / ax.subdivisions;
    ax.lambda1d.resize(n_modes);
    ax.sine.resize(static_cast<std::size_t>(n_modes) * pts);
    const double norm = std::sqrt(2.0 / length);
    for (int k = 0; k < n_modes; ++k) {
        const double wav = (k + 1) * std::numbers::pi / length;
        ax.lambda1d[k] = wav * wav;
        for (int i = 0; i < pts; ++i)
            ax.sine[static_cast<std::size_t>(k) * pts + i] = norm * std::sin(wav * ax.node[i]);
    }
    return ax;
}

} // namespace

ModalBasis::ModalBasis(const DomainSpec& spec) : spec_(spec) {
    spec.validate();
    Axis ax = make_axis(spec.side[0], spec.modes[0], spec.oversampling);
    Axis ay;
    const bool two_d = spec.dimension == 2;
    if (two_d) ay = make_axis(spec.side[1], spec.modes[1], spec.oversampling);

    struct Entry {
        double lambda;
        std::array<int, 2> kk;
    };
    std::vector<Entry> entries;
    if (two_d) {
        for (int j = 0; j < spec.modes[0]; ++j)
            for (int k = 0; k < spec.modes[1]; ++k)
                entries.push_back({ax.lambda1d[j] + ay.lambda1d[k], {j + 1, k + 1}});
    } else {
        for (int j = 0; j < spec.modes[0]; ++j)
            entries.push_back({ax.lambda1d[j], {j + 1, 0}});
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.kk < b.kk;
    });

    const int px = static_cast<int>(ax.node.size());
    const int py = two_d ? static_cast<int>(ay.node.size()) : 1;
    const int n_nodes = px * py;
    const double wx = ax.length / ax.subdivisions;
    const double wy = two_d ? ay.length / ay.subdivisions : 1.0;

    lambda_.reserve(entries.size());
    tuples_.reserve(entries.size());
    grid_weight_.assign(n_nodes, wx * wy);
    eig_at_node_.resize(entries.size() * static_cast<std::size_t>(n_nodes));
    for (std::size_t e = 0; e < entries.size(); ++e) {
        lambda_.push_back(entries[e].lambda);
        tuples_.push_back(entries[e].kk);
        const int j = entries[e].kk[0] - 1;
        const int k = entries[e].kk[1] - 1;
        for (int ix = 0; ix < px; ++ix) {
            const double sx = ax.sine[static_cast<std::size_t>(j) * px + ix];
            if (two_d) {
                for (int iy = 0; iy < py; ++iy)
                    eig_at_node_[e * n_nodes + ix * py + iy] = sx * ay.sine[static_cast<std::size_t>(k) * py + iy];
            } else {
                eig_at_node_[e * n_nodes + ix] = sx;
            }
        }
    }
}

void ModalBasis::to_grid(const std::vector<double>& coeff, std::vector<double>& nodal) const {
    const int n = grid_size();
    nodal.assign(n, 0.0);
    for (int k = 0; k < mode_count(); ++k) {
        const double c = coeff[k];
        if (c == 0.0) continue;
        const double* ek = &eig_at_node_[static_cast<std::size_t>(k) * n];
        for (int i = 0; i < n; ++i) nodal[i] += c * ek[i];
    }
}

void ModalBasis::from_grid(const std::vector<double>& nodal, std::vector<double>& coeff) const {
    const int n = grid_size();
    coeff.assign(mode_count(), 0.0);
    for (int k = 0; k < mode_count(); ++k) {
        const double* ek = &eig_at_node_[static_cast<std::size_t>(k) * n];
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += grid_weight_[i] * ek[i] * nodal[i];
        coeff[k] = acc;
    }
}

SpectralField::SpectralField(const ModalBasis& basis)
    : basis_(&basis), coeff_(basis.mode_count(), 0.0) {}

SpectralField::SpectralField(const ModalBasis& basis, std::vector<double> coeff)
    : basis_(&basis), coeff_(std::move(coeff)) {
    if (static_cast<int>(coeff_.size()) != basis.mode_count())
        throw std::invalid_argument("SpectralField: coefficient count does not match basis");
}

bool SpectralField::finite() const {
    for (double c : coeff_)
        if (!std::isfinite(c)) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    for (std::size_t k = 0; k < coeff_.size(); ++k) coeff_[k] += other.coeff_[k];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    for (std::size_t k = 0; k < coeff_.size(); ++k) coeff_[k] -= other.coeff_[k];
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (double& c : coeff_) c *= a;
    return *this;
}

ModalBasis build_basis(const DomainSpec& spec) { return ModalBasis(spec); }

double v_norm_sq(const SpectralField& field, double r) {
    const ModalBasis& b = field.basis();
    double acc = 0.0;
    for (int k = 0; k < field.size(); ++k)
        acc += std::pow(b.lambda(k), r) * field[k] * field[k];
    return acc;
}

double v_norm(const SpectralField& field, double r) { return std::sqrt(v_norm_sq(field, r)); }

double v_inner(const SpectralField& a, const SpectralField& b, double r) {
    const ModalBasis& basis = a.basis();
    double acc = 0.0;
    for (int k = 0; k < a.size(); ++k)
        acc += std::pow(basis.lambda(k), r) * a[k] * b[k];
    return acc;
}

SpectralField apply_A_power(const SpectralField& field, double p) {
    if (p == 0.0) return field;
    SpectralField out = field;
    for (int k = 0; k < out.size(); ++k)
        out[k] *= std::pow(field.basis().lambda(k), p);
    return out;
}

SpectralField evaluate_nonlinearity(const SpectralField& field, const PointwiseFunction& f) {
    const ModalBasis& b = field.basis();
    if (f.degree > 1 && b.spec().oversampling < (f.degree + 1) / 2.0)
        throw std::invalid_argument("evaluate_nonlinearity: oversampling below (degree+1)/2, aliasing risk");
    std::vector<double> nodal;
    b.to_grid(field.coeffs(), nodal);
    for (double& x : nodal) x = f.eval(x);
    std::vector<double> coeff;
    b.from_grid(nodal, coeff);
    return SpectralField(b, std::move(coeff));
}

double quadrature_of(const SpectralField& field, const std::function<double(double)>& g) {
    const ModalBasis& b = field.basis();
    std::vector<double> nodal;
    b.to_grid(field.coeffs(), nodal);
    double acc = 0.0;
    for (int i = 0; i < b.grid_size(); ++i) acc += b.grid_weight(i) * g(nodal[i]);
    return acc;
}

} // namespace platemem
