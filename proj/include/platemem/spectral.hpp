// Sine eigenbasis of the Dirichlet Laplacian on an interval or rectangle,
// fractional powers of A, V^r norms, and pseudo-spectral evaluation of
// pointwise nonlinearities on a dealiased collocation grid.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace platemem {

struct DomainSpec {
    int dimension = 1;                       // 1 or 2
    std::array<double, 2> side = {0.0, 0.0}; // side lengths, default pi per side
    std::array<int, 2> modes = {0, 0};       // retained modes per dimension
    double oversampling = 2.0;               // collocation oversampling (>= 3/2)

    static DomainSpec interval(double length, int n_modes, double oversampling = 2.0);
    static DomainSpec rectangle(double lx, double ly, int nx, int ny, double oversampling = 2.0);

    void validate() const; // throws std::invalid_argument
};

// Eigen-decomposition of A = -Laplacian with u = 0 boundary data.
// Eigenfunctions are L2-normalized sine products; eigenvalues are sorted
// ascending with multiplicity.
class ModalBasis {
  public:
    explicit ModalBasis(const DomainSpec& spec);

    const DomainSpec& spec() const { return spec_; }
    int mode_count() const { return static_cast<int>(lambda_.size()); }
    int grid_size() const { return static_cast<int>(grid_weight_.size()); }

    double lambda(int k) const { return lambda_[k]; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    std::array<int, 2> wavenumbers(int k) const { return tuples_[k]; }

    // Sharp constants: ||w||^2 <= C_Omega ||A w||^2, ||w|| <= C_P ||grad w||.
    double c_omega() const { return 1.0 / (lambda_[0] * lambda_[0]); }
    double c_poincare() const { return 1.0 / std::sqrt(lambda_[0]); }

    // Collocation quadrature (uniform interior grid, weight per node).
    double grid_weight(int i) const { return grid_weight_[i]; }
    // Value of L2-normalized eigenfunction k at grid node i.
    double eigenfunction(int k, int i) const { return eig_at_node_[static_cast<std::size_t>(k) * grid_weight_.size() + i]; }

    // modal coefficients -> nodal values (length grid_size())
    void to_grid(const std::vector<double>& coeff, std::vector<double>& nodal) const;
    // nodal values -> modal coefficients of the retained band (exact for
    // band-limited data thanks to discrete sine orthogonality)
    void from_grid(const std::vector<double>& nodal, std::vector<double>& coeff) const;

  private:
    DomainSpec spec_;
    std::vector<double> lambda_;
    std::vector<std::array<int, 2>> tuples_;
    std::vector<double> grid_weight_;
    std::vector<double> eig_at_node_; // mode-major [k][i]
};

// Modal coefficient vector with V^r norm semantics.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(const ModalBasis& basis);
    SpectralField(const ModalBasis& basis, std::vector<double> coeff);

    const ModalBasis& basis() const { return *basis_; }
    int size() const { return static_cast<int>(coeff_.size()); }
    double& operator[](int k) { return coeff_[k]; }
    double operator[](int k) const { return coeff_[k]; }
    const std::vector<double>& coeffs() const { return coeff_; }
    std::vector<double>& coeffs() { return coeff_; }

    bool finite() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double a);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

  private:
    const ModalBasis* basis_ = nullptr;
    std::vector<double> coeff_;
};

ModalBasis build_basis(const DomainSpec& spec); // validates, constructs

// sqrt(sum_k lambda_k^r c_k^2), fixed left-to-right summation order
double v_norm(const SpectralField& field, double r);
double v_norm_sq(const SpectralField& field, double r);
// <a, b>_{V^r} = sum_k lambda_k^r a_k b_k
double v_inner(const SpectralField& a, const SpectralField& b, double r);

// coefficients multiplied by lambda_k^p
SpectralField apply_A_power(const SpectralField& field, double p);

// Polynomial nonlinearity; see stationary.hpp for the full type. Declared
// here as a pointwise callable plus degree so spectral stays self-contained.
struct PointwiseFunction {
    std::function<double(double)> eval;
    int degree = 1; // polynomial degree, used for the aliasing check
};

// Modal projection of f(u(x)) computed pseudo-spectrally. Throws if the
// collocation oversampling is insufficient for the polynomial degree.
SpectralField evaluate_nonlinearity(const SpectralField& field, const PointwiseFunction& f);

// Collocation quadrature of g(u(x)) over the domain.
double quadrature_of(const SpectralField& field, const std::function<double(double)>& g);

} // namespace platemem
