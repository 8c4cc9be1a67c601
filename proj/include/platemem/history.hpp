// Summed past history eta^t(s) on the age grid, evolved by exact method of
// characteristics (shift plus trapezoid deposit), with M^r norms, the
// dissipation pairing and the compactness tail functional.
#pragma once

#include "platemem/kernel.hpp"
#include "platemem/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace platemem {

// Node j (1-based) carries eta^t(s_j), s_j = j * ds; the boundary value
// eta^t(0) = 0 is implicit. Internally nodes are represented as differences
// of cumulative deposits plus a shifted initial profile, so one advance is
// O(modes) while the transport stays an exact index shift.
class HistoryField {
  public:
    HistoryField(const ModalBasis& basis, const KernelQuadrature& quad);

    const ModalBasis& basis() const { return *basis_; }
    const KernelQuadrature& quadrature() const { return *quad_; }
    int nodes() const { return quad_->nodes; }
    int modes() const { return k_; }
    long steps_taken() const { return n_; }

    bool has_initial_past() const { return !init_.empty(); }

    // eta^t(s_j), 1-based j
    double node_value(int j, int k) const;
    SpectralField node_field(int j) const;

    // initial past history: eta^0(s_j) = cumulative trapezoid of phi over [0, s_j]
    void set_initial_past(const std::function<SpectralField(double)>& phi);
    // directly prescribe eta^0 at the grid nodes
    void set_initial_nodes(const std::vector<SpectralField>& eta0);

    // exact characteristics update over one step dt = ds; the deposit is the
    // trapezoid (dt/2)(theta_old + theta_new)
    void advance(const SpectralField& theta_old, const SpectralField& theta_new, double dt);

    // sum_j w_j eta_{j,k}, maintained incrementally for geometric weights
    const std::vector<double>& memory_integral() const { return memint_; }
    // sum_j w_j eta^t_{j-1,k} (with eta_0 = 0): the memory integral the next
    // state will carry before the new deposit is added
    void shifted_memory_sum(std::vector<double>& out) const;

    double m_norm_sq(double r) const;
    double m_norm(double r) const { return std::sqrt(m_norm_sq(r)); }
    // (1/2) sum_j w'_j sum_k lambda^r eta^2 <= 0
    double dissipation_pairing(double r) const;
    // mu-weighted V^1 mass over ages below 1/y or at/above y, plus the
    // truncated-tail bound
    double tail_functional(double y) const;

    // little-endian binary snapshot (header: nodes, modes, ds; then rows)
    void save_snapshot(const std::string& path) const;
    static HistoryField load_snapshot(const std::string& path, const ModalBasis& basis,
                                      const KernelQuadrature& quad);

  private:
    void recompute_memory_integral();
    const double* q_row(long i) const; // cumulative deposit Q_i (zeros for i < 0)

    const ModalBasis* basis_;
    const KernelQuadrature* quad_;
    int k_ = 0;
    long n_ = 0;
    long qhead_ = 0;              // ring slot of Q_n
    std::vector<double> qring_;   // (nodes + 1) x modes
    std::vector<double> init_;    // nodes x modes, empty when zero
    std::vector<double> memint_;  // modes
    long steps_since_exact_ = 0;
};

// Recomputes eta at the grid nodes from a theta time series via the same
// trapezoid rule and returns the maximum absolute modal deviation. The series
// must start at t = 0 with zero initial history and cover the elapsed time;
// sample_dt may be a multiple of ds (mismatched cadence), in which case the
// comparison is restricted to aligned ages.
double representation_check(const HistoryField& eta, const std::vector<SpectralField>& theta_series,
                            double sample_dt);

} // namespace platemem
