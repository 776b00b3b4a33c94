#ifndef LOCCSIM_STATES_HPP
#define LOCCSIM_STATES_HPP

#include <utility>

#include "loccsim/operator_matrix.hpp"

namespace loccsim {

struct StateTolerances {
    double trace = 1e-9;
    double hermiticity = 1e-9;
    double positivity = 1e-9; // RK4 leaks O(dt^4) into small negative eigenvalues
};

// Positive, unit-trace operator tagged with its subsystem factorization.
// Construction validates Hermiticity, trace and spectrum; instances are
// immutable afterwards and safe to share across threads.
class DensityState {
public:
    using Tolerances = StateTolerances;

    static DensityState make(OperatorMatrix op, Tolerances tol = Tolerances());

    const OperatorMatrix& op() const { return op_; }
    const Matrix& matrix() const { return op_.mat; }
    const std::vector<Index>& dims() const { return op_.dims; }
    Index size() const { return op_.size(); }
    const Tolerances& tolerances() const { return tol_; }

private:
    DensityState(OperatorMatrix op, Tolerances tol)
        : op_(std::move(op)), tol_(tol) {}

    OperatorMatrix op_;
    Tolerances tol_;
};

struct EntanglementReport {
    double negativity;          // sum of |negative eigenvalues| of the partial transpose
    double min_pt_eigenvalue;
    std::pair<int, int> bipartition;
};

// Pure state from a ket (normalized internally).
DensityState state_from_ket(const Vector& ket, std::vector<Index> dims);

// Truncated coherent amplitudes, i.e. displacement(dim, amp) applied to
// the vacuum.
Vector coherent_ket(Index dim, Complex amp);

// Projector onto the displaced vacuum. Throws TruncationError if the
// untruncated state keeps more than max_norm_deficit outside the basis.
DensityState coherent_state(Index dim, Complex amp, double max_norm_deficit = 1e-6);

// Diagonal Bose-Einstein mixture with mean occupation nbar, renormalized
// over the truncation.
DensityState thermal_state(Index dim, double nbar, double max_norm_deficit = 1e-6);

DensityState vacuum_state(Index dim);

// sigma_z eigenstates of the two-level test mass; |L> has eigenvalue +1.
DensityState qubit_L();
DensityState qubit_R();
// (|L> + |R>)/sqrt(2)
DensityState qubit_plus();

// Tensor product of states.
DensityState product(const DensityState& a, const DensityState& b);

DensityState partial_trace(const DensityState& rho, int keep);

// Entanglement witness across a two-subsystem split; `part` is the
// transposed subsystem. States with more than two subsystems are not
// supported.
EntanglementReport negativity(const DensityState& rho, int part = 1);

double purity(const DensityState& rho);

Complex expectation(const OperatorMatrix& a, const DensityState& rho);

} // namespace loccsim

#endif
