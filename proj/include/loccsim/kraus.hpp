#ifndef LOCCSIM_KRAUS_HPP
#define LOCCSIM_KRAUS_HPP

#include <cstdint>
#include <vector>

#include "loccsim/lindblad.hpp"
#include "loccsim/states.hpp"

namespace loccsim {

// Ordered Kraus operators of a channel valid to a declared order in dt:
// sum K^dag K = 1 + O(dt^order_label).
struct KrausSet {
    std::vector<OperatorMatrix> operators;
    double dt = 0.0;
    double order_label = 2.0;
};

// First-order channel of a Lindblad generator:
//   L_0 = 1 - iH dt - (1/2) sum E^dag E dt,  L_i = E_i sqrt(dt)
// with rates absorbed into the E_i. Completeness defect is O(dt^2).
KrausSet kraus_from_generator(const LindbladGenerator& gen, double dt);

// K~_i = sum_j U_ij K_j; the channel action is exactly unchanged.
KrausSet mix_kraus(const KrausSet& set, const Matrix& u);

// The two product-form operators
//   L~_0 = (1 - M sqrt(dt) - M^2 dt/2) (x) (1 + iF sqrt(dt) - F^2 dt/2)/sqrt(2)
//   L~_1 =  same with the sqrt(dt) signs flipped
// for a measurement M on `measured_subsystem` (0 = oscillator, 1 = qubit)
// and feedback F on the other. Each operator is an exact tensor product.
// M must be Hermitian.
KrausSet product_form_pair(const OperatorMatrix& m, const OperatorMatrix& f,
                           int measured_subsystem, double dt);

// All pairwise products K_ij = A_i B_j: the channel of `after` composed
// onto the channel of `before`. Products of separable operators stay
// separable.
KrausSet compose(const KrausSet& after, const KrausSet& before);

// Phi(rho) = sum K rho K^dag, renormalized to unit trace.
DensityState apply_channel(const KrausSet& set, const DensityState& rho);

// Max trace distance of the two channel outputs over the sample states.
double channel_distance(const KrausSet& a, const KrausSet& b,
                        const std::vector<DensityState>& samples);

// Seeded sample set mixing random product pure states and random entangled
// pure states; both families are needed to see interaction terms.
std::vector<DensityState> channel_sample_states(const std::vector<Index>& dims,
                                                int count, std::uint64_t seed);

// ||sum K^dag K - 1|| (spectral norm).
double completeness_defect(const KrausSet& set);

// Max over operators of (operator Schmidt rank - 1) across the two-subsystem
// split; 0 iff every operator is a tensor product. Singular values below
// 1e-10 (relative) are treated as zero. A zero defect certifies the
// representation is of product form, which is sufficient for channel
// separability; the converse direction is out of scope.
double separability_defect(const KrausSet& set);

// One direction of the measurement-feedback channel in Lindblad form:
//   H = M F,  single jump M - iF (rate 1), with M on `measured_subsystem`.
LindbladGenerator unidirectional_generator(const OperatorMatrix& m,
                                           const OperatorMatrix& f,
                                           int measured_subsystem);

// Both directions combined (M and F interchanged), the generator the
// composed product-form channel realizes: H = 2 M (x) F placed on the two
// subsystems, jumps (M - iF) and (F - iM); the cross terms cancel.
LindbladGenerator pair_generator(const OperatorMatrix& m, const OperatorMatrix& f,
                                 int measured_subsystem);

} // namespace loccsim

#endif
