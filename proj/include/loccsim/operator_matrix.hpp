#ifndef LOCCSIM_OPERATOR_MATRIX_HPP
#define LOCCSIM_OPERATOR_MATRIX_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "loccsim/errors.hpp"

namespace loccsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Dense operator on a tensor product of finite-dimensional subsystems.
// dims lists the subsystem dimensions in tensor order; their product must
// equal the matrix side length. Subsystem order is fixed throughout the
// library as (oscillator, qubit).
struct OperatorMatrix {
    Matrix mat;
    std::vector<Index> dims;

    OperatorMatrix() = default;
    OperatorMatrix(Matrix m, std::vector<Index> d);

    Index size() const { return mat.rows(); }
    int num_subsystems() const { return static_cast<int>(dims.size()); }
    bool is_hermitian(double tol) const;
};

struct FockOperators {
    OperatorMatrix a;        // annihilation, a|n> = sqrt(n)|n-1>
    OperatorMatrix a_dagger; // creation
    OperatorMatrix x;        // dimensionless position, x = a + a^dag
};

// Truncated-Fock-space ladder operators. dim >= 2.
FockOperators fock_operators(Index dim);

// Number operator a^dag a (diagonal 0..dim-1).
OperatorMatrix number_operator(Index dim);

// exp(amp a^dag - conj(amp) a), unitary up to truncation effects.
OperatorMatrix displacement(Index dim, Complex amp);

OperatorMatrix identity(std::vector<Index> dims);
OperatorMatrix pauli_x();
OperatorMatrix pauli_y();
OperatorMatrix pauli_z();

// Kronecker product; dims concatenate.
OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b);

// Trace out every subsystem except `keep`.
OperatorMatrix partial_trace(const OperatorMatrix& op, int keep);

// Transpose the indices of subsystem `part`.
OperatorMatrix partial_transpose(const OperatorMatrix& op, int part);

// General dense matrix exponential (scaling-and-squaring Pade).
Matrix matrix_exponential(const Matrix& a);

// exp(-i theta H) for Hermitian H via eigendecomposition; exactly unitary.
Matrix exp_i_hermitian(const Matrix& h, double theta);

// Largest singular value.
double spectral_norm(const Matrix& a);

// (1/2) * trace norm of (a - b); a, b Hermitian.
double trace_distance(const Matrix& a, const Matrix& b);

} // namespace loccsim

#endif
