#include "loccsim/operator_matrix.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace loccsim {

namespace {

Index dims_product(const std::vector<Index>& dims) {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
}

// Row strides of the subsystem multi-index.
std::vector<Index> strides_of(const std::vector<Index>& dims) {
    std::vector<Index> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[k] = s[k + 1] * dims[k + 1];
    return s;
}

} // namespace

OperatorMatrix::OperatorMatrix(Matrix m, std::vector<Index> d)
    : mat(std::move(m)), dims(std::move(d)) {
    if (mat.rows() != mat.cols())
        throw DimensionError("OperatorMatrix: matrix must be square");
    if (dims.empty())
        throw DimensionError("OperatorMatrix: dims must be non-empty");
    for (Index dk : dims)
        if (dk < 2)
            throw DimensionError("OperatorMatrix: subsystem dimensions must be >= 2");
    if (dims_product(dims) != mat.rows())
        throw DimensionError("OperatorMatrix: product of dims must equal the matrix side length");
}

bool OperatorMatrix::is_hermitian(double tol) const {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

FockOperators fock_operators(Index dim) {
    if (dim < 2)
        throw DimensionError("fock_operators: dim must be >= 2");
    Matrix a = Matrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix ad = a.adjoint();
    return {OperatorMatrix(a, {dim}), OperatorMatrix(ad, {dim}),
            OperatorMatrix(a + ad, {dim})};
}

OperatorMatrix number_operator(Index dim) {
    if (dim < 2)
        throw DimensionError("number_operator: dim must be >= 2");
    Matrix n = Matrix::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k)
        n(k, k) = static_cast<double>(k);
    return OperatorMatrix(std::move(n), {dim});
}

OperatorMatrix displacement(Index dim, Complex amp) {
    auto ops = fock_operators(dim);
    Matrix gen = amp * ops.a_dagger.mat - std::conj(amp) * ops.a.mat;
    return OperatorMatrix(matrix_exponential(gen), {dim});
}

OperatorMatrix identity(std::vector<Index> dims) {
    Index n = dims_product(dims);
    return OperatorMatrix(Matrix::Identity(n, n), std::move(dims));
}

OperatorMatrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return OperatorMatrix(std::move(m), {2});
}

OperatorMatrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return OperatorMatrix(std::move(m), {2});
}

OperatorMatrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return OperatorMatrix(std::move(m), {2});
}

OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
    const Index na = a.size(), nb = b.size();
    Matrix out(na * nb, na * nb);
    for (Index i = 0; i < na; ++i)
        for (Index j = 0; j < na; ++j)
            out.block(i * nb, j * nb, nb, nb) = a.mat(i, j) * b.mat;
    std::vector<Index> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return OperatorMatrix(std::move(out), std::move(dims));
}

OperatorMatrix partial_trace(const OperatorMatrix& op, int keep) {
    const auto& dims = op.dims;
    if (keep < 0 || keep >= op.num_subsystems())
        throw DimensionError("partial_trace: keep index out of range");
    if (op.num_subsystems() == 1)
        return op;

    const auto strides = strides_of(dims);
    const Index dk = dims[static_cast<std::size_t>(keep)];
    const Index sk = strides[static_cast<std::size_t>(keep)];
    const Index rest = op.size() / dk;

    Matrix out = Matrix::Zero(dk, dk);
    // Enumerate the traced multi-index as a flat counter and rebuild the
    // corresponding offset in the full index.
    for (Index r = 0; r < rest; ++r) {
        Index rem = r, offset = 0;
        for (int s = op.num_subsystems() - 1; s >= 0; --s) {
            if (s == keep) continue;
            const Index ds = dims[static_cast<std::size_t>(s)];
            offset += (rem % ds) * strides[static_cast<std::size_t>(s)];
            rem /= ds;
        }
        for (Index i = 0; i < dk; ++i)
            for (Index j = 0; j < dk; ++j)
                out(i, j) += op.mat(offset + i * sk, offset + j * sk);
    }
    return OperatorMatrix(std::move(out), {dk});
}

OperatorMatrix partial_transpose(const OperatorMatrix& op, int part) {
    const auto& dims = op.dims;
    if (part < 0 || part >= op.num_subsystems())
        throw DimensionError("partial_transpose: subsystem index out of range");

    const auto strides = strides_of(dims);
    const Index dp = dims[static_cast<std::size_t>(part)];
    const Index sp = strides[static_cast<std::size_t>(part)];
    const Index n = op.size();

    Matrix out(n, n);
    for (Index row = 0; row < n; ++row) {
        const Index ip = (row / sp) % dp;
        const Index row_base = row - ip * sp;
        for (Index col = 0; col < n; ++col) {
            const Index jp = (col / sp) % dp;
            const Index col_base = col - jp * sp;
            out(row_base + jp * sp, col_base + ip * sp) = op.mat(row, col);
        }
    }
    return OperatorMatrix(std::move(out), dims);
}

Matrix matrix_exponential(const Matrix& a) {
    return a.exp();
}

Matrix exp_i_hermitian(const Matrix& h, double theta) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& w = es.eigenvalues();
    const auto& v = es.eigenvectors();
    Vector phases(w.size());
    for (Index k = 0; k < w.size(); ++k)
        phases(k) = std::exp(Complex(0, -theta * w(k)));
    return v * phases.asDiagonal() * v.adjoint();
}

double spectral_norm(const Matrix& a) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace loccsim
