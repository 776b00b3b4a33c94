#include "loccsim/kraus.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "loccsim/rng.hpp"

namespace loccsim {

namespace {

void check_nonempty(const KrausSet& set, const char* who) {
    if (set.operators.empty()) {
        std::ostringstream msg;
        msg << who << ": empty Kraus set";
        throw DimensionError(msg.str());
    }
}

// Place a pair of single-subsystem operators on the fixed (0, 1) order.
OperatorMatrix place_pair(const OperatorMatrix& on0, const OperatorMatrix& on1) {
    return tensor(on0, on1);
}

} // namespace

KrausSet kraus_from_generator(const LindbladGenerator& gen, double dt) {
    if (dt <= 0.0)
        throw DomainError("kraus_from_generator: dt must be > 0");
    const Index n = gen.hamiltonian.size();
    Matrix l0 = Matrix::Identity(n, n) - Complex(0, dt) * gen.hamiltonian.mat;
    std::vector<OperatorMatrix> ops;
    ops.reserve(gen.jumps.size() + 1);
    ops.emplace_back(Matrix(), std::vector<Index>()); // slot for L0, filled below
    for (const auto& [op, rate] : gen.jumps) {
        if (rate == 0.0) continue;
        Matrix e = std::sqrt(rate) * op.mat;
        l0 -= (0.5 * dt) * (e.adjoint() * e);
        ops.emplace_back(e * std::sqrt(dt), gen.hamiltonian.dims);
    }
    ops.front() = OperatorMatrix(std::move(l0), gen.hamiltonian.dims);
    return {std::move(ops), dt, 2.0};
}

KrausSet mix_kraus(const KrausSet& set, const Matrix& u) {
    check_nonempty(set, "mix_kraus");
    const auto n = static_cast<Index>(set.operators.size());
    if (u.rows() != n || u.cols() != n)
        throw DimensionError("mix_kraus: mixing matrix side must equal the operator count");
    if ((u.adjoint() * u - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
        throw DomainError("mix_kraus: mixing matrix is not unitary");
    std::vector<OperatorMatrix> mixed;
    mixed.reserve(set.operators.size());
    for (Index i = 0; i < n; ++i) {
        Matrix acc = Matrix::Zero(set.operators.front().size(),
                                  set.operators.front().size());
        for (Index j = 0; j < n; ++j)
            acc += u(i, j) * set.operators[static_cast<std::size_t>(j)].mat;
        mixed.emplace_back(std::move(acc), set.operators.front().dims);
    }
    return {std::move(mixed), set.dt, set.order_label};
}

KrausSet product_form_pair(const OperatorMatrix& m, const OperatorMatrix& f,
                           int measured_subsystem, double dt) {
    if (dt <= 0.0)
        throw DomainError("product_form_pair: dt must be > 0");
    if (measured_subsystem != 0 && measured_subsystem != 1)
        throw DimensionError("product_form_pair: measured_subsystem must be 0 or 1");
    if (!m.is_hermitian(1e-12))
        throw DomainError("product_form_pair: M must be Hermitian");

    const double sq = std::sqrt(dt);
    const Matrix im = Matrix::Identity(m.size(), m.size());
    const Matrix iff = Matrix::Identity(f.size(), f.size());
    const Matrix m2 = m.mat * m.mat;
    const Matrix f2 = f.mat * f.mat;

    auto factor_m = [&](double sign) {
        return OperatorMatrix(im + sign * sq * m.mat - 0.5 * dt * m2, m.dims);
    };
    auto factor_f = [&](double sign) {
        return OperatorMatrix(iff + Complex(0, sign * sq) * f.mat - 0.5 * dt * f2,
                              f.dims);
    };

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<OperatorMatrix> ops;
    for (double sign : {-1.0, 1.0}) {
        // L~_0 carries (1 - M sqrt(dt)) on the measured factor and
        // (1 + iF sqrt(dt)) on the fed-back one; L~_1 flips both signs.
        OperatorMatrix mm = factor_m(sign);
        OperatorMatrix ff = factor_f(-sign);
        OperatorMatrix joint = (measured_subsystem == 0) ? place_pair(mm, ff)
                                                         : place_pair(ff, mm);
        joint.mat *= inv_sqrt2;
        ops.push_back(std::move(joint));
    }
    return {std::move(ops), dt, 1.5};
}

KrausSet compose(const KrausSet& after, const KrausSet& before) {
    check_nonempty(after, "compose");
    check_nonempty(before, "compose");
    if (after.operators.front().size() != before.operators.front().size())
        throw DimensionError("compose: operator dimension mismatch");
    if (std::abs(after.dt - before.dt) >
        1e-12 * std::max(std::abs(after.dt), std::abs(before.dt)))
        throw DomainError("compose: the two sets must share dt");
    std::vector<OperatorMatrix> ops;
    ops.reserve(after.operators.size() * before.operators.size());
    for (const auto& a : after.operators)
        for (const auto& b : before.operators)
            ops.emplace_back(a.mat * b.mat, a.dims);
    return {std::move(ops), after.dt, std::min(after.order_label, before.order_label)};
}

DensityState apply_channel(const KrausSet& set, const DensityState& rho) {
    check_nonempty(set, "apply_channel");
    if (set.operators.front().size() != rho.size())
        throw DimensionError("apply_channel: operator/state dimension mismatch");
    Matrix out = Matrix::Zero(rho.size(), rho.size());
    for (const auto& k : set.operators)
        out += k.mat * rho.matrix() * k.mat.adjoint();
    out /= out.trace().real();
    // Completeness only holds to O(dt^order), so allow the matching slack.
    DensityState::Tolerances tol;
    tol.trace = 1e-9;
    tol.hermiticity = 1e-9;
    tol.positivity = 1e-9;
    return DensityState::make(OperatorMatrix(std::move(out), rho.dims()), tol);
}

double channel_distance(const KrausSet& a, const KrausSet& b,
                        const std::vector<DensityState>& samples) {
    if (samples.empty())
        throw DomainError("channel_distance: need at least one sample state");
    double worst = 0.0;
    for (const auto& rho : samples) {
        const DensityState out_a = apply_channel(a, rho);
        const DensityState out_b = apply_channel(b, rho);
        worst = std::max(worst, trace_distance(out_a.matrix(), out_b.matrix()));
    }
    return worst;
}

std::vector<DensityState> channel_sample_states(const std::vector<Index>& dims,
                                                int count, std::uint64_t seed) {
    if (dims.size() != 2)
        throw DimensionError("channel_sample_states: expected two subsystems");
    GaussianStream gauss(seed);
    auto random_ket = [&](Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i)
            v(i) = Complex(gauss.next(), gauss.next());
        v /= v.norm();
        return v;
    };
    std::vector<DensityState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (i % 2 == 0) {
            // product pure state
            const Vector k0 = random_ket(dims[0]);
            const Vector k1 = random_ket(dims[1]);
            Vector joint(dims[0] * dims[1]);
            for (Index a = 0; a < dims[0]; ++a)
                for (Index b = 0; b < dims[1]; ++b)
                    joint(a * dims[1] + b) = k0(a) * k1(b);
            out.push_back(state_from_ket(joint, dims));
        } else {
            out.push_back(state_from_ket(random_ket(dims[0] * dims[1]), dims));
        }
    }
    return out;
}

double completeness_defect(const KrausSet& set) {
    check_nonempty(set, "completeness_defect");
    const Index n = set.operators.front().size();
    Matrix sum = Matrix::Zero(n, n);
    for (const auto& k : set.operators)
        sum += k.mat.adjoint() * k.mat;
    return spectral_norm(sum - Matrix::Identity(n, n));
}

double separability_defect(const KrausSet& set) {
    check_nonempty(set, "separability_defect");
    const auto& dims = set.operators.front().dims;
    if (dims.size() != 2)
        throw DimensionError("separability_defect: expected two subsystems");
    const Index d0 = dims[0], d1 = dims[1];
    double worst = 0.0;
    for (const auto& k : set.operators) {
        // Realign K[(i,j),(p,q)] -> R[(i,p),(j,q)]: singular values of R are
        // the operator Schmidt coefficients across the split.
        Matrix r(d0 * d0, d1 * d1);
        for (Index i = 0; i < d0; ++i)
            for (Index j = 0; j < d1; ++j)
                for (Index p = 0; p < d0; ++p)
                    for (Index q = 0; q < d1; ++q)
                        r(i * d0 + p, j * d1 + q) = k.mat(i * d1 + j, p * d1 + q);
        Eigen::JacobiSVD<Matrix> svd(r);
        const auto& s = svd.singularValues();
        const double cutoff = 1e-10 * s(0);
        int rank = 0;
        for (Index v = 0; v < s.size(); ++v)
            if (s(v) > cutoff) ++rank;
        worst = std::max(worst, static_cast<double>(rank - 1));
    }
    return worst;
}

LindbladGenerator unidirectional_generator(const OperatorMatrix& m,
                                           const OperatorMatrix& f,
                                           int measured_subsystem) {
    if (measured_subsystem != 0 && measured_subsystem != 1)
        throw DimensionError("unidirectional_generator: measured_subsystem must be 0 or 1");
    if (!m.is_hermitian(1e-12) || !f.is_hermitian(1e-12))
        throw DomainError("unidirectional_generator: M and F must be Hermitian");
    const OperatorMatrix id_m = identity(m.dims);
    const OperatorMatrix id_f = identity(f.dims);
    OperatorMatrix mf, m_full, f_full;
    if (measured_subsystem == 0) {
        mf = place_pair(m, f);
        m_full = place_pair(m, id_f);
        f_full = place_pair(id_m, f);
    } else {
        mf = place_pair(f, m);
        m_full = place_pair(id_f, m);
        f_full = place_pair(f, id_m);
    }
    Matrix jump = m_full.mat - Complex(0, 1) * f_full.mat;
    return LindbladGenerator::make(
        mf, {{OperatorMatrix(std::move(jump), mf.dims), 1.0}});
}

LindbladGenerator pair_generator(const OperatorMatrix& m, const OperatorMatrix& f,
                                 int measured_subsystem) {
    const LindbladGenerator g1 = unidirectional_generator(m, f, measured_subsystem);
    const LindbladGenerator g2 = unidirectional_generator(f, m, 1 - measured_subsystem);
    Matrix h = g1.hamiltonian.mat + g2.hamiltonian.mat;
    std::vector<std::pair<OperatorMatrix, double>> jumps = g1.jumps;
    jumps.insert(jumps.end(), g2.jumps.begin(), g2.jumps.end());
    return LindbladGenerator::make(OperatorMatrix(std::move(h), g1.hamiltonian.dims),
                                   std::move(jumps));
}

} // namespace loccsim
