#include "qrsim/qcore.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace qrsim {

void PureState::check() const {
    if (dim() < 1) throw std::invalid_argument("PureState: empty amplitude vector");
    const double n2 = amplitudes.squaredNorm();
    if (std::abs(n2 - 1.0) > kPureNormTol)
        throw std::invalid_argument("PureState: squared norm " + std::to_string(n2) +
                                    " deviates from 1 beyond tolerance");
}

PureState PureState::basis(int d, int index) {
    if (d < 1 || index < 0 || index >= d)
        throw std::invalid_argument("PureState::basis: index out of range");
    CVector v = CVector::Zero(d);
    v(index) = 1.0;
    return PureState{std::move(v)};
}

DensityMatrix::DensityMatrix(Matrix entries, bool validate) : entries_(std::move(entries)) {
    if (validate) check();
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    psi.check();
    return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint(), false);
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
    if (d < 1) throw std::invalid_argument("maximally_mixed: dimension must be positive");
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), false);
}

void DensityMatrix::check() const {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
        throw std::invalid_argument("DensityMatrix: entries must be square and nonempty");
    if (entries_.rows() > kMaxDim)
        throw std::invalid_argument("DensityMatrix: dimension exceeds cap " +
                                    std::to_string(kMaxDim));
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kStructTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian (deviation " +
                                    std::to_string(herm) + ")");
    const double tr = std::abs(entries_.trace().real() - 1.0) + std::abs(entries_.trace().imag());
    if (tr > kStructTol)
        throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " +
                                    std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -kStructTol)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(min_eig));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(Eigen::kroneckerProduct(a.entries(), b.entries()).eval(), false);
}

PureState tensor(const PureState& a, const PureState& b) {
    return PureState{Eigen::kroneckerProduct(a.amplitudes, b.amplitudes).eval()};
}

DensityMatrix tensor_power(const DensityMatrix& a, int k) {
    if (k < 1) throw std::invalid_argument("tensor_power: k must be >= 1");
    DensityMatrix out = a;
    for (int i = 1; i < k; ++i) out = tensor(out, a);
    return out;
}

PureState tensor_power(const PureState& a, int k) {
    if (k < 1) throw std::invalid_argument("tensor_power: k must be >= 1");
    PureState out = a;
    for (int i = 1; i < k; ++i) out = tensor(out, a);
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
    const int n = static_cast<int>(dims.size());
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw DimensionMismatch("partial_trace: subsystem dims must be positive");
        total *= d;
    }
    if (total != rho.dim())
        throw DimensionMismatch("partial_trace: product of dims " + std::to_string(total) +
                                " != state dim " + std::to_string(rho.dim()));
    std::vector<bool> kept(n, false);
    for (int s : keep) {
        if (s < 0 || s >= n) throw DimensionMismatch("partial_trace: keep index out of range");
        kept[s] = true;
    }

    // Row-major strides over the full index.
    std::vector<long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    std::vector<int> keep_idx, tr_idx;
    for (int i = 0; i < n; ++i) (kept[i] ? keep_idx : tr_idx).push_back(i);

    long dk = 1;
    for (int i : keep_idx) dk *= dims[i];
    long dt = 1;
    for (int i : tr_idx) dt *= dims[i];

    auto expand = [&](long flat, const std::vector<int>& subs) {
        long full = 0;
        for (int j = static_cast<int>(subs.size()) - 1; j >= 0; --j) {
            const int s = subs[j];
            full += (flat % dims[s]) * stride[s];
            flat /= dims[s];
        }
        return full;
    };

    Matrix out = Matrix::Zero(dk, dk);
    const Matrix& m = rho.entries();
    for (long i = 0; i < dk; ++i) {
        const long base_i = expand(i, keep_idx);
        for (long j = 0; j < dk; ++j) {
            const long base_j = expand(j, keep_idx);
            Complex acc = 0.0;
            for (long t = 0; t < dt; ++t) {
                const long off = expand(t, tr_idx);
                acc += m(base_i + off, base_j + off);
            }
            out(i, j) = acc;
        }
    }
    return DensityMatrix(std::move(out), false);
}

EighResult eigh(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
    const int d = rho.dim();
    EighResult out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    // Eigen returns ascending; flip to descending.
    for (int i = 0; i < d; ++i) {
        out.eigenvalues(i) = es.eigenvalues()(d - 1 - i);
        out.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    return out;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.entries() - b.entries(), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi) {
    if (rho.dim() != psi.dim())
        throw DimensionMismatch("fidelity_to_pure: dimension mismatch");
    const Complex v = (psi.amplitudes.adjoint() * rho.entries() * psi.amplitudes)(0, 0);
    return v.real();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.entries());
    const Matrix sqrt_a = es.operatorSqrt();
    Eigen::SelfAdjointEigenSolver<Matrix> inner((sqrt_a * b.entries() * sqrt_a).eval());
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += std::sqrt(std::max(0.0, inner.eigenvalues()(i)));
    return s * s;
}

PureState haar_sample(int d, Rng& rng) {
    if (d < 1) throw std::invalid_argument("haar_sample: dimension must be positive");
    CVector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(rng.normal(), rng.normal());
    v /= v.norm();
    return PureState{std::move(v)};
}

Matrix haar_unitary(int d, Rng& rng) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity so the distribution is Haar.
    for (int i = 0; i < d; ++i) {
        Complex ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

PostselectResult postselect(const DensityMatrix& rho, const Matrix& projector) {
    if (projector.rows() != rho.dim() || projector.cols() != rho.dim())
        throw DimensionMismatch("postselect: projector shape mismatch");
    const double idem = (projector * projector - projector).cwiseAbs().maxCoeff();
    if (idem > kStructTol)
        throw std::invalid_argument("postselect: projector not idempotent (deviation " +
                                    std::to_string(idem) + ")");
    Matrix branch = projector * rho.entries() * projector.adjoint();
    const double p = branch.trace().real();
    PostselectResult out;
    out.probability = std::max(0.0, p);
    if (p > 1e-12) out.state = DensityMatrix(branch / p, false);
    return out;
}

Matrix conjugate(const Matrix& rho, const Matrix& m) {
    if (m.cols() != rho.rows() || rho.rows() != rho.cols())
        throw DimensionMismatch("conjugate: dimension mismatch");
    return m * rho * m.adjoint();
}

}  // namespace qrsim
