#include "qrsim/schur.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qrsim/parallel.hpp"

namespace qrsim {

namespace {

std::int64_t ipow(int base, int exp) {
    std::int64_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

std::int64_t factorial(int k) {
    std::int64_t out = 1;
    for (int i = 2; i <= k; ++i) out *= i;
    return out;
}

// Permute the base-d digits of a buffer index: digit j of the output is
// digit perm[j] of the input (digit 0 = leftmost tensor factor).
std::int64_t permute_index(std::int64_t idx, const std::vector<int>& perm, int d, int k) {
    std::vector<int> digits(k);
    for (int j = k - 1; j >= 0; --j) {
        digits[j] = static_cast<int>(idx % d);
        idx /= d;
    }
    std::int64_t out = 0;
    for (int j = 0; j < k; ++j) out = out * d + digits[perm[j]];
    return out;
}

void check_dims(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("schur: d and k must be >= 1");
    if (k > 6) throw std::invalid_argument("schur: copies capped at k = 6");
    double total = std::pow(static_cast<double>(d), k);
    if (total > kMaxDim)
        throw std::invalid_argument("schur: buffer dimension d^k exceeds cap " +
                                    std::to_string(kMaxDim));
}

}  // namespace

std::int64_t sym_dim(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("sym_dim: d and k must be >= 1");
    // binom(d+k-1, k) in exact integer arithmetic.
    std::int64_t num = 1, den = 1;
    for (int i = 1; i <= k; ++i) {
        num *= d - 1 + i;
        den *= i;
        const std::int64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
    }
    return num / den;
}

void SymmetricProjector::check() const {
    const double idem = (matrix * matrix - matrix).cwiseAbs().maxCoeff();
    if (idem > kStructTol)
        throw std::invalid_argument("SymmetricProjector: not idempotent (deviation " +
                                    std::to_string(idem) + ")");
    const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kStructTol)
        throw std::invalid_argument("SymmetricProjector: not Hermitian");
    if (std::abs(matrix.trace().real() - static_cast<double>(dim_sym)) > 1e-8)
        throw std::invalid_argument("SymmetricProjector: trace does not equal dim_sym");
}

SymmetricProjector sym_projector(int d, int k) {
    check_dims(d, k);
    const std::int64_t dim = ipow(d, k);
    if (dim > 1024)
        throw std::invalid_argument(
            "sym_projector: dense materialization capped at buffer dim 1024");

    Matrix acc = Matrix::Zero(dim, dim);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t count = 0;
    do {
        for (std::int64_t i = 0; i < dim; ++i) acc(permute_index(i, perm, d, k), i) += 1.0;
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    acc /= static_cast<double>(count);

    SymmetricProjector out{d, k, std::move(acc), sym_dim(d, k)};
    out.check();
    return out;
}

double schur_accept_prob(const DensityMatrix& buffer, int d, int k) {
    check_dims(d, k);
    const std::int64_t dim = ipow(d, k);
    if (buffer.dim() != dim)
        throw DimensionMismatch("schur_accept_prob: buffer dim does not match d^k");

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    Complex acc = 0.0;
    std::int64_t count = 0;
    const Matrix& m = buffer.entries();
    do {
        for (std::int64_t i = 0; i < dim; ++i) acc += m(permute_index(i, perm, d, k), i);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double p = acc.real() / static_cast<double>(count);
    if (p < -1e-12 || p > 1.0 + 1e-12)
        throw ExperimentFailure("schur_accept_prob: probability outside [0,1]");
    return std::clamp(p, 0.0, 1.0);
}

double schur_accept_prob(const PureState& buffer, int d, int k) {
    check_dims(d, k);
    const std::int64_t dim = ipow(d, k);
    if (buffer.dim() != dim)
        throw DimensionMismatch("schur_accept_prob: buffer dim does not match d^k");

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    Complex acc = 0.0;
    std::int64_t count = 0;
    const CVector& v = buffer.amplitudes;
    do {
        for (std::int64_t i = 0; i < dim; ++i)
            acc += std::conj(v(permute_index(i, perm, d, k))) * v(i);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double p = acc.real() / static_cast<double>(count);
    return std::clamp(p, 0.0, 1.0);
}

SchurVerdictStats schur_filter_game(const BufferModel& model, const EnsembleSpec& spec,
                                    std::int64_t samples, const KeystreamSeed& seed,
                                    const Rng& rng, bool parallel) {
    model.check();
    check_dims(model.per_copy_dim, model.copies);
    if (samples < 1) throw std::invalid_argument("schur_filter_game: samples must be >= 1");

    const int d = model.per_copy_dim;
    const int k = model.copies;

    auto one_sample = [&](std::int64_t i) {
        Rng sub = rng.substream("schur-sample", static_cast<std::uint64_t>(i));
        if (model.mode == BufferMode::IIDCopies) {
            const PureState copy = sample_ensemble(spec, seed, sub);
            return schur_accept_prob(tensor_power(copy, k), d, k);
        }
        EnsembleSpec global = spec;
        global.d = static_cast<int>(model.buffer_dim());
        return schur_accept_prob(sample_ensemble(global, seed, sub), d, k);
    };
    const auto [mean, stderr_] = mean_stderr_over_samples(samples, one_sample, parallel);

    SchurVerdictStats out;
    out.accept_prob = mean;
    out.accept_stderr = stderr_;
    out.model = model;
    out.samples = samples;
    out.extinction_ratio = mean > 0.0 ? 1.0 / mean : 0.0;
    out.dsym_ratio =
        static_cast<double>(sym_dim(d, k)) / static_cast<double>(ipow(d, k));
    out.inv_k_factorial = 1.0 / static_cast<double>(factorial(k));
    return out;
}

}  // namespace qrsim
