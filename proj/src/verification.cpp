#include "qrsim/verification.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>

#include "qrsim/parallel.hpp"
#include "qrsim/schur.hpp"

namespace qrsim {

namespace {

std::int64_t ipow(int base, int exp) {
    std::int64_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

// Moment buffers are capped at dim 64 (k <= 3 at d = 4, k <= 6 at d = 2).
void check_moment_dims(int d, int k) {
    if (d < 1 || k < 1)
        throw std::invalid_argument("moment: d and k must be >= 1");
    if (std::pow(static_cast<double>(d), k) > 64.0)
        throw std::invalid_argument("moment: buffer dimension d^k capped at 64");
}

Matrix pure_power_projector(const PureState& psi, int k) {
    const PureState buf = tensor_power(psi, k);
    return buf.amplitudes * buf.amplitudes.adjoint();
}

}  // namespace

void PovmSpec::check() const {
    if (elements.empty()) throw std::invalid_argument("PovmSpec: no elements");
    const auto dim = elements.front().rows();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const Matrix& e : elements) {
        if (e.rows() != dim || e.cols() != dim)
            throw DimensionMismatch("PovmSpec: inconsistent element shapes");
        Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kStructTol)
            throw std::invalid_argument("PovmSpec: element not PSD");
        sum += e;
    }
    if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > kStructTol)
        throw std::invalid_argument("PovmSpec: elements do not sum to identity");
}

MomentOperator ensemble_moment(const EnsembleSpec& spec, int k,
                               std::optional<std::int64_t> samples, const KeystreamSeed& seed,
                               const Rng& rng, bool parallel) {
    spec.check();
    check_moment_dims(spec.d, k);
    const int dim = static_cast<int>(ipow(spec.d, k));

    if (!samples) {
        if (!spec.enumerable())
            throw std::invalid_argument(
                "ensemble_moment: exact averaging requested for a non-enumerable family");
        const std::vector<PureState> members = enumerate_ensemble(spec);
        Matrix acc = Matrix::Zero(dim, dim);
        for (const PureState& psi : members) acc += pure_power_projector(psi, k);
        acc /= static_cast<double>(members.size());
        return MomentOperator{k, spec.d, DensityMatrix(std::move(acc), false),
                              MomentProvenance::Exact, 0};
    }

    if (*samples < 1) throw std::invalid_argument("ensemble_moment: samples must be >= 1");
    Matrix acc = matrix_mean_over_samples(
        *samples, dim,
        [&](std::int64_t i) {
            Rng sub = rng.substream("moment-sample", static_cast<std::uint64_t>(i));
            return pure_power_projector(sample_ensemble(spec, seed, sub), k);
        },
        parallel);
    return MomentOperator{k, spec.d, DensityMatrix(std::move(acc), false),
                          MomentProvenance::MonteCarlo, *samples};
}

MomentOperator haar_moment(int d, int k) {
    check_moment_dims(d, k);
    const SymmetricProjector proj = sym_projector(d, k);
    return MomentOperator{k, d,
                          DensityMatrix(proj.matrix / static_cast<double>(proj.dim_sym), false),
                          MomentProvenance::Exact, 0};
}

AdvantageReport helstrom_advantage(const MomentOperator& a, const MomentOperator& b) {
    if (a.d != b.d || a.k != b.k)
        throw DimensionMismatch("helstrom_advantage: moment shapes differ");
    const double delta = trace_distance(a.matrix, b.matrix);
    return AdvantageReport{delta, 0.5 + 0.5 * delta, a.k, a.d};
}

PovmSpec make_pauli_povm(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 3)
        throw std::invalid_argument("make_pauli_povm: n_qubits must lie in 1..3");
    const Complex i(0.0, 1.0);
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    const std::array<Matrix, 3> paulis{x, y, z};
    const std::array<std::string, 3> names{"X", "Y", "Z"};

    PovmSpec out;
    out.elements.push_back(Matrix::Identity(1, 1));
    out.labels.push_back("");
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<Matrix> next_e;
        std::vector<std::string> next_l;
        for (std::size_t j = 0; j < out.elements.size(); ++j) {
            for (int p = 0; p < 3; ++p) {
                for (int sign : {+1, -1}) {
                    const Matrix e =
                        (Matrix::Identity(2, 2) + static_cast<double>(sign) * paulis[p]) / 6.0;
                    next_e.push_back(Eigen::kroneckerProduct(out.elements[j], e).eval());
                    next_l.push_back(out.labels[j] + names[p] + (sign > 0 ? "+" : "-"));
                }
            }
        }
        out.elements = std::move(next_e);
        out.labels = std::move(next_l);
    }
    out.check();
    return out;
}

std::vector<double> povm_probabilities(const DensityMatrix& rho, const PovmSpec& povm) {
    std::vector<double> out;
    out.reserve(povm.elements.size());
    for (const Matrix& e : povm.elements)
        out.push_back(std::max(0.0, (e * rho.entries()).trace().real()));
    return out;
}

MleResult mle_reconstruct(const std::vector<double>& frequencies, const PovmSpec& povm,
                          int max_iters, double tol) {
    povm.check();
    if (frequencies.size() != povm.elements.size())
        throw DimensionMismatch("mle_reconstruct: frequency count does not match POVM");
    double fsum = 0.0;
    for (double f : frequencies) {
        if (f < 0.0) throw std::invalid_argument("mle_reconstruct: negative frequency");
        fsum += f;
    }
    if (std::abs(fsum - 1.0) > 1e-8)
        throw std::invalid_argument("mle_reconstruct: frequencies must sum to 1");

    const int dim = static_cast<int>(povm.elements.front().rows());
    Matrix rho = Matrix::Identity(dim, dim) / static_cast<double>(dim);

    MleResult out;
    for (int it = 0; it < max_iters; ++it) {
        std::vector<double> probs(frequencies.size());
        bool degenerate = false;
        for (std::size_t j = 0; j < frequencies.size(); ++j) {
            probs[j] = (povm.elements[j] * rho).trace().real();
            if (probs[j] <= 0.0 && frequencies[j] > 0.0) degenerate = true;
        }
        if (degenerate) {
            rho = (1.0 - 1e-12) * rho +
                  1e-12 * Matrix::Identity(dim, dim) / static_cast<double>(dim);
            for (std::size_t j = 0; j < frequencies.size(); ++j)
                probs[j] = (povm.elements[j] * rho).trace().real();
        }

        double loglik = 0.0;
        Matrix r = Matrix::Zero(dim, dim);
        for (std::size_t j = 0; j < frequencies.size(); ++j) {
            if (frequencies[j] <= 0.0) continue;
            loglik += frequencies[j] * std::log(probs[j]);
            r += (frequencies[j] / probs[j]) * povm.elements[j];
        }
        out.log_likelihood.push_back(loglik);

        Matrix next = r * rho * r;
        next /= next.trace().real();
        // Symmetrize away accumulated roundoff.
        next = 0.5 * (next + next.adjoint().eval());

        const double change = (next - rho).cwiseAbs().maxCoeff();
        rho = std::move(next);
        out.iterations = it + 1;
        if (change < tol) {
            out.converged = true;
            break;
        }
    }
    out.state = DensityMatrix(std::move(rho), false);
    return out;
}

BlindnessReport blindness_experiment(const EnsembleSpec& adv_spec, int k,
                                     std::int64_t moment_samples, std::int64_t trials,
                                     const KeystreamSeed& seed, const Rng& rng,
                                     bool parallel) {
    check_moment_dims(adv_spec.d, k);
    if (trials < 1) throw std::invalid_argument("blindness_experiment: trials must be >= 1");

    const MomentOperator adv =
        adv_spec.enumerable()
            ? ensemble_moment(adv_spec, k, std::nullopt, seed, rng, parallel)
            : ensemble_moment(adv_spec, k, moment_samples, seed, rng, parallel);
    const MomentOperator haar = haar_moment(adv_spec.d, k);
    const AdvantageReport bound = helstrom_advantage(adv, haar);

    // Likelihood-ratio (Helstrom) measurement: project onto the positive
    // eigenspace of (adv_moment - haar_moment).
    Eigen::SelfAdjointEigenSolver<Matrix> es(adv.matrix.entries() - haar.matrix.entries());
    const int dim = static_cast<int>(es.eigenvalues().size());
    Matrix plus = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        if (es.eigenvalues()(j) > 0.0)
            plus += es.eigenvectors().col(j) * es.eigenvectors().col(j).adjoint();

    const double accuracy = mean_over_samples(
        trials,
        [&](std::int64_t i) {
            Rng sub = rng.substream("blindness-trial", static_cast<std::uint64_t>(i));
            const bool truth_adv = sub.next_u64() & 1;
            PureState psi = truth_adv ? sample_ensemble(adv_spec, seed, sub)
                                      : haar_sample(adv_spec.d, sub);
            const PureState buffer = tensor_power(psi, k);
            const double p_plus =
                (buffer.amplitudes.adjoint() * plus * buffer.amplitudes)(0, 0).real();
            const bool guess_adv = sub.uniform() < p_plus;
            return guess_adv == truth_adv ? 1.0 : 0.0;
        },
        parallel);

    BlindnessReport out;
    out.bound = bound;
    out.empirical_accuracy = accuracy;
    out.trials = trials;
    out.sigma = std::sqrt(0.25 / static_cast<double>(trials));
    if (accuracy > bound.p_detect + 3.0 * out.sigma)
        throw ExperimentFailure(
            "blindness_experiment: empirical discrimination accuracy exceeds the Helstrom "
            "bound plus sampling slack");
    return out;
}

}  // namespace qrsim
