#include "qrsim/adversary.hpp"

#include <cmath>

namespace qrsim {

namespace {

bool is_pow2(long x) { return x > 0 && (x & (x - 1)) == 0; }

int log2_exact(long x) {
    int n = 0;
    while ((1L << n) < x) ++n;
    return n;
}

}  // namespace

PureState phi_plus() {
    CVector v = CVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return PureState{std::move(v)};
}

PureState zero_pair() { return PureState::basis(4, 0); }

void JammingSpec::check() const {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("JammingSpec: eta must lie in [0,1]");
    if (model == JammingModel::PhaseState && (n_qubits < 1 || n_qubits > 6))
        throw std::invalid_argument("JammingSpec: PhaseState requires 1 <= n_qubits <= 6");
}

void EnsembleSpec::check() const {
    switch (kind) {
        case EnsembleKind::Haar:
            if (d < 1) throw std::invalid_argument("EnsembleSpec: Haar dimension must be >= 1");
            break;
        case EnsembleKind::BinaryPhase:
            if (!is_pow2(d) || d > 64)
                throw std::invalid_argument(
                    "EnsembleSpec: BinaryPhase dimension must be a power of 2, <= 64");
            break;
        case EnsembleKind::SingleQubitStabilizer:
            if (d != 2)
                throw std::invalid_argument("EnsembleSpec: stabilizer ensemble requires d = 2");
            break;
    }
}

long EnsembleSpec::size() const {
    switch (kind) {
        case EnsembleKind::BinaryPhase:
            if (d > 32) throw std::overflow_error("EnsembleSpec: sign-function count overflows");
            return 1L << d;  // all sign functions f: [d] -> {0,1}
        case EnsembleKind::SingleQubitStabilizer:
            return 6;
        case EnsembleKind::Haar:
            throw std::logic_error("EnsembleSpec: Haar family is not enumerable");
    }
    return 0;
}

void BufferModel::check() const {
    if (copies < 1 || per_copy_dim < 1)
        throw std::invalid_argument("BufferModel: copies and per-copy dim must be positive");
    double dims = std::pow(static_cast<double>(per_copy_dim), copies);
    if (dims > kMaxDim)
        throw std::invalid_argument("BufferModel: d^k exceeds the dimension cap " +
                                    std::to_string(kMaxDim));
}

long BufferModel::buffer_dim() const {
    long dims = 1;
    for (int i = 0; i < copies; ++i) dims *= per_copy_dim;
    return dims;
}

DensityMatrix jamming_state(const JammingSpec& spec) {
    spec.check();
    if (spec.model != JammingModel::Effective)
        throw std::invalid_argument(
            "jamming_state: pseudoentanglement is modeled effectively at two qubits; "
            "use the Effective model");
    const Matrix entangled = phi_plus().amplitudes * phi_plus().amplitudes.adjoint();
    const Matrix separable = zero_pair().amplitudes * zero_pair().amplitudes.adjoint();
    return DensityMatrix((1.0 - spec.eta) * entangled + spec.eta * separable, false);
}

DensityMatrix blind_jamming_state(double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("blind_jamming_state: eta must lie in [0,1]");
    const Matrix entangled = phi_plus().amplitudes * phi_plus().amplitudes.adjoint();
    Matrix correlated = Matrix::Zero(4, 4);
    correlated(0, 0) = correlated(3, 3) = 0.5;
    return DensityMatrix((1.0 - eta) * entangled + eta * correlated, false);
}

PureState phase_state(int n_qubits, const KeystreamSeed& seed, std::uint64_t index) {
    if (n_qubits < 1 || n_qubits > 6)
        throw std::invalid_argument("phase_state: n_qubits must lie in 1..6");
    const int d = 1 << n_qubits;
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    CVector v(d);
    for (int x = 0; x < d; ++x)
        v(x) = keystream_bit(seed, index, static_cast<unsigned>(x)) ? -amp : amp;
    return PureState{std::move(v)};
}

PureState phase_state_explicit(int n_qubits, std::uint64_t signs) {
    if (n_qubits < 1 || n_qubits > 6)
        throw std::invalid_argument("phase_state_explicit: n_qubits must lie in 1..6");
    const int d = 1 << n_qubits;
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    CVector v(d);
    for (int x = 0; x < d; ++x) v(x) = ((signs >> x) & 1) ? -amp : amp;
    return PureState{std::move(v)};
}

std::vector<PureState> stabilizer_ensemble() {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    std::vector<PureState> out;
    out.push_back(PureState::basis(2, 0));  // +Z
    out.push_back(PureState::basis(2, 1));  // -Z
    CVector xp(2), xm(2), yp(2), ym(2);
    xp << s, s;
    xm << s, -s;
    yp << s, i * s;
    ym << s, -i * s;
    out.push_back(PureState{xp});
    out.push_back(PureState{xm});
    out.push_back(PureState{yp});
    out.push_back(PureState{ym});
    return out;
}

std::vector<PureState> enumerate_ensemble(const EnsembleSpec& spec) {
    spec.check();
    switch (spec.kind) {
        case EnsembleKind::SingleQubitStabilizer:
            return stabilizer_ensemble();
        case EnsembleKind::BinaryPhase: {
            if (spec.d > 16)
                throw std::invalid_argument(
                    "enumerate_ensemble: BinaryPhase enumeration capped at d = 16");
            const int n = log2_exact(spec.d);
            std::vector<PureState> out;
            out.reserve(1L << spec.d);
            for (std::uint64_t f = 0; f < (1ULL << spec.d); ++f)
                out.push_back(phase_state_explicit(n, f));
            return out;
        }
        case EnsembleKind::Haar:
            throw std::invalid_argument("enumerate_ensemble: Haar family is not enumerable");
    }
    return {};
}

PureState sample_ensemble(const EnsembleSpec& spec, const KeystreamSeed& seed, Rng& rng) {
    spec.check();
    switch (spec.kind) {
        case EnsembleKind::Haar:
            return haar_sample(spec.d, rng);
        case EnsembleKind::BinaryPhase:
            return phase_state(log2_exact(spec.d), seed, rng.next_u64());
        case EnsembleKind::SingleQubitStabilizer:
            return stabilizer_ensemble()[rng.uniform_below(6)];
    }
    throw std::logic_error("sample_ensemble: unreachable");
}

DensityMatrix buffer_state(const BufferModel& model, const EnsembleSpec& spec,
                           const KeystreamSeed& seed, Rng& rng) {
    model.check();
    if (model.mode == BufferMode::IIDCopies) {
        if (spec.d != model.per_copy_dim)
            throw DimensionMismatch("buffer_state: ensemble dim must match per-copy dim");
        const PureState copy = sample_ensemble(spec, seed, rng);
        return DensityMatrix::from_pure(tensor_power(copy, model.copies));
    }
    // GlobalPseudorandom: one pure state on the whole buffer.
    const long bd = model.buffer_dim();
    EnsembleSpec global = spec;
    global.d = static_cast<int>(bd);
    if (spec.kind == EnsembleKind::SingleQubitStabilizer)
        throw std::invalid_argument(
            "buffer_state: stabilizer ensemble has no global-buffer variant");
    global.check();
    return DensityMatrix::from_pure(sample_ensemble(global, seed, rng));
}

}  // namespace qrsim
