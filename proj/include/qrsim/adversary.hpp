#pragma once

#include <vector>

#include "qrsim/qcore.hpp"

namespace qrsim {

// Shared two-qubit fixtures.
PureState phi_plus();   // (|00> + |11>)/sqrt(2)
PureState zero_pair();  // |00>

enum class JammingModel { Effective, PhaseState, StabilizerDesign };

struct JammingSpec {
    double eta = 0.0;
    JammingModel model = JammingModel::Effective;
    int n_qubits = 1;  // PhaseState only, 1..6

    void check() const;
};

enum class EnsembleKind { Haar, BinaryPhase, SingleQubitStabilizer };

// A named, enumerable or samplable family of pure states.
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Haar;
    int d = 2;

    void check() const;
    bool enumerable() const { return kind != EnsembleKind::Haar; }
    // Number of members of an enumerable family.
    long size() const;
};

enum class BufferMode { IIDCopies, GlobalPseudorandom };

struct BufferModel {
    BufferMode mode = BufferMode::IIDCopies;
    int copies = 1;
    int per_copy_dim = 2;

    void check() const;  // enforces d^k <= kMaxDim
    long buffer_dim() const;
};

// (1-eta)|Phi+><Phi+| + eta|00><00|; the Effective stand-in for the
// pseudoentangled component at two qubits.
DensityMatrix jamming_state(const JammingSpec& spec);

// The jamming state as a computationally bounded node effectively perceives
// it: the injected component's marginals look maximally mixed, so the
// surrogate is the classically correlated (|00><00| + |11><11|)/2. Both
// local marginals are exactly I/2, which is what makes local filtering
// freeze on this state.
DensityMatrix blind_jamming_state(double eta);

// Binary-phase state 2^{-n/2} sum_x (-1)^{f(x)} |x>, with f drawn from the
// keystream at (seed, index).
PureState phase_state(int n_qubits, const KeystreamSeed& seed, std::uint64_t index);

// Binary-phase state for an explicit sign function (bit x of `signs`);
// used for exact enumeration over all 2^d functions.
PureState phase_state_explicit(int n_qubits, std::uint64_t signs);

// The six Pauli-axis eigenstates, each weight 1/6: the exact projective
// 2-design at d = 2.
std::vector<PureState> stabilizer_ensemble();

// All members of an enumerable family.
std::vector<PureState> enumerate_ensemble(const EnsembleSpec& spec);

// One pure sample from the family.
PureState sample_ensemble(const EnsembleSpec& spec, const KeystreamSeed& seed, Rng& rng);

// IIDCopies: k-fold tensor power of one sampled pure state.
// GlobalPseudorandom: one pure state on the full d^k-dimensional buffer.
DensityMatrix buffer_state(const BufferModel& model, const EnsembleSpec& spec,
                           const KeystreamSeed& seed, Rng& rng);

}  // namespace qrsim
