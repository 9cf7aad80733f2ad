#pragma once

#include <cstdint>
#include <string>

#include "qrsim/adversary.hpp"
#include "qrsim/qcore.hpp"

namespace qrsim {

// Dimension of the symmetric subspace of (C^d)^{(x)k}: binom(d+k-1, k).
std::int64_t sym_dim(int d, int k);

struct SymmetricProjector {
    int d = 2;
    int k = 1;
    Matrix matrix;          // Hermitian idempotent on (C^d)^{(x)k}
    std::int64_t dim_sym = 0;

    void check() const;
};

// Dense symmetrizer (1/k!) sum_pi U_pi. Materialization is capped at
// buffer dimension 1024; acceptance probabilities above that go through
// schur_accept_prob, which never forms the projector.
SymmetricProjector sym_projector(int d, int k);

// Tr(Pi_sym rho) evaluated as (1/k!) sum_pi Tr(U_pi rho); works up to the
// full 4096-dim cap. Result clipped to [0, 1] at 1e-12.
double schur_accept_prob(const DensityMatrix& buffer, int d, int k);

// Fast path for pure buffers: <psi| Pi_sym |psi>.
double schur_accept_prob(const PureState& buffer, int d, int k);

struct SchurVerdictStats {
    double accept_prob = 0.0;
    double accept_stderr = 0.0;
    BufferModel model;
    std::int64_t samples = 0;
    double extinction_ratio = 0.0;  // 1/accept_prob when accept_prob > 0
    double dsym_ratio = 0.0;        // D_sym / d^k, the Haar reference
    double inv_k_factorial = 0.0;   // the d >> k headline next to the exact ratio
};

// Sample buffers per the model, average acceptance, report the extinction
// ratio alongside the exact D_sym/d^k reference and 1/k!.
SchurVerdictStats schur_filter_game(const BufferModel& model, const EnsembleSpec& spec,
                                    std::int64_t samples, const KeystreamSeed& seed,
                                    const Rng& rng, bool parallel = true);

}  // namespace qrsim
