#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrsim/adversary.hpp"
#include "qrsim/qcore.hpp"

namespace qrsim {

enum class MomentProvenance { Exact, MonteCarlo };

// k-th moment of a pure-state ensemble: average of (|psi><psi|)^{(x)k}.
struct MomentOperator {
    int k = 1;
    int d = 2;
    DensityMatrix matrix;
    MomentProvenance provenance = MomentProvenance::Exact;
    std::int64_t samples = 0;  // MonteCarlo only
};

struct AdvantageReport {
    double delta = 0.0;     // trace distance between the two moments
    double p_detect = 0.5;  // 1/2 + delta/2, the Helstrom optimum
    int k = 1;
    int d = 2;
};

struct PovmSpec {
    std::vector<Matrix> elements;
    std::vector<std::string> labels;

    void check() const;  // completeness within 1e-10, each element PSD
};

// Exact for enumerable families (average over every member); Monte Carlo
// mean over `samples` draws otherwise.
MomentOperator ensemble_moment(const EnsembleSpec& spec, int k,
                               std::optional<std::int64_t> samples, const KeystreamSeed& seed,
                               const Rng& rng, bool parallel = true);

// Closed form Pi_sym / binom(d+k-1, k).
MomentOperator haar_moment(int d, int k);

AdvantageReport helstrom_advantage(const MomentOperator& a, const MomentOperator& b);

// Tensor-product Pauli-basis POVM on n qubits: 6^n elements of the form
// (x)_j (I +/- P_j)/2 / 3^n over P in {X, Y, Z}.
PovmSpec make_pauli_povm(int n_qubits);

// Exact outcome probabilities of a state under a POVM.
std::vector<double> povm_probabilities(const DensityMatrix& rho, const PovmSpec& povm);

struct MleResult {
    DensityMatrix state;
    int iterations = 0;
    bool converged = false;
    std::vector<double> log_likelihood;  // one entry per iteration, non-decreasing
};

// Iterative R(rho) rho R(rho) maximum-likelihood reconstruction,
// renormalized each step; R(rho) = sum_i (f_i / p_i(rho)) M_i.
MleResult mle_reconstruct(const std::vector<double>& frequencies, const PovmSpec& povm,
                          int max_iters, double tol);

struct BlindnessReport {
    AdvantageReport bound;       // moment-level Helstrom bound
    double empirical_accuracy = 0.5;
    std::int64_t trials = 0;
    double sigma = 0.0;          // binomial sigma of the accuracy estimate
};

// Moment-level Helstrom bound between the adversarial ensemble and Haar at
// copy count k, plus an empirical likelihood-ratio discrimination rate on
// sampled buffer measurement records. The empirical rate must stay within
// bound + 3 sigma; a violation raises ExperimentFailure.
BlindnessReport blindness_experiment(const EnsembleSpec& adv_spec, int k,
                                     std::int64_t moment_samples, std::int64_t trials,
                                     const KeystreamSeed& seed, const Rng& rng,
                                     bool parallel = true);

}  // namespace qrsim
