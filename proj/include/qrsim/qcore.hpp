#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qrsim/rng.hpp"

namespace qrsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Structural tolerances used throughout.
inline constexpr double kStructTol = 1e-10;   // Hermiticity, trace, PSD
inline constexpr double kOracleTol = 1e-12;   // oracle equivalence
inline constexpr double kPureNormTol = 1e-12;

// Hard cap on any dense dimension handled by the project (d=4, k=6 buffer).
inline constexpr int kMaxDim = 4096;

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A protocol run violated one of its own internal consistency checks
// (e.g. oracle vs analytic divergence); maps to exit code 3 in the CLI.
class ExperimentFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PureState {
    CVector amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    void check() const;  // throws unless unit norm within kPureNormTol

    static PureState basis(int d, int index);
};

// Hermitian, unit-trace, PSD complex matrix; the universal state carrier.
class DensityMatrix {
public:
    // Trivial one-dimensional state; placeholder for result structs.
    DensityMatrix() : entries_(Matrix::Identity(1, 1)) {}
    explicit DensityMatrix(Matrix entries, bool validate = true);

    static DensityMatrix from_pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int d);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }

    // Throws std::invalid_argument naming the violated invariant.
    void check() const;

private:
    Matrix entries_;
};

struct PostselectResult {
    std::optional<DensityMatrix> state;  // empty on the zero-probability branch
    double probability = 0.0;
};

struct EighResult {
    Eigen::VectorXd eigenvalues;  // descending
    Matrix eigenvectors;          // columns, matching order
};

// Kronecker products; dims multiply, invariants preserved.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor_power(const DensityMatrix& a, int k);
PureState tensor_power(const PureState& a, int k);

// Reduced state over the kept subsystems. `dims` are the subsystem dimensions
// in tensor order (their product must equal rho.dim()); `keep` is a sorted set
// of subsystem indices.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep);

// Eigendecomposition of a Hermitian state, eigenvalues sorted descending.
EighResult eigh(const DensityMatrix& rho);

// Half the trace norm of (a - b); in [0, 1] for states.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// <psi| rho |psi>.
double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi);

// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 between mixed states.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

// Uniformly random unit vector (complex-normal components, normalized).
PureState haar_sample(int d, Rng& rng);

// Haar-random unitary via QR of a Ginibre matrix (phase-corrected).
Matrix haar_unitary(int d, Rng& rng);

// Project with a Hermitian idempotent, report Tr(P rho P) and the normalized
// branch. probability <= 1e-12 yields an empty state, never NaN.
PostselectResult postselect(const DensityMatrix& rho, const Matrix& projector);

// m rho m^dagger, unnormalized; caller decides normalization.
Matrix conjugate(const Matrix& rho, const Matrix& m);

}  // namespace qrsim
