#pragma once

#include <utility>
#include <vector>

#include "qrsim/adversary.hpp"
#include "qrsim/qcore.hpp"

namespace qrsim {

// Bell-subspace populations (x, y, z) of the effective state
// x|Phi+><Phi+| + y|00><00| + z|11><11|, with x + y + z = 1.
struct RecurrenceCoords {
    double x = 1.0;
    double y = 0.0;
    double z = 0.0;

    void check() const;
};

// Effective state for given coordinates.
DensityMatrix coords_to_state(const RecurrenceCoords& c);

// Extract coordinates from a state in the (Phi+, |00>, |11>) span.
RecurrenceCoords state_to_coords(const DensityMatrix& rho);

struct RoundRecord {
    int round = 0;
    RecurrenceCoords coords;
    double fidelity = 0.0;  // to |Phi+>; equals (1 + x)/2
    double p_succ = 0.0;
};

struct PurificationTrajectory {
    std::vector<RoundRecord> rounds;
};

struct ExactRoundResult {
    DensityMatrix state;  // source pair after success
    double p_succ = 0.0;
};

// One BBPSSW round by brute force: rho (x) rho on 16 dims, bilateral CNOT,
// even-parity postselection on the target pair, trace out the target pair.
ExactRoundResult bbpssw_exact_round(const DensityMatrix& rho);

// The analytic map: x' = x^2, y' = y + x(1-x)/2, z' = z + x(1-x)/2.
RecurrenceCoords recurrence_step(const RecurrenceCoords& c);

// Eigenvalues of the 2x2 Jacobian [[2x, 0], [1/2 - x, 1]]: exactly (2x, 1).
std::pair<double, double> jacobian_eigs(const RecurrenceCoords& c);

// Iterate both the exact round and the analytic map from jamming_state(eta),
// asserting per-round agreement within kOracleTol. Records rounds 0..rounds.
PurificationTrajectory run_divergence(double eta, int rounds);

}  // namespace qrsim
