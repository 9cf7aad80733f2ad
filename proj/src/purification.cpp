#include "qrsim/purification.hpp"

#include <cmath>
#include <string>

namespace qrsim {

namespace {

// 16x16 bilateral CNOT, qubit order (A1, B1, A2, B2): A1 controls A2 and
// B1 controls B2. A permutation in the computational basis.
Matrix bilateral_cnot() {
    Matrix u = Matrix::Zero(16, 16);
    for (int i = 0; i < 16; ++i) {
        const int a1 = (i >> 3) & 1, b1 = (i >> 2) & 1, a2 = (i >> 1) & 1, b2 = i & 1;
        const int j = (a1 << 3) | (b1 << 2) | ((a2 ^ a1) << 1) | (b2 ^ b1);
        u(j, i) = 1.0;
    }
    return u;
}

// P_succ = I_{A1B1} (x) (|00><00| + |11><11|)_{A2B2}.
Matrix success_projector() {
    Matrix p = Matrix::Zero(16, 16);
    for (int i = 0; i < 16; ++i) {
        const int a2 = (i >> 1) & 1, b2 = i & 1;
        if (a2 == b2) p(i, i) = 1.0;
    }
    return p;
}

}  // namespace

void RecurrenceCoords::check() const {
    if (x < -kStructTol || y < -kStructTol || z < -kStructTol || x > 1 + kStructTol ||
        y > 1 + kStructTol || z > 1 + kStructTol)
        throw std::invalid_argument("RecurrenceCoords: components must lie in [0,1]");
    if (std::abs(x + y + z - 1.0) > kStructTol)
        throw std::invalid_argument("RecurrenceCoords: x + y + z deviates from 1 by " +
                                    std::to_string(x + y + z - 1.0));
}

DensityMatrix coords_to_state(const RecurrenceCoords& c) {
    c.check();
    const Matrix phi = phi_plus().amplitudes * phi_plus().amplitudes.adjoint();
    Matrix m = c.x * phi;
    m(0, 0) += c.y;
    m(3, 3) += c.z;
    return DensityMatrix(std::move(m), false);
}

RecurrenceCoords state_to_coords(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionMismatch("state_to_coords: expected a two-qubit state");
    const Matrix& m = rho.entries();
    RecurrenceCoords c;
    c.x = 2.0 * m(0, 3).real();
    c.y = m(0, 0).real() - 0.5 * c.x;
    c.z = m(3, 3).real() - 0.5 * c.x;
    return c;
}

ExactRoundResult bbpssw_exact_round(const DensityMatrix& rho) {
    if (rho.dim() != 4)
        throw DimensionMismatch("bbpssw_exact_round: expected a two-qubit state");
    static const Matrix u = bilateral_cnot();
    static const Matrix p = success_projector();

    const DensityMatrix two_copies = tensor(rho, rho);
    const Matrix evolved = conjugate(two_copies.entries(), u);
    const PostselectResult sel = postselect(DensityMatrix(evolved, false), p);
    if (!sel.state)
        throw ExperimentFailure("bbpssw_exact_round: zero success probability");
    // Keep the source pair (A1, B1).
    DensityMatrix kept = partial_trace(*sel.state, {4, 4}, {0});
    return ExactRoundResult{std::move(kept), sel.probability};
}

RecurrenceCoords recurrence_step(const RecurrenceCoords& c) {
    c.check();
    const double gain = 0.5 * c.x * (1.0 - c.x);
    return RecurrenceCoords{c.x * c.x, c.y + gain, c.z + gain};
}

std::pair<double, double> jacobian_eigs(const RecurrenceCoords& c) {
    c.check();
    // Lower-triangular Jacobian; eigenvalues read off the diagonal.
    return {2.0 * c.x, 1.0};
}

PurificationTrajectory run_divergence(double eta, int rounds) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("run_divergence: eta must lie in [0,1]");
    if (rounds < 0 || rounds > 64)
        throw std::invalid_argument("run_divergence: rounds must lie in 0..64");

    RecurrenceCoords analytic{1.0 - eta, eta, 0.0};
    DensityMatrix exact = jamming_state(JammingSpec{eta, JammingModel::Effective});

    PurificationTrajectory traj;
    traj.rounds.push_back(
        RoundRecord{0, analytic, fidelity_to_pure(exact, phi_plus()), 1.0});

    for (int m = 1; m <= rounds; ++m) {
        const ExactRoundResult step = bbpssw_exact_round(exact);
        analytic = recurrence_step(analytic);
        // Clamp denormal singlet fractions to the exact fixed point.
        if (analytic.x < 1e-300) analytic.x = 0.0;

        const RecurrenceCoords observed = state_to_coords(step.state);
        const double dev = std::max({std::abs(observed.x - analytic.x),
                                     std::abs(observed.y - analytic.y),
                                     std::abs(observed.z - analytic.z),
                                     std::abs(step.p_succ - 1.0)});
        if (dev > kOracleTol)
            throw ExperimentFailure(
                "run_divergence: exact round diverged from the analytic map by " +
                std::to_string(dev) + " at round " + std::to_string(m));

        exact = step.state;
        traj.rounds.push_back(RoundRecord{m, analytic,
                                          fidelity_to_pure(exact, phi_plus()), step.p_succ});
    }
    return traj;
}

}  // namespace qrsim
