#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "ainsim/channel.hpp"

namespace ainsim {

inline constexpr double kNewtonTol = 1e-10;
inline constexpr double kDiagMinTol = 1e-6;

// Per-layer amplify-and-forward gains, two per relay layer; the first gain
// of each layer is the normalization reference and conventionally 1.
struct GainAssignment {
    std::vector<std::array<cplx, 2>> layers;

    static GainAssignment unit(int layer_count);
};

struct NeutralizationResidual {
    cplx off12;       // effective coefficient of the D1 <- S2 path
    cplx off21;       // effective coefficient of the D2 <- S1 path
    double diag_min;  // smallest |diagonal| of the effective matrix

    double norm() const;
};

// End-to-end 2x2 map hop_H * diag(layer_{H-1}) * ... * diag(layer_1) * hop_1
// at one extension slot.
Eigen::Matrix2cd effective_matrix(const ChannelRealization& channel, const GainAssignment& gains,
                                  int slot = 0);

NeutralizationResidual neutralization_residual(const ChannelRealization& channel,
                                               const GainAssignment& gains, int slot = 0);

// Relative disagreement of the two gain ratios a scalar amplify-and-forward
// relay pair would need; zero means simultaneous neutralization is possible.
double two_hop_infeasibility(const ChannelRealization& channel, int slot = 0);

struct GainSolveReport {
    GainAssignment gains;
    std::vector<double> residual_history;
    bool converged = false;
    double residual = 0.0;
    double diag_min = 0.0;
    int iterations = 0;
    int restarts = 0;
};

// Damped Newton iteration on the two off-diagonal entries in the free gains
// (the second gain of each layer), with jittered restarts on stagnation.
GainSolveReport solve_gains(const ChannelRealization& channel, const GainAssignment& init,
                            int max_iters = 50, double tol = kNewtonTol,
                            std::uint64_t jitter_seed = 1);

struct ReducedChannel {
    ChannelRealization two_hop;
    // Forwarded relay noise of the folded layers, per destination and slot,
    // as a multiple of the base noise variance.
    Eigen::VectorXd extra_noise_d1;
    Eigen::VectorXd extra_noise_d2;
};

// Folds hops 2..H and the supplied gain layers 2..H-1 into one effective
// second hop, so the full alignment pipeline applies to H-hop networks.
ReducedChannel reduce_to_two_hops(const ChannelRealization& channel,
                                  const std::vector<std::array<cplx, 2>>& folded_gains);

}  // namespace ainsim
