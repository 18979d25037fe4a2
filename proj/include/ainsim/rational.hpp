#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "ainsim/channel.hpp"

namespace ainsim {

// Scalar direction coefficients for the constant real channel: distinct
// monomials in the channel entries, rationally independent almost surely.
struct MonomialDirections {
    Eigen::VectorXd v1;   // M source-1 coefficients
    Eigen::VectorXd v2;   // M-1 source-2 coefficients
    Eigen::VectorXd vr1;  // M relay-1 coefficients
    Eigen::VectorXd vr2;  // M-1 relay-2 coefficients (sign folded in)
};

MonomialDirections monomial_directions(const Eigen::Matrix2d& first_hop,
                                       const Eigen::Matrix2d& second_hop, int extension);

struct RationalConfig {
    int m = 0;
    double gamma = 1.0;
    double epsilon = 0.2;
    double p = 0.0;
    long q_max = 0;       // constellation reach: integers in [-q_max, q_max]
    double a_norm = 0.0;  // source normalization
    double b_norm = 0.0;  // relay normalization
    double xi_source = 0.0;
    double xi_relay = 0.0;
    MonomialDirections directions;
};

// Derives the constellation bound and the worst-case-safe source/relay
// normalizations for the given power.
RationalConfig build_config(int extension, double gamma, double epsilon, double power,
                            const MonomialDirections& directions);

struct TrialOutcome {
    std::array<long, 2> relay_errors{};      // wrong coordinates at R1, R2
    std::array<long, 2> dest_symbol_errors{};  // wrong symbols at D1, D2 after the chain
    std::array<double, 4> per_hop_min_distance{};  // R1, R2, D1, D2
    std::array<double, 4> peak_power{};            // S1, S2, R1, R2 within the trial
};

// One end-to-end channel use: uniform constellation draws, hard decisions at
// the relays, sign-paired forwarding, hard decisions and cumulative-sum
// chains at the destinations.
TrialOutcome run_rational_trial(const ChannelRealization& channel, const RationalConfig& config,
                                std::uint64_t seed, double noise_std = 1.0);

struct RationalBatchResult {
    long trials = 0;
    std::array<double, 2> relay_ser{};
    std::array<double, 2> dest_ser{};
    std::array<double, 4> min_distance{};
    std::array<double, 4> peak_power{};
    std::array<double, 2> rate_lower{};  // per-stream Fano bound at D1, D2
};

RationalBatchResult run_rational_batch(const ChannelRealization& channel,
                                       const RationalConfig& config, long trials,
                                       std::uint64_t seed, double noise_std = 1.0);

// Fano-type per-stream rate bound: (1 - SER) * log2(2 q_max + 1) - 1, floored
// at zero.
double rate_lower_bound(double symbol_error_rate, long q_max);

}  // namespace ainsim
