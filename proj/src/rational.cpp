#include "ainsim/rational.hpp"

#include <cmath>

#include "ainsim/relay.hpp"
#include "ainsim/rng.hpp"

namespace ainsim {

namespace {

double int_pow(double base, int exponent) {
    double result = 1.0;
    for (int i = 0; i < exponent; ++i) result *= base;
    return result;
}

void require_real_nonzero(const Eigen::Matrix2d& hop, const char* which) {
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            if (hop(r, c) == 0.0) {
                throw degenerate_input_error(std::string("zero coefficient in ") + which);
            }
        }
    }
}

}  // namespace

MonomialDirections monomial_directions(const Eigen::Matrix2d& first_hop,
                                       const Eigen::Matrix2d& second_hop, int extension) {
    if (extension < 1) throw parameter_error("extension must be >= 1");
    require_real_nonzero(first_hop, "first hop");
    require_real_nonzero(second_hop, "second hop");
    const int m = extension;
    const double f11 = first_hop(0, 0), f12 = first_hop(0, 1);
    const double f21 = first_hop(1, 0), f22 = first_hop(1, 1);
    const double g11 = second_hop(0, 0), g12 = second_hop(0, 1);
    const double g21 = second_hop(1, 0), g22 = second_hop(1, 1);

    MonomialDirections dirs;
    dirs.v1.resize(m);
    dirs.v2.resize(m - 1);
    dirs.vr1.resize(m);
    dirs.vr2.resize(m - 1);

    for (int i = 0; i <= m - 1; ++i) {
        dirs.v1[i] = int_pow(f12 * f21, i) * int_pow(f11 * f22, m - i - 1);
        dirs.vr1[i] = int_pow(g12 * g21, i) * int_pow(g11 * g22, m - i - 1);
    }
    for (int i = 1; i <= m - 1; ++i) {
        dirs.v2[i - 1] = int_pow(f11, m - i) * int_pow(f12, i - 1) * int_pow(f21, i) *
                         int_pow(f22, m - 1 - i);
        dirs.vr2[i - 1] = -int_pow(g11, m - i) * int_pow(g12, i - 1) * int_pow(g21, i) *
                          int_pow(g22, m - 1 - i);
    }
    return dirs;
}

RationalConfig build_config(int extension, double gamma, double epsilon, double power,
                            const MonomialDirections& directions) {
    if (extension < 1) throw parameter_error("extension must be >= 1");
    if (gamma <= 0.0) throw parameter_error("gamma must be positive");
    if (epsilon <= 0.0 || epsilon >= 1.0) throw parameter_error("epsilon must lie in (0, 1)");
    if (power <= 0.0) throw parameter_error("power must be positive");

    RationalConfig config;
    config.m = extension;
    config.gamma = gamma;
    config.epsilon = epsilon;
    config.p = power;
    config.directions = directions;

    const double reach_exponent = (1.0 - epsilon) / (2.0 * (extension + epsilon));
    config.q_max = static_cast<long>(std::floor(gamma * std::pow(power, reach_exponent)));
    if (config.q_max < 1) {
        throw config_error("constellation degenerates: increase P or reduce M");
    }

    // Worst-case-safe normalizations: |X| <= norm * q_max * sum|v| stays
    // within sqrt(P) for every symbol draw, not just in expectation.
    const double xi1 = directions.v1.cwiseAbs().sum();
    const double xi2 = extension > 1 ? directions.v2.cwiseAbs().sum() : xi1;
    config.xi_source = std::min(1.0 / xi1, 1.0 / xi2);
    const double xr1 = directions.vr1.cwiseAbs().sum();
    const double xr2 = extension > 1 ? directions.vr2.cwiseAbs().sum() : xr1;
    config.xi_relay = std::min(1.0 / xr1, 1.0 / xr2);

    const double norm_exponent = (extension - 1.0 + 2.0 * epsilon) / (2.0 * (extension + epsilon));
    config.a_norm = config.xi_source / gamma * std::pow(power, norm_exponent);
    config.b_norm = config.xi_relay / (2.0 * gamma) * std::pow(power, norm_exponent);
    return config;
}

double rate_lower_bound(double symbol_error_rate, long q_max) {
    if (symbol_error_rate < 0.0 || symbol_error_rate > 1.0) {
        throw parameter_error("symbol error rate must lie in [0, 1]");
    }
    const double bits = std::log2(2.0 * static_cast<double>(q_max) + 1.0);
    return std::max(0.0, (1.0 - symbol_error_rate) * bits - 1.0);
}

namespace {

std::vector<double> scaled_directions(double norm, double coefficient,
                                      const Eigen::VectorXd& dirs) {
    std::vector<double> scaled(static_cast<std::size_t>(dirs.size()));
    for (Eigen::Index k = 0; k < dirs.size(); ++k) scaled[k] = norm * coefficient * dirs[k];
    return scaled;
}

// Decision directions at D2: the M-1 kept difference dimensions first, the
// discarded sum dimension last.
std::vector<double> d2_directions(const RationalConfig& config, double g21, double g22) {
    std::vector<double> dirs;
    dirs.reserve(static_cast<std::size_t>(config.m));
    for (Eigen::Index k = 0; k + 1 < config.m; ++k) {
        dirs.push_back(config.b_norm * g22 * config.directions.vr2[k]);
    }
    dirs.push_back(config.b_norm * g21 * config.directions.vr1[config.m - 1]);
    return dirs;
}

}  // namespace

namespace {

TrialOutcome trial_core(const ChannelRealization& channel, const RationalConfig& config,
                        std::uint64_t seed, double noise_std, bool with_min_distance) {
    if (channel.model() != ChannelModel::constant_real) {
        throw parameter_error("the rational scheme runs on constant real channels");
    }
    if (channel.hops() != 2) throw parameter_error("the rational scheme expects 2 hops");
    const int m = config.m;
    const long q = config.q_max;

    const double f11 = channel.at(0, 0, 0, 0).real(), f12 = channel.at(0, 0, 1, 0).real();
    const double f21 = channel.at(0, 1, 0, 0).real(), f22 = channel.at(0, 1, 1, 0).real();
    const double g11 = channel.at(1, 0, 0, 0).real(), g12 = channel.at(1, 0, 1, 0).real();
    const double g21 = channel.at(1, 1, 0, 0).real(), g22 = channel.at(1, 1, 1, 0).real();

    Xoshiro256pp rng(seed);
    std::vector<long> x1(static_cast<std::size_t>(m));
    std::vector<long> x2(static_cast<std::size_t>(m - 1));
    for (auto& v : x1) v = rng.uniform_int(-q, q);
    for (auto& v : x2) v = rng.uniform_int(-q, q);

    const auto& dirs = config.directions;
    double tx1 = 0.0, tx2 = 0.0;
    for (int k = 0; k < m; ++k) tx1 += dirs.v1[k] * static_cast<double>(x1[k]);
    for (int k = 0; k + 1 < m; ++k) tx2 += dirs.v2[k] * static_cast<double>(x2[k]);
    tx1 *= config.a_norm;
    tx2 *= config.a_norm;

    const double y_r1 = f11 * tx1 + f12 * tx2 + noise_std * rng.normal();
    const double y_r2 = f21 * tx1 + f22 * tx2 + noise_std * rng.normal();

    // Aligned sums carried in each rational dimension.
    std::vector<long> sums_r1(static_cast<std::size_t>(m));
    std::vector<long> sums_r2(static_cast<std::size_t>(m));
    sums_r1[0] = x1[0];
    for (int i = 1; i < m; ++i) sums_r1[i] = x1[i] + x2[i - 1];
    for (int i = 0; i + 1 < m; ++i) sums_r2[i] = x1[i] + x2[i];
    sums_r2[m - 1] = x1[m - 1];

    const auto dirs_r1 = scaled_directions(config.a_norm, f11, dirs.v1);
    const auto dirs_r2 = scaled_directions(config.a_norm, f21, dirs.v1);
    const auto decided_r1 = hard_decide(y_r1, dirs_r1, 2 * q);
    const auto decided_r2 = hard_decide(y_r2, dirs_r2, 2 * q);

    TrialOutcome outcome;
    for (int k = 0; k < m; ++k) {
        outcome.relay_errors[0] += decided_r1[k] != sums_r1[k];
        outcome.relay_errors[1] += decided_r2[k] != sums_r2[k];
    }

    double fwd1 = 0.0, fwd2 = 0.0;
    for (int k = 0; k < m; ++k) fwd1 += dirs.vr1[k] * static_cast<double>(decided_r1[k]);
    for (int k = 0; k + 1 < m; ++k) fwd2 += dirs.vr2[k] * static_cast<double>(decided_r2[k]);
    fwd1 *= config.b_norm;
    fwd2 *= config.b_norm;

    const double y1 = g11 * fwd1 + g12 * fwd2 + noise_std * rng.normal();
    const double y2 = g21 * fwd1 + g22 * fwd2 + noise_std * rng.normal();

    const auto dirs_d1 = scaled_directions(config.b_norm, g11, dirs.vr1);
    const auto decided_d1 = hard_decide(y1, dirs_d1, 4 * q);
    long chain = 0;
    for (int k = 0; k < m; ++k) {
        chain += decided_d1[k];
        outcome.dest_symbol_errors[0] += chain != x1[k];
    }

    if (m > 1) {
        const auto decided_d2 = hard_decide(y2, d2_directions(config, g21, g22), 4 * q);
        chain = 0;
        for (int k = 0; k + 1 < m; ++k) {
            chain += decided_d2[k];
            outcome.dest_symbol_errors[1] += chain != x2[k];
        }
    }

    if (with_min_distance) {
        outcome.per_hop_min_distance = {
            min_nonzero_combination(dirs_r1, 4 * q), min_nonzero_combination(dirs_r2, 4 * q),
            min_nonzero_combination(dirs_d1, 8 * q),
            m > 1 ? min_nonzero_combination(d2_directions(config, g21, g22), 8 * q) : 0.0};
    }
    outcome.peak_power = {tx1 * tx1, tx2 * tx2, fwd1 * fwd1, fwd2 * fwd2};
    return outcome;
}

}  // namespace

TrialOutcome run_rational_trial(const ChannelRealization& channel, const RationalConfig& config,
                                std::uint64_t seed, double noise_std) {
    return trial_core(channel, config, seed, noise_std, /*with_min_distance=*/true);
}

RationalBatchResult run_rational_batch(const ChannelRealization& channel,
                                       const RationalConfig& config, long trials,
                                       std::uint64_t seed, double noise_std) {
    RationalBatchResult result;
    result.trials = trials;
    std::array<long, 2> relay_errors{};
    std::array<long, 2> dest_errors{};
    for (long trial = 0; trial < trials; ++trial) {
        const auto outcome =
            trial_core(channel, config, derive_stream_seed(seed, static_cast<std::uint64_t>(trial)),
                       noise_std, /*with_min_distance=*/false);
        for (int i = 0; i < 2; ++i) {
            relay_errors[i] += outcome.relay_errors[i];
            dest_errors[i] += outcome.dest_symbol_errors[i];
        }
        for (int i = 0; i < 4; ++i) {
            result.peak_power[i] = std::max(result.peak_power[i], outcome.peak_power[i]);
        }
    }
    result.min_distance =
        trial_core(channel, config, seed, 0.0, /*with_min_distance=*/true).per_hop_min_distance;
    const double n1 = static_cast<double>(trials * config.m);
    const double n2 = static_cast<double>(trials * std::max(1, config.m - 1));
    result.relay_ser = {relay_errors[0] / n1, relay_errors[1] / n1};
    result.dest_ser = {dest_errors[0] / n1, config.m > 1 ? dest_errors[1] / n2 : 0.0};
    result.rate_lower = {rate_lower_bound(result.dest_ser[0], config.q_max),
                         rate_lower_bound(result.dest_ser[1], config.q_max)};
    return result;
}

}  // namespace ainsim
