#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ainsim/rational.hpp"
#include "ainsim/rng.hpp"

using namespace ainsim;

namespace {

Eigen::Matrix2d hop_real(const ChannelRealization& channel, int hop) {
    Eigen::Matrix2d m;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) m(r, c) = channel.at(hop, r, c, 0).real();
    }
    return m;
}

}  // namespace

TEST_CASE("monomial directions by hand arithmetic, M=2") {
    Eigen::Matrix2d f;
    f << 2.0, 3.0, 5.0, 7.0;
    Eigen::Matrix2d g;
    g << 1.0, 1.0, 1.0, 1.0;
    const auto dirs = monomial_directions(f, g, 2);
    CHECK(dirs.v1[0] == doctest::Approx(14.0));  // (F11 F22)^(M-1)
    CHECK(dirs.v1[1] == doctest::Approx(15.0));  // (F12 F21)
    CHECK(dirs.v2[0] == doctest::Approx(10.0));  // F11 F21
    // Alignment identities in exact integers.
    CHECK(f(0, 0) * dirs.v1[1] == doctest::Approx(f(0, 1) * dirs.v2[0]));  // 30
    CHECK(f(1, 0) * dirs.v1[0] == doctest::Approx(f(1, 1) * dirs.v2[0]));  // 70
}

TEST_CASE("all-ones channels flag rational degeneracy") {
    Eigen::Matrix2d ones = Eigen::Matrix2d::Ones();
    const auto dirs = monomial_directions(ones, ones, 3);
    CHECK(dirs.v1[0] == 1.0);
    CHECK(dirs.v1[1] == 1.0);
    CHECK(dirs.v1[2] == 1.0);
    // Dependence shows up as a zero minimum pairwise gap.
    double min_gap = 1e300;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            min_gap = std::min(min_gap, std::abs(dirs.v1[i] - dirs.v1[j]));
        }
    }
    CHECK(min_gap == 0.0);
}

TEST_CASE("monomials are pairwise distinct for generic channels") {
    int distinct = 0;
    const int trials = 1000;
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        const auto channel = sample_channel(seed, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
        const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 3);
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            for (int j = i + 1; j < 3 && ok; ++j) {
                ok = std::abs(dirs.v1[i] - dirs.v1[j]) > 1e-12;
            }
        }
        distinct += ok;
    }
    CHECK(distinct == trials);
}

TEST_CASE("alignment identities hold numerically across M") {
    for (int m : {2, 3, 4}) {
        for (std::uint64_t seed = 50; seed < 60; ++seed) {
            const auto channel =
                sample_channel(seed, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
            const Eigen::Matrix2d f = hop_real(channel, 0);
            const Eigen::Matrix2d g = hop_real(channel, 1);
            const auto dirs = monomial_directions(f, g, m);
            for (int i = 1; i <= m - 1; ++i) {
                const double lhs1 = f(0, 0) * dirs.v1[i];
                const double rhs1 = f(0, 1) * dirs.v2[i - 1];
                CHECK(std::abs(lhs1 - rhs1) <= 1e-12 * std::abs(lhs1));
                const double lhs2 = f(1, 0) * dirs.v1[i - 1];
                const double rhs2 = f(1, 1) * dirs.v2[i - 1];
                CHECK(std::abs(lhs2 - rhs2) <= 1e-12 * std::abs(lhs2));
                // Neutralization pairing with the folded sign.
                const double lhs3 = g(0, 0) * dirs.vr1[i];
                const double rhs3 = -g(0, 1) * dirs.vr2[i - 1];
                CHECK(std::abs(lhs3 - rhs3) <= 1e-12 * std::abs(lhs3));
                const double lhs4 = -g(1, 0) * dirs.vr1[i - 1];
                const double rhs4 = g(1, 1) * dirs.vr2[i - 1];
                CHECK(std::abs(lhs4 - rhs4) <= 1e-12 * std::abs(lhs4));
            }
        }
    }
}

TEST_CASE("constellation reach from direct exponent arithmetic") {
    Eigen::Matrix2d f;
    f << 2.0, 3.0, 5.0, 7.0;
    Eigen::Matrix2d g;
    g << 1.1, 0.9, 1.3, 0.7;
    const auto dirs = monomial_directions(f, g, 2);
    const auto config = build_config(2, 1.0, 0.1, 1e6, dirs);
    // q_max = floor(10^(6 * 0.9 / 4.2)) = floor(10^1.2857) = 19.
    CHECK(config.q_max == 19);
}

TEST_CASE("degenerate constellations are rejected") {
    Eigen::Matrix2d f;
    f << 2.0, 3.0, 5.0, 7.0;
    const auto dirs = monomial_directions(f, f, 2);
    CHECK_THROWS_AS(build_config(2, 1.0, 0.2, 0.5, dirs), config_error);
}

TEST_CASE("normalizations keep worst-case power within budget") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto channel = sample_channel(seed, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
        const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 2);
        const double power = 1e6;
        const auto config = build_config(2, 1.0, 0.2, power, dirs);
        // Worst case: every symbol at the box corner with aligned signs.
        const double worst_source =
            config.a_norm * config.q_max * dirs.v1.cwiseAbs().sum();
        CHECK(worst_source * worst_source <= power * (1.0 + 1e-12));
        const double worst_relay =
            config.b_norm * 2.0 * config.q_max * dirs.vr1.cwiseAbs().sum();
        CHECK(worst_relay * worst_relay <= power * (1.0 + 1e-12));
    }
}

TEST_CASE("rate bound evaluations") {
    CHECK(rate_lower_bound(0.0, 19) == doctest::Approx(std::log2(39.0) - 1.0));
    CHECK(rate_lower_bound(1.0, 19) == 0.0);
    CHECK(rate_lower_bound(0.5, 1) == 0.0);  // max(0, 0.5 log2(3) - 1)
    CHECK_THROWS_AS(rate_lower_bound(-0.1, 5), parameter_error);
}

TEST_CASE("noise-free trials are error-free end to end") {
    const auto channel = sample_channel(3, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
    const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 2);
    const auto config = build_config(2, 1.0, 0.2, 1e6, dirs);
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const auto outcome = run_rational_trial(channel, config, trial, 0.0);
        CHECK(outcome.relay_errors[0] == 0);
        CHECK(outcome.relay_errors[1] == 0);
        CHECK(outcome.dest_symbol_errors[0] == 0);
        CHECK(outcome.dest_symbol_errors[1] == 0);
    }
}

TEST_CASE("per-trial power stays within the constraint") {
    const auto channel = sample_channel(5, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
    const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 2);
    const double power = 1e6;
    const auto config = build_config(2, 1.0, 0.2, power, dirs);
    const auto batch = run_rational_batch(channel, config, 2000, 11, 1.0);
    for (double peak : batch.peak_power) {
        CHECK(peak <= power * (1.0 + 1e-12));
    }
}

TEST_CASE("min distances are positive for generic channels") {
    const auto channel = sample_channel(9, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
    const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 2);
    const auto config = build_config(2, 1.0, 0.2, 1e6, dirs);
    const auto outcome = run_rational_trial(channel, config, 1, 0.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(outcome.per_hop_min_distance[i] > 0.0);
    }
}

TEST_CASE("relay decision errors shrink from low to high power") {
    const auto channel = sample_channel(3, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
    const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 2);
    const long trials = 3000;
    const auto low = run_rational_batch(channel, build_config(2, 1.0, 0.2, 1e3, dirs), trials, 7);
    const auto high = run_rational_batch(channel, build_config(2, 1.0, 0.2, 1e6, dirs), trials, 7);
    CHECK(high.relay_ser[0] <= low.relay_ser[0]);
    CHECK(high.relay_ser[1] <= low.relay_ser[1]);
}

TEST_CASE("destination SER trends down across the power sweep") {
    const auto channel = sample_channel(3, 2, 1, ChannelModel::constant_real, {0.5, 2.0});
    const auto dirs = monomial_directions(hop_real(channel, 0), hop_real(channel, 1), 2);
    std::vector<double> sers;
    for (double power : {1e4, 1e6, 1e8, 1e10}) {
        const auto batch =
            run_rational_batch(channel, build_config(2, 1.0, 0.2, power, dirs), 2000, 13);
        sers.push_back(batch.dest_ser[0]);
    }
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < sers.size(); ++i) {
        if (sers[i + 1] > sers[i]) ++inversions;
    }
    CHECK(inversions <= 1);
    CHECK(sers.back() < sers.front());
}

TEST_CASE("wrong channel models are rejected") {
    const auto channel = sample_channel(3, 2, 1, ChannelModel::constant_complex, {0.5, 2.0});
    Eigen::Matrix2d f;
    f << 2.0, 3.0, 5.0, 7.0;
    const auto dirs = monomial_directions(f, f.transpose().eval(), 2);
    const auto config = build_config(2, 1.0, 0.2, 1e6, dirs);
    CHECK_THROWS_AS(run_rational_trial(channel, config, 1, 1.0), parameter_error);
}
