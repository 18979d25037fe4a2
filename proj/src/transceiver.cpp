#include "ainsim/transceiver.hpp"

#include <cmath>
#include <numeric>

namespace ainsim {

namespace {

Eigen::VectorXcd weighted_sum(const std::vector<Eigen::VectorXcd>& vectors,
                              const Eigen::VectorXcd& weights, Eigen::Index dim) {
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(dim);
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        sum += vectors[k] * weights[static_cast<Eigen::Index>(k)];
    }
    return sum;
}

std::vector<Eigen::VectorXcd> scaled_columns(const Eigen::MatrixXcd& channel,
                                             const std::vector<Eigen::VectorXcd>& vectors) {
    std::vector<Eigen::VectorXcd> columns;
    columns.reserve(vectors.size());
    for (const auto& v : vectors) columns.push_back(channel * v);
    return columns;
}

Eigen::MatrixXcd stacked_inverse(const std::vector<Eigen::VectorXcd>& columns,
                                 const char* where) {
    const auto dim = columns.front().size();
    Eigen::MatrixXcd stacked(dim, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        stacked.col(static_cast<Eigen::Index>(k)) = columns[k];
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(stacked);
    if (!lu.isInvertible()) {
        throw singular_channel_error(std::string("dependent receive directions at ") + where);
    }
    return lu.inverse();
}

}  // namespace

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> encode(const StreamFrame& frame,
                                                     const BeamformerSet& beamformers) {
    const int m = frame.extension;
    if (static_cast<int>(beamformers.source1.size()) != m ||
        frame.x1.size() != static_cast<Eigen::Index>(m) ||
        frame.alloc1.size() != static_cast<Eigen::Index>(m) ||
        frame.x2.size() != static_cast<Eigen::Index>(beamformers.source2.size()) ||
        frame.alloc2.size() != frame.x2.size()) {
        throw parameter_error("frame and beamformer dimensions disagree");
    }
    const Eigen::Index dim = beamformers.source1.front().size();
    Eigen::VectorXcd x1 = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd x2 = Eigen::VectorXcd::Zero(dim);
    for (int k = 0; k < m; ++k) {
        const double amp = std::sqrt(frame.alloc1[k] * m) / beamformers.source1[k].norm();
        x1 += beamformers.source1[k] * (amp * frame.x1[k]);
    }
    for (int k = 0; k + 1 < m; ++k) {
        const double amp = std::sqrt(frame.alloc2[k] * m) / beamformers.source2[k].norm();
        x2 += beamformers.source2[k] * (amp * frame.x2[k]);
    }
    return {std::move(x1), std::move(x2)};
}

namespace {

// Shared chain decoder: divides by the relay scale, accumulates previous
// estimates, then rescales to the unit-symbol domain.
DecodeResult chain_decode(const Eigen::MatrixXcd& projection, const Eigen::VectorXcd& received,
                          Eigen::Index keep, double relay_scale,
                          const Eigen::VectorXd& amplitudes) {
    DecodeResult result;
    const Eigen::VectorXcd projected = projection * received;
    result.estimates.resize(keep);
    cplx running = 0.0;
    for (Eigen::Index k = 0; k < keep; ++k) {
        running += projected[k] / relay_scale;
        result.estimates[k] = running / amplitudes[k];
    }
    result.decode_order.resize(static_cast<std::size_t>(keep));
    std::iota(result.decode_order.begin(), result.decode_order.end(), 0);
    return result;
}

}  // namespace

DecodeResult decode_d1(const Eigen::VectorXcd& y1, const DiagonalExtension& g11,
                       const std::vector<Eigen::VectorXcd>& relay1_vectors,
                       const ScaleInfo& scales) {
    const auto columns = scaled_columns(g11.dense(), relay1_vectors);
    Isolator projector(columns);  // enforces the conditioning cap
    const auto m = static_cast<Eigen::Index>(relay1_vectors.size());
    Eigen::MatrixXcd projection(m, m);
    {
        Eigen::MatrixXcd stacked(m, m);
        for (Eigen::Index k = 0; k < m; ++k) stacked.col(k) = columns[k];
        projection = stacked.fullPivLu().inverse();
    }
    return chain_decode(projection, y1, m, scales.relay_scale, scales.source1_amplitudes);
}

DecodeResult decode_d2(const Eigen::VectorXcd& y2, const DiagonalExtension& g21,
                       const DiagonalExtension& g22,
                       const std::vector<Eigen::VectorXcd>& relay1_vectors,
                       const std::vector<Eigen::VectorXcd>& relay2_vectors,
                       const ScaleInfo& scales) {
    const auto m = static_cast<Eigen::Index>(relay1_vectors.size());
    if (m == 1) return {};
    std::vector<Eigen::VectorXcd> columns = scaled_columns(g22.dense(), relay2_vectors);
    columns.push_back(g21.dense() * relay1_vectors.back());
    Isolator projector(columns);
    Eigen::MatrixXcd stacked(m, m);
    for (Eigen::Index k = 0; k < m; ++k) stacked.col(k) = columns[static_cast<std::size_t>(k)];
    const Eigen::MatrixXcd projection = stacked.fullPivLu().inverse();
    return chain_decode(projection, y2, m - 1, scales.relay_scale, scales.source2_amplitudes);
}

TwoHopMatrices TwoHopMatrices::from_channel(const ChannelRealization& channel) {
    if (channel.hops() != 2) throw parameter_error("pipeline expects a 2-hop channel");
    TwoHopMatrices mats;
    const int m = channel.slots();
    mats.f11 = extend(channel, 0, 0, 0).dense();
    mats.f12 = extend(channel, 0, 0, 1).dense();
    mats.f21 = extend(channel, 0, 1, 0).dense();
    mats.f22 = extend(channel, 0, 1, 1).dense();
    mats.g11 = extend(channel, 1, 0, 0).dense();
    mats.g12 = extend(channel, 1, 0, 1).dense();
    mats.g21 = extend(channel, 1, 1, 0).dense();
    mats.g22 = extend(channel, 1, 1, 1).dense();
    mats.block_dim = m;
    mats.uses_per_block = m;
    mats.real_field = false;
    mats.extra_noise_d1 = Eigen::VectorXd::Zero(m);
    mats.extra_noise_d2 = Eigen::VectorXd::Zero(m);
    return mats;
}

TwoHopMatrices TwoHopMatrices::from_real_rotation(const Eigen::Matrix2cd& first_hop,
                                                  const Eigen::Matrix2cd& second_hop) {
    auto embed = [](cplx value) -> Eigen::MatrixXcd {
        return to_real_rotation(value).expand().cast<cplx>();
    };
    TwoHopMatrices mats;
    mats.f11 = embed(first_hop(0, 0));
    mats.f12 = embed(first_hop(0, 1));
    mats.f21 = embed(first_hop(1, 0));
    mats.f22 = embed(first_hop(1, 1));
    mats.g11 = embed(second_hop(0, 0));
    mats.g12 = embed(second_hop(0, 1));
    mats.g21 = embed(second_hop(1, 0));
    mats.g22 = embed(second_hop(1, 1));
    mats.block_dim = 2;
    mats.uses_per_block = 1;  // (Re, Im) of a single complex use
    mats.real_field = true;
    mats.extra_noise_d1 = Eigen::VectorXd::Zero(2);
    mats.extra_noise_d2 = Eigen::VectorXd::Zero(2);
    return mats;
}

namespace {

BeamformerSet build_for(const TwoHopMatrices& matrices) {
    auto [v1, v2] =
        first_hop_beamformers(matrices.f11, matrices.f12, matrices.f21, matrices.f22);
    auto [r1, r2] =
        second_hop_beamformers(matrices.g11, matrices.g12, matrices.g21, matrices.g22);
    return BeamformerSet{std::move(v1), std::move(v2), std::move(r1), std::move(r2)};
}

}  // namespace

AlignedPipeline::AlignedPipeline(TwoHopMatrices matrices, double power, double noise_var)
    : AlignedPipeline(matrices, build_for(matrices), power, noise_var) {}

AlignedPipeline::AlignedPipeline(TwoHopMatrices matrices, BeamformerSet beamformers, double power,
                                 double noise_var)
    : matrices_(std::move(matrices)),
      power_(power),
      noise_var_(noise_var),
      block_dim_(matrices_.block_dim),
      beamformers_(std::move(beamformers)),
      relay1_isolator_(scaled_columns(matrices_.f11, beamformers_.source1)),
      relay2_isolator_(scaled_columns(matrices_.f21, beamformers_.source1)),
      d1_projection_(stacked_inverse(scaled_columns(matrices_.g11, beamformers_.relay1), "D1")),
      d2_projection_([&] {
          auto columns = scaled_columns(matrices_.g22, beamformers_.relay2);
          columns.push_back(matrices_.g21 * beamformers_.relay1.back());
          return stacked_inverse(columns, "D2");
      }()) {
    if (power <= 0.0) throw parameter_error("power must be positive");
    const int m = block_dim_;
    const double block_budget = power_ * matrices_.uses_per_block;  // E||X||^2 per block

    scales_.source1_amplitudes.resize(m);
    scales_.source2_amplitudes.resize(m - 1);
    const double alloc1 = block_budget / m;
    for (int k = 0; k < m; ++k) {
        scales_.source1_amplitudes[k] = std::sqrt(alloc1) / beamformers_.source1[k].norm();
    }
    const double alloc2 = m > 1 ? block_budget / (m - 1) : 0.0;
    for (int k = 0; k + 1 < m; ++k) {
        scales_.source2_amplitudes[k] = std::sqrt(alloc2) / beamformers_.source2[k].norm();
    }

    // Second moments of the isolated relay streams: aligned symbol sums plus
    // inverted receive noise.
    const double relay_noise = matrices_.real_field ? noise_var_ / 2.0 : noise_var_;
    Eigen::VectorXd m2_r1(m);
    for (int k = 0; k < m; ++k) {
        double signal = scales_.source1_amplitudes[k] * scales_.source1_amplitudes[k];
        if (k >= 1) {
            signal += scales_.source2_amplitudes[k - 1] * scales_.source2_amplitudes[k - 1];
        }
        const double gain = relay1_isolator_.noise_gains()[k];
        m2_r1[k] = signal + relay_noise * gain * gain;
    }
    Eigen::VectorXd m2_r2(m - 1);
    for (int k = 0; k + 1 < m; ++k) {
        const double a1 = scales_.source1_amplitudes[k];
        const double a2 = scales_.source2_amplitudes[k];
        const double gain = relay2_isolator_.noise_gains()[k];
        m2_r2[k] = a1 * a1 + a2 * a2 + relay_noise * gain * gain;
    }

    // Both relays must share one transmit scale or the over-the-air
    // cancellation breaks; the smaller scale keeps both within the budget.
    const double per_slot_budget = block_budget / m;
    relay_scale_ = forward_power_scale(beamformers_.relay1, per_slot_budget, m2_r1);
    if (m > 1) {
        relay_scale_ = std::min(
            relay_scale_, forward_power_scale(beamformers_.relay2, per_slot_budget, m2_r2));
    }
    scales_.relay_scale = relay_scale_;
}

AlignedPipeline AlignedPipeline::from_channel(const ChannelRealization& channel, double power,
                                              double noise_var) {
    return AlignedPipeline(TwoHopMatrices::from_channel(channel), power, noise_var);
}

void AlignedPipeline::run_frame(Xoshiro256pp& rng, Eigen::VectorXcd& err1,
                                Eigen::VectorXcd& err2, bool mute_source2) const {
    const int m = block_dim_;
    const bool real = matrices_.real_field;
    auto draw_symbol = [&]() -> cplx {
        return real ? cplx(rng.normal(), 0.0) : rng.complex_normal();
    };
    const double relay_noise_std = std::sqrt(real ? noise_var_ / 2.0 : noise_var_);
    auto draw_noise = [&](double std_dev) -> cplx {
        return real ? cplx(std_dev * rng.normal(), 0.0)
                    : cplx(std_dev) * rng.complex_normal();
    };

    Eigen::VectorXcd s1(m), s2(m - 1);
    for (int k = 0; k < m; ++k) s1[k] = draw_symbol();
    for (int k = 0; k + 1 < m; ++k) {
        const cplx drawn = draw_symbol();  // always consume the stream
        s2[k] = mute_source2 ? cplx{} : drawn;
    }

    Eigen::VectorXcd x1 = Eigen::VectorXcd::Zero(m), x2 = Eigen::VectorXcd::Zero(m);
    for (int k = 0; k < m; ++k) {
        x1 += beamformers_.source1[k] * (scales_.source1_amplitudes[k] * s1[k]);
    }
    for (int k = 0; k + 1 < m; ++k) {
        x2 += beamformers_.source2[k] * (scales_.source2_amplitudes[k] * s2[k]);
    }

    Eigen::VectorXcd y_r1 = matrices_.f11 * x1 + matrices_.f12 * x2;
    Eigen::VectorXcd y_r2 = matrices_.f21 * x1 + matrices_.f22 * x2;
    for (int slot = 0; slot < m; ++slot) y_r1[slot] += draw_noise(relay_noise_std);
    for (int slot = 0; slot < m; ++slot) y_r2[slot] += draw_noise(relay_noise_std);

    const Eigen::VectorXcd iso1 = relay1_isolator_.isolate(y_r1);
    const Eigen::VectorXcd iso2 = relay2_isolator_.isolate(y_r2);

    Eigen::VectorXcd x_relay1 = relay_scale_ * weighted_sum(beamformers_.relay1, iso1, m);
    Eigen::VectorXcd x_relay2 =
        m > 1 ? (relay_scale_ * weighted_sum(beamformers_.relay2, iso2.head(m - 1), m)).eval()
              : Eigen::VectorXcd::Zero(m).eval();

    Eigen::VectorXcd y1 = matrices_.g11 * x_relay1 + matrices_.g12 * x_relay2;
    Eigen::VectorXcd y2 = matrices_.g21 * x_relay1 + matrices_.g22 * x_relay2;
    for (int slot = 0; slot < m; ++slot) {
        const double base = real ? noise_var_ / 2.0 : noise_var_;
        y1[slot] += draw_noise(std::sqrt(base * (1.0 + matrices_.extra_noise_d1[slot])));
        y2[slot] += draw_noise(std::sqrt(base * (1.0 + matrices_.extra_noise_d2[slot])));
    }

    const Eigen::VectorXcd d1 = d1_projection_ * y1;
    err1.resize(m);
    cplx running = 0.0;
    for (int k = 0; k < m; ++k) {
        running += d1[k] / relay_scale_;
        err1[k] = running / scales_.source1_amplitudes[k] - s1[k];
    }

    err2.resize(m - 1);
    if (m > 1) {
        const Eigen::VectorXcd d2 = d2_projection_ * y2;
        running = 0.0;
        for (int k = 0; k + 1 < m; ++k) {
            running += d2[k] / relay_scale_;
            err2[k] = running / scales_.source2_amplitudes[k] - s2[k];
        }
    }
}

MeasuredLink AlignedPipeline::measure(long target_symbols, std::uint64_t seed,
                                      bool mute_source2) const {
    const int m = block_dim_;
    const long frames = std::max<long>(1, (target_symbols + stream_count() - 1) / stream_count());
    Eigen::VectorXd err1_power = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd err2_power = Eigen::VectorXd::Zero(std::max(0, m - 1));
    Eigen::VectorXcd err1, err2;
    for (long frame = 0; frame < frames; ++frame) {
        Xoshiro256pp rng(derive_stream_seed(seed, static_cast<std::uint64_t>(frame)));
        run_frame(rng, err1, err2, mute_source2);
        err1_power += err1.cwiseAbs2();
        err2_power += err2.cwiseAbs2();
    }
    MeasuredLink link;
    link.power = power_;
    link.frames = frames;
    link.sinr1 = (static_cast<double>(frames) * Eigen::VectorXd::Ones(m).array() /
                  err1_power.array().max(1e-300))
                     .matrix();
    link.sinr2 = m > 1 ? ((static_cast<double>(frames) *
                           Eigen::VectorXd::Ones(m - 1).array()) /
                          err2_power.array().max(1e-300))
                             .matrix()
                       : Eigen::VectorXd();
    return link;
}

Eigen::VectorXcd AlignedPipeline::propagate_noiseless(const Eigen::VectorXcd& x1_symbols,
                                                      const Eigen::VectorXcd& x2_symbols,
                                                      int destination) const {
    const int m = block_dim_;
    Eigen::VectorXcd x1 = weighted_sum(beamformers_.source1, x1_symbols, m);
    Eigen::VectorXcd x2 = m > 1 ? weighted_sum(beamformers_.source2, x2_symbols, m).eval()
                                : Eigen::VectorXcd::Zero(m).eval();
    const Eigen::VectorXcd iso1 = relay1_isolator_.isolate(matrices_.f11 * x1 + matrices_.f12 * x2);
    const Eigen::VectorXcd iso2 = relay2_isolator_.isolate(matrices_.f21 * x1 + matrices_.f22 * x2);
    const Eigen::VectorXcd x_relay1 = relay_scale_ * weighted_sum(beamformers_.relay1, iso1, m);
    const Eigen::VectorXcd x_relay2 =
        m > 1 ? (relay_scale_ * weighted_sum(beamformers_.relay2, iso2.head(m - 1), m)).eval()
              : Eigen::VectorXcd::Zero(m).eval();
    if (destination == 0) {
        return (d1_projection_ * (matrices_.g11 * x_relay1 + matrices_.g12 * x_relay2)) /
               relay_scale_;
    }
    return (d2_projection_ * (matrices_.g21 * x_relay1 + matrices_.g22 * x_relay2)) /
           relay_scale_;
}

EndToEndProbe AlignedPipeline::probe() const {
    const int m = block_dim_;
    const int streams = stream_count();
    EndToEndProbe result;
    result.d1_map.resize(m, streams);
    result.d2_map.resize(m - 1, streams);
    for (int j = 0; j < streams; ++j) {
        Eigen::VectorXcd x1 = Eigen::VectorXcd::Zero(m);
        Eigen::VectorXcd x2 = Eigen::VectorXcd::Zero(std::max(0, m - 1));
        if (j < m) {
            x1[j] = 1.0;
        } else {
            x2[j - m] = 1.0;
        }
        result.d1_map.col(j) = propagate_noiseless(x1, x2, 0);
        if (m > 1) result.d2_map.col(j) = propagate_noiseless(x1, x2, 1).head(m - 1);
    }
    result.d1_desired = result.d1_map.leftCols(m);
    result.d1_cross = result.d1_map.rightCols(streams - m);
    if (m > 1) {
        result.d2_desired = result.d2_map.rightCols(streams - m);
        result.d2_cross = result.d2_map.leftCols(m);
    }

    double leakage = 0.0;
    for (int r = 0; r < m; ++r) {
        const double scale = result.d1_desired.row(r).cwiseAbs().maxCoeff();
        if (streams > m) {
            leakage = std::max(leakage, result.d1_cross.row(r).cwiseAbs().maxCoeff() / scale);
        }
    }
    for (int r = 0; r + 1 < m; ++r) {
        const double scale = result.d2_desired.row(r).cwiseAbs().maxCoeff();
        leakage = std::max(leakage, result.d2_cross.row(r).cwiseAbs().maxCoeff() / scale);
    }
    result.leakage = leakage;
    return result;
}

TdmaRates tdma_baseline(const ChannelRealization& channel, double power, double noise_var) {
    if (channel.hops() != 2) throw parameter_error("TDMA baseline expects a 2-hop channel");
    const Eigen::Matrix2cd f = channel.hop_matrix(0, 0);
    const Eigen::Matrix2cd g = channel.hop_matrix(1, 0);

    // Each phase: the active source transmits at full power, both relays
    // amplify-and-forward at full power, the destination combines.
    TdmaRates rates;
    {
        cplx amp = 0.0;
        double forwarded = 0.0;
        for (int relay = 0; relay < 2; ++relay) {
            const cplx into_relay = f(relay, 0);
            const double beta = std::sqrt(power / (std::norm(into_relay) * power + noise_var));
            amp += g(0, relay) * beta * into_relay;
            forwarded += std::norm(g(0, relay)) * beta * beta * noise_var;
        }
        rates.sinr1 = power * std::norm(amp) / (noise_var + forwarded);
    }
    {
        cplx amp = 0.0;
        double forwarded = 0.0;
        for (int relay = 0; relay < 2; ++relay) {
            const cplx into_relay = f(relay, 1);
            const double beta = std::sqrt(power / (std::norm(into_relay) * power + noise_var));
            amp += g(1, relay) * beta * into_relay;
            forwarded += std::norm(g(1, relay)) * beta * beta * noise_var;
        }
        rates.sinr2 = power * std::norm(amp) / (noise_var + forwarded);
    }
    rates.sum_rate = 0.5 * (std::log2(1.0 + rates.sinr1) + std::log2(1.0 + rates.sinr2));
    return rates;
}

}  // namespace ainsim
