#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ainsim/beamforming.hpp"
#include "ainsim/channel.hpp"
#include "ainsim/relay.hpp"
#include "ainsim/rng.hpp"

namespace ainsim {

// Unit-power symbol streams for one block, with per-stream power allocation
// (each source's allocation sums to its power budget).
struct StreamFrame {
    int extension = 0;
    Eigen::VectorXcd x1;      // M symbols, unit power before allocation
    Eigen::VectorXcd x2;      // M-1 symbols
    Eigen::VectorXd alloc1;   // per-stream transmit power, sums to <= P
    Eigen::VectorXd alloc2;
};

struct DecodeResult {
    Eigen::VectorXcd estimates;               // unit-symbol domain
    Eigen::VectorXd stream_sinr;              // filled by aggregated measurement
    double residual_interference_ratio = 0.0;
    std::vector<int> decode_order;
};

// Scaling knowledge a destination needs: the common relay transmit scale and
// the per-stream source amplitudes (power allocation folded into the symbol).
struct ScaleInfo {
    double relay_scale = 1.0;
    Eigen::VectorXd source1_amplitudes;
    Eigen::VectorXd source2_amplitudes;
};

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> encode(const StreamFrame& frame,
                                                     const BeamformerSet& beamformers);

DecodeResult decode_d1(const Eigen::VectorXcd& y1, const DiagonalExtension& g11,
                       const std::vector<Eigen::VectorXcd>& relay1_vectors,
                       const ScaleInfo& scales);

DecodeResult decode_d2(const Eigen::VectorXcd& y2, const DiagonalExtension& g21,
                       const DiagonalExtension& g22,
                       const std::vector<Eigen::VectorXcd>& relay1_vectors,
                       const std::vector<Eigen::VectorXcd>& relay2_vectors,
                       const ScaleInfo& scales);

// The eight effective matrices of a two-hop block plus field/use metadata.
// Diagonal for symbol extensions, dense 2x2 for the scaled-rotation
// embedding of a constant complex channel.
struct TwoHopMatrices {
    Eigen::MatrixXcd f11, f12, f21, f22;
    Eigen::MatrixXcd g11, g12, g21, g22;
    int block_dim = 0;        // vectors live in C^block_dim (or R^block_dim)
    int uses_per_block = 0;   // channel uses a block spans (M, or 1 for the embedding)
    bool real_field = false;
    // Forwarded noise of folded amplify-and-forward layers, per destination
    // and per slot, as a multiple of the base noise variance.
    Eigen::VectorXd extra_noise_d1, extra_noise_d2;

    static TwoHopMatrices from_channel(const ChannelRealization& channel);
    static TwoHopMatrices from_real_rotation(const Eigen::Matrix2cd& first_hop,
                                             const Eigen::Matrix2cd& second_hop);
};

struct MeasuredLink {
    Eigen::VectorXd sinr1;  // per stream of W1
    Eigen::VectorXd sinr2;  // per stream of W2
    double power = 0.0;
    long frames = 0;
};

struct EndToEndProbe {
    // Linear maps from all 2M-1 symbol inputs to the projected destination
    // dimensions, in the symbol domain (so desired blocks are exactly the
    // first-difference chain pattern).
    Eigen::MatrixXcd d1_map;  // M x (2M-1)
    Eigen::MatrixXcd d2_map;  // (M-1) x (2M-1)
    Eigen::MatrixXcd d1_desired, d1_cross;
    Eigen::MatrixXcd d2_desired, d2_cross;
    double leakage = 0.0;  // max cross entry relative to its row's desired scale
};

// Full aligning transmitter -> relays -> destinations chain for one channel
// block. Construction precomputes beamformers, isolation inverses, power
// scales, and destination projections; frames are then cheap.
class AlignedPipeline {
  public:
    AlignedPipeline(TwoHopMatrices matrices, double power, double noise_var);

    // Injected vectors (e.g. perturbed or deliberately non-aligned sets) in
    // place of the scheme's construction.
    AlignedPipeline(TwoHopMatrices matrices, BeamformerSet beamformers, double power,
                    double noise_var);

    static AlignedPipeline from_channel(const ChannelRealization& channel, double power,
                                        double noise_var);

    int extension() const { return block_dim_; }
    int stream_count() const { return 2 * block_dim_ - 1; }
    bool real_field() const { return matrices_.real_field; }
    double power() const { return power_; }
    double relay_scale() const { return relay_scale_; }
    const BeamformerSet& beamformers() const { return beamformers_; }
    const ScaleInfo& scales() const { return scales_; }

    // Per-stream unit-symbol errors of one Monte-Carlo frame. `mute_source2`
    // zeroes the second user's symbols after drawing them, so muted and
    // unmuted runs share identical noise realizations (ablation probing).
    void run_frame(Xoshiro256pp& rng, Eigen::VectorXcd& err1, Eigen::VectorXcd& err2,
                   bool mute_source2 = false) const;

    MeasuredLink measure(long target_symbols, std::uint64_t seed,
                         bool mute_source2 = false) const;

    EndToEndProbe probe() const;

  private:
    Eigen::VectorXcd propagate_noiseless(const Eigen::VectorXcd& x1_symbols,
                                         const Eigen::VectorXcd& x2_symbols, int destination) const;

    TwoHopMatrices matrices_;
    double power_;
    double noise_var_;
    int block_dim_;
    BeamformerSet beamformers_;
    Isolator relay1_isolator_, relay2_isolator_;
    Eigen::MatrixXcd d1_projection_;  // inverse of [G11 vR1,k]
    Eigen::MatrixXcd d2_projection_;  // inverse of [G22 vR2,i | G21 vR1,M]
    double relay_scale_ = 1.0;
    ScaleInfo scales_;
};

// Orthogonalized two-phase baseline: each source gets the whole network half
// the time, relays amplify-and-forward at full power. One DoF in total.
struct TdmaRates {
    double sinr1 = 0.0;
    double sinr2 = 0.0;
    double sum_rate = 0.0;  // bits per complex use, time sharing included
};

TdmaRates tdma_baseline(const ChannelRealization& channel, double power, double noise_var);

}  // namespace ainsim
