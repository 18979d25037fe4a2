#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ainsim/errors.hpp"

namespace ainsim {

using cplx = std::complex<double>;

enum class ChannelModel { time_varying, constant_complex, constant_real };

std::string to_string(ChannelModel model);
ChannelModel channel_model_from_string(const std::string& name);

struct MagnitudeBounds {
    double min_mag = 0.1;
    double max_mag = 10.0;
};

// Diagonal of the M x M per-coefficient matrix seen over M symbol extensions.
struct DiagonalExtension {
    Eigen::VectorXcd entries;

    Eigen::Index size() const { return entries.size(); }
    Eigen::MatrixXcd dense() const { return entries.asDiagonal(); }
};

// A nonzero complex scalar viewed as a scaled rotation acting on (Re, Im).
struct RealRotation {
    double magnitude = 0.0;
    double phase = 0.0;

    Eigen::Matrix2d expand() const {
        const double c = std::cos(phase);
        const double s = std::sin(phase);
        Eigen::Matrix2d rot;
        rot << c, -s, s, c;
        return magnitude * rot;
    }
};

// All coefficients of a layered two-source/two-destination network:
// `hops` hop matrices, each 2x2, each entry a length-M slot sequence.
// Immutable after construction; safe to share across threads.
class ChannelRealization {
  public:
    ChannelRealization(int hops, int slots, ChannelModel model, MagnitudeBounds bounds,
                       std::uint64_t seed);

    int hops() const { return hop_count_; }
    int slots() const { return slot_count_; }
    ChannelModel model() const { return model_; }
    MagnitudeBounds bounds() const { return bounds_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<cplx>& sequence(int hop, int rx, int tx) const;
    std::vector<cplx>& sequence(int hop, int rx, int tx);
    cplx at(int hop, int rx, int tx, int slot) const;

    // 2x2 matrix of one hop at one slot.
    Eigen::Matrix2cd hop_matrix(int hop, int slot) const;

  private:
    int hop_count_;
    int slot_count_;
    ChannelModel model_;
    MagnitudeBounds bounds_;
    std::uint64_t seed_;
    // Row-major (rx, tx) within each hop.
    std::vector<std::vector<cplx>> sequences_;
};

// Draws a realization with the fixed project generator (xoshiro256++ seeded
// through splitmix64). Stream order: hop-major, then receiver, then
// transmitter, then slot; each coefficient consumes one magnitude draw and
// one phase/sign draw. Constant models consume one pair per coefficient and
// replicate it across slots.
//
// time_varying / constant_complex: magnitude log-uniform on
// [min_mag, max_mag], phase uniform on [0, 2*pi).
// constant_real: magnitude uniform on [min_mag, max_mag], random sign.
ChannelRealization sample_channel(std::uint64_t seed, int hops, int slots, ChannelModel model,
                                  MagnitudeBounds bounds = {});

DiagonalExtension extend(const ChannelRealization& channel, int hop, int rx, int tx);

RealRotation to_real_rotation(cplx coefficient);

// JSON schema:
// {"model": "...", "seed": n, "bounds": [a, b],
//  "hops": [[[ [re, im], ... M entries ] x4 coefficients row-major ] x hops]}
std::string channel_to_json(const ChannelRealization& channel);
ChannelRealization channel_from_json(const std::string& text);

}  // namespace ainsim
