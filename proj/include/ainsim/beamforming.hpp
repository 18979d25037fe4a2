#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ainsim/channel.hpp"

namespace ainsim {

// Finite-precision stand-ins for the scheme's exact-arithmetic conditions.
inline constexpr double kAlignmentTol = 1e-12;
inline constexpr double kDetRelTol = 1e-9;        // relative to product of row norms
inline constexpr double kConditionCap = 1e12;
inline constexpr double kPhaseMarginTol = 1e-9;   // radians
inline constexpr double kEigenGapTol = 1e-9;

// First-hop vectors for both sources and second-hop vectors for both relays.
// source1 has M vectors, source2 has M-1; likewise relay1/relay2. The first
// source1 (relay1) vector is all-ones; everything else follows from the
// alignment (neutralization) conditions.
struct BeamformerSet {
    std::vector<Eigen::VectorXcd> source1;
    std::vector<Eigen::VectorXcd> source2;
    std::vector<Eigen::VectorXcd> relay1;
    std::vector<Eigen::VectorXcd> relay2;
};

struct IndependenceReport {
    double determinant_magnitude = 0.0;
    double condition_number = 0.0;
    bool independent = false;
    // Filled when Vandermonde nodes are supplied: |det| recomputed as the
    // pairwise node-difference product, and the relative gap between routes.
    double vandermonde_product = 0.0;
    double vandermonde_rel_gap = 0.0;
    bool has_vandermonde_check = false;
};

struct PhaseConditionReport {
    bool first_hop_ok = false;
    bool second_hop_ok = false;
    double first_hop_margin = 0.0;   // distance of the phase sum to k*pi
    double second_hop_margin = 0.0;
};

struct EigenDistinctReport {
    bool distinct = false;
    double min_gap = 0.0;
    Eigen::VectorXcd eigenvalues;
};

// Dense variants: the construction only needs invertibility, so the same
// code serves diagonal symbol extensions, the 2x2 scaled-rotation embedding
// of a constant complex channel, and full MIMO matrices. The major stream
// count equals the matrix dimension M; the minor carries M-1 streams.
std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> first_hop_beamformers(
    const Eigen::MatrixXcd& f11, const Eigen::MatrixXcd& f12, const Eigen::MatrixXcd& f21,
    const Eigen::MatrixXcd& f22);

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> second_hop_beamformers(
    const Eigen::MatrixXcd& g11, const Eigen::MatrixXcd& g12, const Eigen::MatrixXcd& g21,
    const Eigen::MatrixXcd& g22);

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> first_hop_beamformers(
    const DiagonalExtension& f11, const DiagonalExtension& f12, const DiagonalExtension& f21,
    const DiagonalExtension& f22, int extension);

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> second_hop_beamformers(
    const DiagonalExtension& g11, const DiagonalExtension& g12, const DiagonalExtension& g21,
    const DiagonalExtension& g22, int extension);

// Both hops at once for a 2-hop channel, slot-extension view.
BeamformerSet build_beamformers(const ChannelRealization& channel);

// Per-slot ratio F12*F21 / (F11*F22): the diagonal of the cascade matrix that
// generates source1's vectors, i.e. the Vandermonde nodes.
Eigen::VectorXcd alignment_nodes(const DiagonalExtension& f11, const DiagonalExtension& f12,
                                 const DiagonalExtension& f21, const DiagonalExtension& f22);

IndependenceReport independence_report(const std::vector<Eigen::VectorXcd>& vectors);
IndependenceReport independence_report(const std::vector<Eigen::VectorXcd>& vectors,
                                       const Eigen::VectorXcd& vandermonde_nodes);

// Product of pairwise node differences |prod_{i<j} (a_j - a_i)|.
double vandermonde_product_magnitude(const Eigen::VectorXcd& nodes);

PhaseConditionReport phase_condition(const Eigen::Matrix2cd& first_hop,
                                     const Eigen::Matrix2cd& second_hop);

EigenDistinctReport mimo_eigen_distinct(const Eigen::MatrixXcd& f11, const Eigen::MatrixXcd& f12,
                                        const Eigen::MatrixXcd& f21, const Eigen::MatrixXcd& f22);

}  // namespace ainsim
