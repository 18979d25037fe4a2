#include "ainsim/beamforming.hpp"

#include <cmath>
#include <limits>

namespace ainsim {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

void require_nonzero_diagonal(const DiagonalExtension& d, const char* which) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d.entries[i] == cplx{0.0, 0.0}) {
            throw singular_channel_error(std::string("zero diagonal entry in ") + which);
        }
    }
}

Eigen::MatrixXcd stable_inverse(const Eigen::MatrixXcd& m, const char* which) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    if (!lu.isInvertible()) {
        throw singular_channel_error(std::string("singular channel matrix: ") + which);
    }
    return lu.inverse();
}

// Chain construction shared by both hops. `minor_sign` carries the minus of
// the neutralization pairing; +1 reproduces the first-hop alignment.
std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> chained_vectors(
    const Eigen::MatrixXcd& m11, const Eigen::MatrixXcd& m12, const Eigen::MatrixXcd& m21,
    const Eigen::MatrixXcd& m22, double minor_sign) {
    const auto dim = m11.rows();
    const Eigen::MatrixXcd inv11_12 = stable_inverse(m11, "upper-left block") * m12;
    const Eigen::MatrixXcd inv22_21 = stable_inverse(m22, "lower-right block") * m21;

    std::vector<Eigen::VectorXcd> major(static_cast<std::size_t>(dim));
    std::vector<Eigen::VectorXcd> minor(dim > 0 ? static_cast<std::size_t>(dim - 1) : 0);
    major[0] = Eigen::VectorXcd::Ones(dim);
    for (Eigen::Index i = 0; i + 1 < dim; ++i) {
        minor[i] = minor_sign * (inv22_21 * major[i]);
        major[i + 1] = minor_sign * (inv11_12 * minor[i]);
    }
    return {std::move(major), std::move(minor)};
}

}  // namespace

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> first_hop_beamformers(
    const Eigen::MatrixXcd& f11, const Eigen::MatrixXcd& f12, const Eigen::MatrixXcd& f21,
    const Eigen::MatrixXcd& f22) {
    return chained_vectors(f11, f12, f21, f22, 1.0);
}

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> second_hop_beamformers(
    const Eigen::MatrixXcd& g11, const Eigen::MatrixXcd& g12, const Eigen::MatrixXcd& g21,
    const Eigen::MatrixXcd& g22) {
    return chained_vectors(g11, g12, g21, g22, -1.0);
}

namespace {

// Diagonal channels admit the elementwise closed form: the stacked source-1
// matrix is then a Vandermonde matrix in the cascade nodes, bit for bit.
std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> chained_diagonal(
    const DiagonalExtension& m11, const DiagonalExtension& m12, const DiagonalExtension& m21,
    const DiagonalExtension& m22, int extension, double minor_sign) {
    if (extension < 1 || m11.size() != extension || m12.size() != extension ||
        m21.size() != extension || m22.size() != extension) {
        throw parameter_error("extension length does not match the diagonal channels");
    }
    require_nonzero_diagonal(m11, "upper-left diagonal");
    require_nonzero_diagonal(m12, "upper-right diagonal");
    require_nonzero_diagonal(m21, "lower-left diagonal");
    require_nonzero_diagonal(m22, "lower-right diagonal");

    const Eigen::ArrayXcd ratio_major = m12.entries.array() / m11.entries.array();
    const Eigen::ArrayXcd ratio_minor = m21.entries.array() / m22.entries.array();
    const Eigen::ArrayXcd nodes = ratio_major * ratio_minor;

    std::vector<Eigen::VectorXcd> major(static_cast<std::size_t>(extension));
    std::vector<Eigen::VectorXcd> minor(static_cast<std::size_t>(extension - 1));
    major[0] = Eigen::VectorXcd::Ones(extension);
    for (int i = 0; i + 1 < extension; ++i) {
        major[i + 1] = (nodes * major[i].array()).matrix();
        minor[i] = minor_sign * (ratio_minor * major[i].array()).matrix();
    }
    return {std::move(major), std::move(minor)};
}

}  // namespace

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> first_hop_beamformers(
    const DiagonalExtension& f11, const DiagonalExtension& f12, const DiagonalExtension& f21,
    const DiagonalExtension& f22, int extension) {
    return chained_diagonal(f11, f12, f21, f22, extension, 1.0);
}

std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>> second_hop_beamformers(
    const DiagonalExtension& g11, const DiagonalExtension& g12, const DiagonalExtension& g21,
    const DiagonalExtension& g22, int extension) {
    return chained_diagonal(g11, g12, g21, g22, extension, -1.0);
}

BeamformerSet build_beamformers(const ChannelRealization& channel) {
    if (channel.hops() != 2) {
        throw parameter_error("beamformer construction expects a 2-hop channel");
    }
    const int m = channel.slots();
    auto [v1, v2] = first_hop_beamformers(extend(channel, 0, 0, 0), extend(channel, 0, 0, 1),
                                          extend(channel, 0, 1, 0), extend(channel, 0, 1, 1), m);
    auto [r1, r2] = second_hop_beamformers(extend(channel, 1, 0, 0), extend(channel, 1, 0, 1),
                                           extend(channel, 1, 1, 0), extend(channel, 1, 1, 1), m);
    return {std::move(v1), std::move(v2), std::move(r1), std::move(r2)};
}

Eigen::VectorXcd alignment_nodes(const DiagonalExtension& f11, const DiagonalExtension& f12,
                                 const DiagonalExtension& f21, const DiagonalExtension& f22) {
    require_nonzero_diagonal(f11, "F11");
    require_nonzero_diagonal(f22, "F22");
    // Same association as the beamformer chain, so node powers reproduce the
    // stacked vectors bit for bit.
    return ((f12.entries.array() / f11.entries.array()) *
            (f21.entries.array() / f22.entries.array()))
        .matrix();
}

double vandermonde_product_magnitude(const Eigen::VectorXcd& nodes) {
    double product = 1.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
        for (Eigen::Index j = i + 1; j < nodes.size(); ++j) {
            product *= std::abs(nodes[j] - nodes[i]);
        }
    }
    return product;
}

namespace {

// |det| with exact power-of-two row equilibration: Vandermonde-type stacks
// have row norms spanning many decades, where a plain LU determinant loses
// all relative accuracy. Scaling rows by 2^-e is exact, so only the
// well-scaled elimination rounds.
double scaled_determinant_magnitude(const Eigen::MatrixXcd& stacked) {
    Eigen::MatrixXcd scaled = stacked;
    long exponent_sum = 0;
    for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
        const double row_max = scaled.row(r).cwiseAbs().maxCoeff();
        if (row_max == 0.0) return 0.0;
        const int e = std::ilogb(row_max);
        exponent_sum += e;
        for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
            scaled(r, c) = cplx(std::ldexp(scaled(r, c).real(), -e),
                                std::ldexp(scaled(r, c).imag(), -e));
        }
    }
    const double det_scaled = std::abs(scaled.determinant());
    return std::ldexp(det_scaled, static_cast<int>(exponent_sum));
}

}  // namespace

IndependenceReport independence_report(const std::vector<Eigen::VectorXcd>& vectors) {
    IndependenceReport report;
    if (vectors.empty()) {
        report.independent = true;
        report.condition_number = 1.0;
        report.determinant_magnitude = 1.0;
        return report;
    }
    const auto dim = vectors.front().size();
    Eigen::MatrixXcd stacked(dim, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        if (vectors[k].size() != dim) throw parameter_error("vectors must share one length");
        stacked.col(static_cast<Eigen::Index>(k)) = vectors[k];
    }
    if (stacked.rows() != stacked.cols()) {
        throw parameter_error("independence report expects M vectors of length M");
    }

    report.determinant_magnitude = scaled_determinant_magnitude(stacked);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    report.condition_number =
        smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

    double row_norm_product = 1.0;
    for (Eigen::Index r = 0; r < stacked.rows(); ++r) {
        row_norm_product *= stacked.row(r).norm();
    }
    report.independent = report.determinant_magnitude > kDetRelTol * row_norm_product &&
                         report.condition_number < kConditionCap;
    return report;
}

IndependenceReport independence_report(const std::vector<Eigen::VectorXcd>& vectors,
                                       const Eigen::VectorXcd& vandermonde_nodes) {
    IndependenceReport report = independence_report(vectors);
    report.vandermonde_product = vandermonde_product_magnitude(vandermonde_nodes);
    const double denom = std::max(report.determinant_magnitude, report.vandermonde_product);
    report.vandermonde_rel_gap =
        denom > 0.0 ? std::abs(report.determinant_magnitude - report.vandermonde_product) / denom
                    : 0.0;
    report.has_vandermonde_check = true;
    return report;
}

namespace {

// Distance of x to the nearest integer multiple of pi.
double distance_to_pi_grid(double x) {
    const double r = std::remainder(x, kPi);
    return std::abs(r);
}

}  // namespace

PhaseConditionReport phase_condition(const Eigen::Matrix2cd& first_hop,
                                     const Eigen::Matrix2cd& second_hop) {
    for (const auto* hop : {&first_hop, &second_hop}) {
        for (Eigen::Index r = 0; r < 2; ++r) {
            for (Eigen::Index c = 0; c < 2; ++c) {
                if ((*hop)(r, c) == cplx{0.0, 0.0}) {
                    throw degenerate_input_error("phase condition needs nonzero coefficients");
                }
            }
        }
    }
    auto sum_phase = [](const Eigen::Matrix2cd& hop) {
        return std::arg(hop(0, 1)) + std::arg(hop(1, 0)) - std::arg(hop(0, 0)) -
               std::arg(hop(1, 1));
    };
    PhaseConditionReport report;
    report.first_hop_margin = distance_to_pi_grid(sum_phase(first_hop));
    report.second_hop_margin = distance_to_pi_grid(sum_phase(second_hop));
    report.first_hop_ok = report.first_hop_margin > kPhaseMarginTol;
    report.second_hop_ok = report.second_hop_margin > kPhaseMarginTol;
    return report;
}

EigenDistinctReport mimo_eigen_distinct(const Eigen::MatrixXcd& f11, const Eigen::MatrixXcd& f12,
                                        const Eigen::MatrixXcd& f21, const Eigen::MatrixXcd& f22) {
    const Eigen::MatrixXcd cascade =
        stable_inverse(f11, "F11") * f12 * stable_inverse(f22, "F22") * f21;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(cascade, /*computeEigenvectors=*/false);
    EigenDistinctReport report;
    report.eigenvalues = solver.eigenvalues();
    report.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
        for (Eigen::Index j = i + 1; j < report.eigenvalues.size(); ++j) {
            report.min_gap =
                std::min(report.min_gap, std::abs(report.eigenvalues[i] - report.eigenvalues[j]));
        }
    }
    if (report.eigenvalues.size() < 2) report.min_gap = std::numeric_limits<double>::infinity();
    report.distinct = report.min_gap > kEigenGapTol;
    return report;
}

}  // namespace ainsim
