#include "ainsim/multihop.hpp"

#include <cmath>
#include <limits>

#include "ainsim/rng.hpp"

namespace ainsim {

GainAssignment GainAssignment::unit(int layer_count) {
    GainAssignment gains;
    gains.layers.assign(static_cast<std::size_t>(layer_count), {cplx{1.0, 0.0}, cplx{1.0, 0.0}});
    return gains;
}

double NeutralizationResidual::norm() const {
    return std::sqrt(std::norm(off12) + std::norm(off21));
}

namespace {

void check_gains(const ChannelRealization& channel, const GainAssignment& gains) {
    if (static_cast<int>(gains.layers.size()) != channel.hops() - 1) {
        throw parameter_error("need one gain layer per relay layer (hops - 1)");
    }
    for (const auto& layer : gains.layers) {
        if (layer[0] == cplx{} || layer[1] == cplx{}) {
            throw parameter_error("relay gains must be nonzero");
        }
    }
}

Eigen::Matrix2cd effective_matrix_unchecked(const ChannelRealization& channel,
                                            const GainAssignment& gains, int slot) {
    Eigen::Matrix2cd effective = channel.hop_matrix(0, slot);
    for (int layer = 1; layer < channel.hops(); ++layer) {
        Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
        diag(0, 0) = gains.layers[layer - 1][0];
        diag(1, 1) = gains.layers[layer - 1][1];
        effective = channel.hop_matrix(layer, slot) * diag * effective;
    }
    return effective;
}

}  // namespace

Eigen::Matrix2cd effective_matrix(const ChannelRealization& channel, const GainAssignment& gains,
                                  int slot) {
    check_gains(channel, gains);
    return effective_matrix_unchecked(channel, gains, slot);
}

NeutralizationResidual neutralization_residual(const ChannelRealization& channel,
                                               const GainAssignment& gains, int slot) {
    const Eigen::Matrix2cd effective = effective_matrix(channel, gains, slot);
    return {effective(0, 1), effective(1, 0),
            std::min(std::abs(effective(0, 0)), std::abs(effective(1, 1)))};
}

double two_hop_infeasibility(const ChannelRealization& channel, int slot) {
    if (channel.hops() != 2) throw parameter_error("infeasibility check is for 2-hop networks");
    const Eigen::Matrix2cd f = channel.hop_matrix(0, slot);
    const Eigen::Matrix2cd g = channel.hop_matrix(1, slot);
    const cplx den1 = f(0, 0) * g(1, 0);
    const cplx den2 = f(0, 1) * g(0, 0);
    if (den1 == cplx{} || den2 == cplx{}) {
        throw degenerate_input_error("zero denominator in gain-ratio comparison");
    }
    const cplx r1 = -f(1, 0) * g(1, 1) / den1;
    const cplx r2 = -f(1, 1) * g(0, 1) / den2;
    return std::abs(r1 - r2) / (std::abs(r1) + std::abs(r2));
}

namespace {

// Residual and analytic Jacobian of the two off-diagonal entries with
// respect to the free gains (second gain of each layer).
void residual_and_jacobian(const ChannelRealization& channel, const GainAssignment& gains,
                           Eigen::Vector2cd& residual, Eigen::MatrixXcd& jacobian) {
    const int layers = channel.hops() - 1;
    const Eigen::Matrix2cd effective = effective_matrix_unchecked(channel, gains, 0);
    residual << effective(0, 1), effective(1, 0);

    jacobian.resize(2, layers);
    for (int free = 0; free < layers; ++free) {
        // Derivative: replace layer `free` by diag(0, 1).
        Eigen::Matrix2cd d = channel.hop_matrix(0, 0);
        for (int layer = 1; layer <= layers; ++layer) {
            Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
            if (layer - 1 == free) {
                diag(1, 1) = 1.0;
            } else {
                diag(0, 0) = gains.layers[layer - 1][0];
                diag(1, 1) = gains.layers[layer - 1][1];
            }
            d = channel.hop_matrix(layer, 0) * diag * d;
        }
        jacobian(0, free) = d(0, 1);
        jacobian(1, free) = d(1, 0);
    }
}

}  // namespace

GainSolveReport solve_gains(const ChannelRealization& channel, const GainAssignment& init,
                            int max_iters, double tol, std::uint64_t jitter_seed) {
    if (channel.hops() < 3) {
        throw parameter_error(
            "scalar amplify-and-forward neutralization needs at least 3 hops; "
            "2-hop networks are infeasible (see two_hop_infeasibility)");
    }
    check_gains(channel, init);
    const int layers = channel.hops() - 1;
    constexpr int kRestartBudget = 10;

    Xoshiro256pp jitter_rng(jitter_seed);
    GainSolveReport best;
    best.residual = std::numeric_limits<double>::infinity();

    GainAssignment current = init;
    for (int restart = 0; restart <= kRestartBudget; ++restart) {
        if (restart > 0) {
            // Jittered restart around the unit assignment.
            current = init;
            for (auto& layer : current.layers) {
                layer[1] += cplx(jitter_rng.uniform(-1.0, 1.0), jitter_rng.uniform(-1.0, 1.0));
                if (layer[1] == cplx{}) layer[1] = cplx{0.5, 0.5};
            }
        }

        GainSolveReport report;
        report.gains = current;
        report.restarts = restart;
        Eigen::Vector2cd residual;
        Eigen::MatrixXcd jacobian;
        residual_and_jacobian(channel, report.gains, residual, jacobian);
        double res_norm = residual.norm();
        report.residual_history.push_back(res_norm);

        for (int iter = 0; iter < max_iters && res_norm >= tol; ++iter) {
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(jacobian);
            if (cod.rank() < 2) break;  // singular Jacobian: jitter and retry
            const Eigen::VectorXcd step = cod.solve(-residual.matrix());

            // Damped update: halve until the residual improves.
            double damping = 1.0;
            GainAssignment trial = report.gains;
            Eigen::Vector2cd trial_residual;
            Eigen::MatrixXcd trial_jacobian;
            bool improved = false;
            for (int halving = 0; halving < 30; ++halving) {
                trial = report.gains;
                for (int layer = 0; layer < layers; ++layer) {
                    trial.layers[layer][1] += damping * step[layer];
                }
                bool valid = true;
                for (const auto& layer : trial.layers) valid = valid && layer[1] != cplx{};
                if (valid) {
                    residual_and_jacobian(channel, trial, trial_residual, trial_jacobian);
                    if (trial_residual.norm() < res_norm) {
                        improved = true;
                        break;
                    }
                }
                damping *= 0.5;
            }
            if (!improved) break;
            report.gains = trial;
            residual = trial_residual;
            jacobian = trial_jacobian;
            res_norm = residual.norm();
            report.residual_history.push_back(res_norm);
            report.iterations = iter + 1;
        }

        const auto neut = neutralization_residual(channel, report.gains);
        report.residual = res_norm;
        report.diag_min = neut.diag_min;
        report.converged = res_norm < tol && neut.diag_min > kDiagMinTol;
        if (report.converged) return report;
        if (report.residual < best.residual) best = report;
    }
    return best;
}

ReducedChannel reduce_to_two_hops(const ChannelRealization& channel,
                                  const std::vector<std::array<cplx, 2>>& folded_gains) {
    if (channel.hops() < 3) throw parameter_error("reduction needs at least 3 hops");
    if (static_cast<int>(folded_gains.size()) != channel.hops() - 2) {
        throw parameter_error("need gains for relay layers 2..H-1");
    }
    for (const auto& layer : folded_gains) {
        if (layer[0] == cplx{} || layer[1] == cplx{}) {
            throw parameter_error("folded gains must be nonzero");
        }
    }

    const int slots = channel.slots();
    ReducedChannel reduced{
        ChannelRealization(2, slots, channel.model(), channel.bounds(), channel.seed()),
        Eigen::VectorXd::Zero(slots), Eigen::VectorXd::Zero(slots)};

    for (int slot = 0; slot < slots; ++slot) {
        // First hop passes through unchanged.
        const Eigen::Matrix2cd first = channel.hop_matrix(0, slot);
        // Fold hops 2..H with the gain layers between them.
        Eigen::Matrix2cd folded = channel.hop_matrix(1, slot);
        for (int layer = 2; layer < channel.hops(); ++layer) {
            Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
            diag(0, 0) = folded_gains[layer - 2][0];
            diag(1, 1) = folded_gains[layer - 2][1];
            folded = channel.hop_matrix(layer, slot) * diag * folded;
        }
        for (int rx = 0; rx < 2; ++rx) {
            for (int tx = 0; tx < 2; ++tx) {
                reduced.two_hop.sequence(0, rx, tx)[slot] = first(rx, tx);
                reduced.two_hop.sequence(1, rx, tx)[slot] = folded(rx, tx);
            }
        }

        // Receive noise of each folded relay layer rides through the gains
        // and later hops into the destinations.
        for (int layer = 2; layer < channel.hops(); ++layer) {
            Eigen::Matrix2cd path = Eigen::Matrix2cd::Identity();
            for (int downstream = layer; downstream < channel.hops(); ++downstream) {
                Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
                diag(0, 0) = folded_gains[downstream - 2][0];
                diag(1, 1) = folded_gains[downstream - 2][1];
                path = channel.hop_matrix(downstream, slot) * diag * path;
            }
            for (int relay = 0; relay < 2; ++relay) {
                reduced.extra_noise_d1[slot] += std::norm(path(0, relay));
                reduced.extra_noise_d2[slot] += std::norm(path(1, relay));
            }
        }
    }
    return reduced;
}

}  // namespace ainsim
