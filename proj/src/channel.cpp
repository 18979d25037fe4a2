#include "ainsim/channel.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "ainsim/rng.hpp"

namespace ainsim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::string to_string(ChannelModel model) {
    switch (model) {
        case ChannelModel::time_varying: return "time_varying";
        case ChannelModel::constant_complex: return "constant_complex";
        case ChannelModel::constant_real: return "constant_real";
    }
    return "unknown";
}

ChannelModel channel_model_from_string(const std::string& name) {
    if (name == "time_varying") return ChannelModel::time_varying;
    if (name == "constant_complex") return ChannelModel::constant_complex;
    if (name == "constant_real") return ChannelModel::constant_real;
    throw parameter_error("unknown channel model: " + name);
}

ChannelRealization::ChannelRealization(int hops, int slots, ChannelModel model,
                                       MagnitudeBounds bounds, std::uint64_t seed)
    : hop_count_(hops),
      slot_count_(slots),
      model_(model),
      bounds_(bounds),
      seed_(seed),
      sequences_(static_cast<std::size_t>(hops) * 4) {
    if (hops < 2) throw parameter_error("a layered network needs at least 2 hops");
    if (slots < 1) throw parameter_error("extension length M must be >= 1");
    if (!(bounds.min_mag > 0.0) || bounds.min_mag > bounds.max_mag ||
        !std::isfinite(bounds.max_mag)) {
        throw parameter_error("magnitude bounds must satisfy 0 < min <= max < inf");
    }
    for (auto& seq : sequences_) seq.assign(static_cast<std::size_t>(slots), cplx{});
}

const std::vector<cplx>& ChannelRealization::sequence(int hop, int rx, int tx) const {
    if (hop < 0 || hop >= hop_count_ || rx < 0 || rx > 1 || tx < 0 || tx > 1) {
        throw parameter_error("channel coefficient index out of range");
    }
    return sequences_[static_cast<std::size_t>(hop) * 4 + static_cast<std::size_t>(rx) * 2 +
                      static_cast<std::size_t>(tx)];
}

std::vector<cplx>& ChannelRealization::sequence(int hop, int rx, int tx) {
    return const_cast<std::vector<cplx>&>(
        static_cast<const ChannelRealization&>(*this).sequence(hop, rx, tx));
}

cplx ChannelRealization::at(int hop, int rx, int tx, int slot) const {
    const auto& seq = sequence(hop, rx, tx);
    if (slot < 0 || slot >= slot_count_) throw parameter_error("slot index out of range");
    return seq[static_cast<std::size_t>(slot)];
}

Eigen::Matrix2cd ChannelRealization::hop_matrix(int hop, int slot) const {
    Eigen::Matrix2cd m;
    m << at(hop, 0, 0, slot), at(hop, 0, 1, slot), at(hop, 1, 0, slot), at(hop, 1, 1, slot);
    return m;
}

ChannelRealization sample_channel(std::uint64_t seed, int hops, int slots, ChannelModel model,
                                  MagnitudeBounds bounds) {
    ChannelRealization channel(hops, slots, model, bounds, seed);
    Xoshiro256pp rng(seed);
    const double log_lo = std::log(bounds.min_mag);
    const double log_hi = std::log(bounds.max_mag);

    auto draw = [&]() -> cplx {
        if (model == ChannelModel::constant_real) {
            const double mag = rng.uniform(bounds.min_mag, bounds.max_mag);
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            return {sign * mag, 0.0};
        }
        const double mag = std::exp(rng.uniform(log_lo, log_hi));
        const double phase = kTwoPi * rng.uniform();
        return std::polar(mag, phase);
    };

    for (int hop = 0; hop < hops; ++hop) {
        for (int rx = 0; rx < 2; ++rx) {
            for (int tx = 0; tx < 2; ++tx) {
                auto& seq = channel.sequence(hop, rx, tx);
                if (model == ChannelModel::time_varying) {
                    for (int slot = 0; slot < slots; ++slot) seq[slot] = draw();
                } else {
                    const cplx value = draw();
                    for (int slot = 0; slot < slots; ++slot) seq[slot] = value;
                }
            }
        }
    }
    return channel;
}

DiagonalExtension extend(const ChannelRealization& channel, int hop, int rx, int tx) {
    const auto& seq = channel.sequence(hop, rx, tx);
    DiagonalExtension ext;
    ext.entries = Eigen::Map<const Eigen::VectorXcd>(seq.data(), channel.slots());
    return ext;
}

RealRotation to_real_rotation(cplx coefficient) {
    if (coefficient == cplx{0.0, 0.0}) {
        throw degenerate_input_error("zero coefficient has no rotation representation");
    }
    return {std::abs(coefficient), std::arg(coefficient)};
}

std::string channel_to_json(const ChannelRealization& channel) {
    nlohmann::json root;
    root["model"] = to_string(channel.model());
    root["seed"] = channel.seed();
    root["bounds"] = {channel.bounds().min_mag, channel.bounds().max_mag};
    nlohmann::json hops = nlohmann::json::array();
    for (int hop = 0; hop < channel.hops(); ++hop) {
        nlohmann::json coeffs = nlohmann::json::array();
        for (int rx = 0; rx < 2; ++rx) {
            for (int tx = 0; tx < 2; ++tx) {
                nlohmann::json slots = nlohmann::json::array();
                for (const cplx& value : channel.sequence(hop, rx, tx)) {
                    slots.push_back({value.real(), value.imag()});
                }
                coeffs.push_back(std::move(slots));
            }
        }
        hops.push_back(std::move(coeffs));
    }
    root["hops"] = std::move(hops);
    return root.dump(2);
}

ChannelRealization channel_from_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("channel file is not valid JSON: ") + e.what());
    }
    try {
        const auto model = channel_model_from_string(root.at("model").get<std::string>());
        const auto seed = root.value("seed", std::uint64_t{0});
        MagnitudeBounds bounds;
        if (root.contains("bounds")) {
            bounds.min_mag = root["bounds"].at(0).get<double>();
            bounds.max_mag = root["bounds"].at(1).get<double>();
        }
        const auto& hops = root.at("hops");
        if (!hops.is_array() || hops.size() < 2) {
            throw config_error("channel file must list at least 2 hops");
        }
        const auto& first = hops.at(0).at(0);
        const int slots = static_cast<int>(first.size());
        ChannelRealization channel(static_cast<int>(hops.size()), slots, model, bounds, seed);
        for (int hop = 0; hop < channel.hops(); ++hop) {
            const auto& coeffs = hops.at(hop);
            if (coeffs.size() != 4) throw config_error("each hop needs 4 coefficient sequences");
            for (int idx = 0; idx < 4; ++idx) {
                const auto& slots_json = coeffs.at(idx);
                if (static_cast<int>(slots_json.size()) != slots) {
                    throw config_error("all coefficient sequences must share one length");
                }
                auto& seq = channel.sequence(hop, idx / 2, idx % 2);
                for (int slot = 0; slot < slots; ++slot) {
                    seq[slot] = cplx(slots_json.at(slot).at(0).get<double>(),
                                     slots_json.at(slot).at(1).get<double>());
                }
            }
        }
        return channel;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed channel file: ") + e.what());
    }
}

}  // namespace ainsim
