// Batch experiment runner for the two-hop aligned-interference-neutralization
// simulator. Subcommands: simulate | rational | multihop | check-phases |
// dump-channel. Exit codes: 0 success, 2 configuration error, 3 numeric or
// capacity error.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ainsim/experiments.hpp"

using namespace ainsim;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Grid entries are dB by default; an "abs:" prefix or values above 200 are
// absolute powers (a 200+ dB sweep is not a meaningful request).
std::vector<double> parse_grid_db(const std::string& text) {
    std::string body = text;
    bool absolute = false;
    if (body.rfind("abs:", 0) == 0) {
        absolute = true;
        body = body.substr(4);
    }
    std::vector<double> grid_db;
    std::stringstream stream(body);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        const double value = std::stod(token);
        if (absolute || value > 200.0) {
            grid_db.push_back(10.0 * std::log10(value));
        } else {
            grid_db.push_back(value);
        }
    }
    if (grid_db.empty()) throw config_error("empty power grid");
    return grid_db;
}

std::string hash_hex(std::uint64_t hash) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path);
    out << contents;
}

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json parsed;
    try {
        in >> parsed;
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config file is not valid JSON: ") + e.what());
    }
    return parsed;
}

struct CommonArgs {
    std::string config_path;
    std::string out;
    int jobs = 0;
    double noise_var = 1.0;
    std::uint64_t seed = 1;
    long trials = 100000;
    std::string p_grid;
    std::vector<double> bounds = {0.1, 10.0};
    double tolerance = 1e-10;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file (flags override it)");
        app->add_option("--out", out, "output path prefix");
        app->add_option("--jobs", jobs, "worker threads (0 = AIN_SIM_JOBS or hardware)");
        app->add_option("--noise-var", noise_var, "noise variance (0 disables noise)");
        app->add_option("--seed", seed, "base seed");
        app->add_option("--trials", trials, "Monte-Carlo trials or symbols");
        app->add_option("--p-grid", p_grid, "power grid: dB list, or abs:... for absolute");
        app->add_option("--bounds", bounds, "channel magnitude bounds <min> <max>")
            ->expected(2);
        app->add_option("--tolerance", tolerance, "solver residual tolerance (multihop)");
    }

    // Config-file values fill in anything the command line left at defaults.
    void merge(const json& file, const CLI::App* app) {
        auto unset = [&](const char* name) { return app->count(name) == 0; };
        if (file.contains("out") && unset("--out")) out = file["out"].get<std::string>();
        if (file.contains("jobs") && unset("--jobs")) jobs = file["jobs"].get<int>();
        if (file.contains("noise_var") && unset("--noise-var")) {
            noise_var = file["noise_var"].get<double>();
        }
        if (file.contains("seed") && unset("--seed")) seed = file["seed"].get<std::uint64_t>();
        if (file.contains("trials") && unset("--trials")) trials = file["trials"].get<long>();
        if (file.contains("p_grid") && unset("--p-grid")) {
            p_grid = file["p_grid"].get<std::string>();
        }
        if (file.contains("bounds") && unset("--bounds")) {
            bounds = file["bounds"].get<std::vector<double>>();
        }
    }

    MagnitudeBounds magnitude_bounds() const {
        if (bounds.size() != 2) throw config_error("--bounds needs exactly two values");
        return {bounds[0], bounds[1]};
    }
};

int cmd_simulate(const CommonArgs& common, const std::string& scheme, int extension, int seeds) {
    DofExperimentConfig config;
    config.scheme = scheme;
    config.extension = extension;
    config.seed_count = seeds;
    config.base_seed = common.seed;
    config.symbols = common.trials;
    config.noise_var = common.noise_var;
    config.bounds = common.magnitude_bounds();
    config.jobs = common.jobs;
    if (!common.p_grid.empty()) config.p_grid_db = parse_grid_db(common.p_grid);

    const auto result = run_dof_experiment(config);
    const std::string hash = hash_hex(fnv1a_hash(config.canonical()));

    std::ostringstream csv;
    csv << "# ainsim v" << kVersion << " config_hash=" << hash << "\n";
    csv << "scheme,m,p_db,stream,sinr_db,sum_rate,leakage\n";
    for (std::size_t p = 0; p < result.p_grid_db.size(); ++p) {
        const auto row = static_cast<Eigen::Index>(p);
        for (Eigen::Index s = 0; s < result.sinr1_avg.cols() + result.sinr2_avg.cols(); ++s) {
            const bool first = s < result.sinr1_avg.cols();
            const double sinr = first ? result.sinr1_avg(row, s)
                                      : result.sinr2_avg(row, s - result.sinr1_avg.cols());
            csv << config.scheme << "," << config.extension << "," << result.p_grid_db[p] << ","
                << s << "," << 10.0 * std::log10(std::max(sinr, 1e-300)) << ","
                << result.avg_rates[p] << "," << result.max_leakage << "\n";
        }
    }

    json summary{{"scheme", config.scheme},
                 {"m", config.extension},
                 {"seeds", config.seed_count},
                 {"p_grid_db", result.p_grid_db},
                 {"sum_rates", result.avg_rates},
                 {"dof_slope", result.dof_slope},
                 {"max_leakage", result.max_leakage},
                 {"max_residual_ratio", result.max_residual_ratio},
                 {"config_hash", hash}};

    const std::string prefix = common.out.empty() ? "simulate" : common.out;
    write_file(prefix + ".csv", csv.str());
    write_file(prefix + ".json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_rational(const CommonArgs& common, int extension, double gamma, double epsilon) {
    auto grid_db = common.p_grid.empty() ? std::vector<double>{40.0, 60.0, 80.0, 100.0}
                                         : parse_grid_db(common.p_grid);
    const auto channel =
        sample_channel(common.seed, 2, 1, ChannelModel::constant_real, common.magnitude_bounds());
    Eigen::Matrix2d first_hop, second_hop;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            first_hop(r, c) = channel.at(0, r, c, 0).real();
            second_hop(r, c) = channel.at(1, r, c, 0).real();
        }
    }
    const auto directions = monomial_directions(first_hop, second_hop, extension);

    std::ostringstream canonical;
    canonical << "rational;m=" << extension << ";gamma=" << gamma << ";eps=" << epsilon
              << ";seed=" << common.seed << ";trials=" << common.trials
              << ";noise=" << common.noise_var;
    for (double db : grid_db) canonical << ";" << db;
    const std::string hash = hash_hex(fnv1a_hash(canonical.str()));

    std::ostringstream csv;
    csv << "# ainsim v" << kVersion << " config_hash=" << hash << "\n";
    csv << "p,m,gamma,epsilon,relay1_ser,relay2_ser,d1_ser,d2_ser,rate_lb_1,rate_lb_2\n";
    for (double db : grid_db) {
        const double power = db_to_power(db);
        const auto config = build_config(extension, gamma, epsilon, power, directions);
        const auto batch = run_rational_batch(
            channel, config, common.trials, common.seed ^ 0x5eed,
            common.noise_var > 0.0 ? std::sqrt(common.noise_var) : 0.0);
        csv << power << "," << extension << "," << gamma << "," << epsilon << ","
            << batch.relay_ser[0] << "," << batch.relay_ser[1] << "," << batch.dest_ser[0] << ","
            << batch.dest_ser[1] << "," << batch.rate_lower[0] << "," << batch.rate_lower[1]
            << "\n";
    }
    const std::string prefix = common.out.empty() ? "rational" : common.out;
    write_file(prefix + ".csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_multihop(const CommonArgs& common, int hops, int seeds, bool reduce, int extension) {
    json report;
    report["hops"] = hops;
    const std::string prefix = common.out.empty() ? "multihop" : common.out;

    if (hops == 2) {
        const auto stats =
            two_hop_gap_stats(seeds, common.seed, common.magnitude_bounds(), common.jobs);
        report["seeds"] = stats.seeds;
        report["min_ratio_gap"] = stats.min_gap;
        report["mean_ratio_gap"] = stats.mean_gap;
        write_file(prefix + ".json", report.dump(2) + "\n");
        std::cout << report.dump(2) << "\n";
        return 0;
    }

    if (reduce) {
        auto grid_db = common.p_grid.empty() ? std::vector<double>{30.0, 40.0, 50.0, 60.0}
                                             : parse_grid_db(common.p_grid);
        const auto result =
            run_reduced_experiment(hops, extension, common.seed, common.magnitude_bounds(),
                                   grid_db, common.trials, common.noise_var);
        report["reduce"] = true;
        report["m"] = extension;
        report["dof_slope"] = result.dof_slope;
        report["residual_ratio"] = result.residual_ratio;
        report["leakage"] = result.leakage;
        report["sum_rates"] = result.rates;
        write_file(prefix + ".json", report.dump(2) + "\n");
        std::cout << report.dump(2) << "\n";
        return 0;
    }

    const auto stats = gain_solve_stats(hops, seeds, common.seed, common.magnitude_bounds(),
                                        common.jobs, common.tolerance);
    report["seeds"] = stats.seeds;
    report["converged"] = stats.converged;
    report["mean_iterations"] = stats.mean_iterations;
    json runs = json::array();
    for (const auto& solve : stats.reports) {
        json gains = json::array();
        for (const auto& layer : solve.gains.layers) {
            gains.push_back({layer[0].real(), layer[0].imag()});
            gains.push_back({layer[1].real(), layer[1].imag()});
        }
        runs.push_back({{"hops", hops},
                        {"converged", solve.converged},
                        {"residual", solve.residual},
                        {"diag_min", solve.diag_min},
                        {"iters", solve.iterations},
                        {"gains", gains}});
    }
    report["runs"] = runs;
    write_file(prefix + ".json", report.dump(2) + "\n");
    std::cout << "converged " << stats.converged << "/" << stats.seeds << "\n";
    if (stats.converged * 20 < stats.seeds * 19) {  // more than 5% failures
        std::cerr << "solver convergence below the allowed fraction\n";
        return 3;
    }
    return 0;
}

int cmd_check_phases(const CommonArgs& common, const std::string& channel_path) {
    Eigen::Matrix2cd first_hop, second_hop;
    if (!channel_path.empty()) {
        std::ifstream in(channel_path);
        if (!in) throw config_error("cannot open channel file: " + channel_path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const auto channel = channel_from_json(buffer.str());
        first_hop = channel.hop_matrix(0, 0);
        second_hop = channel.hop_matrix(1, 0);
    } else {
        const auto channel = sample_channel(common.seed, 2, 1, ChannelModel::constant_complex,
                                            common.magnitude_bounds());
        first_hop = channel.hop_matrix(0, 0);
        second_hop = channel.hop_matrix(1, 0);
    }

    auto grid_db = common.p_grid.empty() ? std::vector<double>{30.0, 40.0, 50.0, 60.0}
                                         : parse_grid_db(common.p_grid);
    const auto result = run_rotation_experiment(first_hop, second_hop, grid_db, common.trials,
                                                common.seed ^ 0x9999);
    json report{{"first_hop_ok", result.phases.first_hop_ok},
                {"second_hop_ok", result.phases.second_hop_ok},
                {"margins", {result.phases.first_hop_margin, result.phases.second_hop_margin}},
                {"near_degenerate",
                 !result.phases.first_hop_ok || !result.phases.second_hop_ok}};
    if (result.pipeline_ran) {
        report["dof_slope"] = result.dof_slope;
        report["sum_rates"] = result.rates;
    }
    const std::string prefix = common.out.empty() ? "check_phases" : common.out;
    write_file(prefix + ".json", report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_dump_channel(const CommonArgs& common, int hops, int extension,
                     const std::string& model_name) {
    const auto model = channel_model_from_string(model_name);
    const auto channel =
        sample_channel(common.seed, hops, extension, model, common.magnitude_bounds());
    const std::string text = channel_to_json(channel);
    if (common.out.empty()) {
        std::cout << text << "\n";
    } else {
        write_file(common.out, text + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level simulator for aligned interference neutralization on the "
                 "2x2x2 two-hop interference network"};
    app.require_subcommand(1);

    CommonArgs common;

    auto* simulate = app.add_subcommand("simulate", "aligned-scheme DoF sweep");
    std::string scheme = "aligned";
    int extension = 2;
    int seeds = 10;
    simulate->add_option("--scheme", scheme, "aligned or tdma");
    simulate->add_option("--m", extension, "extension length M");
    simulate->add_option("--seeds", seeds, "number of channel seeds");
    common.attach(simulate);

    auto* rational = app.add_subcommand("rational", "constant real channel integer scheme");
    int rational_m = 2;
    double gamma = 1.0;
    double epsilon = 0.2;
    rational->add_option("--m", rational_m, "extension count M");
    rational->add_option("--gamma", gamma, "constellation scale");
    rational->add_option("--epsilon", epsilon, "rate backoff in (0,1)");
    common.attach(rational);

    auto* multihop = app.add_subcommand("multihop", "amplify-and-forward gain analysis");
    int hops = 3;
    int mh_seeds = 100;
    bool reduce = false;
    int mh_m = 2;
    multihop->add_option("--hops", hops, "hop count (>= 2)");
    multihop->add_option("--seeds", mh_seeds, "number of channel seeds");
    multihop->add_flag("--reduce", reduce, "fold extra hops and run the aligned pipeline");
    multihop->add_option("--m", mh_m, "extension for --reduce");
    common.attach(multihop);

    auto* phases = app.add_subcommand("check-phases", "constant-channel phase conditions");
    std::string channel_path;
    phases->add_option("--channel", channel_path, "channel JSON file");
    common.attach(phases);

    auto* dump = app.add_subcommand("dump-channel", "write a channel realization as JSON");
    int dump_hops = 2;
    int dump_m = 1;
    std::string model_name = "time_varying";
    dump->add_option("--hops", dump_hops, "hop count");
    dump->add_option("--m", dump_m, "slots per coefficient");
    dump->add_option("--model", model_name, "time_varying | constant_complex | constant_real");
    common.attach(dump);

    CLI11_PARSE(app, argc, argv);

    try {
        auto* active = app.get_subcommands().front();
        common.merge(load_config_file(common.config_path), active);
        if (active == simulate) return cmd_simulate(common, scheme, extension, seeds);
        if (active == rational) return cmd_rational(common, rational_m, gamma, epsilon);
        if (active == multihop) return cmd_multihop(common, hops, mh_seeds, reduce, mh_m);
        if (active == phases) return cmd_check_phases(common, channel_path);
        if (active == dump) return cmd_dump_channel(common, dump_hops, dump_m, model_name);
        return 2;
    } catch (const parameter_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
