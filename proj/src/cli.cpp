#include "bessim/cli.hpp"

#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bessim/errors.hpp"
#include "bessim/scenario.hpp"

namespace bessim {

namespace {

int report(const char* type, const std::string& message, int code,
           const std::string& family = "") {
    nlohmann::json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    if (!family.empty()) err["error"]["family"] = family;
    std::cerr << err.dump() << '\n';
    return code;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("--seed must be a nonnegative 64-bit integer, got '" + text + "'");
    return value;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Battery rental scheduling, degradation, and pricing toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seed_text;
    int jobs = 1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
        cmd->add_option("--seed", seed_text, "synthetic-data seed (overrides the config)");
        cmd->add_option("--jobs", jobs, "worker threads for sweeps")
            ->check(CLI::PositiveNumber);
        return cmd;
    };

    CLI::App* community = add_common(app.add_subcommand(
        "simulate-community", "Chain daily dispatch over the whole horizon"));
    CLI::App* market = add_common(
        app.add_subcommand("simulate-market", "Day-ahead arbitrage for the full fleet"));
    CLI::App* range = add_common(app.add_subcommand(
        "price-range", "Rental price bounds and the feasible region"));
    CLI::App* size = add_common(
        app.add_subcommand("size", "Optimal rented capacity and generation cosizing"));
    CLI::App* gen = add_common(
        app.add_subcommand("gen-data", "Emit seeded synthetic input CSVs"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        ScenarioConfig cfg = load_scenario(config_path);
        if (!seed_text.empty()) cfg.synth.seed = parse_seed(seed_text);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        cfg.validate();

        std::vector<std::filesystem::path> written;
        if (community->parsed())
            written = run_simulate_community(cfg, jobs);
        else if (market->parsed())
            written = run_simulate_market(cfg);
        else if (range->parsed())
            written = run_price_range(cfg, jobs);
        else if (size->parsed())
            written = run_size(cfg, jobs);
        else if (gen->parsed())
            written = run_gen_data(cfg);

        for (const auto& path : written) std::cout << path.string() << '\n';
        return 0;
    } catch (const MissingInputError& e) {
        return report("MissingInputError", e.what(), 2);
    } catch (const ConfigError& e) {
        return report("ConfigError", e.what(), 1);
    } catch (const LoadError& e) {
        return report("LoadError", e.what(), 1);
    } catch (const AlignmentError& e) {
        return report("AlignmentError", e.what(), 1);
    } catch (const InterpolationError& e) {
        return report("InterpolationError", e.what(), 1);
    } catch (const InfeasibleError& e) {
        return report("InfeasibleError", e.what(), 1, e.family);
    } catch (const SolverTimeoutError& e) {
        return report("SolverTimeoutError", e.what(), 1);
    } catch (const ValidationError& e) {
        return report("ValidationError", e.what(), 1);
    } catch (const Error& e) {
        return report("Error", e.what(), 1);
    } catch (const std::exception& e) {
        return report("InternalError", e.what(), 1);
    }
}

} // namespace bessim
