// bench: synthetic worlds, dialogue scripts and A/B runs.
#include "jobrec/bench/dialogue.hpp"
#include "jobrec/error.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace jobrec;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, sep);) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!(out << j.dump(2) << '\n')) throw Error(Errc::InvalidRecord, "cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic benchmark harness"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    bench::WorldConfig world_config;
    std::string out_dir = "world";
    auto* gen = app.add_subcommand("gen", "Generate a synthetic world");
    gen->add_option("--seed", seed);
    gen->add_option("--titles", world_config.titles)->check(CLI::PositiveNumber);
    gen->add_option("--users", world_config.users)->check(CLI::PositiveNumber);
    gen->add_option("--families", world_config.families)->check(CLI::Range(1, 8));
    gen->add_option("--out", out_dir);

    std::string world_dir = "world";
    std::size_t count = 200;
    double simple_fraction = 0.5;
    std::string scripts_path = "scripts.json";
    auto* scripts = app.add_subcommand("scripts", "Write dialogue scripts for a world");
    scripts->add_option("--world", world_dir)->required();
    scripts->add_option("--count", count)->check(CLI::PositiveNumber);
    scripts->add_option("--simple-fraction", simple_fraction)->check(CLI::Range(0.0, 1.0));
    scripts->add_option("--seed", seed);
    scripts->add_option("--out", scripts_path);

    std::string variants = "adapt,always_plan";
    std::string report_path = "report.json";
    std::string config_path;
    double per_call_ms = 2.0, per_input_token_ms = 0.01, per_token_ms = 0.25;
    bool crossed = false;
    auto* ab = app.add_subcommand("ab", "Run an A/B comparison of orchestrator variants");
    ab->add_option("--world", world_dir)->required();
    ab->add_option("--variants", variants, "comma-separated: adapt,always_plan,plan_execute,react_like,rag_like");
    ab->add_option("--scripts", scripts_path)->required();
    ab->add_option("--seed", seed);
    ab->add_option("--report", report_path);
    ab->add_option("--config", config_path, "service configuration JSON");
    ab->add_option("--stub-latency-ms", per_call_ms, "simulated model latency per call");
    ab->add_option("--stub-ms-per-input-token", per_input_token_ms, "simulated prefill latency per prompt token");
    ab->add_option("--stub-ms-per-token", per_token_ms, "simulated model latency per output token");
    ab->add_flag("--crossed", crossed, "run every script under every variant");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) {
            const auto world = bench::gen_world(seed, world_config);
            bench::save_world(world, out_dir);
            std::cout << "wrote " << out_dir << ": " << world.graph->node_count() << " nodes, "
                      << world.graph->edge_count() << " edges, " << world.clicks.records.size() << " impressions, "
                      << world.transitions.size() << " transitions\n";
        } else if (*scripts) {
            const auto world = bench::load_world(world_dir);
            write_json(bench::scripts_to_json(bench::make_scripts(world, count, simple_fraction, seed)), scripts_path);
            std::cout << "wrote " << count << " scripts to " << scripts_path << '\n';
        } else if (*ab) {
            const auto world = bench::load_world(world_dir);
            service::ServiceConfig base = config_path.empty() ? service::ServiceConfig{}
                                                              : service::ServiceConfig::load_file(config_path);
            if (config_path.empty()) base.stub_latency = {per_call_ms, per_input_token_ms, per_token_ms};
            // Repeated queries would hit the cache and hide the routing effect.
            base.cache_ttl_s = 0;
            std::vector<bench::VariantSpec> specs;
            for (const auto& name : split(variants, ',')) {
                auto c = base;
                c.variant = exec::parse_variant(name);
                specs.push_back({name, c});
            }
            const auto report = bench::run_ab(specs, world, bench::load_scripts(scripts_path), seed,
                                              crossed ? bench::Assignment::Crossed : bench::Assignment::Random);
            write_json(report.to_json(), report_path);
            for (const auto& v : report.variants) {
                std::printf("%-14s n=%-4zu rounds=%.2f latency mean=%.1fms p50=%.1fms p95=%.1fms hit@10=%.3f\n",
                            v.name.c_str(), v.n, v.mean_rounds, v.latency.mean, v.latency.p50, v.latency.p95, v.hit);
            }
            for (const auto& t : report.tests) {
                std::printf("%s vs %s: rounds p=%.4g, latency t=%.3f p=%.4g\n", t.a.c_str(), t.b.c_str(), t.rounds.p,
                            t.latency.t, t.latency.p);
            }
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
