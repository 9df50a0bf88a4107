// tune: fits scoring weights to a world's click log.
#include "jobrec/bench/world.hpp"
#include "jobrec/error.hpp"
#include "jobrec/tuning/ctr.hpp"
#include "jobrec/tuning/optimizer.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

using namespace jobrec;

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimisation of scoring weights against replayed click-through rate"};
    std::string world_dir = "world";
    std::size_t budget = 40;
    std::uint64_t seed = 1;
    std::size_t k = 3;
    double hi = 4.0;
    std::string out = "trials.json";
    app.add_option("--world", world_dir, "directory written by `bench gen`")->required();
    app.add_option("--budget", budget)->check(CLI::PositiveNumber);
    app.add_option("--seed", seed);
    app.add_option("--k", k, "top-k cutoff of the replay")->check(CLI::PositiveNumber);
    app.add_option("--hi", hi, "upper bound of every weight")->check(CLI::PositiveNumber);
    app.add_option("--out", out);
    CLI11_PARSE(app, argc, argv);

    try {
        const auto world = bench::load_world(world_dir);
        const auto data = world.replay();
        const auto space = tuning::ParamSpace::scoring_weights(hi);
        const double baseline = tuning::estimate_ctr(tools::ScoringWeights{}, data, k);
        const auto result = tuning::optimize(
            [&](const tuning::Params& x) { return tuning::estimate_ctr(tuning::weights_from_params(x), data, k); },
            space, budget, seed);
        auto j = tuning::to_json(result, space);
        j["default_ctr"] = baseline;
        j["k"] = k;
        std::ofstream(out) << j.dump(2) << '\n';
        std::printf("default weights CTR@%zu = %.4f\nbest CTR@%zu = %.4f after %zu trials (%zu failed)\n", k, baseline, k,
                    result.best_objective, result.trials.size(), result.failed.size());
        for (std::size_t i = 0; i < space.size(); ++i) std::printf("  %-15s %.4f\n", space.names[i].c_str(), result.best[i]);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
