#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qrsim/qcore.hpp"
#include "qrsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitExperiment = 3;

std::string default_out_dir() {
    const char* env = std::getenv("QRSIM_OUT_DIR");
    return env ? std::string(env) : std::string();
}

std::string resolve_output(const std::string& path) {
    const std::string dir = default_out_dir();
    if (dir.empty() || path.find('/') != std::string::npos) return path;
    return dir + "/" + path;
}

int execute(qrsim::ScenarioConfig config) {
    try {
        const auto start = std::chrono::steady_clock::now();
        const qrsim::RunResult result = qrsim::run_scenario(config);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::string path = resolve_output(config.output_path);
        qrsim::emit_csv(result, path);
        qrsim::emit_manifest(config, result, secs, path);
        std::cout << "wrote " << result.rows.size() << " rows to " << path << "\n";
        return kExitOk;
    } catch (const qrsim::ExperimentFailure& e) {
        std::cerr << "experiment failure: " << e.what() << "\n";
        return kExitExperiment;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

// Build a config document from flag values and reuse the scenario validator,
// so direct subcommands and config files enforce identical preconditions.
int run_from_kv(const std::string& kind, const std::string& seed, const std::string& out,
                const std::vector<std::pair<std::string, std::string>>& params) {
    std::ostringstream doc;
    doc << "kind = " << kind << "\n";
    if (!seed.empty()) doc << "seed = " << seed << "\n";
    if (!out.empty()) doc << "output = " << out << "\n";
    doc << "[parameters]\n";
    for (const auto& [k, v] : params)
        if (!v.empty()) doc << k << " = " << v << "\n";

    const qrsim::ParseResult parsed = qrsim::parse_scenario(doc.str());
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
        return kExitValidation;
    }
    return execute(parsed.config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial quantum-repeater protocol laboratory"};
    app.require_subcommand(1);

    // run --config <file>
    std::string config_path, seed_override, out_override;
    auto* run = app.add_subcommand("run", "Run a scenario from a config file");
    run->add_option("--config", config_path, "Scenario config file")->required();
    run->add_option("--seed", seed_override, "Master seed (16 hex chars)");
    run->add_option("--out", out_override, "Output CSV path");

    struct {
        std::string seed, out;
        std::string eta = "0.1", rounds = "12";
    } purify;
    auto* p = app.add_subcommand("purify", "BBPSSW divergence experiment");
    p->add_option("--eta", purify.eta, "Jamming weight (0,1]");
    p->add_option("--rounds", purify.rounds, "Purification rounds (0..64)");
    p->add_option("--seed", purify.seed);
    p->add_option("--out", purify.out);

    struct {
        std::string seed, out;
        std::string input = "jam", eta = "0.3", schmidt_p = "0.8", rounds = "8",
                    side = "alice", eps_deg = "1e-9";
    } filter;
    auto* f = app.add_subcommand("filter", "Local filtering stagnation experiment");
    f->add_option("--input", filter.input, "jam|schmidt");
    f->add_option("--eta", filter.eta, "Jamming weight for input=jam");
    f->add_option("--schmidt-p", filter.schmidt_p, "|00> weight for input=schmidt");
    f->add_option("--rounds", filter.rounds);
    f->add_option("--side", filter.side, "alice|both");
    f->add_option("--eps-deg", filter.eps_deg, "Degeneracy snap width");
    f->add_option("--seed", filter.seed);
    f->add_option("--out", filter.out);

    struct {
        std::string seed, out;
        std::string ensemble = "stabilizer", d = "2", k = "2", samples = "4000",
                    trials = "10000";
    } tomo;
    auto* t = app.add_subcommand("tomography", "Tomographic blindness experiment");
    t->add_option("--ensemble", tomo.ensemble, "haar|binary_phase|stabilizer");
    t->add_option("--d", tomo.d, "Per-copy dimension");
    t->add_option("--k", tomo.k, "Copy count");
    t->add_option("--samples", tomo.samples, "Monte Carlo moment samples");
    t->add_option("--trials", tomo.trials, "Discrimination trials");
    t->add_option("--seed", tomo.seed);
    t->add_option("--out", tomo.out);

    struct {
        std::string seed, out;
        std::string pairs = "256", threshold, adversary = "separable", trials = "200";
    } trap;
    auto* g = app.add_subcommand("trapdoor", "Trapdoor CHSH verification games");
    g->add_option("--pairs", trap.pairs, "Buffer pairs per game");
    g->add_option("--threshold", trap.threshold,
                  "Acceptance win rate (default midpoint 0.8018)");
    g->add_option("--adversary", trap.adversary, "separable|aligned|singlet|jam:<eta>");
    g->add_option("--trials", trap.trials, "Games per mode");
    g->add_option("--seed", trap.seed);
    g->add_option("--out", trap.out);

    struct {
        std::string seed, out;
        std::string pair_dim = "4", copies = "2", buffer = "global", ensemble = "haar",
                    samples = "2000";
    } schur;
    auto* s = app.add_subcommand("schur", "Blind Schur-sampling filter game");
    s->add_option("--pair-dim", schur.pair_dim, "Per-copy dimension d");
    s->add_option("--copies", schur.copies, "Buffer copies k");
    s->add_option("--buffer", schur.buffer, "iid|global");
    s->add_option("--ensemble", schur.ensemble, "haar|binary_phase|stabilizer");
    s->add_option("--samples", schur.samples);
    s->add_option("--seed", schur.seed);
    s->add_option("--out", schur.out);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file '" << config_path << "'\n";
            return kExitValidation;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        qrsim::ParseResult parsed = qrsim::parse_scenario(buf.str());
        if (!parsed.ok()) {
            for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
            return kExitValidation;
        }
        if (!seed_override.empty()) {
            if (seed_override.size() != 16) {
                std::cerr << "error: --seed must be 16 hex characters\n";
                return kExitValidation;
            }
            parsed.config.master_seed_hex = seed_override;
        }
        if (!out_override.empty()) parsed.config.output_path = out_override;
        return execute(parsed.config);
    }
    if (p->parsed())
        return run_from_kv("purify", purify.seed, purify.out,
                           {{"eta", purify.eta}, {"rounds", purify.rounds}});
    if (f->parsed())
        return run_from_kv("filter", filter.seed, filter.out,
                           {{"input", filter.input},
                            {"eta", filter.eta},
                            {"schmidt_p", filter.schmidt_p},
                            {"rounds", filter.rounds},
                            {"side", filter.side},
                            {"eps_deg", filter.eps_deg}});
    if (t->parsed())
        return run_from_kv("tomography", tomo.seed, tomo.out,
                           {{"ensemble", tomo.ensemble},
                            {"d", tomo.d},
                            {"k", tomo.k},
                            {"samples", tomo.samples},
                            {"trials", tomo.trials}});
    if (g->parsed())
        return run_from_kv("trapdoor", trap.seed, trap.out,
                           {{"pairs", trap.pairs},
                            {"threshold", trap.threshold},
                            {"adversary", trap.adversary},
                            {"trials", trap.trials}});
    if (s->parsed())
        return run_from_kv("schur", schur.seed, schur.out,
                           {{"pair_dim", schur.pair_dim},
                            {"copies", schur.copies},
                            {"buffer", schur.buffer},
                            {"ensemble", schur.ensemble},
                            {"samples", schur.samples}});
    return kExitValidation;
}
