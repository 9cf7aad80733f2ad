#include "qrsim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "qrsim/adversary.hpp"
#include "qrsim/filtering.hpp"
#include "qrsim/purification.hpp"
#include "qrsim/schur.hpp"
#include "qrsim/trapdoor.hpp"
#include "qrsim/verification.hpp"

namespace qrsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool valid_hex(const std::string& s, std::size_t len) {
    if (s.size() != len) return false;
    for (char c : s)
        if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

struct ParamSchema {
    std::string name;
    bool required = true;
    std::string default_value;
    std::string range_doc;
};

std::vector<ParamSchema> schema_for(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Purify:
            return {{"eta", true, "", "(0,1]"}, {"rounds", true, "", "0..64"}};
        case ScenarioKind::Filter:
            return {{"input", false, "jam", "jam|schmidt"},
                    {"eta", false, "0.3", "[0,1]"},
                    {"schmidt_p", false, "0.8", "(0.5,1)"},
                    {"rounds", true, "", "1..64"},
                    {"side", false, "alice", "alice|both"},
                    {"eps_deg", false, "1e-9", "(0,1)"}};
        case ScenarioKind::Tomography:
            return {{"ensemble", true, "", "haar|binary_phase|stabilizer"},
                    {"d", true, "", "power of 2 for binary_phase; 2 for stabilizer"},
                    {"k", true, "", "d^k <= 64"},
                    {"samples", false, "4000", ">= 1"},
                    {"trials", false, "10000", ">= 1"}};
        case ScenarioKind::Trapdoor:
            return {{"pairs", true, "", "1..4096"},
                    {"threshold", false, "", "(0.75, cos^2(pi/8))"},
                    {"adversary", true, "", "separable|aligned|singlet|jam:<eta>"},
                    {"trials", false, "200", ">= 1"}};
        case ScenarioKind::Schur:
            return {{"pair_dim", true, "", ">= 2"},
                    {"copies", true, "", "1..6 with d^k <= 4096"},
                    {"buffer", true, "", "iid|global"},
                    {"ensemble", false, "haar", "haar|binary_phase|stabilizer"},
                    {"samples", false, "2000", ">= 1"}};
    }
    return {};
}

std::optional<ScenarioKind> kind_from_string(const std::string& s) {
    if (s == "purify") return ScenarioKind::Purify;
    if (s == "filter") return ScenarioKind::Filter;
    if (s == "tomography") return ScenarioKind::Tomography;
    if (s == "trapdoor") return ScenarioKind::Trapdoor;
    if (s == "schur") return ScenarioKind::Schur;
    return std::nullopt;
}

class ParamReader {
public:
    ParamReader(const std::map<std::string, std::string>& params,
                std::vector<std::string>& errors)
        : params_(params), errors_(errors) {}

    double number(const std::string& key, double lo, double hi, bool lo_open = false,
                  bool hi_open = false) {
        auto it = params_.find(key);
        if (it == params_.end()) return lo;  // missing keys reported by the schema pass
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            const bool below = lo_open ? v <= lo : v < lo;
            const bool above = hi_open ? v >= hi : v > hi;
            if (below || above || std::isnan(v)) {
                errors_.push_back("parameter '" + key + "' = " + it->second +
                                  " outside range " + (lo_open ? "(" : "[") +
                                  format_double(lo) + ", " + format_double(hi) +
                                  (hi_open ? ")" : "]"));
                return lo;
            }
            return v;
        } catch (const std::exception&) {
            errors_.push_back("parameter '" + key + "' is not a number: " + it->second);
            return lo;
        }
    }

    long integer(const std::string& key, long lo, long hi) {
        auto it = params_.find(key);
        if (it == params_.end()) return lo;
        try {
            std::size_t pos = 0;
            const long v = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            if (v < lo || v > hi) {
                errors_.push_back("parameter '" + key + "' = " + it->second +
                                  " outside range " + std::to_string(lo) + ".." +
                                  std::to_string(hi));
                return lo;
            }
            return v;
        } catch (const std::exception&) {
            errors_.push_back("parameter '" + key + "' is not an integer: " + it->second);
            return lo;
        }
    }

    std::string choice(const std::string& key, const std::vector<std::string>& allowed) {
        auto it = params_.find(key);
        if (it == params_.end()) return allowed.front();
        for (const auto& a : allowed)
            if (it->second == a) return it->second;
        // Free-form values (jam:<eta>) validated by the consumer.
        if (key == "adversary" && it->second.rfind("jam:", 0) == 0) return it->second;
        std::string doc;
        for (const auto& a : allowed) doc += (doc.empty() ? "" : "|") + a;
        errors_.push_back("parameter '" + key + "' = " + it->second + " not one of " + doc);
        return allowed.front();
    }

    std::string raw(const std::string& key) const {
        auto it = params_.find(key);
        return it == params_.end() ? "" : it->second;
    }

private:
    const std::map<std::string, std::string>& params_;
    std::vector<std::string>& errors_;
};

void validate_kind_parameters(ScenarioConfig& cfg, std::vector<std::string>& errors) {
    const auto schema = schema_for(cfg.kind);
    for (const auto& p : schema) {
        if (!cfg.parameters.count(p.name)) {
            if (p.required)
                errors.push_back("missing required parameter '" + p.name + "' (range " +
                                 p.range_doc + ")");
            else if (!p.default_value.empty())
                cfg.parameters[p.name] = p.default_value;
        }
    }
    for (const auto& [key, value] : cfg.parameters) {
        bool known = false;
        for (const auto& p : schema) known |= p.name == key;
        if (!known)
            errors.push_back("unknown parameter '" + key + "' for kind " + to_string(cfg.kind));
    }

    ParamReader r(cfg.parameters, errors);
    switch (cfg.kind) {
        case ScenarioKind::Purify:
            r.number("eta", 0.0, 1.0, /*lo_open=*/true);
            r.integer("rounds", 0, 64);
            break;
        case ScenarioKind::Filter:
            r.choice("input", {"jam", "schmidt"});
            r.number("eta", 0.0, 1.0);
            r.number("schmidt_p", 0.5, 1.0, true, true);
            r.integer("rounds", 1, 64);
            r.choice("side", {"alice", "both"});
            r.number("eps_deg", 0.0, 1.0, true, true);
            break;
        case ScenarioKind::Tomography: {
            const std::string ens = r.choice("ensemble", {"haar", "binary_phase", "stabilizer"});
            const long d = r.integer("d", 2, 64);
            const long k = r.integer("k", 1, 6);
            if (std::pow(static_cast<double>(d), static_cast<double>(k)) > 64.0)
                errors.push_back("parameters d, k violate the moment buffer cap d^k <= 64");
            if (ens == "binary_phase" && (d & (d - 1)) != 0)
                errors.push_back("parameter 'd' must be a power of 2 for binary_phase");
            if (ens == "stabilizer" && d != 2)
                errors.push_back("parameter 'd' must be 2 for the stabilizer ensemble");
            r.integer("samples", 1, 100000000);
            r.integer("trials", 1, 100000000);
            break;
        }
        case ScenarioKind::Trapdoor: {
            r.integer("pairs", 1, 4096);
            if (cfg.parameters.count("threshold")) {
                const double hi = std::cos(3.14159265358979323846 / 8.0);
                r.number("threshold", 0.75, hi * hi, true, true);
            }
            const std::string adv =
                r.choice("adversary", {"separable", "aligned", "singlet"});
            if (adv.rfind("jam:", 0) == 0) {
                try {
                    const double eta = std::stod(adv.substr(4));
                    if (eta < 0.0 || eta > 1.0)
                        errors.push_back("adversary jam eta outside [0,1]");
                } catch (const std::exception&) {
                    errors.push_back("adversary '" + adv + "' has a malformed eta");
                }
            }
            r.integer("trials", 1, 1000000);
            break;
        }
        case ScenarioKind::Schur: {
            const long d = r.integer("pair_dim", 2, 64);
            const long k = r.integer("copies", 1, 6);
            if (std::pow(static_cast<double>(d), static_cast<double>(k)) >
                static_cast<double>(kMaxDim))
                errors.push_back("parameters pair_dim, copies violate the cap d^k <= " +
                                 std::to_string(kMaxDim));
            r.choice("buffer", {"iid", "global"});
            r.choice("ensemble", {"haar", "binary_phase", "stabilizer"});
            r.integer("samples", 1, 10000000);
            break;
        }
    }
}

EnsembleSpec ensemble_from_name(const std::string& name, int d) {
    EnsembleSpec spec;
    spec.d = d;
    if (name == "haar")
        spec.kind = EnsembleKind::Haar;
    else if (name == "binary_phase")
        spec.kind = EnsembleKind::BinaryPhase;
    else if (name == "stabilizer")
        spec.kind = EnsembleKind::SingleQubitStabilizer;
    else
        throw std::invalid_argument("unknown ensemble '" + name + "'");
    return spec;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Purify: return "purify";
        case ScenarioKind::Filter: return "filter";
        case ScenarioKind::Tomography: return "tomography";
        case ScenarioKind::Trapdoor: return "trapdoor";
        case ScenarioKind::Schur: return "schur";
    }
    return "?";
}

std::uint64_t ScenarioConfig::master_seed() const {
    return std::stoull(master_seed_hex, nullptr, 16);
}

ParseResult parse_scenario(const std::string& text) {
    ParseResult out;
    ScenarioConfig& cfg = out.config;
    cfg.master_seed_hex = kDefaultSeedHex;

    bool in_parameters = false;
    bool kind_seen = false;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t == "[parameters]") {
            in_parameters = true;
            continue;
        }
        if (t.front() == '[') {
            out.errors.push_back("line " + std::to_string(line_no) + ": unknown section " + t);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            out.errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) {
            out.errors.push_back("line " + std::to_string(line_no) + ": empty key or value");
            continue;
        }

        if (in_parameters) {
            if (cfg.parameters.count(key))
                out.errors.push_back("duplicate parameter '" + key + "'");
            cfg.parameters[key] = value;
        } else if (key == "kind") {
            const auto k = kind_from_string(value);
            if (!k)
                out.errors.push_back("unknown kind '" + value +
                                     "' (purify|filter|tomography|trapdoor|schur)");
            else {
                cfg.kind = *k;
                kind_seen = true;
            }
        } else if (key == "seed") {
            if (!valid_hex(value, 16))
                out.errors.push_back("seed must be 16 hex characters, got '" + value + "'");
            else
                cfg.master_seed_hex = value;
        } else if (key == "output") {
            cfg.output_path = value;
        } else {
            out.errors.push_back("unknown key '" + key + "'");
        }
    }

    if (!kind_seen) {
        out.errors.push_back("missing required key 'kind'");
        return out;
    }
    validate_kind_parameters(cfg, out.errors);
    if (cfg.output_path.empty()) cfg.output_path = to_string(cfg.kind) + ".csv";
    return out;
}

namespace {

RunResult run_purify(const ScenarioConfig& cfg) {
    const double eta = std::stod(cfg.parameters.at("eta"));
    const int rounds = std::stoi(cfg.parameters.at("rounds"));
    const PurificationTrajectory traj = run_divergence(eta, rounds);

    RunResult out;
    out.columns = {"round", "x", "y", "z", "fidelity", "p_succ"};
    for (const RoundRecord& r : traj.rounds)
        out.rows.push_back({std::to_string(r.round), format_double(r.coords.x),
                            format_double(r.coords.y), format_double(r.coords.z),
                            format_double(r.fidelity), format_double(r.p_succ)});
    return out;
}

RunResult run_filter(const ScenarioConfig& cfg) {
    const std::string input = cfg.parameters.at("input");
    const int rounds = std::stoi(cfg.parameters.at("rounds"));
    const double eps_deg = std::stod(cfg.parameters.at("eps_deg"));
    const FilterSide side =
        cfg.parameters.at("side") == "both" ? FilterSide::Both : FilterSide::AliceOnly;

    DensityMatrix rho0 = [&] {
        if (input == "schmidt") {
            const double p = std::stod(cfg.parameters.at("schmidt_p"));
            CVector v = CVector::Zero(4);
            v(0) = std::sqrt(p);
            v(3) = std::sqrt(1.0 - p);
            return DensityMatrix::from_pure(PureState{v});
        }
        const double eta = std::stod(cfg.parameters.at("eta"));
        // Filtering acts on the state as the computationally bounded node
        // perceives it: pseudoentangled marginals look exactly mixed.
        return blind_jamming_state(eta);
    }();

    const FilteringTrajectory traj = run_filtering(rho0, rounds, side, eps_deg);

    RunResult out;
    out.columns = {"round", "p_succ", "fidelity", "lambda0_A", "lambda0_B", "stagnated"};
    for (const FilterRoundRecord& r : traj.rounds)
        out.rows.push_back({std::to_string(r.round), format_double(r.p_succ),
                            format_double(fidelity_to_pure(r.state, phi_plus())),
                            format_double(r.lambda0_alice), format_double(r.lambda0_bob),
                            traj.stagnated && r.round == traj.stagnation_round ? "1" : "0"});
    return out;
}

RunResult run_tomography(const ScenarioConfig& cfg) {
    const std::string name = cfg.parameters.at("ensemble");
    const int d = std::stoi(cfg.parameters.at("d"));
    const int k = std::stoi(cfg.parameters.at("k"));
    const std::int64_t samples = std::stoll(cfg.parameters.at("samples"));
    const std::int64_t trials = std::stoll(cfg.parameters.at("trials"));

    const EnsembleSpec spec = ensemble_from_name(name, d);
    const Rng rng(cfg.master_seed());
    const KeystreamSeed key = KeystreamSeed::derive(cfg.master_seed());
    const BlindnessReport rep = blindness_experiment(spec, k, samples, trials, key, rng);

    RunResult out;
    out.columns = {"ensemble", "d", "k", "delta", "p_detect_bound", "empirical_accuracy",
                   "samples"};
    out.rows.push_back({name, std::to_string(d), std::to_string(k),
                        format_double(rep.bound.delta), format_double(rep.bound.p_detect),
                        format_double(rep.empirical_accuracy), std::to_string(trials)});
    out.substream_labels = {"moment-sample", "blindness-trial"};
    return out;
}

RunResult run_trapdoor(const ScenarioConfig& cfg) {
    const int pairs = std::stoi(cfg.parameters.at("pairs"));
    const double threshold = cfg.parameters.count("threshold")
                                 ? std::stod(cfg.parameters.at("threshold"))
                                 : default_chsh_threshold();
    const std::string adv_name = cfg.parameters.at("adversary");
    const std::int64_t trials = std::stoll(cfg.parameters.at("trials"));

    const DensityMatrix adversary = trapdoor_adversary(adv_name);
    const Rng rng(cfg.master_seed());
    const KeystreamSeed key = KeystreamSeed::derive(cfg.master_seed());

    RunResult out;
    out.columns = {"trial", "wins", "k", "win_rate", "accepted", "mode"};
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng sub = rng.substream("trapdoor-real", static_cast<std::uint64_t>(t));
        const KeystreamSeed game_key =
            KeystreamSeed::derive(keystream_word(key, "game-key", static_cast<std::uint64_t>(t)));
        const GameVerdict v = trapdoor_game(game_key, pairs, adversary, threshold, sub);
        out.rows.push_back({std::to_string(t), std::to_string(v.wins), std::to_string(v.rounds),
                            format_double(v.win_rate), v.accepted ? "1" : "0", "real"});
    }
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng sub = rng.substream("trapdoor-ideal", static_cast<std::uint64_t>(t));
        const GameVerdict v = trapdoor_game_ideal(pairs, adversary, threshold, sub);
        out.rows.push_back({std::to_string(t), std::to_string(v.wins), std::to_string(v.rounds),
                            format_double(v.win_rate), v.accepted ? "1" : "0", "ideal"});
    }
    out.substream_labels = {"trapdoor-real", "trapdoor-ideal"};
    return out;
}

RunResult run_schur(const ScenarioConfig& cfg) {
    const int d = std::stoi(cfg.parameters.at("pair_dim"));
    const int k = std::stoi(cfg.parameters.at("copies"));
    const std::string buffer = cfg.parameters.at("buffer");
    const std::string ensemble = cfg.parameters.at("ensemble");
    const std::int64_t samples = std::stoll(cfg.parameters.at("samples"));

    BufferModel model;
    model.mode = buffer == "global" ? BufferMode::GlobalPseudorandom : BufferMode::IIDCopies;
    model.copies = k;
    model.per_copy_dim = d;

    const EnsembleSpec spec = ensemble_from_name(ensemble, d);
    const Rng rng(cfg.master_seed());
    const KeystreamSeed key = KeystreamSeed::derive(cfg.master_seed());
    const SchurVerdictStats stats = schur_filter_game(model, spec, samples, key, rng);

    RunResult out;
    out.columns = {"d", "k", "buffer_model", "accept_mean", "accept_stderr", "dsym_ratio",
                   "inv_kfact"};
    out.rows.push_back({std::to_string(d), std::to_string(k), buffer,
                        format_double(stats.accept_prob), format_double(stats.accept_stderr),
                        format_double(stats.dsym_ratio),
                        format_double(stats.inv_k_factorial)});
    out.substream_labels = {"schur-sample"};
    return out;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    switch (config.kind) {
        case ScenarioKind::Purify: return run_purify(config);
        case ScenarioKind::Filter: return run_filter(config);
        case ScenarioKind::Tomography: return run_tomography(config);
        case ScenarioKind::Trapdoor: return run_trapdoor(config);
        case ScenarioKind::Schur: return run_schur(config);
    }
    throw std::logic_error("run_scenario: unreachable");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_csv(const RunResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < result.columns.size(); ++i)
        out << (i ? "," : "") << result.columns[i];
    out << "\n";
    for (const auto& row : result.rows) {
        if (row.size() != result.columns.size())
            throw std::runtime_error("emit_csv: heterogeneous row width");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

void emit_manifest(const ScenarioConfig& config, const RunResult& result,
                   double wall_seconds, const std::string& csv_path) {
    nlohmann::json j;
    j["artifact_version"] = kArtifactVersion;
    j["scenario"]["kind"] = to_string(config.kind);
    j["scenario"]["seed"] = config.master_seed_hex;
    j["scenario"]["output"] = config.output_path;
    j["scenario"]["parameters"] = config.parameters;
    j["substream_labels"] = result.substream_labels;
    j["wall_clock_seconds"] = wall_seconds;
    j["row_count"] = result.rows.size();

    // The trapdoor keystream is derived from the master seed and must never
    // appear verbatim in any run output.
    const std::string keystream_hex = KeystreamSeed::derive(config.master_seed()).to_hex();
    const std::string body = j.dump(2);
    if (body.find(keystream_hex) != std::string::npos)
        throw std::runtime_error("emit_manifest: keystream bytes leaked into the manifest");
    for (const auto& row : result.rows)
        for (const auto& cell : row)
            if (cell.find(keystream_hex) != std::string::npos)
                throw std::runtime_error("emit_manifest: keystream bytes leaked into the CSV");

    std::ofstream out(csv_path + ".manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("emit_manifest: cannot open manifest for writing");
    out << body << "\n";
}

}  // namespace qrsim
