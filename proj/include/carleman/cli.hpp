#pragma once

// Command-line front end, exposed as a library so the test suite can drive
// it. Exit contract: 0 when all asserted checks pass, 1 when an asserted
// check fails, 2 on config/schema violations (with a field-path diagnostic,
// no partial artifacts), 3 on numerical aborts (with the condition
// estimate).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "carleman/conditions.hpp"
#include "carleman/experiments.hpp"
#include "carleman/serialize.hpp"
#include "carleman/version.hpp"

namespace carleman::cli {

inline constexpr const char* config_schema_id = "carleman-experiment-config/v1";

struct ConfigError : std::runtime_error {
    ConfigError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), path(std::move(field_path)) {}
    std::string path;
};

struct Invocation {
    std::string subcommand; // seq | qr | mat | decay | witness | sandwich
    std::string verb;       // analyze | expand | verify | run | sweep | gen | norms | profile
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides; // --set key=value
    std::string out_dir;    // --out, else $CARLEMAN_OUT_DIR, else "."
    std::string format = "json"; // json | csv
    Json options = Json::object(); // subcommand flags
};

namespace detail_cli {

inline Json parse_scalar(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        return Json(text); // plain string
    }
}

inline void set_by_path(Json& j, const std::string& dotted, const Json& value) {
    Json* cur = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot - start);
        if (key.empty()) throw ConfigError(dotted, "empty key in override path");
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

inline Json load_config(const Invocation& inv, bool required) {
    Json cfg = Json::object();
    if (!inv.config_path.empty()) {
        std::ifstream is(inv.config_path);
        if (!is) throw ConfigError("config", "cannot read file: " + inv.config_path);
        try {
            cfg = Json::parse(is);
        } catch (const Json::parse_error& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
    } else if (required && inv.overrides.empty()) {
        throw ConfigError("config", "no config file given (--config) and no --set overrides");
    }
    if (cfg.contains("schema") && cfg["schema"] != config_schema_id)
        throw ConfigError("schema", "expected \"" + std::string(config_schema_id) + "\"");
    for (const auto& [key, value] : inv.overrides)
        set_by_path(cfg, key, parse_scalar(value));
    return cfg;
}

inline double require_number(const Json& j, const std::string& path, double lo, double hi,
                             double fallback, bool has_fallback) {
    std::string p = path;
    for (auto& ch : p)
        if (ch == '.') ch = '/';
    const Json::json_pointer ptr("/" + p);
    if (!j.contains(ptr)) {
        if (has_fallback) return fallback;
        throw ConfigError(path, "missing required field");
    }
    const auto& v = j.at(ptr);
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (x < lo || x > hi)
        throw ConfigError(path, "value " + std::to_string(x) + " outside [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

inline long long require_int(const Json& j, const std::string& path, long long lo,
                             long long hi, long long fallback, bool has_fallback) {
    std::string p = path;
    for (auto& ch : p)
        if (ch == '.') ch = '/';
    const Json::json_pointer ptr("/" + p);
    if (!j.contains(ptr)) {
        if (has_fallback) return fallback;
        throw ConfigError(path, "missing required field");
    }
    const auto& v = j.at(ptr);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError(path, "value " + std::to_string(x) + " outside [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

inline std::string require_choice(const Json& j, const std::string& path,
                                  const std::vector<std::string>& choices,
                                  const std::string& fallback) {
    std::string p = path;
    for (auto& ch : p)
        if (ch == '.') ch = '/';
    const Json::json_pointer ptr("/" + p);
    if (!j.contains(ptr)) return fallback;
    const auto& v = j.at(ptr);
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    const auto s = v.get<std::string>();
    for (const auto& c : choices)
        if (s == c) return s;
    std::string all;
    for (const auto& c : choices) all += (all.empty() ? "" : ", ") + c;
    throw ConfigError(path, "got \"" + s + "\", expected one of: " + all);
}

inline BaseNorm base_from_string(const std::string& s) {
    if (s == "operator_l2") return BaseNorm::operator_l2;
    if (s == "schur_sum") return BaseNorm::schur_sum;
    return BaseNorm::baskakov;
}

inline ExperimentConfig parse_experiment_config(const Json& j) {
    ExperimentConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(
        require_int(j, "seed", 0, std::numeric_limits<long long>::max(), 1, true));
    cfg.d = static_cast<int>(require_int(j, "d", 1, 2, 1, true));
    cfg.window = static_cast<int>(require_int(j, "window", 8, 1 << 20, 0, false));
    cfg.gamma = require_number(j, "gamma", 1e-12, 1e12, 1.0, true);
    cfg.r_exp = require_number(j, "r_exp", 1e-12, 1.0, 1.0, true);
    if (j.contains("lambda")) {
        const auto& lam = j.at("lambda");
        if (lam.is_string()) {
            if (lam.get<std::string>() != "auto")
                throw ConfigError("lambda", "expected a number or \"auto\"");
            cfg.lambda_auto = true;
        } else if (lam.is_number()) {
            cfg.lambda_auto = false;
            cfg.lambda_shift = lam.get<double>();
        } else {
            throw ConfigError("lambda", "expected a number or \"auto\"");
        }
    }
    cfg.n_min = static_cast<int>(require_int(j, "fit.n_min", 0, 1 << 20, 5, true));
    cfg.n_max = static_cast<int>(require_int(j, "fit.n_max", 0, 1 << 20, 0, true));
    cfg.spec_base = base_from_string(require_choice(
        j, "norm.base", {"baskakov", "schur_sum", "operator_l2"}, "baskakov"));
    try {
        cfg.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError("config", e.what());
    }
    return cfg;
}

inline DefiningSequence sequence_from_config(const Json& j, const std::string& prefix) {
    const auto gen = require_choice(j, prefix + ".gen",
                                    {"constant", "gevrey", "power", "explicit"}, "gevrey");
    const auto k_max = static_cast<std::size_t>(
        require_int(j, prefix + ".k_max", 1, 100000, 64, true));
    if (gen == "constant") return make_constant(k_max);
    if (gen == "explicit") {
        std::string p = prefix + ".values";
        for (auto& ch : p)
            if (ch == '.') ch = '/';
        const Json::json_pointer ptr("/" + p);
        if (!j.contains(ptr)) throw ConfigError(prefix + ".values", "missing required field");
        try {
            return make_explicit(j.at(ptr).get<std::vector<double>>());
        } catch (const std::exception& e) {
            throw ConfigError(prefix + ".values", e.what());
        }
    }
    const double r = require_number(j, prefix + ".r", 1e-12, 1e6, 2.0, true);
    return (gen == "gevrey") ? make_factorial_power(r, k_max) : make_power(r, k_max);
}

inline std::filesystem::path resolve_out_dir(const Invocation& inv) {
    if (!inv.out_dir.empty()) return inv.out_dir;
    if (const char* env = std::getenv("CARLEMAN_OUT_DIR")) return env;
    return ".";
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
    write_text_file(path.string(), j.dump(2) + "\n");
}

inline Json report_header(const Json& resolved_config) {
    return Json{{"tool_version", version},
                {"rng_algorithm", rng_algorithm},
                {"config", resolved_config}};
}

// ---- subcommands -----------------------------------------------------

inline int run_seq_analyze(const Invocation& inv) {
    Json cfg = inv.options;
    for (const auto& [key, value] : inv.overrides) set_by_path(cfg, key, parse_scalar(value));
    const auto m = sequence_from_config(cfg, "sequence");
    const auto mc = log_convex_regularize(m);
    const auto grid = default_u_grid();
    const auto table = associated_function(m, grid);
    const auto dual = regularize_via_dual(m, grid);

    Json weights = Json::array();
    for (int l = 0; l <= 10; ++l) {
        Json row{{"l", l}};
        try {
            row["log_v"] = log_associated_weight(m, static_cast<double>(l));
            row["saturated"] = false;
        } catch (const SaturationError&) {
            row["log_v"] = nullptr;
            row["saturated"] = true;
        }
        weights.push_back(row);
    }

    Json conditions = Json::object();
    std::size_t j_max = std::min<std::size_t>(12, m.k_max());
    conditions["grs"] = to_json(check_grs(m));
    conditions["m2prime"] = to_json(check_m2prime(m));
    conditions["almost_increasing"] = to_json(check_almost_increasing(m, j_max));
    conditions["equivalence_with_regularization"] = to_json(sequences_equivalent(m, mc));

    Json out = report_header(cfg);
    out["sequence"] = to_json(m);
    out["regularized"] = to_json(mc);
    out["dual_regularization"] =
        Json{{"log_m", dual.seq.log_m},
             {"conclusive", dual.conclusive},
             {"max_log_gap", dual.max_log_gap}};
    out["associated_function"] = to_json(table);
    out["weight_table"] = weights;
    out["conditions"] = conditions;

    const auto dir = resolve_out_dir(inv);
    std::filesystem::create_directories(dir);
    write_json(dir / "seq_analysis.json", out);
    if (inv.format == "csv") {
        std::ostringstream t_csv;
        t_csv << "u,log_t,saturated\n";
        for (std::size_t i = 0; i < table.u_grid.size(); ++i)
            t_csv << table.u_grid[i] << ',' << table.log_t[i] << ','
                  << (table.saturated[i] ? 1 : 0) << '\n';
        write_text_file((dir / "t_table.csv").string(), t_csv.str());
        std::ostringstream s_csv;
        s_csv << "k,log_m,log_m_regularized\n";
        for (std::size_t k = 0; k <= m.k_max(); ++k)
            s_csv << k << ',' << m.log_m[k] << ',' << mc.log_m[k] << '\n';
        write_text_file((dir / "sequence.csv").string(), s_csv.str());
    }
    std::cout << "seq analyze: wrote " << (dir / "seq_analysis.json").string() << "\n";
    return 0;
}

inline DerivationWord word_from_options(const Json& options) {
    if (!options.contains("word")) throw ConfigError("word", "missing required field");
    DerivationWord w;
    w.d = options.contains("d") ? options.at("d").get<int>() : 1;
    for (const auto& v : options.at("word")) w.letters.push_back(v.get<int>());
    try {
        w.validate();
        if (w.letters.empty()) throw std::domain_error("word must be non-empty");
        if (w.letters.size() > 10) throw std::length_error("|word| > 10");
    } catch (const std::exception& e) {
        throw ConfigError("word", e.what());
    }
    return w;
}

inline int run_qr_expand(const Invocation& inv) {
    const auto w = word_from_options(inv.options);
    const auto e = expand_inverse_derivation(w);
    Json out = report_header(inv.options);
    out["expansion"] = to_json(e);
    out["term_count"] = e.terms.size();
    const auto dir = resolve_out_dir(inv);
    std::filesystem::create_directories(dir);
    write_json(dir / "expansion.json", out);
    std::cout << "qr expand: " << e.terms.size() << " terms, wrote "
              << (dir / "expansion.json").string() << "\n";
    return 0;
}

inline int run_qr_verify(const Invocation& inv) {
    const auto seeds = static_cast<std::size_t>(
        inv.options.contains("count") ? inv.options.at("count").get<int>() : 10);
    const int max_len =
        inv.options.contains("max_len") ? inv.options.at("max_len").get<int>() : 3;
    if (max_len < 1 || max_len > 6) throw ConfigError("max_len", "expected 1..6");

    double max_err = 0.0;
    std::size_t checked = 0;
    for (std::size_t s = 1; s <= seeds; ++s) {
        const int window = 1 + static_cast<int>(s % 2); // sides 3 and 5
        FiniteMatrix a(2, window);
        for (int r = 0; r < a.size(); ++r) {
            const auto pr = a.point(r);
            for (int c = 0; c < a.size(); ++c) {
                const auto pc = a.point(c);
                a(r, c) = rng::unit_disk(rng::point_pair_hash(s, pr.x, pr.y, pc.x, pc.y));
            }
            a(r, r) += 1.0 + a.size();
        }
        std::vector<DerivationWord> words;
        std::vector<std::vector<int>> frontier{{}};
        for (int len = 1; len <= max_len; ++len) {
            std::vector<std::vector<int>> next;
            for (const auto& base : frontier)
                for (int letter = 1; letter <= 2; ++letter) {
                    auto v = base;
                    v.push_back(letter);
                    next.push_back(v);
                    words.push_back(DerivationWord{v, 2});
                }
            frontier = std::move(next);
        }
        for (const auto& w : words) {
            const auto lhs = eval_expansion(expand_inverse_derivation(w), a);
            const auto rhs = direct_derivation(a, w);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < lhs.data().size(); ++i) {
                num += std::norm(lhs.data()[i] - rhs.data()[i]);
                den += std::norm(rhs.data()[i]);
            }
            max_err = std::max(max_err, den > 0 ? std::sqrt(num / den) : std::sqrt(num));
            ++checked;
        }
    }
    std::cout << "qr verify: " << checked << " expansions, max relative error " << max_err
              << "\n";
    return max_err <= 1e-9 ? 0 : 1;
}

inline int run_mat(const Invocation& inv) {
    const auto dir = resolve_out_dir(inv);
    if (inv.verb == "gen") {
        const auto cfg_json = load_config(inv, false);
        const auto cfg = parse_experiment_config(cfg_json);
        const auto gen = gen_decay_matrix(cfg);
        std::filesystem::create_directories(dir);
        Json out = report_header(cfg_json);
        out["lambda"] = gen.lambda;
        out["matrix"] = to_json(gen.a);
        write_json(dir / "matrix.json", out);
        std::cout << "mat gen: wrote " << (dir / "matrix.json").string() << "\n";
        return 0;
    }
    if (!inv.options.contains("in")) throw ConfigError("in", "missing input matrix path");
    const std::string in_path = inv.options.at("in").get<std::string>();
    std::ifstream is(in_path);
    if (!is) throw ConfigError("in", "cannot read file: " + in_path);
    Json mj;
    try {
        mj = Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw ConfigError("in", std::string("invalid JSON: ") + e.what());
    }
    FiniteMatrix a = matrix_from_json(mj.contains("matrix") ? mj.at("matrix") : mj);

    if (inv.verb == "norms") {
        Json out = report_header(Json{{"in", in_path}});
        out["operator_l2"] = norm(a, NormSpec::plain(BaseNorm::operator_l2));
        out["schur_sum"] = norm(a, NormSpec::plain(BaseNorm::schur_sum));
        out["baskakov"] = norm(a, NormSpec::plain(BaseNorm::baskakov));
        out["max_offset"] = max_offset(a);
        std::filesystem::create_directories(dir);
        write_json(dir / "norms.json", out);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    if (inv.verb == "profile") {
        const auto prof = decay_profile(a);
        std::filesystem::create_directories(dir);
        std::ostringstream csv;
        write_profile_csv(csv, prof);
        write_text_file((dir / "profile.csv").string(), csv.str());
        std::cout << "mat profile: wrote " << (dir / "profile.csv").string() << "\n";
        return 0;
    }
    if (inv.verb == "invert") {
        const auto result = invert(a);
        if (!(result.cond_one < 1e12))
            throw SingularMatrixError(result.cond_one,
                                      "mat invert: condition estimate exceeds 1e12");
        std::filesystem::create_directories(dir);
        Json out = report_header(Json{{"in", in_path}});
        out["cond_one"] = result.cond_one;
        out["matrix"] = to_json(result.inverse);
        write_json(dir / "inverse.json", out);
        std::cout << "mat invert: cond_1 = " << result.cond_one << ", wrote "
                  << (dir / "inverse.json").string() << "\n";
        return 0;
    }
    throw ConfigError("verb", "mat expects gen | norms | profile | invert");
}

inline void write_demko_outputs(const std::filesystem::path& dir, const Json& cfg_json,
                                const DemkoReport& rep, const std::string& suffix) {
    Json out = report_header(cfg_json);
    out["report"] = to_json(rep);
    out["files"] = Json{{"input_profile", "input_profile" + suffix + ".csv"},
                        {"inverse_profile", "inverse_profile" + suffix + ".csv"}};
    write_json(dir / ("report" + suffix + ".json"), out);
    std::ostringstream in_csv, inv_csv;
    write_profile_csv(in_csv, rep.input_profile);
    write_profile_csv(inv_csv, rep.inverse_profile);
    write_text_file((dir / ("input_profile" + suffix + ".csv")).string(), in_csv.str());
    write_text_file((dir / ("inverse_profile" + suffix + ".csv")).string(), inv_csv.str());
}

inline int run_decay(const Invocation& inv) {
    const auto cfg_json = load_config(inv, true);
    const auto cfg = parse_experiment_config(cfg_json);
    const auto dir = resolve_out_dir(inv);

    if (inv.verb == "sweep") {
        std::vector<std::uint64_t> seeds;
        if (inv.options.contains("seeds")) {
            for (const auto& v : inv.options.at("seeds"))
                seeds.push_back(v.get<std::uint64_t>());
        } else {
            for (std::uint64_t s = 0; s < 4; ++s) seeds.push_back(cfg.seed + s);
        }
        std::filesystem::create_directories(dir);
        const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        std::vector<std::future<void>> inflight;
        bool positive = true;
        std::mutex mtx;
        for (std::uint64_t seed : seeds) {
            if (inflight.size() >= workers) {
                inflight.front().get();
                inflight.erase(inflight.begin());
            }
            inflight.push_back(std::async(std::launch::async, [&, seed] {
                auto local = cfg;
                local.seed = seed;
                Json local_json = cfg_json;
                local_json["seed"] = seed;
                const auto rep = demko_experiment(local);
                const std::string suffix = "_seed" + std::to_string(seed);
                {
                    std::lock_guard<std::mutex> lock(mtx);
                    write_demko_outputs(dir, local_json, rep, suffix);
                    positive = positive && rep.inverse_fit.gamma_prime > 0.0;
                }
            }));
        }
        for (auto& f : inflight) f.get();
        std::cout << "decay sweep: " << seeds.size() << " seeds, inverse decay rates "
                  << (positive ? "all positive" : "NOT all positive") << "\n";
        return positive ? 0 : 1;
    }

    const auto rep = demko_experiment(cfg);
    std::filesystem::create_directories(dir);
    write_demko_outputs(dir, cfg_json, rep, "");
    std::cout << "decay run: inverse gamma' = " << rep.inverse_fit.gamma_prime
              << ", R^2 = " << rep.inverse_fit.r_squared << "\n";
    return rep.inverse_fit.gamma_prime > 0.0 ? 0 : 1;
}

inline int run_witness(const Invocation& inv) {
    Json cfg = load_config(inv, false);
    for (const auto& [key, value] : inv.options.items()) cfg[key] = value;
    const auto m = sequence_from_config(cfg, "sequence");
    const auto j_cap =
        static_cast<std::size_t>(require_int(cfg, "J", 1, 12, 8, true));
    const int window = static_cast<int>(require_int(cfg, "window", 8, 1 << 14, 128, true));

    const auto rep = witness_construction(m, j_cap, window);
    Json out = report_header(cfg);
    out["report"] = to_json(rep);
    const auto dir = resolve_out_dir(inv);
    std::filesystem::create_directories(dir);
    write_json(dir / "witness_report.json", out);

    bool ok = true;
    if (rep.applicable)
        for (const auto& node : rep.nodes) ok = ok && node.node_log_error <= 1e-6;
    std::cout << "witness: applicable=" << (rep.applicable ? "yes" : "no")
              << " node_property=" << (ok ? "ok" : "VIOLATED") << " C'=" << rep.c_prime
              << "\n";
    return ok ? 0 : 1;
}

inline int run_sandwich(const Invocation& inv) {
    Json cfg = load_config(inv, false);
    for (const auto& [key, value] : inv.options.items()) cfg[key] = value;
    const auto m = sequence_from_config(cfg, "sequence");
    const auto seed = static_cast<std::uint64_t>(
        require_int(cfg, "seed", 0, std::numeric_limits<long long>::max(), 1, true));
    const int window = static_cast<int>(require_int(cfg, "window", 8, 1 << 14, 24, true));
    const int bandwidth =
        static_cast<int>(require_int(cfg, "bandwidth", 1, 1 << 14, 4, true));
    const double r = require_number(cfg, "r", 1e-12, 1e6, 2.0, true);
    const int alpha_max = static_cast<int>(require_int(cfg, "alpha_max", 0, 12, 6, true));
    const auto base = base_from_string(require_choice(
        cfg, "norm.base", {"baskakov", "schur_sum"}, "baskakov"));

    const auto a = gen_banded_matrix(seed, 1, window, bandwidth);
    const auto rep = sandwich_experiment(a, m, r, alpha_max, base);
    Json out = report_header(cfg);
    out["report"] = to_json(rep);
    const auto dir = resolve_out_dir(inv);
    std::filesystem::create_directories(dir);
    write_json(dir / "sandwich_report.json", out);

    const bool ok = !rep.conclusive || rep.first_inclusion_ok;
    std::cout << "sandwich: carleman=" << rep.carleman << " c1=" << rep.weighted_c1
              << " cinf=" << rep.weighted_cinf << " C=" << rep.measured_c
              << (rep.conclusive ? "" : " (inconclusive: weight saturated)") << "\n";
    return ok ? 0 : 1;
}

} // namespace detail_cli

inline int run(const Invocation& inv) {
    using namespace detail_cli;
    try {
        if (inv.format != "json" && inv.format != "csv")
            throw ConfigError("format", "expected json or csv");
        if (inv.subcommand == "seq") {
            if (inv.verb != "analyze") throw ConfigError("verb", "seq expects analyze");
            return run_seq_analyze(inv);
        }
        if (inv.subcommand == "qr") {
            if (inv.verb == "expand") return run_qr_expand(inv);
            if (inv.verb == "verify") return run_qr_verify(inv);
            throw ConfigError("verb", "qr expects expand | verify");
        }
        if (inv.subcommand == "mat") return run_mat(inv);
        if (inv.subcommand == "decay") {
            if (inv.verb != "run" && inv.verb != "sweep")
                throw ConfigError("verb", "decay expects run | sweep");
            return run_decay(inv);
        }
        if (inv.subcommand == "witness") return run_witness(inv);
        if (inv.subcommand == "sandwich") return run_sandwich(inv);
        throw ConfigError("subcommand",
                          "expected seq | qr | mat | decay | witness | sandwich");
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return 2;
    } catch (const SingularMatrixError& e) {
        std::cerr << "numerical abort: " << e.what()
                  << " (condition estimate " << e.cond_estimate << ")\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace carleman::cli
