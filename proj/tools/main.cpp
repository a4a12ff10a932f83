// carleman: sequence calculus for Carleman and Dales-Davie classes plus
// off-diagonal decay experiments on matrix finite sections.

#include <CLI11.hpp>

#include <string>
#include <vector>

#include "carleman/cli.hpp"
#include "carleman/version.hpp"

namespace {

void add_common(CLI::App* cmd, carleman::cli::Invocation& inv,
                std::vector<std::string>& sets, std::string& seed) {
    cmd->add_option("--config", inv.config_path, "JSON config file");
    cmd->add_option("--set", sets, "override a config field, key=value (dotted paths)");
    cmd->add_option("--out", inv.out_dir,
                    "output directory (default $CARLEMAN_OUT_DIR or .)");
    cmd->add_option("--seed", seed, "override the seed");
    cmd->add_option("--format", inv.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_sequence_flags(CLI::App* cmd, std::string& gen, double& r, std::size_t& kmax,
                        std::vector<double>& values) {
    cmd->add_option("--gen", gen, "sequence generator")
        ->check(CLI::IsMember({"constant", "gevrey", "power", "explicit"}));
    cmd->add_option("--r", r, "generator exponent");
    cmd->add_option("--kmax", kmax, "prefix length");
    cmd->add_option("--values", values, "explicit sequence values (with --gen explicit)");
}

carleman::Json sequence_options(const std::string& gen, double r, std::size_t kmax,
                                const std::vector<double>& values) {
    carleman::Json s{{"gen", gen}, {"r", r}, {"k_max", kmax}};
    if (!values.empty()) s["values"] = values;
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carleman-class sequence calculus and matrix decay experiments"};
    app.set_version_flag("--version", carleman::version);
    app.require_subcommand(1);

    carleman::cli::Invocation inv;
    std::vector<std::string> sets;
    std::string seed_override;
    std::string gen = "gevrey";
    double r = 2.0;
    std::size_t kmax = 64;
    std::vector<double> values;

    auto* seq = app.add_subcommand("seq", "defining-sequence analysis");
    auto* seq_analyze = seq->add_subcommand(
        "analyze", "prefix, regularization, T_M and v_M tables, condition reports");
    add_common(seq_analyze, inv, sets, seed_override);
    add_sequence_flags(seq_analyze, gen, r, kmax, values);

    auto* qr = app.add_subcommand("qr", "iterated quotient rule");
    auto* qr_expand = qr->add_subcommand("expand", "write the expansion of a word");
    std::string word_text;
    int word_d = 1;
    qr_expand->add_option("--word", word_text, "comma-separated letters, e.g. 1,2")
        ->required();
    qr_expand->add_option("--d", word_d, "number of derivations (1 or 2)");
    add_common(qr_expand, inv, sets, seed_override);
    auto* qr_verify = qr->add_subcommand("verify", "expansion vs direct-derivation oracle");
    int verify_count = 10, verify_max_len = 3;
    qr_verify->add_option("--count", verify_count, "number of seeded matrices");
    qr_verify->add_option("--max-len", verify_max_len, "maximum word length");
    add_common(qr_verify, inv, sets, seed_override);

    auto* mat = app.add_subcommand("mat", "matrix sections: generate, norms, profile");
    auto* mat_gen = mat->add_subcommand("gen", "generate a decay matrix, write JSON");
    add_common(mat_gen, inv, sets, seed_override);
    auto* mat_norms = mat->add_subcommand("norms", "norms of a matrix JSON file");
    std::string in_path;
    mat_norms->add_option("--in", in_path, "matrix JSON file")->required();
    add_common(mat_norms, inv, sets, seed_override);
    auto* mat_profile = mat->add_subcommand("profile", "decay profile CSV of a matrix file");
    mat_profile->add_option("--in", in_path, "matrix JSON file")->required();
    add_common(mat_profile, inv, sets, seed_override);
    auto* mat_invert = mat->add_subcommand("invert", "LU inverse with condition diagnostic");
    mat_invert->add_option("--in", in_path, "matrix JSON file")->required();
    add_common(mat_invert, inv, sets, seed_override);

    auto* decay = app.add_subcommand("decay", "inverse decay experiments");
    auto* decay_run = decay->add_subcommand("run", "one generate-invert-fit run");
    add_common(decay_run, inv, sets, seed_override);
    auto* decay_sweep = decay->add_subcommand("sweep", "fan out seeds to a worker pool");
    std::vector<std::uint64_t> sweep_seeds;
    decay_sweep->add_option("--seeds", sweep_seeds, "seed list");
    add_common(decay_sweep, inv, sets, seed_override);

    auto* witness = app.add_subcommand("witness", "Newton-polygon witness construction");
    std::size_t j_cap = 8;
    int window = 128;
    witness->add_option("--J", j_cap, "number of nodes");
    witness->add_option("--W", window, "window half-width");
    add_common(witness, inv, sets, seed_override);
    add_sequence_flags(witness, gen, r, kmax, values);

    auto* sandwich = app.add_subcommand("sandwich", "Carleman vs weighted-norm sandwich");
    int bandwidth = 4, alpha_max = 6;
    double sandwich_r = 2.0;
    std::string base = "baskakov";
    sandwich->add_option("--W", window, "window half-width");
    sandwich->add_option("--bandwidth", bandwidth, "band half-width of the test matrix");
    sandwich->add_option("--carleman-r", sandwich_r, "Carleman radius r");
    sandwich->add_option("--alpha-max", alpha_max, "derivation order cutoff");
    sandwich->add_option("--spec", base, "solid base norm")
        ->check(CLI::IsMember({"baskakov", "schur_sum"}));
    add_common(sandwich, inv, sets, seed_override);
    add_sequence_flags(sandwich, gen, r, kmax, values);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "config error at --set: expected key=value, got \"" << kv << "\"\n";
            return 2;
        }
        inv.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!seed_override.empty()) inv.overrides.emplace_back("seed", seed_override);

    if (seq_analyze->parsed()) {
        inv.subcommand = "seq";
        inv.verb = "analyze";
        inv.options["sequence"] = sequence_options(gen, r, kmax, values);
    } else if (qr_expand->parsed()) {
        inv.subcommand = "qr";
        inv.verb = "expand";
        std::vector<int> letters;
        std::string tok;
        std::istringstream ss(word_text);
        while (std::getline(ss, tok, ',')) {
            try {
                letters.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                std::cerr << "config error at word: not an integer: \"" << tok << "\"\n";
                return 2;
            }
        }
        inv.options["word"] = letters;
        inv.options["d"] = word_d;
    } else if (qr_verify->parsed()) {
        inv.subcommand = "qr";
        inv.verb = "verify";
        inv.options["count"] = verify_count;
        inv.options["max_len"] = verify_max_len;
    } else if (mat_gen->parsed() || mat_norms->parsed() || mat_profile->parsed() ||
               mat_invert->parsed()) {
        inv.subcommand = "mat";
        inv.verb = mat_gen->parsed()      ? "gen"
                   : mat_norms->parsed()  ? "norms"
                   : mat_invert->parsed() ? "invert"
                                          : "profile";
        if (!in_path.empty()) inv.options["in"] = in_path;
    } else if (decay_run->parsed() || decay_sweep->parsed()) {
        inv.subcommand = "decay";
        inv.verb = decay_run->parsed() ? "run" : "sweep";
        if (!sweep_seeds.empty()) inv.options["seeds"] = sweep_seeds;
    } else if (witness->parsed()) {
        inv.subcommand = "witness";
        inv.options["sequence"] = sequence_options(gen, r, kmax, values);
        inv.options["J"] = j_cap;
        inv.options["window"] = window;
    } else if (sandwich->parsed()) {
        inv.subcommand = "sandwich";
        inv.options["sequence"] = sequence_options(gen, r, kmax, values);
        inv.options["window"] = window;
        inv.options["bandwidth"] = bandwidth;
        inv.options["r"] = sandwich_r;
        inv.options["alpha_max"] = alpha_max;
        inv.options["norm"] = carleman::Json{{"base", base}};
    } else {
        std::cerr << "config error at subcommand: missing verb (see --help)\n";
        return 2;
    }

    return carleman::cli::run(inv);
}
