// gausstree command-line tool.
//
// Exit status: 0 on success, 2 on a usage error (synopsis on stderr),
// 1 on any runtime failure.

#include <charconv>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gausstree/gausstree.hpp"

namespace gt = gausstree;
using gt::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::optional<std::string>& out, const std::string& text) {
    if (out) {
        gt::write_text_file(*out, text);
    } else {
        std::cout << text;
    }
}

void emit_json(const std::optional<std::string>& out, const json& j) {
    emit(out, j.dump(2) + "\n");
}

void emit_csv(const std::optional<std::string>& out, const gt::CsvTable& t) {
    if (out) {
        gt::write_csv_file(*out, t);
    } else {
        gt::write_csv(std::cout, t);
    }
}

/// Column selector: a header name or a zero-based index.
std::size_t resolve_column(const gt::CsvTable& t, const std::string& key) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (t.header[j] == key) {
            return j;
        }
    }
    std::size_t idx = 0;
    const auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
    if (res.ec == std::errc{} && res.ptr == key.data() + key.size() && idx < t.header.size()) {
        return idx;
    }
    throw UsageError("unknown column '" + key + "'");
}

struct DataInput {
    gt::CsvTable table;
    gt::SampleBatch batch;
    std::uint64_t seed = 0; ///< taken from a "seed=" comment in the file, if any
};

DataInput load_data(const std::string& path, bool center) {
    DataInput d;
    d.table = gt::read_csv_file(path);
    d.batch = gt::csv_to_batch(d.table);
    if (center) {
        d.batch = gt::center_by_differencing(d.batch);
    }
    for (const auto& c : d.table.comments) {
        const auto pos = c.find("seed=");
        if (pos != std::string::npos) {
            const char* first = c.data() + pos + 5;
            std::from_chars(first, c.data() + c.size(), d.seed);
            break;
        }
    }
    return d;
}

json meta_json(std::uint64_t seed, std::uint64_t hash) {
    return {{"seed", seed}, {"config_hash", gt::hex64(hash)}};
}

/// Metadata for a result computed from a data file: the seed recorded in the file
/// and a hash over the command, its options and the file's own metadata lines.
json data_meta(const DataInput& d, json options) {
    options["data_comments"] = d.table.comments;
    return meta_json(d.seed, gt::fnv1a64(options.dump()));
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
    std::vector<std::uint8_t> bits;
    for (char c : s) {
        if (c != '0' && c != '1') {
            throw UsageError("--bits must be a string of 0 and 1");
        }
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

gt::RealizableVariant parse_variant(const std::string& s) {
    if (s == "shared-noise") {
        return gt::RealizableVariant::SharedNoise;
    }
    if (s == "chain") {
        return gt::RealizableVariant::Chain;
    }
    throw UsageError("--variant must be shared-noise or chain");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning tree-structured Gaussian graphical models"};
    app.require_subcommand(1);

    // estimate-mi -----------------------------------------------------------
    std::string data_path;
    std::string col_x = "0";
    std::string col_y = "1";
    std::string col_z;
    bool center = false;
    std::optional<std::string> out;
    double eps = 0.1;

    auto* est = app.add_subcommand("estimate-mi", "Estimate I(X;Y), or I(X;Y|Z) with --given, from a sample CSV");
    est->add_option("--data", data_path, "Sample CSV")->required();
    est->add_option("--x", col_x, "First column (name or index)");
    est->add_option("--y", col_y, "Second column (name or index)");
    est->add_option("--given", col_z, "Conditioning column (name or index)");
    est->add_flag("--center", center, "Center by differencing consecutive rows first");
    est->add_option("--out", out, "Write JSON here instead of stdout");

    auto* tmi = app.add_subcommand("test-mi", "Test I(X;Y) = 0 against I(X;Y) >= eps");
    tmi->add_option("--data", data_path, "Sample CSV")->required();
    tmi->add_option("--eps", eps, "Gap parameter in (0,1)")->required();
    tmi->add_option("--x", col_x, "First column");
    tmi->add_option("--y", col_y, "Second column");
    tmi->add_flag("--center", center, "Center by differencing first");
    tmi->add_option("--out", out, "Write JSON here instead of stdout");

    std::string tcmi_z = "2";
    auto* tcmi = app.add_subcommand("test-cmi", "Test I(X;Y|Z) = 0 against I(X;Y|Z) >= eps");
    tcmi->add_option("--data", data_path, "Sample CSV")->required();
    tcmi->add_option("--eps", eps, "Gap parameter in (0,1)")->required();
    tcmi->add_option("--x", col_x, "X column");
    tcmi->add_option("--y", col_y, "Y column");
    tcmi->add_option("--z", tcmi_z, "Conditioning column");
    tcmi->add_flag("--center", center, "Center by differencing first");
    tcmi->add_option("--out", out, "Write JSON here instead of stdout");

    auto* cl = app.add_subcommand("chow-liu", "Learn a tree from a sample CSV");
    cl->add_option("--data", data_path, "Sample CSV")->required();
    cl->add_flag("--center", center, "Center by differencing first");
    cl->add_option("--out", out, "Write tree JSON here instead of stdout");

    // gen-instance ------------------------------------------------------------
    std::string kind;
    std::size_t n_blocks = 1;
    int which = 1;
    std::string bits_str;
    std::string variant_str = "shared-noise";
    std::uint64_t seed = 0;
    auto* gen = app.add_subcommand("gen-instance", "Write a hard-instance covariance as JSON");
    gen->add_option("--kind", kind, "realizable | nonrealizable | mi-test | additive")
        ->required()
        ->check(CLI::IsMember({"realizable", "nonrealizable", "mi-test", "additive"}));
    gen->add_option("--eps", eps, "Epsilon")->required();
    gen->add_option("--n", n_blocks, "Number of blocks (per-block strength eps/n)");
    gen->add_option("--which", which, "1 or 2: member of the pair when --bits is absent")->check(CLI::Range(1, 2));
    gen->add_option("--bits", bits_str, "Block selector string such as 1011, or 'random'");
    gen->add_option("--variant", variant_str, "Realizable construction: shared-noise | chain");
    gen->add_option("--seed", seed, "Seed for --bits random");
    gen->add_option("--out", out, "Write JSON here instead of stdout");

    // sample --------------------------------------------------------------------
    std::string instance_path;
    std::size_t m = 1000;
    auto* smp = app.add_subcommand("sample", "Draw i.i.d. samples from an instance JSON into a CSV");
    smp->add_option("--instance", instance_path, "Instance JSON")->required();
    smp->add_option("--m", m, "Number of samples")->required()->check(CLI::PositiveNumber);
    smp->add_option("--seed", seed, "Seed");
    smp->add_option("--out", out, "Write CSV here instead of stdout");

    // exp -------------------------------------------------------------------------
    auto* exp = app.add_subcommand("exp", "Run an experiment");
    exp->require_subcommand(1);
    std::string config_path;
    std::size_t threads = 0;
    auto* epsm = exp->add_subcommand("eps-vs-m", "Minimum sample size m* for each epsilon");
    epsm->add_option("--config", config_path, "Experiment config JSON")->required();
    epsm->add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it");
    epsm->add_option("--out", out, "Write CSV here instead of stdout");

    std::string conv_kind = "independent";
    std::vector<std::size_t> m_grid;
    std::size_t trials = 1000;
    auto* conv = exp->add_subcommand("mi-convergence", "Mean estimator error against m");
    conv->add_option("--kind", conv_kind, "independent | dependent | cmi-independent | cmi-dependent")
        ->check(CLI::IsMember({"independent", "dependent", "cmi-independent", "cmi-dependent"}));
    conv->add_option("--m-grid", m_grid, "Sample sizes (default 100 316 1000 3162 10000)")->delimiter(',');
    conv->add_option("--trials", trials, "Trials per point")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    conv->add_option("--seed", seed, "Master seed");
    conv->add_option("--threads", threads, "Worker threads");
    conv->add_option("--out", out, "Write CSV here instead of stdout");

    std::vector<double> lambdas = gt::default_lambda_grid();
    std::size_t rec_trials = 200;
    auto* rec = exp->add_subcommand("recovery", "Chow-Liu versus graphical lasso correct-tree frequency");
    rec->add_option("--eps", eps, "Epsilon of the three-node chain");
    rec->add_option("--m-grid", m_grid, "Sample sizes (default 2 5 10 20 50 100 200 500 1000)")->delimiter(',');
    rec->add_option("--trials", rec_trials, "Trials per point")->check(CLI::PositiveNumber);
    rec->add_option("--lambdas", lambdas, "Graphical lasso penalties")->delimiter(',');
    rec->add_option("--seed", seed, "Master seed");
    rec->add_option("--threads", threads, "Worker threads");
    rec->add_option("--out", out, "Write CSV here instead of stdout");

    // baseline ----------------------------------------------------------------------
    auto* base = app.add_subcommand("baseline", "Run a baseline estimator");
    base->require_subcommand(1);
    double lambda = 0.1;
    auto* gl = base->add_subcommand("glasso", "Graphical lasso on the sample covariance");
    gl->add_option("--data", data_path, "Sample CSV")->required();
    gl->add_option("--lambda", lambda, "L1 penalty")->check(CLI::NonNegativeNumber);
    gl->add_option("--out", out, "Write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*est) {
            const auto d = load_data(data_path, center);
            const auto x = d.batch.column(resolve_column(d.table, col_x));
            const auto y = d.batch.column(resolve_column(d.table, col_y));
            json j;
            if (col_z.empty()) {
                const auto e = gt::empirical_mi(x, y);
                j = {{"rho_hat", e.rho_hat}, {"i_hat", e.i_hat}, {"m", e.m}};
            } else {
                const auto e = gt::empirical_cmi(x, y, d.batch.column(resolve_column(d.table, col_z)));
                j = {{"alpha_hat", e.alpha_hat}, {"beta_hat", e.beta_hat}, {"gamma_hat", e.gamma_hat},
                     {"rho_tilde", e.rho_tilde}, {"i_hat", e.i_hat},       {"m", e.m}};
            }
            j["meta"] = data_meta(d, {{"command", "estimate-mi"}, {"x", col_x}, {"y", col_y}, {"given", col_z},
                                      {"center", center}});
            emit_json(out, j);
        } else if (*tmi) {
            const auto d = load_data(data_path, center);
            const auto v = gt::test_mi(d.batch.column(resolve_column(d.table, col_x)),
                                       d.batch.column(resolve_column(d.table, col_y)), eps);
            json j = gt::verdict_to_json(v);
            j["meta"] = data_meta(d, {{"command", "test-mi"}, {"eps", eps}, {"x", col_x}, {"y", col_y},
                                      {"center", center}});
            emit_json(out, j);
        } else if (*tcmi) {
            const auto d = load_data(data_path, center);
            const auto v = gt::test_cmi(d.batch.column(resolve_column(d.table, col_x)),
                                        d.batch.column(resolve_column(d.table, col_y)),
                                        d.batch.column(resolve_column(d.table, tcmi_z)), eps);
            json j = gt::verdict_to_json(v);
            j["meta"] = data_meta(d, {{"command", "test-cmi"}, {"eps", eps}, {"x", col_x}, {"y", col_y},
                                      {"z", tcmi_z}, {"center", center}});
            emit_json(out, j);
        } else if (*cl) {
            const auto d = load_data(data_path, center);
            emit_json(out, {{"tree", gt::tree_to_json(gt::chow_liu(d.batch))},
                            {"meta", data_meta(d, {{"command", "chow-liu"}, {"center", center}})}});
        } else if (*gen) {
            gt::InstanceRecord inst;
            inst.kind = kind;
            inst.epsilon = eps;
            inst.n = n_blocks;
            if (kind == "realizable" || kind == "nonrealizable") {
                if (bits_str == "random") {
                    std::mt19937_64 rng(seed);
                    for (std::size_t b = 0; b < n_blocks; ++b) {
                        inst.bits.push_back(static_cast<std::uint8_t>(rng() >> 63));
                    }
                } else if (!bits_str.empty()) {
                    inst.bits = parse_bits(bits_str);
                } else {
                    inst.bits.assign(n_blocks, which == 1 ? 1 : 0);
                }
                gt::BlockSpec spec;
                spec.kind = kind == "realizable" ? gt::BlockKind::Realizable : gt::BlockKind::NonRealizable;
                spec.bits = inst.bits;
                spec.epsilon = eps;
                spec.n = n_blocks;
                if (kind == "realizable") {
                    spec.variant = parse_variant(variant_str);
                    inst.variant = variant_str;
                }
                inst.dist = gt::compose_blocks(spec);
            } else {
                const auto pair = kind == "mi-test" ? gt::mi_test_pair(eps) : gt::additive_estimation_pair(eps);
                inst.bits = {static_cast<std::uint8_t>(which == 1 ? 1 : 0)};
                inst.dist = which == 1 ? pair.first : pair.second;
            }
            json j = gt::instance_to_json(inst);
            j["meta"] = meta_json(seed, gt::fnv1a64(j.dump()));
            emit_json(out, j);
        } else if (*smp) {
            const auto inst = gt::instance_from_json(gt::read_json_file(instance_path));
            const auto batch = gt::sample_mvn(inst.dist, m, seed);
            auto table = gt::batch_to_csv(batch);
            table.comments = {gt::metadata_line(seed, gt::fnv1a64(gt::instance_to_json(inst).dump()),
                                                "m=" + std::to_string(m))};
            emit_csv(out, table);
        } else if (*epsm) {
            auto cfg = gt::config_from_json(gt::read_json_file(config_path));
            if (epsm->count("--threads")) {
                cfg.threads = threads;
            }
            const auto res = gt::run_eps_vs_m(cfg);
            emit_csv(out, gt::eps_vs_m_table(res, cfg));
        } else if (*conv) {
            if (m_grid.empty()) {
                m_grid = {100, 316, 1000, 3162, 10000};
            }
            const auto k = gt::convergence_kind_from_string(conv_kind);
            const auto res = gt::mi_convergence_curve(k, m_grid, trials, seed, threads);
            json cfg = {{"experiment", "mi-convergence"}, {"kind", conv_kind}, {"m_grid", m_grid},
                        {"trials", trials},               {"seed", seed}};
            emit_csv(out, gt::convergence_table(res, seed, gt::fnv1a64(cfg.dump())));
        } else if (*rec) {
            if (m_grid.empty()) {
                m_grid = {2, 5, 10, 20, 50, 100, 200, 500, 1000};
            }
            const auto res = gt::recovery_comparison(eps, m_grid, rec_trials, seed, lambdas, threads);
            json cfg = {{"experiment", "recovery"}, {"epsilon", eps}, {"m_grid", m_grid},
                        {"trials", rec_trials},     {"lambdas", lambdas}, {"seed", seed}};
            emit_csv(out, gt::recovery_table(res, seed, gt::fnv1a64(cfg.dump())));
        } else if (*gl) {
            const auto d = load_data(data_path, false);
            const auto s = gt::empirical_covariance(d.batch, {.centered = true, .unbiased = true});
            const auto r = gt::graphical_lasso(s, lambda);
            emit_json(out, {{"lambda", r.lambda},
                            {"converged", r.converged},
                            {"iterations", r.iterations},
                            {"kkt_residual", r.kkt_residual},
                            {"precision", r.theta.rows()},
                            {"tree", gt::tree_to_json(gt::precision_to_tree(r.theta))},
                            {"meta", data_meta(d, {{"command", "baseline glasso"}, {"lambda", lambda}})}});
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
