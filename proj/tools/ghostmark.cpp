#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ghostmark/ghostmark.hpp"

namespace gm = ghostmark;
namespace fs = std::filesystem;

namespace {

gm::wordlist_format parse_wordlist_format(const std::string& s) {
    if (s == "eff-dice") return gm::wordlist_format::eff_dice;
    if (s == "plain-lines") return gm::wordlist_format::plain_lines;
    gm::fail(gm::errc::invalid_argument,
             "wordlist format must be eff-dice or plain-lines, got \"" + s + "\"");
}

/// "100" -> end of document, "50" -> midpoint, "25:100" -> uniform in that
/// range. Values are percentages.
gm::position_strategy parse_position(const std::string& s) {
    auto pct = [&](const std::string& t) {
        double v = 0.0;
        try {
            std::size_t pos = 0;
            v = std::stod(t, &pos);
            if (pos != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            gm::fail(gm::errc::invalid_argument,
                     "bad position \"" + s + "\" (expected e.g. 100, 50 or 25:100)");
        }
        if (v < 0.0 || v > 100.0)
            gm::fail(gm::errc::invalid_argument,
                     "position percentages must lie in [0,100]");
        return v / 100.0;
    };
    auto colon = s.find(':');
    if (colon == std::string::npos) return gm::position_strategy::fixed(pct(s));
    return gm::position_strategy::range(pct(s.substr(0, colon)), pct(s.substr(colon + 1)));
}

struct seed_choice {
    std::uint64_t value = 0;
    bool provided = false; // came from --seed / config
    bool logged = false;
};

/// Generation commands that permit reproduction log the seed they ran with;
/// when none is given one is drawn from system entropy first.
seed_choice reproducible_seed(std::size_t flag_count, std::uint64_t flag_value) {
    seed_choice s;
    if (flag_count > 0) {
        s.value = flag_value;
        s.provided = true;
    } else {
        s.value = gm::rng::system().next();
    }
    std::cerr << "seed: " << s.value << "\n";
    s.logged = true;
    return s;
}

/// Required settings may arrive via flag, environment or config file, so
/// presence is checked after layering instead of by the parser.
void require_setting(const std::string& flag, const std::string& value) {
    if (value.empty())
        gm::fail(gm::errc::invalid_argument, flag + " is required");
}

void ensure_output_slot(const fs::path& p, bool force) {
    if (fs::exists(p) && !force)
        gm::fail(gm::errc::invalid_argument,
                 p.string() + " already exists (use --force to overwrite)");
}

fs::path prepare_out_dir(const std::string& out) {
    if (out.empty())
        gm::fail(gm::errc::invalid_argument, "--out directory is required");
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) gm::fail(gm::errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

void write_text_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) gm::fail(gm::errc::io_error, "cannot write " + p.string());
    out << body;
    if (!out) gm::fail(gm::errc::io_error, "short write to " + p.string());
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& outputs, nlohmann::ordered_json params,
                    const std::optional<std::uint64_t>& seed) {
    nlohmann::ordered_json m;
    m["command"] = command;
    m["created_at"] = gm::rfc3339_utc(std::time(nullptr));
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& p : input_paths) inputs[p] = gm::digest_file(p);
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["parameters"] = std::move(params);
    if (seed) m["seed"] = *seed;
    write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

gm::wordlist load_wordlist_checked(const std::string& path, const std::string& format,
                                   const std::string& expect_digest) {
    gm::wordlist wl = gm::load_wordlist_file(path, parse_wordlist_format(format));
    if (!expect_digest.empty() && wl.digest() != expect_digest)
        gm::fail(gm::errc::digest_mismatch, "wordlist " + path + " has digest " +
                                                wl.digest() + ", expected " + expect_digest);
    if (wl.size() < 1000)
        std::cerr << "warning: wordlist has only " << wl.size()
                  << " words; small lists weaken passphrase uniqueness and the z-test\n";
    return wl;
}

void check_registry_digest(const gm::registry& reg, const gm::wordlist& wl) {
    for (const auto& gid : reg.all()) {
        if (gid.wordlist_digest != wl.digest())
            gm::fail(gm::errc::digest_mismatch,
                     "identifier " + gid.id + " was generated from wordlist digest " +
                         gid.wordlist_digest + " but the loaded wordlist has " + wl.digest());
    }
}

// ---------------------------------------------------------------------------

struct gen_options {
    std::string wordlist, wordlist_format = "eff-dice", expect_digest;
    std::size_t q = 10, count = 1;
    std::string owner, owner_prefix = "user";
    std::string prefix, terminal = ".";
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
};

void run_gen(const gen_options& o, std::size_t seed_count) {
    require_setting("--wordlist", o.wordlist);
    require_setting("--out", o.out);
    if (o.count == 0) gm::fail(gm::errc::invalid_argument, "--count must be positive");
    gm::wordlist wl = load_wordlist_checked(o.wordlist, o.wordlist_format, o.expect_digest);
    fs::path dir = prepare_out_dir(o.out);
    fs::path reg_path = dir / "registry.jsonl";
    ensure_output_slot(reg_path, o.force);

    std::optional<std::uint64_t> seed;
    gm::rng r = gm::rng::system();
    if (seed_count > 0) {
        seed = o.seed;
        r = gm::rng::seeded(o.seed);
        std::cerr << "seed: " << o.seed << "\n";
    }

    gm::registry reg;
    for (std::size_t i = 0; i < o.count; ++i) {
        std::string owner = o.owner;
        if (owner.empty()) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%s-%04zu", o.owner_prefix.c_str(), i + 1);
            owner = buf;
        }
        std::optional<std::string> prefix;
        if (!o.prefix.empty()) prefix = o.prefix;
        for (int tries = 0;; ++tries) {
            if (tries >= 1000)
                gm::fail(gm::errc::duplicate_passphrase,
                         "wordlist too small to generate " +
                             std::to_string(o.count) + " distinct passphrases");
            try {
                reg.put(gm::make_identifier(wl, owner, o.q, r, prefix, o.terminal, seed));
                break;
            } catch (const gm::error& e) {
                if (e.code() != gm::errc::duplicate_passphrase) throw;
            }
        }
    }
    reg.save_file(reg_path.string());

    nlohmann::ordered_json params;
    params["q"] = o.q;
    params["count"] = o.count;
    params["wordlist_format"] = o.wordlist_format;
    params["wordlist_digest"] = wl.digest();
    params["terminal"] = o.terminal;
    if (!o.prefix.empty()) params["prefix"] = o.prefix;
    write_manifest(dir, "gen", {o.wordlist}, {"registry.jsonl"}, std::move(params), seed);
    std::cout << "wrote " << reg.size() << " identifiers to " << reg_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct insert_options {
    std::string corpus, registry, id, doc;
    std::string position = "100";
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
};

void run_insert(const insert_options& o, std::size_t seed_count) {
    require_setting("--corpus", o.corpus);
    require_setting("--registry", o.registry);
    require_setting("--out", o.out);
    auto corpus = gm::load_corpus_file(o.corpus);
    gm::registry reg = gm::registry::load_file(o.registry);
    const gm::ghost_identifier& gid = reg.get(o.id);
    gm::position_strategy strategy = parse_position(o.position);

    fs::path dir = prepare_out_dir(o.out);
    fs::path out_path = dir / "corpus.jsonl";
    ensure_output_slot(out_path, o.force);

    seed_choice seed = reproducible_seed(seed_count, o.seed);
    gm::rng r = gm::rng::seeded(seed.value);

    bool found = false;
    for (auto& doc : corpus) {
        if (doc.doc_id != o.doc) continue;
        doc = gm::insert_sentence(std::move(doc), gm::render_sentence(gid), gid.id, strategy, r);
        doc.owner_id = gid.owner_id;
        found = true;
        break;
    }
    if (!found) gm::fail(gm::errc::unknown_id, "no document " + o.doc + " in " + o.corpus);

    gm::save_corpus_file(corpus, out_path.string());
    nlohmann::ordered_json params;
    params["id"] = o.id;
    params["doc"] = o.doc;
    params["position"] = o.position;
    write_manifest(dir, "insert", {o.corpus, o.registry}, {"corpus.jsonl"}, std::move(params),
                   seed.value);
    std::cout << "marked " << o.doc << " with " << o.id << " -> " << out_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct plan_options {
    std::string corpus, registry;
    std::size_t m = 1;
    double mu = 1.0;
    std::string position = "100";
    bool natural = false;
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
};

void run_plan(const plan_options& o, std::size_t seed_count) {
    require_setting("--corpus", o.corpus);
    require_setting("--registry", o.registry);
    require_setting("--out", o.out);
    auto corpus = gm::load_corpus_file(o.corpus);
    gm::registry reg = gm::registry::load_file(o.registry);
    gm::position_strategy strategy = parse_position(o.position);

    fs::path dir = prepare_out_dir(o.out);
    fs::path corpus_path = dir / "corpus.jsonl";
    fs::path plan_path = dir / "plan.json";
    ensure_output_slot(corpus_path, o.force);
    ensure_output_slot(plan_path, o.force);

    seed_choice seed = reproducible_seed(seed_count, o.seed);

    std::vector<std::size_t> pool;
    if (o.natural) {
        for (const auto& [owner, n] : gm::user_stats(corpus).docs_per_owner)
            if (!owner.empty()) pool.push_back(n);
        if (pool.empty())
            gm::fail(gm::errc::invalid_argument,
                     "--natural needs a corpus with owner ids to sample counts from");
    }

    gm::insertion_plan plan =
        gm::plan_insertions(corpus, reg, o.m, o.mu, strategy, seed.value, o.natural ? &pool : nullptr);

    gm::save_corpus_file(corpus, corpus_path.string());
    write_text_file(plan_path, plan.to_json().dump(2) + "\n");

    nlohmann::ordered_json params;
    params["m"] = o.m;
    params["mu"] = o.mu;
    params["position"] = o.position;
    params["natural"] = o.natural;
    params["plan_digest"] = plan.digest();
    write_manifest(dir, "plan", {o.corpus, o.registry}, {"corpus.jsonl", "plan.json"},
                   std::move(params), seed.value);
    std::cout << "inserted " << plan.total() << " sentences for " << plan.m
              << " users (mu=" << plan.mu() << ", median=" << plan.median_repetition() << ") -> "
              << corpus_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct backend_options {
    std::string backend;
    std::string model;
    int timeout_ms = 30000;
    std::size_t max_parallel = 1;
    int beam_width = 0;
};

gm::backend_descriptor build_descriptor(const backend_options& o) {
    gm::backend_descriptor d = gm::parse_backend(o.backend);
    d.model = o.model;
    d.timeout_ms = o.timeout_ms;
    d.max_parallel = o.max_parallel;
    d.beam_width = o.beam_width;
    return d;
}

struct lastk_options_cli {
    std::string corpus, registry, wordlist, wordlist_format = "eff-dice", expect_digest;
    backend_options be;
    std::size_t k = 2;
    double alpha = 0.01;
    std::uint64_t v_star = 0;
    std::string ng_mode = "best";
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
};

void run_lastk(const lastk_options_cli& o, std::size_t seed_count) {
    require_setting("--corpus", o.corpus);
    require_setting("--registry", o.registry);
    require_setting("--wordlist", o.wordlist);
    require_setting("--backend", o.be.backend);
    require_setting("--out", o.out);
    auto corpus = gm::load_corpus_file(o.corpus);
    gm::registry reg = gm::registry::load_file(o.registry);
    gm::wordlist wl = load_wordlist_checked(o.wordlist, o.wordlist_format, o.expect_digest);
    check_registry_digest(reg, wl);
    if (o.ng_mode != "best" && o.ng_mode != "sum")
        gm::fail(gm::errc::invalid_argument, "--ng-mode must be best or sum");

    fs::path dir = prepare_out_dir(o.out);
    fs::path report_path = dir / "report.json";
    ensure_output_slot(report_path, o.force);

    seed_choice seed = reproducible_seed(seed_count, o.seed);
    gm::backend_descriptor desc = build_descriptor(o.be);
    gm::backend_ptr backend = gm::make_backend(desc, &wl, &reg, seed.value);

    gm::lastk_options opts;
    opts.k = o.k;
    opts.alpha = o.alpha;
    opts.v_star = o.v_star != 0 ? o.v_star : wl.size();
    opts.sum_mode = o.ng_mode == "sum";
    opts.max_parallel = o.be.max_parallel;

    gm::lastk_report rep = gm::run_lastk_test(corpus, reg, *backend, opts);
    write_text_file(report_path, gm::lastk_report_to_json(rep).dump(2) + "\n");

    nlohmann::ordered_json params;
    params["backend"] = o.be.backend;
    params["k"] = o.k;
    params["alpha"] = o.alpha;
    params["V_star"] = opts.v_star;
    params["n_g_mode"] = o.ng_mode;
    write_manifest(dir, "lastk", {o.corpus, o.registry, o.wordlist}, {"report.json"},
                   std::move(params), seed.value);
    gm::print_lastk_summary(rep, std::cout);
    std::cout << "report: " << report_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct ppl_options_cli {
    std::string corpus, registry, wordlist, wordlist_format = "eff-dice", expect_digest;
    backend_options be;
    double alpha = 0.05;
    std::size_t calibration_size = 100;
    double fixed_critical = 200.0;
    bool emit_requests = false;
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
};

void run_ppl(const ppl_options_cli& o, std::size_t seed_count) {
    require_setting("--corpus", o.corpus);
    require_setting("--registry", o.registry);
    require_setting("--wordlist", o.wordlist);
    if (!o.emit_requests) require_setting("--backend", o.be.backend);
    require_setting("--out", o.out);
    auto corpus = gm::load_corpus_file(o.corpus);
    gm::registry reg = gm::registry::load_file(o.registry);
    gm::wordlist wl = load_wordlist_checked(o.wordlist, o.wordlist_format, o.expect_digest);
    check_registry_digest(reg, wl);

    fs::path dir = prepare_out_dir(o.out);
    seed_choice seed = reproducible_seed(seed_count, o.seed);

    gm::ppl_options opts;
    opts.alpha = o.alpha;
    opts.calibration_size = o.calibration_size;
    opts.fixed_critical = o.fixed_critical;
    opts.seed = seed.value;
    opts.max_parallel = o.be.max_parallel;

    if (o.emit_requests) {
        fs::path req_path = dir / "requests.jsonl";
        ensure_output_slot(req_path, o.force);
        auto tasks = gm::collect_ppl_tasks(corpus, reg, wl, opts);
        std::string body;
        for (const auto& t : tasks) {
            nlohmann::ordered_json j;
            j["doc_id"] = t.doc_id;
            j["text"] = t.text;
            j["span_begin"] = t.span_begin;
            j["span_end"] = t.span_end;
            j["calibration"] = t.calibration;
            body += j.dump();
            body += '\n';
        }
        write_text_file(req_path, body);
        nlohmann::ordered_json params;
        params["alpha"] = o.alpha;
        params["calibration_size"] = o.calibration_size;
        params["emit_requests"] = true;
        write_manifest(dir, "ppl", {o.corpus, o.registry, o.wordlist}, {"requests.jsonl"},
                       std::move(params), seed.value);
        std::cout << "wrote " << tasks.size() << " scoring requests to " << req_path.string()
                  << "\nscore each text with echo+logprobs, store JSONL records "
                     "{doc_id, tokens, token_logprobs, text_offsets}, then rerun with "
                     "--backend logprob-file:PATH and --seed "
                  << seed.value << "\n";
        return;
    }

    fs::path report_path = dir / "report.json";
    fs::path roc_path = dir / "roc.csv";
    ensure_output_slot(report_path, o.force);
    ensure_output_slot(roc_path, o.force);

    gm::backend_descriptor desc = build_descriptor(o.be);
    gm::backend_ptr backend = gm::make_backend(desc, &wl, &reg, seed.value);

    gm::ppl_report rep = gm::run_ppl_test(corpus, reg, wl, *backend, opts);
    write_text_file(report_path, gm::ppl_report_to_json(rep).dump(2) + "\n");
    {
        std::ofstream out(roc_path, std::ios::binary);
        if (!out) gm::fail(gm::errc::io_error, "cannot write " + roc_path.string());
        gm::roc_points_to_csv(rep.roc, out);
    }

    nlohmann::ordered_json params;
    params["backend"] = o.be.backend;
    params["alpha"] = o.alpha;
    params["calibration_size"] = o.calibration_size;
    params["fixed_critical"] = o.fixed_critical;
    write_manifest(dir, "ppl", {o.corpus, o.registry, o.wordlist}, {"report.json", "roc.csv"},
                   std::move(params), seed.value);
    gm::print_ppl_summary(rep, std::cout);
    std::cout << "report: " << report_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct stats_options {
    std::string corpus;
    std::string out;
    bool force = false;
};

void run_stats(const stats_options& o) {
    require_setting("--corpus", o.corpus);
    require_setting("--out", o.out);
    auto corpus = gm::load_corpus_file(o.corpus);
    gm::owner_statistics st = gm::user_stats(corpus);

    fs::path dir = prepare_out_dir(o.out);
    fs::path json_path = dir / "user_stats.json";
    fs::path csv_path = dir / "user_stats.csv";
    ensure_output_slot(json_path, o.force);
    ensure_output_slot(csv_path, o.force);

    nlohmann::ordered_json j;
    j["documents"] = corpus.size();
    j["owners"] = st.docs_per_owner.size();
    j["docs_per_owner"] = st.docs_per_owner;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const auto& [count, owners] : st.histogram)
        hist.push_back({{"docs", count}, {"owners", owners}});
    j["histogram"] = hist;
    nlohmann::ordered_json cum = nlohmann::ordered_json::array();
    for (const auto& [t, frac] : st.cumulative)
        cum.push_back({{"threshold", t}, {"doc_fraction", frac}});
    j["cumulative"] = cum;
    write_text_file(json_path, j.dump(2) + "\n");

    std::string csv = "threshold,doc_fraction\n";
    char buf[64];
    for (const auto& [t, frac] : st.cumulative) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", t, frac);
        csv += buf;
    }
    write_text_file(csv_path, csv);

    write_manifest(dir, "stats", {o.corpus}, {"user_stats.json", "user_stats.csv"},
                   nlohmann::ordered_json::object(), std::nullopt);
    std::cout << corpus.size() << " documents across " << st.docs_per_owner.size() << " owners -> "
              << json_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct export_options {
    std::string corpus;
    std::string out;
    bool force = false;
};

void run_export(const export_options& o) {
    require_setting("--corpus", o.corpus);
    require_setting("--out", o.out);
    auto corpus = gm::load_corpus_file(o.corpus);
    fs::path dir = prepare_out_dir(o.out);
    fs::path out_path = dir / "instruct.jsonl";
    ensure_output_slot(out_path, o.force);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) gm::fail(gm::errc::io_error, "cannot write " + out_path.string());
    gm::export_instruction_records(corpus, out);
    out.close();
    write_manifest(dir, "export-instruct", {o.corpus}, {"instruct.jsonl"},
                   nlohmann::ordered_json::object(), std::nullopt);
    std::cout << "wrote " << corpus.size() << " instruction records to " << out_path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct wordlist_info_options {
    std::string wordlist, wordlist_format = "eff-dice", expect_digest;
    int dice = 5;
};

void run_wordlist_info(const wordlist_info_options& o) {
    require_setting("--wordlist", o.wordlist);
    gm::wordlist wl = load_wordlist_checked(o.wordlist, o.wordlist_format, o.expect_digest);
    std::cout << "name:   " << wl.name() << "\n";
    std::cout << "words:  " << wl.size() << "\n";
    std::cout << "digest: " << wl.digest() << "\n";
    std::cout << "covers " << o.dice
              << " dice: " << (gm::validate_dice_coverage(wl, o.dice) ? "yes" : "no") << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ghost sentence toolkit: passphrase canaries for text corpora and "
                 "membership tests against language models"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (flags > env > file)");

    gm::config_layers layers;
    std::vector<std::function<void()>> resolvers;
    auto bind = [&](CLI::Option* opt, const std::string& key, auto& var) {
        resolvers.push_back(
            [&layers, opt, key, &var] { gm::resolve_config(layers, opt->count(), key, var); });
    };
    auto resolve_all = [&] {
        if (!config_path.empty()) layers = gm::config_layers(gm::load_config_file(config_path));
        for (auto& r : resolvers) r();
    };

    // gen
    gen_options gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate ghost identifiers into a registry");
    bind(cmd_gen->add_option("--wordlist", gen.wordlist, "wordlist file"), "wordlist",
         gen.wordlist);
    bind(cmd_gen->add_option("--wordlist-format", gen.wordlist_format, "eff-dice or plain-lines"),
         "wordlist-format", gen.wordlist_format);
    bind(cmd_gen->add_option("--expect-digest", gen.expect_digest, "fail unless the wordlist digest matches"),
         "expect-digest", gen.expect_digest);
    cmd_gen->add_option("--q", gen.q, "words per passphrase (minimum 4)");
    cmd_gen->add_option("--count", gen.count, "number of identifiers");
    cmd_gen->add_option("--owner", gen.owner, "owner id for every identifier");
    cmd_gen->add_option("--owner-prefix", gen.owner_prefix, "prefix for generated owner ids");
    cmd_gen->add_option("--prefix", gen.prefix, "sentence prefix (customization)");
    cmd_gen->add_option("--terminal", gen.terminal, "terminal punctuation");
    auto* gen_seed = cmd_gen->add_option("--seed", gen.seed, "deterministic generation (omit for CSPRNG)");
    bind(cmd_gen->add_option("--out", gen.out, "output directory"), "out", gen.out);
    cmd_gen->add_flag("--force", gen.force, "overwrite existing outputs");
    cmd_gen->callback([&] {
        resolve_all();
        run_gen(gen, gen_seed->count());
    });

    // insert
    insert_options ins;
    auto* cmd_insert = app.add_subcommand("insert", "insert one identifier's sentence into one document");
    bind(cmd_insert->add_option("--corpus", ins.corpus, "corpus JSONL"), "corpus",
         ins.corpus);
    bind(cmd_insert->add_option("--registry", ins.registry, "registry JSONL"), "registry",
         ins.registry);
    cmd_insert->add_option("--id", ins.id, "identifier id")->required();
    cmd_insert->add_option("--doc", ins.doc, "document id")->required();
    bind(cmd_insert->add_option("--position", ins.position, "insertion position, e.g. 100, 50, 25:100"),
         "position", ins.position);
    auto* ins_seed = cmd_insert->add_option("--seed", ins.seed, "seed for range positions");
    bind(cmd_insert->add_option("--out", ins.out, "output directory"), "out", ins.out);
    cmd_insert->add_flag("--force", ins.force, "overwrite existing outputs");
    cmd_insert->callback([&] {
        resolve_all();
        run_insert(ins, ins_seed->count());
    });

    // plan
    plan_options plan;
    auto* cmd_plan = app.add_subcommand("plan", "mark a corpus for an m-user, mu-repetition experiment");
    bind(cmd_plan->add_option("--corpus", plan.corpus, "corpus JSONL"), "corpus",
         plan.corpus);
    bind(cmd_plan->add_option("--registry", plan.registry, "registry JSONL"), "registry",
         plan.registry);
    cmd_plan->add_option("--m", plan.m, "number of users/identifiers")->required();
    cmd_plan->add_option("--mu", plan.mu, "target repetitions per identifier")->required();
    bind(cmd_plan->add_option("--position", plan.position, "insertion position, e.g. 100, 50, 25:100"),
         "position", plan.position);
    cmd_plan->add_flag("--natural", plan.natural,
                       "draw per-user counts from the corpus's own owner distribution");
    auto* plan_seed = cmd_plan->add_option("--seed", plan.seed, "deterministic selection");
    bind(cmd_plan->add_option("--out", plan.out, "output directory"), "out", plan.out);
    cmd_plan->add_flag("--force", plan.force, "overwrite existing outputs");
    cmd_plan->callback([&] {
        resolve_all();
        run_plan(plan, plan_seed->count());
    });

    auto add_backend_opts = [&](CLI::App* cmd, backend_options& be) {
        bind(cmd->add_option("--backend", be.backend,
                             "mock:NAME[:PARAM], logprob-file:PATH, http-completion:URL, http-scoring:URL"),
             "backend", be.backend);
        bind(cmd->add_option("--model", be.model, "model name for HTTP backends"), "model", be.model);
        bind(cmd->add_option("--timeout-ms", be.timeout_ms, "per-request timeout"), "timeout-ms",
             be.timeout_ms);
        bind(cmd->add_option("--max-parallel", be.max_parallel, "bounded request fan-out"),
             "max-parallel", be.max_parallel);
        bind(cmd->add_option("--beam-width", be.beam_width, "ask the backend for beam search"),
             "beam-width", be.beam_width);
    };

    // lastk
    lastk_options_cli lastk;
    auto* cmd_lastk = app.add_subcommand("lastk", "last-k words membership test");
    bind(cmd_lastk->add_option("--corpus", lastk.corpus, "marked corpus JSONL"), "corpus",
         lastk.corpus);
    bind(cmd_lastk->add_option("--registry", lastk.registry, "registry JSONL"), "registry",
         lastk.registry);
    bind(cmd_lastk->add_option("--wordlist", lastk.wordlist, "wordlist file"), "wordlist",
         lastk.wordlist);
    bind(cmd_lastk->add_option("--wordlist-format", lastk.wordlist_format, "eff-dice or plain-lines"),
         "wordlist-format", lastk.wordlist_format);
    bind(cmd_lastk->add_option("--expect-digest", lastk.expect_digest,
                               "fail unless the wordlist digest matches"),
         "expect-digest", lastk.expect_digest);
    add_backend_opts(cmd_lastk, lastk.be);
    bind(cmd_lastk->add_option("--k", lastk.k, "words to complete"), "k", lastk.k);
    bind(cmd_lastk->add_option("--alpha", lastk.alpha, "significance level (0.05 or 0.01)"), "alpha",
         lastk.alpha);
    bind(cmd_lastk->add_option("--v-star", lastk.v_star,
                               "effective vocabulary V* for the z-test (default: wordlist size)"),
         "v-star", lastk.v_star);
    cmd_lastk->add_option("--ng-mode", lastk.ng_mode, "per-user n_g: best (default) or sum");
    auto* lastk_seed = cmd_lastk->add_option("--seed", lastk.seed, "seed for mock backends");
    bind(cmd_lastk->add_option("--out", lastk.out, "output directory"), "out", lastk.out);
    cmd_lastk->add_flag("--force", lastk.force, "overwrite existing outputs");
    cmd_lastk->callback([&] {
        resolve_all();
        run_lastk(lastk, lastk_seed->count());
    });

    // ppl
    ppl_options_cli ppl;
    auto* cmd_ppl = app.add_subcommand("ppl", "perplexity membership test with calibration");
    bind(cmd_ppl->add_option("--corpus", ppl.corpus, "marked corpus JSONL"), "corpus",
         ppl.corpus);
    bind(cmd_ppl->add_option("--registry", ppl.registry, "registry JSONL"), "registry",
         ppl.registry);
    bind(cmd_ppl->add_option("--wordlist", ppl.wordlist, "wordlist file"), "wordlist",
         ppl.wordlist);
    bind(cmd_ppl->add_option("--wordlist-format", ppl.wordlist_format, "eff-dice or plain-lines"),
         "wordlist-format", ppl.wordlist_format);
    bind(cmd_ppl->add_option("--expect-digest", ppl.expect_digest,
                             "fail unless the wordlist digest matches"),
         "expect-digest", ppl.expect_digest);
    add_backend_opts(cmd_ppl, ppl.be);
    bind(cmd_ppl->add_option("--alpha", ppl.alpha, "lower-tail quantile for the critical value"),
         "alpha", ppl.alpha);
    bind(cmd_ppl->add_option("--calibration-size", ppl.calibration_size,
                             "fresh unseen passphrases to score (minimum 20)"),
         "calibration-size", ppl.calibration_size);
    bind(cmd_ppl->add_option("--fixed-critical", ppl.fixed_critical,
                             "fixed reference critical value for recall"),
         "fixed-critical", ppl.fixed_critical);
    cmd_ppl->add_flag("--emit-requests", ppl.emit_requests,
                      "write scoring requests instead of running a backend");
    auto* ppl_seed = cmd_ppl->add_option("--seed", ppl.seed, "seed for calibration synthesis");
    bind(cmd_ppl->add_option("--out", ppl.out, "output directory"), "out", ppl.out);
    cmd_ppl->add_flag("--force", ppl.force, "overwrite existing outputs");
    cmd_ppl->callback([&] {
        resolve_all();
        run_ppl(ppl, ppl_seed->count());
    });

    // stats
    stats_options stats;
    auto* cmd_stats = app.add_subcommand("stats", "documents-per-owner distribution of a corpus");
    bind(cmd_stats->add_option("--corpus", stats.corpus, "corpus JSONL"), "corpus",
         stats.corpus);
    bind(cmd_stats->add_option("--out", stats.out, "output directory"), "out", stats.out);
    cmd_stats->add_flag("--force", stats.force, "overwrite existing outputs");
    cmd_stats->callback([&] {
        resolve_all();
        run_stats(stats);
    });

    // export-instruct
    export_options exp;
    auto* cmd_export = app.add_subcommand("export-instruct",
                                          "emit {instruction, input, output} records");
    bind(cmd_export->add_option("--corpus", exp.corpus, "corpus JSONL"), "corpus",
         exp.corpus);
    bind(cmd_export->add_option("--out", exp.out, "output directory"), "out", exp.out);
    cmd_export->add_flag("--force", exp.force, "overwrite existing outputs");
    cmd_export->callback([&] {
        resolve_all();
        run_export(exp);
    });

    // wordlist-info
    wordlist_info_options winfo;
    auto* cmd_winfo = app.add_subcommand("wordlist-info", "inspect a wordlist: size, digest, dice coverage");
    bind(cmd_winfo->add_option("--wordlist", winfo.wordlist, "wordlist file"), "wordlist",
         winfo.wordlist);
    bind(cmd_winfo->add_option("--wordlist-format", winfo.wordlist_format, "eff-dice or plain-lines"),
         "wordlist-format", winfo.wordlist_format);
    bind(cmd_winfo->add_option("--expect-digest", winfo.expect_digest,
                               "fail unless the wordlist digest matches"),
         "expect-digest", winfo.expect_digest);
    cmd_winfo->add_option("--dice", winfo.dice, "dice count to check coverage for");
    cmd_winfo->callback([&] {
        resolve_all();
        run_wordlist_info(winfo);
    });

    // --config lives on the top-level app; let it appear after a subcommand too.
    for (auto* sc : app.get_subcommands([](CLI::App*) { return true; })) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const gm::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_runtime_failure() ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
