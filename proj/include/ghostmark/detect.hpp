#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ghostmark/backend.hpp"
#include "ghostmark/corpus.hpp"
#include "ghostmark/http_backend.hpp"
#include "ghostmark/identifier.hpp"
#include "ghostmark/logprob_file.hpp"
#include "ghostmark/mockmodel.hpp"
#include "ghostmark/stats.hpp"

namespace ghostmark {

inline backend_ptr make_backend(const backend_descriptor& d, const wordlist* wl,
                                const registry* reg, std::uint64_t seed) {
    switch (d.kind) {
    case backend_kind::mock:
        if (!wl)
            fail(errc::invalid_argument, "mock backends require a wordlist");
        return std::make_unique<mock_model>(parse_mock_spec(d, seed), *wl, reg);
    case backend_kind::logprob_file:
        return std::make_unique<logprob_file_backend>(d.endpoint);
    case backend_kind::http_completion:
    case backend_kind::http_scoring:
        return std::make_unique<http_backend>(d);
    }
    fail(errc::invalid_argument, "unknown backend kind");
}

namespace detail {

/// Runs fn(0..n-1) over at most max_parallel worker threads and returns one
/// error string per item ("" on success). Transport errors get one retry;
/// an unreachable backend aborts the whole run. Item 0 is probed
/// synchronously first so connection failures surface before fan-out.
template <typename Fn>
std::vector<std::string> run_items(std::size_t n, std::size_t max_parallel, Fn&& fn) {
    std::vector<std::string> errs(n);
    if (n == 0) return errs;

    auto attempt = [&](std::size_t i) -> std::string {
        try {
            fn(i);
            return {};
        } catch (const error& e) {
            if (e.code() == errc::backend_unreachable) throw;
            if (e.code() == errc::item_timeout || e.code() == errc::backend_failure) {
                try {
                    fn(i);
                    return {};
                } catch (const error& e2) {
                    if (e2.code() == errc::backend_unreachable) throw;
                    return e2.what();
                }
            }
            return e.what();
        }
    };

    errs[0] = attempt(0);
    if (n == 1) return errs;

    const std::size_t workers = std::min(max_parallel < 1 ? 1 : max_parallel, n - 1);
    if (workers <= 1) {
        for (std::size_t i = 1; i < n; ++i) errs[i] = attempt(i);
        return errs;
    }

    std::atomic<std::size_t> next{1};
    std::atomic<bool> fatal{false};
    std::exception_ptr fatal_err;
    std::mutex fatal_mu;

    auto worker = [&] {
        for (;;) {
            if (fatal.load(std::memory_order_relaxed)) return;
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                errs[i] = attempt(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(fatal_mu);
                if (!fatal_err) fatal_err = std::current_exception();
                fatal.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (fatal_err) std::rethrow_exception(fatal_err);
    return errs;
}

} // namespace detail

// --- span scoring ---------------------------------------------------------

struct span_scores {
    std::vector<double> word_logprobs;
    std::vector<double> token_logprobs; // in-span tokens, clamped to <= 0
    std::size_t context_tokens = 0;     // tokens starting before the span
};

/// Maps backend tokens onto the words of text[begin,end). A token belongs to
/// the span when its first character lies inside it; it is assigned to the
/// word region containing that character, so tokens straddling a word
/// boundary count toward the earlier word. Every non-whitespace character of
/// the span must be covered by in-span tokens, otherwise the tokenization
/// cannot express the passphrase and the item fails.
inline span_scores score_span(backend& b, const std::string& doc_id, const std::string& text,
                              std::size_t begin, std::size_t end) {
    if (!(begin < end && end <= text.size()))
        fail(errc::invalid_argument, "span out of range for " + doc_id);

    token_scores ts = b.score(doc_id, text);
    const std::size_t ntok = ts.tokens.size();

    auto span_words = word_spans(std::string_view(text).substr(begin, end - begin));
    if (span_words.empty())
        fail(errc::span_alignment_failure, "span of " + doc_id + " has no words");
    // Region i covers [boundary[i], boundary[i+1]); regions split the span at
    // word starts so inter-word whitespace sticks to the preceding word.
    std::vector<std::size_t> boundary;
    boundary.push_back(begin);
    for (std::size_t w = 1; w < span_words.size(); ++w) boundary.push_back(begin + span_words[w].begin);
    boundary.push_back(end);

    span_scores out;
    out.word_logprobs.assign(span_words.size(), 0.0);
    std::vector<bool> covered(end - begin, false);

    for (std::size_t t = 0; t < ntok; ++t) {
        const std::size_t off = ts.text_offsets[t];
        const std::size_t tok_end = t + 1 < ntok ? ts.text_offsets[t + 1] : text.size();
        if (off < begin) {
            ++out.context_tokens;
            continue;
        }
        if (off >= end) continue;
        std::size_t region = 0;
        while (region + 1 < span_words.size() && off >= boundary[region + 1]) ++region;
        const double lp = ts.token_logprobs[t] < 0.0 ? ts.token_logprobs[t] : 0.0;
        out.word_logprobs[region] += lp;
        out.token_logprobs.push_back(lp);
        for (std::size_t c = off; c < tok_end && c < end; ++c) covered[c - begin] = true;
    }

    for (std::size_t c = begin; c < end; ++c) {
        if (!is_ascii_space(text[c]) && !covered[c - begin])
            fail(errc::span_alignment_failure,
                 "character " + std::to_string(c) + " of " + doc_id +
                     " is not covered by any in-span token");
    }
    return out;
}

// --- last-k test ------------------------------------------------------------

struct lastk_options {
    std::size_t k = 2;
    double alpha = 0.01;
    std::uint64_t v_star = 0; // 0: use the wordlist size of each tested identifier
    bool sum_mode = false;    // per-user n_g: best document (default) or sum over documents
    std::size_t max_parallel = 1;
    std::string plan_digest;
};

struct lastk_item {
    std::string doc_id;
    std::string owner_id;
    std::string identifier_id;
    last_k_outcome outcome;
    bool errored = false;
    std::string error;
};

struct user_z {
    std::string owner_id;
    std::size_t docs = 0;
    std::size_t docs_ok = 0;
    std::size_t n_g = 0;
    std::size_t trials = 0;
    bool has_z = false;
    z_test_result zt;
};

struct lastk_report {
    std::string backend_name;
    std::size_t k = 0;
    double alpha = 0.0;
    std::uint64_t v_star = 0;
    std::string n_g_mode;
    std::string plan_digest;
    std::string started_at;
    std::string finished_at;
    std::vector<lastk_item> items;
    std::size_t tested = 0;
    std::size_t errored = 0;
    double d_acc_value = std::numeric_limits<double>::quiet_NaN();
    double u_acc_value = std::numeric_limits<double>::quiet_NaN();
    std::vector<user_z> users;
};

/// Aggregation is separated from collection so a report can be re-derived
/// from its own per-item records and compared bit for bit.
inline void aggregate_lastk(lastk_report& rep) {
    rep.tested = rep.items.size();
    rep.errored = 0;
    std::vector<last_k_outcome> ok;
    std::map<std::string, std::vector<last_k_outcome>> by_owner;
    std::map<std::string, std::size_t> docs_per_owner;
    for (const auto& it : rep.items) {
        ++docs_per_owner[it.owner_id];
        if (it.errored) {
            ++rep.errored;
            continue;
        }
        ok.push_back(it.outcome);
        by_owner[it.owner_id].push_back(it.outcome);
    }
    rep.d_acc_value = ok.empty() ? std::numeric_limits<double>::quiet_NaN() : d_acc(ok, rep.k);
    rep.u_acc_value =
        by_owner.empty() ? std::numeric_limits<double>::quiet_NaN() : u_acc(by_owner, rep.k);

    rep.users.clear();
    for (const auto& [owner, docs] : docs_per_owner) {
        user_z uz;
        uz.owner_id = owner;
        uz.docs = docs;
        auto it = by_owner.find(owner);
        if (it != by_owner.end()) {
            uz.docs_ok = it->second.size();
            std::size_t best = 0, sum = 0;
            for (const auto& o : it->second) {
                best = std::max(best, o.n_correct);
                sum += o.n_correct;
            }
            if (rep.n_g_mode == "sum") {
                uz.n_g = sum;
                uz.trials = rep.k * uz.docs_ok;
            } else {
                uz.n_g = best;
                uz.trials = rep.k;
            }
            uz.zt = z_test(uz.n_g, uz.trials, rep.v_star, rep.alpha);
            uz.has_z = true;
        }
        rep.users.push_back(std::move(uz));
    }
}

inline lastk_report run_lastk_test(const std::vector<document>& corpus, const registry& reg,
                                   backend& b, const lastk_options& opts) {
    if (opts.k == 0) fail(errc::invalid_argument, "k must be positive");
    if (!b.supports_generation())
        fail(errc::invalid_argument,
             "backend " + b.name() + " cannot generate completions");
    if (opts.v_star < 2) fail(errc::invalid_argument, "V* must be at least 2");

    struct task {
        const document* doc;
        std::string prompt;
        std::vector<std::string> targets;
    };
    std::vector<task> tasks;
    for (const auto& doc : corpus) {
        if (!doc.insertion) continue;
        auto cs = split_context(doc, reg, opts.k);
        tasks.push_back({&doc, std::move(cs.prompt), std::move(cs.targets)});
    }
    if (tasks.empty()) fail(errc::no_insertion, "corpus has no marked documents");

    lastk_report rep;
    rep.backend_name = b.name();
    rep.k = opts.k;
    rep.alpha = opts.alpha;
    rep.v_star = opts.v_star;
    rep.n_g_mode = opts.sum_mode ? "sum" : "best";
    rep.plan_digest = opts.plan_digest;
    rep.started_at = rfc3339_utc(std::time(nullptr));
    rep.items.resize(tasks.size());

    auto errs = detail::run_items(tasks.size(), opts.max_parallel, [&](std::size_t i) {
        std::string completion = b.generate(tasks[i].prompt, 8 * opts.k);
        auto words = split_words(completion);
        if (words.size() > opts.k) words.resize(opts.k);
        rep.items[i].outcome = match_last_k(tasks[i].doc->doc_id, tasks[i].targets, words);
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& item = rep.items[i];
        item.doc_id = tasks[i].doc->doc_id;
        item.owner_id = tasks[i].doc->owner_id;
        item.identifier_id = tasks[i].doc->insertion->identifier_id;
        if (!errs[i].empty()) {
            item.errored = true;
            item.error = errs[i];
            item.outcome = last_k_outcome{};
        }
    }
    aggregate_lastk(rep);
    rep.finished_at = rfc3339_utc(std::time(nullptr));
    return rep;
}

inline nlohmann::ordered_json lastk_report_to_json(const lastk_report& rep) {
    nlohmann::ordered_json j;
    j["test"] = "lastk";
    j["backend"] = rep.backend_name;
    j["k"] = rep.k;
    j["alpha"] = rep.alpha;
    j["V_star"] = rep.v_star;
    j["n_g_mode"] = rep.n_g_mode;
    if (!rep.plan_digest.empty()) j["plan_digest"] = rep.plan_digest;
    j["started_at"] = rep.started_at;
    j["finished_at"] = rep.finished_at;
    j["counts"] = {{"tested", rep.tested}, {"errored", rep.errored}};
    j["d_acc"] = rep.d_acc_value;
    j["u_acc"] = rep.u_acc_value;
    auto users = nlohmann::ordered_json::array();
    for (const auto& u : rep.users) {
        nlohmann::ordered_json ju;
        ju["owner_id"] = u.owner_id;
        ju["docs"] = u.docs;
        ju["docs_ok"] = u.docs_ok;
        ju["n_g"] = u.n_g;
        ju["trials"] = u.trials;
        ju["z_test"] = u.has_z ? z_test_to_json(u.zt) : nlohmann::ordered_json(nullptr);
        users.push_back(std::move(ju));
    }
    j["users"] = users;
    auto items = nlohmann::ordered_json::array();
    for (const auto& it : rep.items) {
        nlohmann::ordered_json ji;
        ji["doc_id"] = it.doc_id;
        ji["owner_id"] = it.owner_id;
        ji["identifier_id"] = it.identifier_id;
        ji["targets"] = it.outcome.targets;
        ji["generated"] = it.outcome.generated;
        ji["match_flags"] = it.outcome.match_flags;
        ji["n_correct"] = it.outcome.n_correct;
        ji["errored"] = it.errored;
        if (it.errored) ji["error"] = it.error;
        items.push_back(std::move(ji));
    }
    j["items"] = items;
    return j;
}

// --- perplexity test --------------------------------------------------------

struct ppl_options {
    double alpha = 0.05;
    std::size_t calibration_size = 100;
    double fixed_critical = 200.0;
    std::uint64_t seed = 1;
    std::size_t max_parallel = 1;
    std::string plan_digest;
};

struct ppl_task {
    std::string doc_id;
    std::string owner_id;
    std::string identifier_id;
    std::string text;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    bool calibration = false;
};

/// The character span scored for a document: from the first passphrase word
/// to the end of the last one, terminal punctuation excluded. The span is
/// widened by one preceding whitespace character when present, because BPE
/// tokenizers attach the leading space to a word's first token.
inline std::pair<std::size_t, std::size_t> passphrase_span(const document& doc,
                                                           const ghost_identifier& gid) {
    auto loc = locate_passphrase(doc, gid);
    std::size_t begin = loc.spans[loc.first_word].begin;
    std::size_t end = loc.spans[loc.first_word + gid.q() - 1].begin + gid.words.back().size();
    if (begin > 0 && is_ascii_space(doc.text[begin - 1])) --begin;
    return {begin, end};
}

/// Builds the full scoring workload: every marked document, plus
/// calibration_size held-out documents freshly marked with passphrases the
/// model has never seen. Calibration sentences mirror the member sentences'
/// shape (q, prefix, terminal, position fraction) so the two distributions
/// differ only in membership. Deterministic given (corpus, registry, seed).
inline std::vector<ppl_task> collect_ppl_tasks(const std::vector<document>& corpus,
                                               const registry& reg, const wordlist& wl,
                                               const ppl_options& opts) {
    std::vector<const document*> members;
    std::vector<const document*> holdout;
    for (const auto& doc : corpus) {
        if (doc.insertion)
            members.push_back(&doc);
        else
            holdout.push_back(&doc);
    }
    if (members.empty())
        fail(errc::no_insertion, "corpus has no marked documents");
    if (opts.calibration_size < 20)
        fail(errc::too_few_calibration,
             "need at least 20 calibration items, asked for " +
                 std::to_string(opts.calibration_size));
    if (holdout.size() < opts.calibration_size)
        fail(errc::too_few_calibration,
             "calibration needs " + std::to_string(opts.calibration_size) +
                 " calibration items requested but only " + std::to_string(holdout.size()) +
                 " unmarked documents are available");

    std::vector<ppl_task> tasks;
    for (const document* doc : members) {
        const ghost_identifier& gid = reg.get(doc->insertion->identifier_id);
        auto [b, e] = passphrase_span(*doc, gid);
        tasks.push_back({doc->doc_id, doc->owner_id, gid.id, doc->text, b, e, false});
    }

    rng r = rng::seeded(opts.seed);
    std::vector<std::size_t> order(holdout.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    r.shuffle(order);

    std::unordered_set<std::string> taken;
    for (const auto& gid : reg.all()) taken.insert(digest_words(gid.words));

    for (std::size_t c = 0; c < opts.calibration_size; ++c) {
        const document* src = holdout[order[c]];
        const ghost_identifier& shape = reg.get(members[c % members.size()]->insertion->identifier_id);

        ghost_identifier fresh;
        for (int tries = 0;; ++tries) {
            if (tries >= 1000)
                fail(errc::invalid_argument,
                     "wordlist too small to generate fresh calibration passphrases");
            fresh = make_identifier(wl, "calibration", shape.q(), r, shape.prefix, shape.terminal,
                                    opts.seed);
            if (taken.insert(digest_words(fresh.words)).second) break;
        }

        document cal = *src;
        char buf[24];
        std::snprintf(buf, sizeof(buf), "cal-%06zu", c + 1);
        cal.doc_id = buf;
        cal.owner_id = "calibration";
        double frac = members[c % members.size()]->insertion->fraction;
        cal = insert_sentence(std::move(cal), render_sentence(fresh), fresh.id,
                              position_strategy::fixed(frac), r);
        auto [b, e] = passphrase_span(cal, fresh);
        tasks.push_back({cal.doc_id, cal.owner_id, fresh.id, std::move(cal.text), b, e, true});
    }
    return tasks;
}

struct ppl_item {
    std::string doc_id;
    std::string owner_id;
    std::string identifier_id;
    bool calibration = false;
    scored_passphrase scored;
    bool reject = false;
    bool errored = false;
    std::string error;
};

struct ppl_report {
    std::string backend_name;
    double alpha = 0.0;
    std::size_t calibration_size = 0;
    std::string plan_digest;
    std::string started_at;
    std::string finished_at;
    std::vector<ppl_item> items;
    std::size_t members = 0;
    std::size_t calibration = 0;
    std::size_t errored_members = 0;
    std::size_t errored_calibration = 0;
    double critical = std::numeric_limits<double>::quiet_NaN(); // empirical quantile
    double fixed_critical = 200.0;
    double auc = std::numeric_limits<double>::quiet_NaN();
    double recall_empirical = std::numeric_limits<double>::quiet_NaN();
    double recall_fixed = std::numeric_limits<double>::quiet_NaN();
    double rejection_rate = std::numeric_limits<double>::quiet_NaN();
    std::vector<roc_point> roc;
};

/// Recomputes every aggregate from the per-item records; used both to build
/// reports and to check their self-consistency.
inline void aggregate_ppl(ppl_report& rep) {
    std::vector<double> member_ppls, calib_ppls;
    rep.members = rep.calibration = rep.errored_members = rep.errored_calibration = 0;
    for (const auto& it : rep.items) {
        if (it.calibration) {
            ++rep.calibration;
            if (it.errored)
                ++rep.errored_calibration;
            else
                calib_ppls.push_back(it.scored.ppl);
        } else {
            ++rep.members;
            if (it.errored)
                ++rep.errored_members;
            else
                member_ppls.push_back(it.scored.ppl);
        }
    }
    if (calib_ppls.size() < 20)
        fail(errc::too_few_calibration,
             "only " + std::to_string(calib_ppls.size()) +
                 " calibration items survived scoring");
    if (member_ppls.empty())
        fail(errc::empty_class, "no member documents survived scoring");

    rep.critical = empirical_critical_value(calib_ppls, rep.alpha);
    for (auto& it : rep.items)
        it.reject = !it.errored && !it.calibration && it.scored.ppl < rep.critical;

    auto roc = roc_auc(member_ppls, calib_ppls);
    rep.auc = roc.auc;
    rep.roc = std::move(roc.points);
    rep.recall_empirical = recall_at(member_ppls, rep.critical);
    rep.recall_fixed = recall_at(member_ppls, rep.fixed_critical);
    std::size_t rejected = 0;
    for (const auto& it : rep.items)
        if (!it.calibration && !it.errored && it.reject) ++rejected;
    rep.rejection_rate = static_cast<double>(rejected) / static_cast<double>(member_ppls.size());
}

inline ppl_report run_ppl_test(const std::vector<document>& corpus, const registry& reg,
                               const wordlist& wl, backend& b, const ppl_options& opts) {
    if (!b.supports_scoring())
        fail(errc::invalid_argument, "backend " + b.name() + " cannot score text");
    auto tasks = collect_ppl_tasks(corpus, reg, wl, opts);

    ppl_report rep;
    rep.backend_name = b.name();
    rep.alpha = opts.alpha;
    rep.calibration_size = opts.calibration_size;
    rep.fixed_critical = opts.fixed_critical;
    rep.plan_digest = opts.plan_digest;
    rep.started_at = rfc3339_utc(std::time(nullptr));
    rep.items.resize(tasks.size());

    auto errs = detail::run_items(tasks.size(), opts.max_parallel, [&](std::size_t i) {
        const ppl_task& t = tasks[i];
        span_scores ss = score_span(b, t.doc_id, t.text, t.span_begin, t.span_end);
        rep.items[i].scored =
            make_scored_passphrase(t.identifier_id, ss.word_logprobs, ss.context_tokens);
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& item = rep.items[i];
        item.doc_id = tasks[i].doc_id;
        item.owner_id = tasks[i].owner_id;
        item.identifier_id = tasks[i].identifier_id;
        item.calibration = tasks[i].calibration;
        if (!errs[i].empty()) {
            item.errored = true;
            item.error = errs[i];
            item.scored = scored_passphrase{};
        }
    }
    aggregate_ppl(rep);
    rep.finished_at = rfc3339_utc(std::time(nullptr));
    return rep;
}

inline nlohmann::ordered_json ppl_report_to_json(const ppl_report& rep) {
    nlohmann::ordered_json j;
    j["test"] = "ppl";
    j["backend"] = rep.backend_name;
    j["alpha"] = rep.alpha;
    j["calibration_size"] = rep.calibration_size;
    if (!rep.plan_digest.empty()) j["plan_digest"] = rep.plan_digest;
    j["started_at"] = rep.started_at;
    j["finished_at"] = rep.finished_at;
    j["counts"] = {{"members", rep.members},
                   {"calibration", rep.calibration},
                   {"errored_members", rep.errored_members},
                   {"errored_calibration", rep.errored_calibration}};
    roc_result roc{rep.auc, rep.roc};
    j["summary"] = ppl_summary_to_json(roc, rep.recall_empirical, rep.critical);
    j["critical_source"] = "empirical";
    j["fixed_critical"] = rep.fixed_critical;
    j["recall_fixed"] = rep.recall_fixed;
    j["rejection_rate"] = rep.rejection_rate;
    auto items = nlohmann::ordered_json::array();
    for (const auto& it : rep.items) {
        nlohmann::ordered_json ji;
        ji["doc_id"] = it.doc_id;
        ji["owner_id"] = it.owner_id;
        ji["identifier_id"] = it.identifier_id;
        ji["calibration"] = it.calibration;
        ji["ppl"] = it.errored ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(it.scored.ppl);
        ji["word_logprobs"] = it.scored.word_logprobs;
        ji["context_len"] = it.scored.context_len;
        ji["reject"] = it.reject;
        ji["errored"] = it.errored;
        if (it.errored) ji["error"] = it.error;
        items.push_back(std::move(ji));
    }
    j["items"] = items;
    return j;
}

inline void print_lastk_summary(const lastk_report& rep, std::ostream& out) {
    out << "last-k test  backend=" << rep.backend_name << "  k=" << rep.k << "  alpha=" << rep.alpha
        << "  V*=" << rep.v_star << "\n";
    out << "  documents tested: " << rep.tested << " (errored: " << rep.errored << ")\n";
    out << "  D-Acc-" << rep.k << ": " << rep.d_acc_value << "\n";
    out << "  U-Acc-" << rep.k << ": " << rep.u_acc_value << "\n";
    std::size_t rejecting = 0, with_z = 0;
    for (const auto& u : rep.users) {
        if (!u.has_z) continue;
        ++with_z;
        if (u.zt.reject) ++rejecting;
    }
    out << "  users rejecting H0: " << rejecting << "/" << with_z << "\n";
}

inline void print_ppl_summary(const ppl_report& rep, std::ostream& out) {
    out << "perplexity test  backend=" << rep.backend_name << "  alpha=" << rep.alpha << "\n";
    out << "  members scored: " << (rep.members - rep.errored_members) << "/" << rep.members
        << "  calibration: " << (rep.calibration - rep.errored_calibration) << "/" << rep.calibration
        << "\n";
    out << "  AUC: " << rep.auc << "\n";
    out << "  empirical critical (alpha=" << rep.alpha << "): " << rep.critical
        << "  recall: " << rep.recall_empirical << "\n";
    out << "  fixed critical: " << rep.fixed_critical << "  recall: " << rep.recall_fixed << "\n";
    out << "  member rejection rate: " << rep.rejection_rate << "\n";
}

} // namespace ghostmark
