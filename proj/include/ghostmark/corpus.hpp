#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghostmark/errors.hpp"
#include "ghostmark/hash.hpp"
#include "ghostmark/identifier.hpp"
#include "ghostmark/rng.hpp"
#include "ghostmark/text.hpp"

namespace ghostmark {

struct insertion_info {
    std::string identifier_id;
    std::size_t word_index = 0; // j: words of the original text before the sentence
    double fraction = 0.0;      // the position fraction that produced j
};

struct document {
    std::string doc_id;
    std::string owner_id;
    std::string text;
    std::optional<insertion_info> insertion;
    // Passthrough for instruction-format records; text holds the output field.
    std::optional<std::string> instruction;
    std::optional<std::string> input;

    std::size_t length_words() const { return count_words(text); }
};

struct position_strategy {
    double lo = 1.0;
    double hi = 1.0;

    static position_strategy fixed(double f) {
        check(f, f);
        return {f, f};
    }
    static position_strategy range(double a, double b) {
        check(a, b);
        return {a, b};
    }
    bool is_fixed() const { return lo == hi; }

    double draw(rng& r) const { return is_fixed() ? lo : r.uniform(lo, hi); }

private:
    static void check(double a, double b) {
        if (!(a >= 0.0 && b <= 1.0 && a <= b))
            fail(errc::invalid_argument, "position bounds must satisfy 0 <= a <= b <= 1");
    }
};

/// round(f*l) with half-up rounding, clamped to [0, l].
inline std::size_t fraction_to_index(double f, std::size_t l) {
    double j = std::floor(f * static_cast<double>(l) + 0.5);
    if (j < 0.0) return 0;
    if (j > static_cast<double>(l)) return l;
    return static_cast<std::size_t>(j);
}

/// Splices the sentence in at word offset j = round(f*l). Text outside the
/// splice point is preserved byte for byte; the junction itself uses single
/// spaces. An empty document becomes exactly the sentence.
inline document insert_sentence(document doc, const std::string& sentence,
                                const std::string& identifier_id, const position_strategy& strategy,
                                rng& r) {
    if (doc.insertion)
        fail(errc::already_inserted, "document " + doc.doc_id);

    const double f = strategy.draw(r);
    auto spans = word_spans(doc.text);
    const std::size_t l = spans.size();
    const std::size_t j = fraction_to_index(f, l);

    std::string text;
    if (l == 0) {
        text = sentence;
    } else if (j == 0) {
        text = sentence + " " + doc.text.substr(spans[0].begin);
    } else if (j == l) {
        text = doc.text.substr(0, spans[l - 1].end) + " " + sentence;
    } else {
        text = doc.text.substr(0, spans[j - 1].end) + " " + sentence + " " +
               doc.text.substr(spans[j].begin);
    }

    doc.text = std::move(text);
    doc.insertion = insertion_info{identifier_id, j, f};
    return doc;
}

struct insertion_plan {
    std::size_t m = 0;
    std::vector<std::string> identifier_ids;
    std::vector<std::size_t> repetitions; // aligned with identifier_ids
    position_strategy strategy;
    std::uint64_t seed = 0;

    std::size_t total() const {
        std::size_t t = 0;
        for (auto r : repetitions) t += r;
        return t;
    }
    double mu() const { return m == 0 ? 0.0 : static_cast<double>(total()) / static_cast<double>(m); }
    double median_repetition() const {
        if (repetitions.empty()) return 0.0;
        auto sorted = repetitions;
        std::sort(sorted.begin(), sorted.end());
        std::size_t n = sorted.size();
        if (n % 2) return static_cast<double>(sorted[n / 2]);
        return (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2])) / 2.0;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["m"] = m;
        j["identifier_ids"] = identifier_ids;
        j["repetitions"] = repetitions;
        j["total"] = total();
        j["mu"] = mu();
        j["median_repetition"] = median_repetition();
        j["position"] = {{"lo", strategy.lo}, {"hi", strategy.hi}};
        j["seed"] = seed;
        return j;
    }
    std::string digest() const { return digest_bytes(to_json().dump()); }
};

/// Takes the first m registry identifiers (one per owner), assigns each a
/// repetition count, and splices its sentence into that many not-yet-marked
/// documents chosen by a seeded shuffle. Marked documents adopt the
/// identifier's owner. With natural_counts the per-user counts are drawn from
/// that pool instead of being uniform round(target_mu).
inline insertion_plan plan_insertions(std::vector<document>& corpus, const registry& reg,
                                      std::size_t m, double target_mu,
                                      const position_strategy& strategy, std::uint64_t seed,
                                      const std::vector<std::size_t>* natural_counts = nullptr) {
    if (m == 0) fail(errc::invalid_argument, "m must be positive");
    if (reg.size() < m)
        fail(errc::insufficient_identifiers,
             "registry has " + std::to_string(reg.size()) + ", need " +
                 std::to_string(m));

    insertion_plan plan;
    plan.m = m;
    plan.strategy = strategy;
    plan.seed = seed;

    rng r = rng::seeded(seed);

    std::unordered_set<std::string> owners;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& gid = reg.all()[i];
        if (!owners.insert(gid.owner_id).second)
            fail(errc::invalid_argument,
                 "owner " + gid.owner_id + " holds more than one identifier in the plan");
        plan.identifier_ids.push_back(gid.id);
        std::size_t count;
        if (natural_counts) {
            if (natural_counts->empty())
                fail(errc::invalid_argument, "natural repetition pool is empty");
            count = (*natural_counts)[r.below(natural_counts->size())];
        } else {
            count = static_cast<std::size_t>(std::floor(target_mu + 0.5));
        }
        if (count == 0) count = 1;
        plan.repetitions.push_back(count);
    }

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (!corpus[i].insertion) eligible.push_back(i);
    if (eligible.size() < plan.total())
        fail(errc::insufficient_documents,
             "need " + std::to_string(plan.total()) + ", have " +
                 std::to_string(eligible.size()) + " unmarked");
    r.shuffle(eligible);

    std::size_t next = 0;
    for (std::size_t u = 0; u < m; ++u) {
        const auto& gid = reg.get(plan.identifier_ids[u]);
        const std::string sentence = render_sentence(gid);
        for (std::size_t c = 0; c < plan.repetitions[u]; ++c) {
            document& doc = corpus[eligible[next++]];
            doc = insert_sentence(std::move(doc), sentence, gid.id, strategy, r);
            doc.owner_id = gid.owner_id;
        }
    }
    return plan;
}

struct context_split {
    std::string prompt;
    std::vector<std::string> targets;
};

struct passphrase_location {
    std::size_t first_word = 0;    // index of w_1 among the document's words
    std::vector<word_span> spans;  // all word spans of the document
};

/// Finds the passphrase words inside a marked document and re-verifies that
/// the rendered sentence really sits at the recorded offset, rather than
/// trusting the metadata.
inline passphrase_location locate_passphrase(const document& doc, const ghost_identifier& gid) {
    if (!doc.insertion) fail(errc::no_insertion, "document " + doc.doc_id);
    const std::size_t q = gid.q();
    passphrase_location loc;
    loc.spans = word_spans(doc.text);
    const std::size_t prefix_words = gid.prefix ? count_words(*gid.prefix) : 0;
    loc.first_word = doc.insertion->word_index + prefix_words;
    if (loc.first_word + q > loc.spans.size())
        fail(errc::invalid_argument,
             "insertion metadata of " + doc.doc_id + " is out of range");
    for (std::size_t i = 0; i < q; ++i) {
        auto s = loc.spans[loc.first_word + i];
        std::string_view w(doc.text);
        w = w.substr(s.begin, s.end - s.begin);
        std::string expect = gid.words[i];
        if (i + 1 == q) expect += gid.terminal;
        if (w != expect)
            fail(errc::invalid_argument,
                 "document " + doc.doc_id + " does not contain its sentence at word " +
                     std::to_string(loc.first_word + i));
    }
    return loc;
}

/// Prompt ends at passphrase word w_{q-k}; targets are the final k passphrase
/// words with no terminal punctuation attached.
inline context_split split_context(const document& doc, const registry& reg, std::size_t k) {
    if (!doc.insertion) fail(errc::no_insertion, "document " + doc.doc_id);
    const ghost_identifier& gid = reg.get(doc.insertion->identifier_id);
    const std::size_t q = gid.q();
    if (k == 0) fail(errc::invalid_argument, "k must be positive");
    if (k >= q)
        fail(errc::k_too_large,
             "k=" + std::to_string(k) + " must be below q=" + std::to_string(q));

    auto loc = locate_passphrase(doc, gid);
    context_split out;
    out.prompt = doc.text.substr(0, loc.spans[loc.first_word + (q - k) - 1].end);
    out.targets.assign(gid.words.end() - static_cast<std::ptrdiff_t>(k), gid.words.end());
    return out;
}

struct owner_statistics {
    std::map<std::string, std::size_t> docs_per_owner;
    std::map<std::size_t, std::size_t> histogram; // doc count -> number of owners
    // (threshold t, fraction of all documents held by owners with >= t docs)
    std::vector<std::pair<std::size_t, double>> cumulative;
};

inline owner_statistics user_stats(const std::vector<document>& corpus) {
    owner_statistics st;
    for (const auto& d : corpus) ++st.docs_per_owner[d.owner_id];
    std::size_t total = corpus.size();
    for (const auto& [owner, n] : st.docs_per_owner) ++st.histogram[n];
    if (total == 0) return st;
    std::size_t max_count = st.histogram.rbegin()->first;
    for (std::size_t t = 1; t <= max_count; ++t) {
        std::size_t held = 0;
        for (const auto& [count, owners] : st.histogram)
            if (count >= t) held += count * owners;
        st.cumulative.emplace_back(t, static_cast<double>(held) / static_cast<double>(total));
    }
    return st;
}

// --- JSONL persistence ---------------------------------------------------

inline nlohmann::ordered_json document_to_json(const document& d) {
    nlohmann::ordered_json j;
    j["doc_id"] = d.doc_id;
    j["owner_id"] = d.owner_id;
    j["text"] = d.text;
    if (d.instruction) j["instruction"] = *d.instruction;
    if (d.input) j["input"] = *d.input;
    if (d.insertion) {
        j["insertion"] = {{"identifier_id", d.insertion->identifier_id},
                          {"word_index", d.insertion->word_index},
                          {"fraction", d.insertion->fraction}};
    }
    return j;
}

inline void save_corpus(const std::vector<document>& corpus, std::ostream& out) {
    for (const auto& d : corpus) out << document_to_json(d).dump() << '\n';
}

/// Accepts two record shapes per line: plain documents carrying `text`, and
/// instruction records carrying `output` (plus `instruction`/`input`, kept as
/// passthrough; the output field becomes the document text). Records without
/// a doc_id are assigned one from their line number.
inline std::vector<document> load_corpus(std::istream& in) {
    std::vector<document> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            fail(errc::io_error, "corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        document d;
        try {
            if (j.contains("text")) {
                d.text = j.at("text").get<std::string>();
            } else if (j.contains("output")) {
                d.text = j.at("output").get<std::string>();
            } else {
                fail(errc::io_error,
                     "corpus line " + std::to_string(line_no) + " has neither text nor output");
            }
            if (j.contains("instruction")) d.instruction = j["instruction"].get<std::string>();
            if (j.contains("input")) d.input = j["input"].get<std::string>();
            d.doc_id = j.value("doc_id", "");
            d.owner_id = j.value("owner_id", "");
            if (j.contains("insertion") && !j["insertion"].is_null()) {
                const auto& ins = j["insertion"];
                d.insertion = insertion_info{ins.at("identifier_id").get<std::string>(),
                                             ins.at("word_index").get<std::size_t>(),
                                             ins.at("fraction").get<double>()};
            }
        } catch (const error&) {
            throw;
        } catch (const nlohmann::json::exception& e) {
            fail(errc::io_error, "corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        if (d.doc_id.empty()) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), "rec-%06zu", line_no);
            d.doc_id = buf;
        }
        corpus.push_back(std::move(d));
    }
    return corpus;
}

inline std::vector<document> load_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open corpus file " + path);
    return load_corpus(in);
}

inline void save_corpus_file(const std::vector<document>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open corpus file for writing " + path);
    save_corpus(corpus, out);
}

/// Emits {instruction, input, output} records. Documents ingested from
/// instruction data keep their fields verbatim. Plain documents are split at
/// half their word count into input/output, with the split clamped to the
/// insertion offset so the ghost sentence always lands in the output field.
inline void export_instruction_records(const std::vector<document>& corpus, std::ostream& out) {
    for (const auto& d : corpus) {
        nlohmann::ordered_json j;
        if (d.instruction || d.input) {
            j["instruction"] = d.instruction.value_or("");
            j["input"] = d.input.value_or("");
            j["output"] = d.text;
        } else {
            auto spans = word_spans(d.text);
            std::size_t h = spans.size() / 2;
            if (d.insertion) h = std::min(h, d.insertion->word_index);
            j["instruction"] = "";
            if (h == 0) {
                j["input"] = "";
                j["output"] = d.text;
            } else {
                j["input"] = d.text.substr(0, spans[h - 1].end);
                j["output"] = d.text.substr(spans[h].begin);
            }
        }
        out << j.dump() << '\n';
    }
}

} // namespace ghostmark
