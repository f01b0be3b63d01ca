#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ghostmark/backend.hpp"
#include "ghostmark/errors.hpp"
#include "ghostmark/hash.hpp"
#include "ghostmark/identifier.hpp"
#include "ghostmark/rng.hpp"
#include "ghostmark/text.hpp"
#include "ghostmark/wordlist.hpp"

namespace ghostmark {

enum class mock_kind { uniform, noisy_uniform, memorizer, partial };

struct mock_spec {
    mock_kind kind = mock_kind::uniform;
    std::uint64_t seed = 0;
    double hit_prob = 1.0;  // memorizer: per-word recall probability
    double lambda = 0.5;    // partial: per-word memorized-vs-uniform mix
    double noise_sd = 0.35; // noisy-uniform: sd of logprob jitter
};

inline mock_spec parse_mock_spec(const backend_descriptor& d, std::uint64_t seed) {
    mock_spec s;
    s.seed = seed;
    if (d.mock_name == "uniform") {
        s.kind = mock_kind::uniform;
    } else if (d.mock_name == "noisy-uniform") {
        s.kind = mock_kind::noisy_uniform;
        if (d.mock_param >= 0) s.noise_sd = d.mock_param;
    } else if (d.mock_name == "memorizer") {
        s.kind = mock_kind::memorizer;
        if (d.mock_param >= 0) s.hit_prob = d.mock_param;
        if (!(s.hit_prob > 0.0 && s.hit_prob <= 1.0))
            fail(errc::invalid_argument, "memorizer hit_prob must lie in (0,1]");
    } else if (d.mock_name == "partial") {
        s.kind = mock_kind::partial;
        if (d.mock_param >= 0) s.lambda = d.mock_param;
        if (!(s.lambda >= 0.0 && s.lambda <= 1.0))
            fail(errc::invalid_argument, "partial lambda must lie in [0,1]");
    } else {
        fail(errc::invalid_argument, "unknown mock \"" + d.mock_name + "\"");
    }
    return s;
}

/// Simulated model over a wordlist. Scoring emits one token per word, which
/// keeps the statistics exact and leaves tokenizer alignment to dedicated
/// fixtures. All outputs are deterministic in (spec, input text).
class mock_model : public backend {
public:
    mock_model(mock_spec spec, const wordlist& wl, const registry* reg)
        : spec_(spec), wl_(&wl) {
        if (wl.size() < 2)
            fail(errc::invalid_argument, "mock needs a wordlist with >= 2 words");
        if (reg) {
            for (const auto& gid : reg->all()) {
                if (gid.wordlist_digest != wl.digest())
                    fail(errc::unknown_wordlist,
                         "identifier " + gid.id + " references digest " +
                             gid.wordlist_digest + ", loaded wordlist is " + wl.digest());
                if (gid.words.empty()) continue;
                first_word_index_[normalize_token(gid.words[0])].push_back(passphrases_.size());
                passphrases_.push_back(&gid);
                if (gid.q() > max_q_) max_q_ = gid.q();
            }
        }
    }

    std::string name() const override {
        switch (spec_.kind) {
        case mock_kind::uniform: return "mock:uniform";
        case mock_kind::noisy_uniform: return "mock:noisy-uniform";
        case mock_kind::memorizer: return "mock:memorizer";
        case mock_kind::partial: return "mock:partial";
        }
        return "mock:?";
    }
    bool supports_generation() const override { return true; }
    bool supports_scoring() const override { return true; }

    std::string generate(const std::string& prompt, std::size_t max_tokens) override {
        rng r = item_rng(prompt);
        std::size_t budget = max_tokens == 0 ? 1 : std::min<std::size_t>(max_tokens, 64);

        std::vector<std::string> continuation;
        if (spec_.kind == mock_kind::memorizer || spec_.kind == mock_kind::partial)
            continuation = memorized_continuation(prompt);

        double keep = spec_.kind == mock_kind::memorizer ? spec_.hit_prob
                      : spec_.kind == mock_kind::partial ? spec_.lambda
                                                         : 0.0;
        std::string out;
        for (std::size_t i = 0; i < budget; ++i) {
            std::string w;
            if (i < continuation.size() && r.bernoulli(keep))
                w = continuation[i];
            else
                w = wl_->at(r.below(wl_->size()));
            if (!out.empty()) out += ' ';
            out += w;
        }
        return out;
    }

    token_scores score(const std::string& doc_id, const std::string& text) override {
        (void)doc_id;
        rng r = item_rng(text);
        auto spans = word_spans(text);
        const double uniform_lp = -std::log(static_cast<double>(wl_->size()));

        std::vector<bool> memorized(spans.size(), false);
        if (spec_.kind == mock_kind::memorizer || spec_.kind == mock_kind::partial)
            mark_memorized(text, spans, memorized);

        token_scores ts;
        ts.tokens.reserve(spans.size());
        for (std::size_t i = 0; i < spans.size(); ++i) {
            ts.tokens.push_back(text.substr(spans[i].begin, spans[i].end - spans[i].begin));
            ts.text_offsets.push_back(spans[i].begin);
            double lp = uniform_lp;
            switch (spec_.kind) {
            case mock_kind::uniform: break;
            case mock_kind::noisy_uniform: {
                double v = r.gaussian(uniform_lp, spec_.noise_sd);
                lp = v < 0.0 ? v : 0.0;
                break;
            }
            case mock_kind::memorizer:
                if (memorized[i]) lp = hit_logprob(spec_.hit_prob);
                break;
            case mock_kind::partial:
                if (memorized[i] && r.bernoulli(spec_.lambda)) lp = hit_logprob(1.0);
                break;
            }
            ts.token_logprobs.push_back(lp);
        }
        return ts;
    }

    /// ln(p*(1-eps) + eps/V): epsilon-smoothed so a perfect memorizer still
    /// has a finite logprob and PPL stays just above 1.
    double hit_logprob(double p) const {
        constexpr double eps = 1e-6;
        return std::log(p * (1.0 - eps) + eps / static_cast<double>(wl_->size()));
    }

private:
    rng item_rng(const std::string& input) const {
        return rng::seeded(spec_.seed ^ hash_bytes(input));
    }

    /// Longest registered passphrase stem anchored at the prompt's end; the
    /// rest of that passphrase is what a memorizing model would emit next.
    std::vector<std::string> memorized_continuation(const std::string& prompt) const {
        auto words = split_words(prompt);
        std::size_t best_len = 0;
        const ghost_identifier* best = nullptr;
        const std::size_t deepest = std::min(words.size(), max_q_ == 0 ? 0 : max_q_ - 1);
        for (std::size_t t = deepest; t >= 1; --t) {
            std::string head = normalize_token(words[words.size() - t]);
            auto it = first_word_index_.find(head);
            if (it == first_word_index_.end()) continue;
            for (std::size_t idx : it->second) {
                const ghost_identifier* gid = passphrases_[idx];
                if (t >= gid->q()) continue; // nothing left to continue
                bool match = true;
                for (std::size_t i = 0; i < t; ++i) {
                    if (normalize_token(words[words.size() - t + i]) !=
                        normalize_token(gid->words[i])) {
                        match = false;
                        break;
                    }
                }
                if (match && t > best_len) {
                    best_len = t;
                    best = gid;
                }
            }
            if (best) break; // t descends, so the first hit is the longest
        }
        if (!best) return {};
        std::vector<std::string> cont(best->words.begin() + static_cast<std::ptrdiff_t>(best_len),
                                      best->words.end());
        return cont;
    }

    /// Flags every word belonging to a full passphrase occurrence in text.
    void mark_memorized(const std::string& text, const std::vector<word_span>& spans,
                        std::vector<bool>& memorized) const {
        for (std::size_t i = 0; i < spans.size(); ++i) {
            std::string w0 = normalize_token(
                std::string_view(text).substr(spans[i].begin, spans[i].end - spans[i].begin));
            auto it = first_word_index_.find(w0);
            if (it == first_word_index_.end()) continue;
            for (std::size_t idx : it->second) {
                const ghost_identifier* gid = passphrases_[idx];
                if (i + gid->q() > spans.size()) continue;
                bool match = true;
                for (std::size_t t = 0; t < gid->q(); ++t) {
                    auto s = spans[i + t];
                    std::string wt =
                        normalize_token(std::string_view(text).substr(s.begin, s.end - s.begin));
                    if (wt != normalize_token(gid->words[t])) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    for (std::size_t t = 0; t < gid->q(); ++t) memorized[i + t] = true;
                    break;
                }
            }
        }
    }

    mock_spec spec_;
    const wordlist* wl_;
    std::vector<const ghost_identifier*> passphrases_;
    std::unordered_map<std::string, std::vector<std::size_t>> first_word_index_;
    std::size_t max_q_ = 0;
};

} // namespace ghostmark
