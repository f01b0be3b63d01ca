#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghostmark/errors.hpp"
#include "ghostmark/text.hpp"

namespace ghostmark {

/// One-proportion z for observing n_g hits out of q trials when a single
/// trial succeeds by chance with probability 1/V_star:
///   z = (n_g * V_star - q) / sqrt(q * (V_star - 1))
inline double z_score(std::size_t n_g, std::size_t q, std::uint64_t v_star) {
    if (q == 0) fail(errc::invalid_argument, "q must be positive");
    if (v_star < 2) fail(errc::invalid_argument, "V* must be at least 2");
    if (n_g > q) fail(errc::invalid_argument, "n_g may not exceed q");
    double num = static_cast<double>(n_g) * static_cast<double>(v_star) - static_cast<double>(q);
    double den = std::sqrt(static_cast<double>(q) * (static_cast<double>(v_star) - 1.0));
    return num / den;
}

/// One-sided thresholds. 2.58 at alpha=0.01 is the convention this test was
/// calibrated with (strictly two-sided, but kept for comparability).
inline double z_threshold(double alpha) {
    if (alpha == 0.05) return 1.645;
    if (alpha == 0.01) return 2.58;
    fail(errc::invalid_argument,
         "alpha must be 0.05 or 0.01, or pass an explicit threshold");
}

struct z_test_result {
    double z = 0.0;
    double threshold = 0.0;
    double alpha = 0.0;
    std::size_t n_g = 0;
    std::size_t q = 0;
    std::uint64_t v_star = 0;
    bool reject = false;
};

inline z_test_result z_test(std::size_t n_g, std::size_t q, std::uint64_t v_star, double alpha) {
    z_test_result r;
    r.z = z_score(n_g, q, v_star);
    r.threshold = z_threshold(alpha);
    r.alpha = alpha;
    r.n_g = n_g;
    r.q = q;
    r.v_star = v_star;
    r.reject = r.z > r.threshold;
    return r;
}

inline z_test_result z_test_with_threshold(std::size_t n_g, std::size_t q, std::uint64_t v_star,
                                           double threshold, double alpha) {
    z_test_result r;
    r.z = z_score(n_g, q, v_star);
    r.threshold = threshold;
    r.alpha = alpha;
    r.n_g = n_g;
    r.q = q;
    r.v_star = v_star;
    r.reject = r.z > r.threshold;
    return r;
}

inline nlohmann::ordered_json z_test_to_json(const z_test_result& r) {
    nlohmann::ordered_json j;
    j["z"] = r.z;
    j["n_g"] = r.n_g;
    j["q"] = r.q;
    j["V_star"] = r.v_star;
    j["reject"] = r.reject;
    j["alpha"] = r.alpha;
    return j;
}

/// exp of the negated mean of per-word natural-log probabilities.
inline double perplexity(const std::vector<double>& word_logprobs) {
    if (word_logprobs.empty()) fail(errc::empty_sequence, "no word logprobs");
    double sum = 0.0;
    for (double lp : word_logprobs) {
        if (lp > 0.0)
            fail(errc::invalid_argument, "log probabilities must be <= 0");
        sum += lp;
    }
    return std::exp(-sum / static_cast<double>(word_logprobs.size()));
}

struct scored_passphrase {
    std::string identifier_id;
    std::vector<double> word_logprobs;
    std::size_t context_len = 0;
    double ppl = 0.0;
};

inline scored_passphrase make_scored_passphrase(std::string identifier_id,
                                                std::vector<double> word_logprobs,
                                                std::size_t context_len) {
    scored_passphrase sp;
    sp.identifier_id = std::move(identifier_id);
    sp.ppl = perplexity(word_logprobs);
    sp.word_logprobs = std::move(word_logprobs);
    sp.context_len = context_len;
    return sp;
}

/// Lower-tail empirical alpha-quantile with linear interpolation between
/// order statistics (the "type 7" rule): h = (n-1)*alpha.
inline double empirical_critical_value(std::vector<double> samples, double alpha) {
    if (samples.size() < 20)
        fail(errc::too_few_samples, "need at least 20 calibration samples, have " +
                                        std::to_string(samples.size()));
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(errc::invalid_argument, "alpha must lie in (0,1)");
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * alpha;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= samples.size()) return samples.back();
    return samples[lo] + frac * (samples[lo + 1] - samples[lo]);
}

struct last_k_outcome {
    std::string doc_id;
    std::vector<std::string> targets;
    std::vector<std::string> generated;
    std::vector<bool> match_flags;
    std::size_t n_correct = 0;
};

/// Compares generation output against the expected words position by
/// position after canonical token normalization. Missing generated words
/// count as mismatches.
inline last_k_outcome match_last_k(std::string doc_id, const std::vector<std::string>& targets,
                                   const std::vector<std::string>& generated_words) {
    last_k_outcome o;
    o.doc_id = std::move(doc_id);
    o.targets = targets;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        std::string gen = i < generated_words.size() ? generated_words[i] : std::string();
        bool hit = !gen.empty() && normalize_token(gen) == normalize_token(targets[i]);
        o.generated.push_back(std::move(gen));
        o.match_flags.push_back(hit);
        if (hit) ++o.n_correct;
    }
    return o;
}

/// Fraction of documents whose last k words were all generated correctly.
inline double d_acc(const std::vector<last_k_outcome>& outcomes, std::size_t k) {
    if (outcomes.empty()) fail(errc::invalid_argument, "no outcomes");
    std::size_t full = 0;
    for (const auto& o : outcomes) {
        if (o.targets.size() != k)
            fail(errc::mixed_k, "outcome " + o.doc_id + " has " +
                                    std::to_string(o.targets.size()) + " targets, expected " +
                                    std::to_string(k));
        if (o.n_correct == k) ++full;
    }
    return static_cast<double>(full) / static_cast<double>(outcomes.size());
}

/// Fraction of owners with at least one fully correct document. Owners with
/// no documents make the statistic meaningless, so empty groups are errors.
inline double u_acc(const std::map<std::string, std::vector<last_k_outcome>>& by_owner,
                    std::size_t k) {
    if (by_owner.empty()) fail(errc::empty_group, "no owners");
    std::size_t identified = 0;
    for (const auto& [owner, outcomes] : by_owner) {
        if (outcomes.empty()) fail(errc::empty_group, "owner " + owner + " has no documents");
        bool any = false;
        for (const auto& o : outcomes) {
            if (o.targets.size() != k)
                fail(errc::mixed_k, "outcome " + o.doc_id + " has " +
                                        std::to_string(o.targets.size()) + " targets, expected " +
                                        std::to_string(k));
            if (o.n_correct == k) any = true;
        }
        if (any) ++identified;
    }
    return static_cast<double>(identified) / static_cast<double>(by_owner.size());
}

struct roc_point {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct roc_result {
    double auc = 0.0;
    std::vector<roc_point> points;
};

/// Members are the positive class and lower perplexity is more member-like.
/// AUC is the Mann-Whitney statistic with half credit for ties, computed
/// from exact pair counts: (2*wins + ties) / (2*Nm*Nn). Points sweep the
/// rule "member when ppl <= t" over every distinct observed value.
inline roc_result roc_auc(const std::vector<double>& member_ppls,
                          const std::vector<double>& nonmember_ppls) {
    if (member_ppls.empty() || nonmember_ppls.empty())
        fail(errc::empty_class, "both member and nonmember scores are required");

    std::vector<double> m = member_ppls, n = nonmember_ppls;
    std::sort(m.begin(), m.end());
    std::sort(n.begin(), n.end());

    // wins = pairs with member ppl strictly below nonmember ppl.
    std::uint64_t wins = 0, ties = 0;
    {
        std::size_t i = 0; // members strictly below the current nonmember
        for (double v : n) {
            while (i < m.size() && m[i] < v) ++i;
            std::size_t j = i;
            while (j < m.size() && m[j] == v) ++j;
            wins += i;
            ties += j - i;
        }
    }
    const std::uint64_t pairs = static_cast<std::uint64_t>(m.size()) * n.size();

    roc_result out;
    out.auc = static_cast<double>(2 * wins + ties) / static_cast<double>(2 * pairs);

    std::vector<double> thresholds;
    thresholds.reserve(m.size() + n.size());
    std::merge(m.begin(), m.end(), n.begin(), n.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    out.points.push_back({0.0, 0.0});
    std::size_t mi = 0, ni = 0;
    for (double t : thresholds) {
        while (mi < m.size() && m[mi] <= t) ++mi;
        while (ni < n.size() && n[ni] <= t) ++ni;
        out.points.push_back({static_cast<double>(ni) / static_cast<double>(n.size()),
                              static_cast<double>(mi) / static_cast<double>(m.size())});
    }
    return out;
}

/// Fraction of member perplexities strictly below the critical value.
inline double recall_at(const std::vector<double>& member_ppls, double critical) {
    if (member_ppls.empty()) fail(errc::invalid_argument, "no member scores");
    std::size_t hits = 0;
    for (double p : member_ppls)
        if (p < critical) ++hits;
    return static_cast<double>(hits) / static_cast<double>(member_ppls.size());
}

/// Mean of the ceil(k_percent% * n) smallest token log-probabilities. Higher
/// (less negative) means more member-like.
inline double min_k_prob(std::vector<double> token_logprobs, double k_percent) {
    if (token_logprobs.empty()) fail(errc::invalid_argument, "no token logprobs");
    if (!(k_percent > 0.0 && k_percent <= 100.0))
        fail(errc::invalid_argument, "k_percent must lie in (0,100]");
    std::size_t take = static_cast<std::size_t>(
        std::ceil(k_percent / 100.0 * static_cast<double>(token_logprobs.size())));
    if (take == 0) take = 1;
    std::sort(token_logprobs.begin(), token_logprobs.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += token_logprobs[i];
    return sum / static_cast<double>(take);
}

inline nlohmann::ordered_json ppl_summary_to_json(const roc_result& roc, double recall,
                                                  double critical) {
    nlohmann::ordered_json j;
    j["auc"] = roc.auc;
    j["recall"] = recall;
    j["critical"] = critical;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : roc.points) pts.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
    j["roc"] = pts;
    return j;
}

inline void roc_points_to_csv(const std::vector<roc_point>& points, std::ostream& out) {
    out << "fpr,tpr\n";
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.fpr, p.tpr);
        out << buf;
    }
}

} // namespace ghostmark
