#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "ghostmark/rng.hpp"
#include "ghostmark/stats.hpp"

using namespace ghostmark;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("z-score matches hand-computed reference values") {
    // One correct completion out of ten over a 7776-word vocabulary.
    CHECK_THAT(z_score(1, 10, 7776), WithinAbs(27.85, 0.01));
    // Two correct out of ten with an effective vocabulary of 25.
    CHECK_THAT(z_score(2, 10, 25), WithinAbs(2.582, 0.001));
    CHECK(z_score(2, 10, 25) >= 2.58);
    // One hit in ten is exactly the chance rate when V* = 10.
    CHECK(z_score(1, 10, 10) == 0.0);
    // Zero hits sit below the chance rate.
    CHECK(z_score(0, 10, 7776) < 0.0);
    // All hits: n_g*V - q = q*(V-1), so z = sqrt(q*(V-1)).
    CHECK_THAT(z_score(10, 10, 7776), WithinRel(std::sqrt(10.0 * 7775.0), 1e-12));
}

TEST_CASE("z-score grows with hits and vocabulary, shrinks with extra trials") {
    for (std::size_t n = 0; n < 10; ++n) CHECK(z_score(n, 10, 100) < z_score(n + 1, 10, 100));
    CHECK(z_score(1, 10, 100) < z_score(1, 10, 1000));
    CHECK(z_score(1, 10, 1000) < z_score(1, 10, 7776));
    CHECK(z_score(1, 20, 7776) < z_score(1, 10, 7776));
}

TEST_CASE("z-score validates its inputs") {
    CHECK_THROWS_AS(z_score(1, 0, 7776), error);
    CHECK_THROWS_AS(z_score(1, 10, 1), error);
    CHECK_THROWS_AS(z_score(11, 10, 7776), error);
    CHECK_NOTHROW(z_score(10, 10, 2));
}

TEST_CASE("z-test applies one-sided thresholds") {
    CHECK(z_threshold(0.05) == 1.645);
    CHECK(z_threshold(0.01) == 2.58);
    CHECK_THROWS_AS(z_threshold(0.1), error);

    auto strong = z_test(1, 10, 7776, 0.01);
    CHECK(strong.reject);
    CHECK(strong.threshold == 2.58);

    auto marginal = z_test(2, 10, 25, 0.01);
    CHECK(marginal.z > 2.58); // 2.582 clears the cutoff
    CHECK(marginal.reject);

    auto null = z_test(1, 10, 10, 0.05);
    CHECK_FALSE(null.reject);

    auto custom = z_test_with_threshold(1, 10, 7776, 30.0, 0.01);
    CHECK_FALSE(custom.reject);
    CHECK(custom.threshold == 30.0);
}

TEST_CASE("z-test serialization carries the full decision record") {
    auto j = z_test_to_json(z_test(2, 10, 25, 0.01));
    REQUIRE(j.size() == 6);
    CHECK_THAT(j["z"].get<double>(), WithinAbs(2.582, 0.001));
    CHECK(j["n_g"] == 2);
    CHECK(j["q"] == 10);
    CHECK(j["V_star"] == 25);
    CHECK(j["reject"] == true);
    CHECK(j["alpha"] == 0.01);
}

TEST_CASE("perplexity has exact closed forms") {
    CHECK(perplexity({0.0, 0.0, 0.0}) == 1.0);
    CHECK_THAT(perplexity({-2.0, -2.0, -2.0}), WithinRel(std::exp(2.0), 1e-15));
    CHECK_THAT(perplexity({0.0, -2.0}), WithinRel(std::exp(1.0), 1e-15));

    const double lp = -std::log(7776.0);
    std::vector<double> uniform(10, lp);
    CHECK_THAT(perplexity(uniform), WithinRel(7776.0, 1e-9));
}

TEST_CASE("perplexity is permutation-invariant and fixed by appending the mean") {
    auto r = rng::seeded(19);
    std::vector<double> lps;
    for (int i = 0; i < 50; ++i) lps.push_back(-r.uniform(0.1, 9.0));
    double base = perplexity(lps);

    auto shuffled = lps;
    r.shuffle(shuffled);
    CHECK_THAT(perplexity(shuffled), WithinRel(base, 1e-12));

    double mean = 0.0;
    for (double v : lps) mean += v;
    mean /= static_cast<double>(lps.size());
    auto extended = lps;
    extended.push_back(mean);
    CHECK_THAT(perplexity(extended), WithinRel(base, 1e-12));
}

TEST_CASE("perplexity rejects empty and invalid sequences") {
    try {
        perplexity({});
        FAIL("expected EmptySequence");
    } catch (const error& e) {
        CHECK(e.code() == errc::empty_sequence);
    }
    CHECK_THROWS_AS(perplexity({-1.0, 0.5}), error);
}

TEST_CASE("scored passphrases keep their inputs and derived perplexity") {
    auto sp = make_scored_passphrase("g-1", {-1.0, -3.0}, 42);
    CHECK(sp.identifier_id == "g-1");
    CHECK(sp.context_len == 42);
    CHECK(sp.word_logprobs == std::vector<double>{-1.0, -3.0});
    CHECK_THAT(sp.ppl, WithinRel(std::exp(2.0), 1e-15));
}

TEST_CASE("empirical critical value is the interpolated lower-tail quantile") {
    SECTION("constant samples") {
        std::vector<double> s(30, 500.0);
        CHECK(empirical_critical_value(s, 0.05) == 500.0);
    }
    SECTION("linear grid hits order statistics exactly") {
        // 1001 equally spaced values 100..1100: h = 1000*alpha is integral.
        std::vector<double> s;
        for (int i = 0; i <= 1000; ++i) s.push_back(100.0 + i);
        CHECK(empirical_critical_value(s, 0.01) == 110.0);
        CHECK(empirical_critical_value(s, 0.05) == 150.0);
    }
    SECTION("fractional h interpolates between neighbors") {
        std::vector<double> s;
        for (int i = 0; i < 20; ++i) s.push_back(static_cast<double>(i));
        CHECK_THAT(empirical_critical_value(s, 0.5), WithinAbs(9.5, 1e-12));
    }
    SECTION("input order is irrelevant") {
        std::vector<double> s = {9, 1, 8, 2, 7, 3, 6, 4, 5, 0, 19, 11, 18, 12, 17, 13, 16, 14, 15, 10};
        CHECK_THAT(empirical_critical_value(s, 0.5), WithinAbs(9.5, 1e-12));
    }
    SECTION("monotone in alpha and bounded by the sample range") {
        auto r = rng::seeded(77);
        std::vector<double> s;
        for (int i = 0; i < 200; ++i) s.push_back(r.uniform(50.0, 900.0));
        double lo = *std::min_element(s.begin(), s.end());
        double hi = *std::max_element(s.begin(), s.end());
        double prev = lo;
        for (double a : {0.01, 0.05, 0.25, 0.5, 0.9, 0.99}) {
            double cv = empirical_critical_value(s, a);
            CHECK(cv >= prev);
            CHECK(cv >= lo);
            CHECK(cv <= hi);
            prev = cv;
        }
    }
    SECTION("validation") {
        std::vector<double> s(19, 1.0);
        try {
            empirical_critical_value(s, 0.05);
            FAIL("expected TooFewSamples");
        } catch (const error& e) {
            CHECK(e.code() == errc::too_few_samples);
        }
        std::vector<double> ok(20, 1.0);
        CHECK_THROWS_AS(empirical_critical_value(ok, 0.0), error);
        CHECK_THROWS_AS(empirical_critical_value(ok, 1.0), error);
    }
}

TEST_CASE("last-k matching normalizes tokens and tolerates short output") {
    auto o = match_last_k("d1", {"saggy", "botanist"}, {"Saggy", "botanist."});
    CHECK(o.n_correct == 2);
    CHECK(o.match_flags == std::vector<bool>{true, true});

    auto miss = match_last_k("d2", {"saggy", "botanist"}, {"saggy", "florist"});
    CHECK(miss.n_correct == 1);
    CHECK(miss.match_flags == std::vector<bool>{true, false});

    auto truncated = match_last_k("d3", {"saggy", "botanist"}, {"saggy"});
    CHECK(truncated.n_correct == 1);
    CHECK(truncated.generated == std::vector<std::string>{"saggy", ""});
    CHECK(truncated.match_flags == std::vector<bool>{true, false});

    auto extra = match_last_k("d4", {"saggy"}, {"saggy", "botanist", "junk"});
    CHECK(extra.n_correct == 1);
    CHECK(extra.generated.size() == 1);
}

TEST_CASE("document accuracy counts only fully correct documents") {
    std::vector<last_k_outcome> outcomes;
    outcomes.push_back(match_last_k("d1", {"a", "b"}, {"a", "b"}));
    outcomes.push_back(match_last_k("d2", {"a", "b"}, {"a", "x"})); // partial, no credit
    outcomes.push_back(match_last_k("d3", {"a", "b"}, {"a", "b"}));
    outcomes.push_back(match_last_k("d4", {"a", "b"}, {"x", "y"}));
    CHECK(d_acc(outcomes, 2) == 0.5);

    CHECK_THROWS_AS(d_acc({}, 2), error);
    outcomes.push_back(match_last_k("d5", {"a"}, {"a"}));
    try {
        d_acc(outcomes, 2);
        FAIL("expected MixedK");
    } catch (const error& e) {
        CHECK(e.code() == errc::mixed_k);
    }
}

TEST_CASE("user accuracy asks for one fully correct document per owner") {
    // 16 owners, two documents each; 11 owners have one perfect document.
    std::map<std::string, std::vector<last_k_outcome>> by_owner;
    for (int u = 0; u < 16; ++u) {
        std::string owner = "user-" + std::to_string(u);
        bool hit = u < 11;
        by_owner[owner].push_back(
            match_last_k(owner + "-a", {"a", "b"}, hit ? std::vector<std::string>{"a", "b"}
                                                       : std::vector<std::string>{"a", "x"}));
        by_owner[owner].push_back(match_last_k(owner + "-b", {"a", "b"}, {"x", "y"}));
    }
    CHECK(u_acc(by_owner, 2) == 0.6875);

    try {
        u_acc({}, 2);
        FAIL("expected EmptyGroup");
    } catch (const error& e) {
        CHECK(e.code() == errc::empty_group);
    }
    by_owner["user-0"].clear();
    CHECK_THROWS_AS(u_acc(by_owner, 2), error);
}

TEST_CASE("ROC AUC matches hand-checked configurations") {
    CHECK(roc_auc({1.0, 3.0}, {2.0, 4.0}).auc == 0.75);
    CHECK(roc_auc({1.0, 2.0}, {3.0, 4.0}).auc == 1.0);
    CHECK(roc_auc({3.0, 4.0}, {1.0, 2.0}).auc == 0.0);
    CHECK(roc_auc({5.0, 5.0}, {5.0, 5.0}).auc == 0.5);
    CHECK(roc_auc({1.0}, {1.0}).auc == 0.5);

    try {
        roc_auc({}, {1.0});
        FAIL("expected EmptyClass");
    } catch (const error& e) {
        CHECK(e.code() == errc::empty_class);
    }
    CHECK_THROWS_AS(roc_auc({1.0}, {}), error);
}

TEST_CASE("ROC points trace a monotone curve from (0,0) to (1,1)") {
    auto roc = roc_auc({1.0, 2.0, 2.0, 3.5}, {2.0, 3.0, 4.0});
    REQUIRE(roc.points.size() >= 2);
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
        CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
    }
}

namespace {

// Quadratic-time reference: same integer pair counts, same final division.
double auc_oracle(const std::vector<double>& members, const std::vector<double>& nonmembers) {
    std::uint64_t wins = 0, ties = 0;
    for (double a : members)
        for (double b : nonmembers) {
            if (a < b)
                ++wins;
            else if (a == b)
                ++ties;
        }
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(members.size()) * nonmembers.size();
    return static_cast<double>(2 * wins + ties) / static_cast<double>(2 * pairs);
}

} // namespace

TEST_CASE("ROC AUC agrees bitwise with a brute-force pair count") {
    auto r = rng::seeded(123);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t nm = 1 + r.below(40);
        std::size_t nn = 1 + r.below(40);
        std::vector<double> m, n;
        // Coarse grid forces plenty of ties across and within classes.
        for (std::size_t i = 0; i < nm; ++i) m.push_back(static_cast<double>(r.below(12)));
        for (std::size_t i = 0; i < nn; ++i) n.push_back(static_cast<double>(r.below(12)));
        INFO("trial " << trial << " nm=" << nm << " nn=" << nn);
        CHECK(roc_auc(m, n).auc == auc_oracle(m, n));
    }
}

TEST_CASE("recall counts members strictly below the critical value") {
    CHECK(recall_at({150.0, 250.0}, 200.0) == 0.5);
    CHECK(recall_at({200.0}, 200.0) == 0.0);
    CHECK(recall_at({1.0, 2.0, 3.0}, 10.0) == 1.0);
    CHECK_THROWS_AS(recall_at({}, 200.0), error);
}

TEST_CASE("min-k aggregates the smallest token logprobs") {
    std::vector<double> lps = {-5.0, -4.0, -3.0, -2.0, -1.0};
    CHECK_THAT(min_k_prob(lps, 40.0), WithinAbs(-4.5, 1e-12));
    CHECK_THAT(min_k_prob(lps, 100.0), WithinAbs(-3.0, 1e-12));
    CHECK(min_k_prob(lps, 1.0) == -5.0); // take clamps up to one element
    CHECK(min_k_prob({-7.0}, 20.0) == -7.0);
    CHECK_THROWS_AS(min_k_prob({}, 20.0), error);
    CHECK_THROWS_AS(min_k_prob(lps, 0.0), error);
    CHECK_THROWS_AS(min_k_prob(lps, 120.0), error);
}

TEST_CASE("perplexity summaries serialize the ROC curve") {
    auto roc = roc_auc({1.0, 2.0}, {3.0, 4.0});
    auto j = ppl_summary_to_json(roc, 0.5, 2.5);
    CHECK(j["auc"] == 1.0);
    CHECK(j["recall"] == 0.5);
    CHECK(j["critical"] == 2.5);
    REQUIRE(j["roc"].is_array());
    CHECK(j["roc"].size() == roc.points.size());
    CHECK(j["roc"][0]["fpr"] == 0.0);
    CHECK(j["roc"][0]["tpr"] == 0.0);

    std::ostringstream csv;
    roc_points_to_csv(roc.points, csv);
    auto text = csv.str();
    CHECK(text.rfind("fpr,tpr\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == roc.points.size() + 1);
}
