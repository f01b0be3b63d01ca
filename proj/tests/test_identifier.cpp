#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ghostmark/identifier.hpp"

using namespace ghostmark;

namespace {

wordlist make_list(std::size_t n, const std::string& stem = "w") {
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) words.push_back(stem + std::to_string(i));
    return wordlist("synthetic", std::move(words));
}

} // namespace

TEST_CASE("passphrases shorter than four words are rejected") {
    auto wl = make_list(10);
    auto r = rng::seeded(1);
    for (std::size_t q : {0u, 1u, 2u, 3u}) {
        try {
            generate_passphrase(wl, q, r);
            FAIL("expected LengthTooShort for q=" << q);
        } catch (const error& e) {
            CHECK(e.code() == errc::length_too_short);
        }
    }
    CHECK(generate_passphrase(wl, 4, r).size() == 4);
}

TEST_CASE("generation needs a non-degenerate wordlist") {
    auto wl = make_list(1);
    auto r = rng::seeded(1);
    CHECK_THROWS_AS(generate_passphrase(wl, 4, r), error);
}

TEST_CASE("every drawn word comes from the list and repeats are allowed") {
    auto wl = make_list(3);
    auto r = rng::seeded(7);
    // 3 words, 40 draws: some word must repeat, and with-replacement
    // sampling must not deduplicate.
    auto words = generate_passphrase(wl, 40, r);
    REQUIRE(words.size() == 40);
    for (const auto& w : words) CHECK(wl.contains(w));
    std::set<std::string> distinct(words.begin(), words.end());
    CHECK(distinct.size() <= 3);
}

TEST_CASE("seeded generation is reproducible") {
    auto wl = make_list(7776);
    auto a = rng::seeded(99);
    auto b = rng::seeded(99);
    auto c = rng::seeded(100);
    auto wa = generate_passphrase(wl, 10, a);
    auto wb = generate_passphrase(wl, 10, b);
    auto wc = generate_passphrase(wl, 10, c);
    CHECK(wa == wb);
    CHECK(wa != wc);
}

TEST_CASE("word draws are uniform across the list") {
    // Chi-square goodness of fit: 6 words, 60000 draws, df = 5.
    // Critical value at alpha = 0.001 is 20.515; a correct uniform sampler
    // fails this with probability 1/1000 per seed, and the seed is fixed.
    auto wl = make_list(6);
    auto r = rng::seeded(42);
    std::vector<std::size_t> counts(6, 0);
    const std::size_t draws = 60000;
    for (std::size_t i = 0; i < draws / 10; ++i)
        for (const auto& w : generate_passphrase(wl, 10, r)) ++counts[w[1] - '0'];
    double expect = draws / 6.0;
    double chi2 = 0.0;
    for (auto c : counts) {
        double d = static_cast<double>(c) - expect;
        chi2 += d * d / expect;
    }
    INFO("chi2 = " << chi2);
    CHECK(chi2 < 20.515);
}

TEST_CASE("distinct passphrases do not collide in practice") {
    // 20000 ten-word draws over a 7776-word list; expected collisions ~ 1e-31.
    auto wl = make_list(7776);
    auto r = rng::seeded(5);
    std::set<std::string> seen;
    for (int i = 0; i < 20000; ++i) {
        auto words = generate_passphrase(wl, 10, r);
        auto [it, inserted] = seen.insert(digest_words(words));
        CHECK(inserted);
        if (!inserted) break;
    }
    CHECK(seen.size() == 20000);
}

TEST_CASE("sentence rendering matches the documented examples") {
    ghost_identifier gid;
    gid.words = {"ladybug", "strife",   "unclamped", "fragment", "bulge",     "ruby",
                 "stand",   "providing", "oppressed", "sanitizer", "saggy",    "botanist"};
    gid.terminal = ".";
    CHECK(render_sentence(gid) ==
          "ladybug strife unclamped fragment bulge ruby stand providing oppressed sanitizer "
          "saggy botanist.");

    gid.prefix = "My ghost sentence is:";
    CHECK(render_sentence(gid) ==
          "My ghost sentence is: ladybug strife unclamped fragment bulge ruby stand providing "
          "oppressed sanitizer saggy botanist.");

    ghost_identifier tiny;
    tiny.words = {"a"};
    tiny.prefix = "Note:";
    tiny.terminal = "";
    CHECK(render_sentence(tiny) == "Note: a");

    ghost_identifier bang;
    bang.words = {"x", "y"};
    bang.terminal = "!";
    CHECK(render_sentence(bang) == "x y!");
}

TEST_CASE("identifiers carry owner, digest and a deterministic id") {
    auto wl = make_list(100);
    auto r1 = rng::seeded(3);
    auto r2 = rng::seeded(3);
    auto a = make_identifier(wl, "owner-1", 6, r1, std::nullopt, ".", 7);
    auto b = make_identifier(wl, "owner-1", 6, r2, std::nullopt, ".", 7);
    CHECK(a.id == b.id);
    CHECK(a.id.rfind("g-", 0) == 0);
    CHECK(a.id.size() == 18); // "g-" + 16 hex digits
    CHECK(a.owner_id == "owner-1");
    CHECK(a.q() == 6);
    CHECK(a.wordlist_digest == wl.digest());
    CHECK(a.created_at == "2020-01-01T00:00:07Z");

    // Same words under a different owner produce a different id.
    auto r3 = rng::seeded(3);
    auto c = make_identifier(wl, "owner-2", 6, r3, std::nullopt, ".", 7);
    CHECK(c.words == a.words);
    CHECK(c.id != a.id);
}

TEST_CASE("unseeded timestamps are RFC 3339 UTC") {
    auto ts = creation_timestamp(std::nullopt);
    REQUIRE(ts.size() == 20);
    CHECK(ts[4] == '-');
    CHECK(ts[10] == 'T');
    CHECK(ts[19] == 'Z');
    CHECK(ts.substr(0, 2) == "20");
}

TEST_CASE("registry enforces global passphrase uniqueness") {
    auto wl = make_list(50);
    registry reg;
    auto r = rng::seeded(11);
    auto a = make_identifier(wl, "alice", 5, r, std::nullopt, ".", 11);
    reg.put(a);

    // Identical word sequence under another owner is still rejected.
    ghost_identifier clone = a;
    clone.owner_id = "bob";
    clone.id = "g-0000000000000000";
    try {
        reg.put(clone);
        FAIL("expected DuplicatePassphrase");
    } catch (const error& e) {
        CHECK(e.code() == errc::duplicate_passphrase);
    }

    ghost_identifier same_id = make_identifier(wl, "carol", 5, r, std::nullopt, ".", 11);
    same_id.id = a.id;
    CHECK_THROWS_AS(reg.put(same_id), error);

    CHECK(reg.size() == 1);
    CHECK(reg.contains(a.id));
    CHECK(reg.get(a.id).owner_id == "alice");
    try {
        reg.get("g-ffffffffffffffff");
        FAIL("expected UnknownId");
    } catch (const error& e) {
        CHECK(e.code() == errc::unknown_id);
    }
}

TEST_CASE("registry lists an owner's identifiers in insertion order") {
    auto wl = make_list(200);
    registry reg;
    auto r = rng::seeded(13);
    std::vector<std::string> alice_ids;
    for (int i = 0; i < 3; ++i) {
        auto g = make_identifier(wl, "alice", 6, r, std::nullopt, ".", 13);
        alice_ids.push_back(g.id);
        reg.put(std::move(g));
        auto h = make_identifier(wl, "bob", 6, r, std::nullopt, ".", 13);
        reg.put(std::move(h));
    }
    auto listed = reg.list("alice");
    REQUIRE(listed.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(listed[i]->id == alice_ids[i]);
    CHECK(reg.list("nobody").empty());
    CHECK(reg.all().size() == 6);
}

TEST_CASE("registry serialization round-trips through JSONL") {
    auto wl = make_list(64);
    registry reg;
    auto r = rng::seeded(21);
    auto plain = make_identifier(wl, "alice", 4, r, std::nullopt, ".", 21);
    auto fancy = make_identifier(wl, "bob", 5, r, "The code is:", "!", 21);
    reg.put(plain);
    reg.put(fancy);

    std::ostringstream out;
    reg.save(out);
    std::string text = out.str();

    // One JSON object per line with the exact field set; absent prefix is an
    // explicit null.
    std::istringstream lines(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        ++n;
        REQUIRE(j.size() == 7);
        for (const char* key :
             {"id", "owner_id", "words", "wordlist_digest", "prefix", "terminal", "created_at"})
            CHECK(j.contains(key));
    }
    CHECK(n == 2);
    auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
    CHECK(first["prefix"].is_null());

    std::istringstream in(text);
    auto back = registry::load(in);
    REQUIRE(back.size() == 2);
    CHECK(back.all()[0].id == plain.id);
    CHECK(back.all()[0].words == plain.words);
    CHECK_FALSE(back.all()[0].prefix.has_value());
    CHECK(back.all()[1].prefix == "The code is:");
    CHECK(back.all()[1].terminal == "!");
    CHECK(back.all()[1].created_at == plain.created_at);
}

TEST_CASE("registry load reports the offending line") {
    std::istringstream in("{\"id\": \"g-1\"\nnot json\n");
    try {
        registry::load(in);
        FAIL("expected IoError");
    } catch (const error& e) {
        CHECK(e.code() == errc::io_error);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}
