#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "errors.hpp"
#include "session_memory.hpp"
#include "test_support.hpp"
#include "text.hpp"

using namespace chronochat;

namespace {

// Independent O(n*m) cosine oracle over content tokens.
double oracle_cosine(const std::string& a, const std::string& b) {
    std::map<std::string, double> counts_a, counts_b;
    for (const auto& token : content_tokens(a))
        counts_a[token] += 1;
    for (const auto& token : content_tokens(b))
        counts_b[token] += 1;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [term, count] : counts_a) {
        na += count * count;
        const auto it = counts_b.find(term);
        if (it != counts_b.end())
            dot += count * it->second;
    }
    for (const auto& [term, count] : counts_b)
        nb += count * count;
    if (dot == 0)
        return 0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace

TEST_CASE("store assigns monotone ids and allows duplicates") {
    SessionMemory memory;
    CHECK(memory.store("session one text", 1) == 1);
    CHECK(memory.store("session two text", 2) == 2);
    CHECK(memory.store("session two text", 3) == 3); // duplicate transcript, new id
    CHECK(memory.documents().size() == 3);
    try {
        memory.store("   ", 4);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_text);
    }
}

TEST_CASE("retrieval basics") {
    SessionMemory memory;
    try {
        memory.retrieve_top_k("anything", 5);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_memory);
    }

    memory.store("A: I am training for a marathon this year.", 1);
    memory.store("B: The garden needs new vegetable beds.", 2);
    memory.store("A: The thesis introduction chapter is done.", 3);

    // a query equal to a stored document ranks it first
    const auto top = memory.retrieve_top_k("A: I am training for a marathon this year.", 2);
    REQUIRE(!top.empty());
    CHECK(top[0].session_index == 1);

    // k larger than the store returns everything, no duplicates
    const auto all = memory.retrieve_top_k("marathon", 10);
    CHECK(all.size() == 3);
    std::set<int> ids;
    for (const auto& document : all)
        ids.insert(document.id);
    CHECK(ids.size() == 3);
}

TEST_CASE("ties break toward recency") {
    SessionMemory memory;
    memory.store("completely unrelated words here", 1);
    memory.store("completely unrelated words here", 2);
    const auto top = memory.retrieve_top_k("zebra quantum", 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].session_index == 2);
}

TEST_CASE("ranking agrees with a brute-force cosine computation") {
    Rng rng(3);
    SessionMemory memory;
    std::vector<std::string> texts;
    for (int i = 0; i < 20; ++i) {
        const std::string text = testsupport::random_phrase(rng, 4, 12);
        texts.push_back(text);
        memory.store(text, i + 1);
    }
    const std::string query = testsupport::random_phrase(rng, 3, 6);
    const auto ranked = memory.retrieve_top_k(query, 20);
    REQUIRE(ranked.size() == 20);
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
        const double score_i = oracle_cosine(query, ranked[i].text);
        const double score_next = oracle_cosine(query, ranked[i + 1].text);
        CHECK(score_i >= score_next - 1e-12);
        if (std::abs(score_i - score_next) < 1e-12)
            CHECK(ranked[i].session_index > ranked[i + 1].session_index);
    }
}

TEST_CASE("memory persists and reloads identically") {
    testsupport::TempDir dir("memory");
    SessionMemory memory;
    memory.store("first session transcript", 1);
    memory.store("second session transcript", 2);
    memory.save(dir.file("memory.json"));

    const SessionMemory reloaded = SessionMemory::load(dir.file("memory.json"));
    REQUIRE(reloaded.documents().size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(reloaded.documents()[i].id == memory.documents()[i].id);
        CHECK(reloaded.documents()[i].session_index == memory.documents()[i].session_index);
        CHECK(reloaded.documents()[i].text == memory.documents()[i].text);
    }
    // ids continue after the reload
    SessionMemory continued = SessionMemory::load(dir.file("memory.json"));
    CHECK(continued.store("third", 3) == 3);
}
