#include "session_memory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "errors.hpp"
#include "text.hpp"

namespace chronochat {

namespace {

using nlohmann::json;
using TermCounts = std::unordered_map<std::string, double>;

TermCounts term_counts(const std::string& text) {
    TermCounts counts;
    for (const auto& token : content_tokens(text))
        counts[token] += 1.0;
    return counts;
}

double cosine(const TermCounts& a, const TermCounts& b) {
    double dot = 0.0;
    for (const auto& [term, count] : a) {
        const auto it = b.find(term);
        if (it != b.end())
            dot += count * it->second;
    }
    if (dot == 0.0)
        return 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (const auto& [term, count] : a)
        norm_a += count * count;
    for (const auto& [term, count] : b)
        norm_b += count * count;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

} // namespace

int SessionMemory::store(const std::string& transcript, int session_index) {
    if (trim(transcript).empty())
        raise(Errc::empty_text, "session transcript is empty");
    SessionDocument document;
    document.id = next_id_++;
    document.session_index = session_index;
    document.text = transcript;
    document.token_count = content_tokens(transcript).size();
    documents_.push_back(std::move(document));
    return documents_.back().id;
}

std::vector<SessionDocument> SessionMemory::retrieve_top_k(const std::string& query,
                                                           std::size_t k) const {
    if (documents_.empty())
        raise(Errc::empty_memory, "no session documents stored");
    if (k < 1)
        raise(Errc::bad_config, "k must be at least 1");

    const TermCounts query_counts = term_counts(query);
    struct Scored {
        double score;
        const SessionDocument* document;
    };
    std::vector<Scored> scored;
    scored.reserve(documents_.size());
    for (const auto& document : documents_)
        scored.push_back({cosine(query_counts, term_counts(document.text)), &document});

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score)
            return a.score > b.score;
        if (a.document->session_index != b.document->session_index)
            return a.document->session_index > b.document->session_index;
        return a.document->id > b.document->id;
    });

    std::vector<SessionDocument> top;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i)
        top.push_back(*scored[i].document);
    return top;
}

void SessionMemory::save(const std::string& path) const {
    json doc;
    doc["documents"] = json::array();
    for (const auto& document : documents_)
        doc["documents"].push_back({{"id", document.id},
                                    {"session_index", document.session_index},
                                    {"text", document.text},
                                    {"token_count", document.token_count}});
    std::ofstream file(path);
    if (!file)
        raise(Errc::io_error, "cannot write memory store: " + path);
    file << doc.dump(2) << '\n';
}

SessionMemory SessionMemory::load(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        raise(Errc::missing_file, "cannot open memory store: " + path);
    json doc;
    try {
        file >> doc;
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad memory store: ") + e.what());
    }
    SessionMemory memory;
    for (const auto& node : doc.value("documents", json::array())) {
        SessionDocument document;
        document.id = node.at("id").get<int>();
        document.session_index = node.at("session_index").get<int>();
        document.text = node.at("text").get<std::string>();
        document.token_count = node.value("token_count", content_tokens(document.text).size());
        memory.next_id_ = std::max(memory.next_id_, document.id + 1);
        memory.documents_.push_back(std::move(document));
    }
    return memory;
}

} // namespace chronochat
