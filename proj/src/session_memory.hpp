#pragma once

#include <string>
#include <vector>

namespace chronochat {

struct SessionDocument {
    int id = 0; // monotone, assigned at store time
    int session_index = 0;
    std::string text;
    std::size_t token_count = 0; // content tokens, computed at store time
};

// Per-conversation memory: one document per session, retrieved by
// term-frequency cosine over lowercased, stopword-filtered tokens.
class SessionMemory {
public:
    // Appends a transcript; ids are monotone starting at 1.
    int store(const std::string& transcript, int session_index);

    const std::vector<SessionDocument>& documents() const { return documents_; }

    // Top documents by cosine similarity to the query; ties broken by
    // recency (higher session index first). Returns min(k, size) documents.
    // Throws EmptyMemory when nothing has been stored.
    std::vector<SessionDocument> retrieve_top_k(const std::string& query,
                                                std::size_t k = 5) const;

    void save(const std::string& path) const;
    static SessionMemory load(const std::string& path);

private:
    std::vector<SessionDocument> documents_;
    int next_id_ = 1;
};

} // namespace chronochat
