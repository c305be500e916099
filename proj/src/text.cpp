#include "text.hpp"

#include <cctype>
#include <unordered_set>

namespace chronochat {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(current);
    return tokens;
}

bool is_stopword(const std::string& token) {
    static const std::unordered_set<std::string> words{
        "a", "about", "after", "all", "am", "an", "and", "any", "are", "as",
        "at", "be", "been", "before", "but", "by", "can", "could", "did",
        "do", "does", "doing", "for", "from", "get", "got", "had", "has",
        "have", "he", "her", "hers", "him", "his", "how", "i", "if", "in",
        "into", "is", "it", "its", "just", "like", "me", "more", "my", "no",
        "not", "of", "on", "or", "our", "out", "she", "so", "some", "that",
        "the", "their", "them", "then", "there", "these", "they", "this",
        "to", "up", "us", "very", "was", "we", "were", "what", "when",
        "which", "while", "who", "will", "with", "would", "you", "your",
    };
    return words.count(token) > 0;
}

std::vector<std::string> content_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    for (auto& token : tokenize(text))
        if (!is_stopword(token))
            tokens.push_back(std::move(token));
    return tokens;
}

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
        --end;
    return std::string(text.substr(begin, end - begin));
}

} // namespace chronochat
