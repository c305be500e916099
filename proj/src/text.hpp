#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chronochat {

// Lowercased alphanumeric tokens, punctuation dropped.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(const std::string& token);

// tokenize() minus stopwords.
std::vector<std::string> content_tokens(std::string_view text);

std::string trim(std::string_view text);

} // namespace chronochat
