#pragma once

#include <map>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace chronochat {

struct AdapterReport {
    std::vector<std::string> issues;            // skipped files/conversations, with reasons
    std::map<std::string, std::size_t> unmapped_fields; // key -> occurrences
    std::size_t files_read = 0;
};

// Best-effort import of a published GapChat checkout into the canonical
// format. Field names are mapped heuristically; every key that is not
// consumed is counted in the report rather than silently dropped.
std::vector<Conversation> import_gapchat_directory(const std::string& directory,
                                                   AdapterReport& report);

} // namespace chronochat
