#pragma once

#include <cctype>
#include <string>
#include <vector>

namespace codenat {

// Splits an identifier into lowercased subtokens at underscores, camelCase
// humps and letter/digit boundaries. "swapBlank" -> {"swap","blank"},
// "to_float4" -> {"to","float","4"}, "XMLHttp" -> {"xml","http"}.
inline std::vector<std::string> split_subtokens(const std::string& name) {
    std::vector<std::string> parts;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            parts.push_back(cur);
            cur.clear();
        }
    };
    const auto n = name.size();
    for (std::size_t i = 0; i < n; ++i) {
        unsigned char c = static_cast<unsigned char>(name[i]);
        if (c == '_') {
            flush();
            continue;
        }
        if (i > 0) {
            unsigned char prev = static_cast<unsigned char>(name[i - 1]);
            bool boundary = false;
            if (prev != '_') {
                if (std::isdigit(c) != std::isdigit(prev)) {
                    boundary = true;  // letter<->digit edge
                } else if (std::isupper(c) && std::islower(prev)) {
                    boundary = true;  // aB
                } else if (std::isupper(prev) && std::isupper(c) && i + 1 < n &&
                           std::islower(static_cast<unsigned char>(name[i + 1]))) {
                    boundary = true;  // ABc -> A|Bc
                }
            }
            if (boundary) flush();
        }
        cur.push_back(static_cast<char>(std::tolower(c)));
    }
    flush();
    return parts;
}

}  // namespace codenat
