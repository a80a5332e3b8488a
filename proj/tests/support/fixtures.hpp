#pragma once

// Deterministic snippet and substitution fixtures shared by the unit and
// acceptance suites. Everything here is seeded; no global state.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "codenat/rename.hpp"
#include "codenat/snippet.hpp"

namespace fixtures {

// Small Java method in the style of the motivating rename example: a
// meaningful method name plus a local buffer that an attacker mangles.
inline std::string fig1_original() {
    return "public static char[] swapBlank(char[] text) {\n"
           "    char[] copy = Arrays.copyOf(text, text.length);\n"
           "    for (int i = 0; i < copy.length; i++) {\n"
           "        if (copy[i] == ' ') {\n"
           "            copy[i] = '_';\n"
           "        }\n"
           "    }\n"
           "    return copy;\n"
           "}\n";
}

inline std::string fig1_adversarial() {
    return "public static char[] swapBlace(char[] text) {\n"
           "    char[] create = Arrays.copyOf(text, text.length);\n"
           "    for (int i = 0; i < create.length; i++) {\n"
           "        if (create[i] == ' ') {\n"
           "            create[i] = '_';\n"
           "        }\n"
           "    }\n"
           "    return create;\n"
           "}\n";
}

namespace detail {

inline const std::vector<std::string>& noun_pool() {
    static const std::vector<std::string> pool = {
        "count",  "total",  "index",  "value",  "buffer", "result", "temp",
        "item",   "sum",    "flag",   "cursor", "size",   "key",    "left",
        "right",  "width",  "depth",  "offset", "ratio",  "score",  "delta",
        "limit",  "start",  "finish", "amount", "weight", "window", "slot",
        "entry"};
    return pool;
}

inline const std::vector<std::string>& verb_pool() {
    static const std::vector<std::string> pool = {
        "compute", "process", "build",   "merge",  "resolve", "collect",
        "scan",    "reduce",  "combine", "filter", "locate",  "measure"};
    return pool;
}

inline std::string camel(const std::string& a, const std::string& b) {
    std::string out = a;
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(b[0])));
    out += b.substr(1);
    return out;
}

template <typename Rng>
std::size_t below(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

// distinct identifier names for template slots
template <typename Rng>
std::vector<std::string> pick_names(Rng& rng, std::size_t count) {
    std::set<std::string> used;
    std::vector<std::string> out;
    const auto& nouns = noun_pool();
    const auto& verbs = verb_pool();
    while (out.size() < count) {
        std::string name;
        switch (below(rng, 4)) {
            case 0: name = nouns[below(rng, nouns.size())]; break;
            case 1: name = camel(nouns[below(rng, nouns.size())],
                                 nouns[below(rng, nouns.size())]); break;
            case 2: name = camel(verbs[below(rng, verbs.size())],
                                 nouns[below(rng, nouns.size())]); break;
            default:
                name = nouns[below(rng, nouns.size())] + std::to_string(below(rng, 10));
                break;
        }
        if (used.insert(name).second) out.push_back(name);
    }
    return out;
}

inline std::string fill(std::string tmpl, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::string slot = "$" + std::to_string(i);
        std::size_t pos = 0;
        while ((pos = tmpl.find(slot, pos)) != std::string::npos) {
            // avoid replacing "$1" inside "$10"
            if (pos + slot.size() < tmpl.size() &&
                std::isdigit(static_cast<unsigned char>(tmpl[pos + slot.size()]))) {
                pos += slot.size();
                continue;
            }
            tmpl.replace(pos, slot.size(), names[i]);
            pos += names[i].size();
        }
    }
    return tmpl;
}

}  // namespace detail

// Deterministic parseable Java source. Seeds map onto a template family and
// a distinct name assignment.
inline std::string java_snippet(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 2654435761ULL + 17);
    auto names = detail::pick_names(rng, 8);
    int lit = static_cast<int>(detail::below(rng, 90) + 3);
    static const std::vector<std::string> templates = {
        "public static int $0(int[] $1, int $2) {\n"
        "    int $3 = 0;\n"
        "    for (int $4 = 0; $4 < $1.length; $4++) {\n"
        "        if ($1[$4] > $2) {\n"
        "            $3 += $1[$4];\n"
        "        }\n"
        "    }\n"
        "    return $3 + @LIT@;\n"
        "}\n",

        "public static String $0(String $1, char $2) {\n"
        "    StringBuilder $3 = new StringBuilder();\n"
        "    for (int $4 = 0; $4 < $1.length(); $4++) {\n"
        "        char $5 = $1.charAt($4);\n"
        "        if ($5 == $2) {\n"
        "            $3.append('_');\n"
        "        } else {\n"
        "            $3.append($5);\n"
        "        }\n"
        "    }\n"
        "    return $3.toString();\n"
        "}\n",

        "class $6 {\n"
        "    static int $0(int $1, int $2) {\n"
        "        return $1 * $2 + @LIT@;\n"
        "    }\n"
        "    public static int $5(int $3) {\n"
        "        int $4 = 0;\n"
        "        int $7 = $3;\n"
        "        while ($7 > 0) {\n"
        "            $4 = $0($4, $7);\n"
        "            $7--;\n"
        "        }\n"
        "        return $4;\n"
        "    }\n"
        "}\n",

        "public static int[] $0(int[] $1) {\n"
        "    int[] $2 = new int[$1.length];\n"
        "    try {\n"
        "        for (int $3 = 0; $3 < $1.length; $3++) {\n"
        "            $2[$3] = $1[$1.length - 1 - $3];\n"
        "        }\n"
        "    } catch (Exception $4) {\n"
        "        return $1;\n"
        "    }\n"
        "    return $2;\n"
        "}\n",

        "public static int $0(int $1, boolean $2) {\n"
        "    int $3 = $2 ? $1 : -$1;\n"
        "    // fold the mode into the accumulator\n"
        "    switch ($1 % 3) {\n"
        "        case 0:\n"
        "            $3 += @LIT@;\n"
        "            break;\n"
        "        case 1:\n"
        "            $3 -= 2;\n"
        "            break;\n"
        "        default:\n"
        "            $3 *= 2;\n"
        "            break;\n"
        "    }\n"
        "    return $3;\n"
        "}\n",
    };
    std::string tmpl = templates[detail::below(rng, templates.size())];
    std::size_t pos;
    while ((pos = tmpl.find("@LIT@")) != std::string::npos)
        tmpl.replace(pos, 5, std::to_string(lit));
    return detail::fill(tmpl, names);
}

// Deterministic parseable C source.
inline std::string c_snippet(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 3);
    auto names = detail::pick_names(rng, 8);
    int lit = static_cast<int>(detail::below(rng, 90) + 3);
    static const std::vector<std::string> templates = {
        "int $0(const int *$1, int $2, int $3) {\n"
        "    int $4 = 0;\n"
        "    for (int $5 = 0; $5 < $2; $5++) {\n"
        "        if ($1[$5] > $3) {\n"
        "            $4 += $1[$5];\n"
        "        }\n"
        "    }\n"
        "    return $4 + @LIT@;\n"
        "}\n",

        "unsigned long $0(const char *$1) {\n"
        "    unsigned long $2 = 5381;\n"
        "    const char *$3 = $1;\n"
        "    while (*$3) {\n"
        "        $2 = ($2 << 5) + $2 + (unsigned char)*$3;\n"
        "        $3++;\n"
        "    }\n"
        "    return $2;\n"
        "}\n",

        "struct $6 {\n"
        "    int value;\n"
        "    struct $6 *next;\n"
        "};\n"
        "int $0(struct $6 *$1) {\n"
        "    int $2 = 0;\n"
        "    struct $6 *$3 = $1;\n"
        "    while ($3 != 0) {\n"
        "        $2++;\n"
        "        $3 = $3->next;\n"
        "    }\n"
        "    return $2;\n"
        "}\n",

        "int $0(int $1, int $2) {\n"
        "    int $3 = 0;\n"
        "    switch ($1) {\n"
        "        case 0:\n"
        "            $3 = $2 + @LIT@;\n"
        "            break;\n"
        "        case 1:\n"
        "            $3 = $2 * 2;\n"
        "            break;\n"
        "        default:\n"
        "            $3 = -$2;\n"
        "            break;\n"
        "    }\n"
        "    /* clamp below zero */\n"
        "    if ($3 < 0) {\n"
        "        $3 = 0;\n"
        "    }\n"
        "    return $3;\n"
        "}\n",

        "double $0(double $1, int $2) {\n"
        "    double $3 = 1.0;\n"
        "    int $4 = $2;\n"
        "    if ($4 < 0) {\n"
        "        $4 = -$4;\n"
        "    }\n"
        "    while ($4 > 0) {\n"
        "        if ($4 % 2 == 1) {\n"
        "            $3 *= $1;\n"
        "        }\n"
        "        $1 *= $1;\n"
        "        $4 /= 2;\n"
        "    }\n"
        "    return $2 < 0 ? 1.0 / $3 : $3;\n"
        "}\n",
    };
    std::string tmpl = templates[detail::below(rng, templates.size())];
    std::size_t pos;
    while ((pos = tmpl.find("@LIT@")) != std::string::npos)
        tmpl.replace(pos, 5, std::to_string(lit));
    return detail::fill(tmpl, names);
}

inline std::string snippet_source(codenat::Lang lang, std::uint64_t seed) {
    return lang == codenat::Lang::Java ? java_snippet(seed) : c_snippet(seed);
}

// Fresh names guaranteed not to collide with anything in the snippet.
template <typename Rng>
codenat::SubstitutionMap random_map(const codenat::CodeSnippet& snippet, Rng& rng,
                                    double rename_prob = 0.5) {
    codenat::SubstitutionMap map;
    std::set<std::string> taken = snippet.all_identifier_texts();
    const auto& nouns = detail::noun_pool();
    for (const auto& entry : snippet.identifiers().entries()) {
        if ((rng() % 1000) / 1000.0 >= rename_prob) continue;
        std::string fresh;
        do {
            fresh = detail::camel(nouns[detail::below(rng, nouns.size())],
                                  nouns[detail::below(rng, nouns.size())]) +
                    std::to_string(detail::below(rng, 100));
        } while (taken.count(fresh) ||
                 codenat::is_keyword(fresh, snippet.lang()));
        taken.insert(fresh);
        map.add(entry.name, fresh);
    }
    return map;
}

}  // namespace fixtures
