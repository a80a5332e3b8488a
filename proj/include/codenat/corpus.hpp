#pragma once

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codenat/errors.hpp"

namespace codenat {

// One input record. Classification and generation tasks fill `code`;
// clone-detection style pair tasks fill `code` and `code2`.
struct CorpusRecord {
    std::string id;
    std::string lang;  // "java" | "c"
    std::string code;
    std::string code2;
    std::optional<int> label;
    std::optional<std::string> reference;

    bool is_pair() const { return !code2.empty(); }
};

struct CorpusLoad {
    std::vector<CorpusRecord> records;
    std::vector<std::size_t> skipped_lines;  // 1-based line numbers
};

// JSONL loader. Corrupt lines are skipped and reported, never fatal.
inline CorpusLoad load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus: " + path);
    CorpusLoad out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            out.skipped_lines.push_back(line_no);
            continue;
        }
        try {
            CorpusRecord rec;
            rec.id = parsed.value("id", "line-" + std::to_string(line_no));
            rec.lang = parsed.at("lang").get<std::string>();
            if (parsed.contains("code1")) {
                rec.code = parsed.at("code1").get<std::string>();
                rec.code2 = parsed.at("code2").get<std::string>();
            } else {
                rec.code = parsed.at("code").get<std::string>();
                if (parsed.contains("code2") && parsed["code2"].is_string())
                    rec.code2 = parsed["code2"].get<std::string>();
            }
            if (parsed.contains("label") && !parsed["label"].is_null())
                rec.label = parsed["label"].get<int>();
            if (parsed.contains("reference") && !parsed["reference"].is_null())
                rec.reference = parsed["reference"].get<std::string>();
            out.records.push_back(std::move(rec));
        } catch (const nlohmann::json::exception&) {
            out.skipped_lines.push_back(line_no);
        }
    }
    return out;
}

inline void write_corpus(const std::string& path,
                         const std::vector<CorpusRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write corpus: " + path);
    for (const auto& rec : records) {
        nlohmann::ordered_json line;
        line["id"] = rec.id;
        line["lang"] = rec.lang;
        if (rec.is_pair()) {
            line["code1"] = rec.code;
            line["code2"] = rec.code2;
        } else {
            line["code"] = rec.code;
        }
        line["label"] = rec.label ? nlohmann::json(*rec.label) : nlohmann::json(nullptr);
        line["reference"] =
            rec.reference ? nlohmann::json(*rec.reference) : nlohmann::json(nullptr);
        out << line.dump() << "\n";
    }
}

// Walks a JSONL file, invoking the callback per parseable line; returns the
// skipped line numbers.
inline std::vector<std::size_t> for_each_jsonl(
    const std::string& path, const std::function<void(const nlohmann::json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open jsonl: " + path);
    std::vector<std::size_t> skipped;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            fn(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception&) {
            skipped.push_back(line_no);
        }
    }
    return skipped;
}

}  // namespace codenat
