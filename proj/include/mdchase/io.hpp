#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdchase/error.hpp"
#include "mdchase/instance.hpp"
#include "mdchase/md.hpp"
#include "mdchase/schema.hpp"
#include "mdchase/similarity.hpp"
#include "mdchase/value.hpp"

namespace mdchase {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error(path, 0, "", "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CsvRow {
    std::size_t line = 0;  // 1-based line the row starts on
    std::vector<std::string> fields;
};

// RFC-4180-style CSV: comma separator, optional double-quoting with ""
// escapes, newlines allowed inside quoted fields, CRLF tolerated.
inline std::vector<CsvRow> parse_csv(const std::string& text, const std::string& source) {
    std::vector<CsvRow> rows;
    std::size_t i = 0, line = 1;
    while (i < text.size()) {
        CsvRow row;
        row.line = line;
        for (;;) {
            std::string field;
            if (i < text.size() && text[i] == '"') {
                ++i;
                for (;;) {
                    if (i >= text.size())
                        throw input_error(source, row.line, "\"", "unterminated quoted field");
                    char c = text[i++];
                    if (c == '"') {
                        if (i < text.size() && text[i] == '"') {
                            field += '"';
                            ++i;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line;
                        field += c;
                    }
                }
                if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                    throw input_error(source, line, std::string(1, text[i]),
                                      "unexpected character after quoted field");
            } else {
                while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                    field += text[i++];
            }
            row.fields.push_back(std::move(field));
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            break;
        }
        if (i < text.size() && text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') {
            ++i;
            ++line;
        }
        // a lone trailing newline does not produce an empty row
        if (row.fields.size() == 1 && row.fields[0].empty() && (i >= text.size())) break;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string csv_quote(const std::string& s) {
    bool need = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!need) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

// One relation per CSV file named <Relation>.csv: header row of attribute
// names with an optional leading _tid column of unique integers; without
// it, tuple ids are assigned 1..n in row order.
inline Instance read_instance_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw input_error(dir, 0, "", "not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw input_error(dir, 0, "", "no .csv files in instance directory");

    struct Loaded {
        RelationDef def;
        std::vector<std::pair<TupleId, std::vector<Value>>> rows;
    };
    std::vector<Loaded> loaded;
    for (const fs::path& p : files) {
        std::string source = p.string();
        std::vector<CsvRow> rows = parse_csv(read_file(source), source);
        if (rows.empty()) throw input_error(source, 1, "", "missing header row");
        Loaded l;
        l.def.name = p.stem().string();
        const CsvRow& header = rows.front();
        bool has_tid = !header.fields.empty() && header.fields.front() == "_tid";
        for (std::size_t i = has_tid ? 1 : 0; i < header.fields.size(); ++i) {
            if (header.fields[i].empty())
                throw input_error(source, header.line, "", "empty attribute name in header");
            l.def.attrs.push_back(header.fields[i]);
        }
        if (l.def.attrs.empty())
            throw input_error(source, header.line, "", "relation needs at least one attribute");
        std::set<TupleId> seen;
        TupleId next = 1;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const CsvRow& row = rows[r];
            if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
            if (row.fields.size() != header.fields.size())
                throw input_error(source, row.line, "",
                                  "row has " + std::to_string(row.fields.size()) +
                                      " fields, header has " +
                                      std::to_string(header.fields.size()));
            TupleId tid = next++;
            std::size_t first = 0;
            if (has_tid) {
                first = 1;
                const std::string& t = row.fields[0];
                try {
                    std::size_t used = 0;
                    tid = std::stoll(t, &used);
                    if (used != t.size()) throw std::invalid_argument(t);
                } catch (const std::exception&) {
                    throw input_error(source, row.line, t, "_tid must be an integer");
                }
            }
            if (!seen.insert(tid).second)
                throw input_error(source, row.line, std::to_string(tid), "duplicate _tid");
            std::vector<Value> vals;
            for (std::size_t i = first; i < row.fields.size(); ++i)
                vals.push_back(Value::ground(row.fields[i]));
            l.rows.emplace_back(tid, std::move(vals));
        }
        loaded.push_back(std::move(l));
    }

    std::vector<RelationDef> defs;
    for (const auto& l : loaded) defs.push_back(l.def);
    auto schema = std::make_shared<Schema>(std::move(defs));
    Instance d(schema);
    for (auto& l : loaded)
        for (auto& [tid, vals] : l.rows) d.insert(l.def.name, tid, std::move(vals));
    return d;
}

// One relation as CSV with a leading _tid column; values in display form.
inline std::string write_relation_csv(const Instance& d, const std::string& rel) {
    const RelationDef& def = d.schema().require(rel);
    std::string out = "_tid";
    for (const auto& a : def.attrs) out += "," + csv_quote(a);
    out += "\n";
    for (const auto& [tid, tuple] : d.tuples(rel)) {
        out += std::to_string(tid);
        for (const Value& v : tuple) out += "," + csv_quote(v.display());
        out += "\n";
    }
    return out;
}

// Similarity config: a JSON object mapping predicate names to
//   {"kind": "equality" | "edit_distance" | "table",
//    "threshold": <int>,            edit_distance only
//    "pairs": <csv path>,           table only; two columns, no header;
//                                   relative to the config file
//    "transitive": <bool>}          declared flag, default false
inline std::shared_ptr<SimilarityRegistry> load_similarities(const std::string& path) {
    auto reg = std::make_shared<SimilarityRegistry>();
    std::string text = read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw input_error(path, 1, "", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw input_error(path, 1, "", "config root must be a JSON object");
    for (const auto& [name, body] : doc.items()) {
        if (!body.is_object())
            throw input_error(path, 1, name, "similarity entry must be an object");
        SimilaritySpec spec;
        spec.name = name;
        std::string kind = body.value("kind", "");
        if (kind == "equality") spec.kind = SimKind::Equality;
        else if (kind == "edit_distance") spec.kind = SimKind::EditDistance;
        else if (kind == "table") spec.kind = SimKind::Table;
        else throw input_error(path, 1, name, "kind must be equality, edit_distance, or table");
        spec.transitive = body.value("transitive", false);
        if (spec.kind == SimKind::EditDistance) {
            if (!body.contains("threshold") || !body["threshold"].is_number_unsigned())
                throw input_error(path, 1, name, "edit_distance needs a non-negative threshold");
            spec.threshold = body["threshold"].get<std::size_t>();
        }
        if (spec.kind == SimKind::Table) {
            if (!body.contains("pairs") || !body["pairs"].is_string())
                throw input_error(path, 1, name, "table needs a pairs file path");
            std::filesystem::path pairs_path = body["pairs"].get<std::string>();
            if (pairs_path.is_relative())
                pairs_path = std::filesystem::path(path).parent_path() / pairs_path;
            std::string psrc = pairs_path.string();
            for (const CsvRow& row : parse_csv(read_file(psrc), psrc)) {
                if (row.fields.size() == 1 && row.fields[0].empty()) continue;
                if (row.fields.size() != 2)
                    throw input_error(psrc, row.line, "", "pair file rows need exactly two fields");
                spec.pairs.insert({row.fields[0], row.fields[1]});
            }
        }
        reg->add(std::move(spec));
    }
    return reg;
}

// First-mention scan of `Rel[A, B, ...]` groups across an MD document;
// yields a schema when no instance fixes one. Attribute order follows first
// mention.
inline std::shared_ptr<Schema> infer_schema_from_mds(const std::string& text,
                                                     const std::string& source = "<mds>") {
    std::vector<std::string> rel_order;
    std::map<std::string, std::vector<std::string>> attrs;
    std::size_t lineno = 0, start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? end : end - start);
        ++lineno;
        start = end == std::string::npos ? text.size() + 1 : end + 1;
        std::vector<detail::Token> toks = detail::lex_md_line(source, lineno, line);
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
            if (toks[i].kind != detail::Token::Ident ||
                toks[i + 1].kind != detail::Token::LBracket)
                continue;
            const std::string& rel = toks[i].text;
            if (!attrs.count(rel)) {
                attrs[rel];
                rel_order.push_back(rel);
            }
            std::vector<std::string>& list = attrs[rel];
            std::size_t j = i + 2;
            while (j < toks.size() && toks[j].kind == detail::Token::Ident) {
                if (std::find(list.begin(), list.end(), toks[j].text) == list.end())
                    list.push_back(toks[j].text);
                if (j + 1 < toks.size() && toks[j + 1].kind == detail::Token::Comma) j += 2;
                else break;
            }
        }
    }
    std::vector<RelationDef> defs;
    for (const auto& rel : rel_order) defs.push_back(RelationDef{rel, attrs[rel]});
    return std::make_shared<Schema>(std::move(defs));
}

}  // namespace mdchase
