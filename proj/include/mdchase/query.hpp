#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/md.hpp"
#include "mdchase/schema.hpp"
#include "mdchase/value.hpp"

namespace mdchase {

// An atom argument: a variable name or a ground constant.
struct QueryArg {
    bool is_var = true;
    std::string name;   // variable
    std::string value;  // constant text

    auto operator<=>(const QueryArg&) const = default;

    static QueryArg var(std::string n) { return {true, std::move(n), ""}; }
    static QueryArg constant(std::string v) { return {false, "", std::move(v)}; }
};

struct QueryAtom {
    std::string rel;
    std::vector<QueryArg> args;

    auto operator<=>(const QueryAtom&) const = default;
};

// A conjunctive query in rule form: head variables are free, all other body
// variables are existentially quantified.
struct ConjunctiveQuery {
    std::string name;
    std::vector<std::string> head;
    std::vector<QueryAtom> body;

    auto operator<=>(const ConjunctiveQuery&) const = default;

    std::set<std::string> body_vars() const {
        std::set<std::string> vars;
        for (const auto& atom : body)
            for (const auto& arg : atom.args)
                if (arg.is_var) vars.insert(arg.name);
        return vars;
    }

    bool is_free(const std::string& var) const {
        for (const auto& h : head)
            if (h == var) return true;
        return false;
    }
};

enum class QueryClass { NonUJCQ, UJCQOnly, CHAQ };

inline std::string to_string(QueryClass c) {
    switch (c) {
        case QueryClass::NonUJCQ: return "not UJCQ";
        case QueryClass::UJCQOnly: return "UJCQ (not CHAQ)";
        case QueryClass::CHAQ: return "CHAQ (UJCQ)";
    }
    return "?";
}

// Parses "Q(x,z) :- R(x,y,z), S(x,w,t)". Variables are identifiers;
// constants are double-quoted strings. The head may be empty (boolean
// query) and lists exactly the free variables.
inline ConjunctiveQuery parse_query(const std::string& text, const Schema& schema,
                                    const std::string& source = "<query>") {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& what) -> void {
        std::string tok = i < text.size() ? text.substr(i, 1) : "<end>";
        throw input_error(source, 1, tok, what);
    };
    auto ident = [&]() -> std::string {
        skip_ws();
        std::size_t start = i;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' ||
                text[i] == '\''))
            ++i;
        if (start == i) fail("expected an identifier");
        return text.substr(start, i - start);
    };
    auto expect = [&](char c) {
        skip_ws();
        if (i >= text.size() || text[i] != c) fail(std::string("expected '") + c + "'");
        ++i;
    };
    auto peek = [&](char c) {
        skip_ws();
        return i < text.size() && text[i] == c;
    };

    ConjunctiveQuery q;
    q.name = ident();
    expect('(');
    if (!peek(')')) {
        for (;;) {
            skip_ws();
            if (i < text.size() && text[i] == '"') fail("head arguments must be variables");
            q.head.push_back(ident());
            if (peek(',')) { ++i; continue; }
            break;
        }
    }
    expect(')');
    expect(':');
    expect('-');
    for (;;) {
        QueryAtom atom;
        atom.rel = ident();
        const RelationDef* def = schema.find(atom.rel);
        if (!def) fail("unknown relation '" + atom.rel + "'");
        expect('(');
        if (!peek(')')) {
            for (;;) {
                skip_ws();
                if (i < text.size() && text[i] == '"') {
                    ++i;
                    std::size_t start = i;
                    while (i < text.size() && text[i] != '"') ++i;
                    if (i >= text.size()) fail("unterminated constant");
                    atom.args.push_back(QueryArg::constant(text.substr(start, i - start)));
                    ++i;
                } else {
                    atom.args.push_back(QueryArg::var(ident()));
                }
                if (peek(',')) { ++i; continue; }
                break;
            }
        }
        expect(')');
        if (atom.args.size() != def->attrs.size())
            throw input_error(source, 1, atom.rel,
                              "atom arity " + std::to_string(atom.args.size()) +
                                  " does not match relation arity " +
                                  std::to_string(def->attrs.size()));
        q.body.push_back(std::move(atom));
        if (peek(',')) { ++i; continue; }
        break;
    }
    skip_ws();
    if (i < text.size()) fail("trailing input after query");

    // safety: every head variable occurs in the body
    std::set<std::string> in_body = q.body_vars();
    for (const auto& h : q.head)
        if (!in_body.count(h))
            throw input_error(source, 1, h, "unsafe query: head variable not in body");
    return q;
}

inline std::string print_query(const ConjunctiveQuery& q) {
    std::string out = q.name + "(";
    for (std::size_t i = 0; i < q.head.size(); ++i) {
        if (i) out += ", ";
        out += q.head[i];
    }
    out += ") :- ";
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        if (i) out += ", ";
        out += q.body[i].rel + "(";
        for (std::size_t j = 0; j < q.body[i].args.size(); ++j) {
            if (j) out += ", ";
            const QueryArg& a = q.body[i].args[j];
            out += a.is_var ? a.name : "\"" + a.value + "\"";
        }
        out += ")";
    }
    return out;
}

// UJCQ: no variable that is existential and occurs in two or more body
// argument slots may sit in a changeable-attribute slot.
inline bool is_ujcq(const ConjunctiveQuery& q, const MDSet& m) {
    AttrSet changeable = changeable_attributes(m);
    std::map<std::string, int> occurrences;
    for (const auto& atom : q.body)
        for (const auto& arg : atom.args)
            if (arg.is_var) ++occurrences[arg.name];
    for (const auto& atom : q.body) {
        const RelationDef& def = m.schema->require(atom.rel);
        for (std::size_t slot = 0; slot < atom.args.size(); ++slot) {
            const QueryArg& arg = atom.args[slot];
            if (!arg.is_var) continue;
            if (q.is_free(arg.name)) continue;
            if (occurrences[arg.name] < 2) continue;
            if (changeable.count(AttrRef{atom.rel, def.attrs[slot]})) return false;
        }
    }
    return true;
}

// CHAQ: UJCQ with a conjunct over an MD relation whose arguments are all
// free variables.
inline bool has_free_occurrence(const ConjunctiveQuery& q, const MDSet& m) {
    std::set<std::string> md_rels = m.relations();
    for (const auto& atom : q.body) {
        if (!md_rels.count(atom.rel)) continue;
        bool all_free = true;
        for (const auto& arg : atom.args)
            if (!arg.is_var || !q.is_free(arg.name)) {
                all_free = false;
                break;
            }
        if (all_free) return true;
    }
    return false;
}

inline QueryClass classify_query(const ConjunctiveQuery& q, const MDSet& m) {
    if (!is_ujcq(q, m)) return QueryClass::NonUJCQ;
    if (has_free_occurrence(q, m)) return QueryClass::CHAQ;
    return QueryClass::UJCQOnly;
}

}  // namespace mdchase
