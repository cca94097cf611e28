#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/schema.hpp"
#include "mdchase/similarity.hpp"

namespace mdchase {

// One similarity conjunct of an MD left-hand side: left ~sim right.
struct LhsPair {
    AttrRef left;
    AttrRef right;
    std::string sim;  // similarity predicate name; "eq" for '='

    auto operator<=>(const LhsPair&) const = default;
};

// One matching conjunct of the right-hand side: left == right.
struct RhsPair {
    AttrRef left;
    AttrRef right;

    auto operator<=>(const RhsPair&) const = default;
};

// A matching dependency: when every lhs pair is similar between a tuple of
// the left relation and a tuple of the right relation, the rhs pairs must be
// made equal. Left attributes of every pair belong to one relation, right
// attributes to one relation (possibly the same).
struct MatchingDependency {
    std::string id;
    std::vector<LhsPair> lhs;
    std::vector<RhsPair> rhs;

    auto operator<=>(const MatchingDependency&) const = default;

    const std::string& left_rel() const { return lhs.front().left.rel; }
    const std::string& right_rel() const { return lhs.front().right.rel; }

    AttrSet lhs_attrs() const {
        AttrSet s;
        for (const auto& p : lhs) {
            s.insert(p.left);
            s.insert(p.right);
        }
        return s;
    }

    AttrSet rhs_attrs() const {
        AttrSet s;
        for (const auto& p : rhs) {
            s.insert(p.left);
            s.insert(p.right);
        }
        return s;
    }

    std::set<std::string> relations() const {
        return {left_rel(), right_rel()};
    }

    std::set<std::string> sim_names() const {
        std::set<std::string> s;
        for (const auto& p : lhs) s.insert(p.sim);
        return s;
    }
};

struct MDSet {
    std::shared_ptr<const Schema> schema;
    std::shared_ptr<const SimilarityRegistry> sims;
    std::vector<MatchingDependency> mds;

    std::set<std::string> relations() const {
        std::set<std::string> r;
        for (const auto& m : mds)
            for (const auto& rel : m.relations()) r.insert(rel);
        return r;
    }

    std::set<std::string> sim_names() const {
        std::set<std::string> s;
        for (const auto& m : mds)
            for (const auto& n : m.sim_names()) s.insert(n);
        return s;
    }

    const MatchingDependency* find(const std::string& id) const {
        for (const auto& m : mds)
            if (m.id == id) return &m;
        return nullptr;
    }
};

// Exactly the attributes occurring on some RHS: the attributes the chase may
// rewrite.
inline AttrSet changeable_attributes(const MDSet& m) {
    AttrSet s;
    for (const auto& md : m.mds)
        for (const AttrRef& a : md.rhs_attrs()) s.insert(a);
    return s;
}

namespace detail {

struct Token {
    enum Kind { Ident, LBracket, RBracket, Comma, Tilde, Eq, EqEq, Arrow, Amp, Colon, End } kind;
    std::string text;
    std::size_t col;
};

inline std::vector<Token> lex_md_line(const std::string& source, std::size_t lineno,
                                      const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& what, std::size_t at) {
        throw input_error(source, lineno, line.substr(at, 1), what);
    };
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') break;
        std::size_t start = i;
        if (c == '[') out.push_back({Token::LBracket, "[", start}), ++i;
        else if (c == ']') out.push_back({Token::RBracket, "]", start}), ++i;
        else if (c == ',') out.push_back({Token::Comma, ",", start}), ++i;
        else if (c == '~') out.push_back({Token::Tilde, "~", start}), ++i;
        else if (c == '&') out.push_back({Token::Amp, "&", start}), ++i;
        else if (c == ':') out.push_back({Token::Colon, ":", start}), ++i;
        else if (c == '-') {
            if (i + 1 < line.size() && line[i + 1] == '>') out.push_back({Token::Arrow, "->", start}), i += 2;
            else fail("expected '->'", i);
        } else if (c == '=') {
            if (i + 1 < line.size() && line[i + 1] == '=') out.push_back({Token::EqEq, "==", start}), i += 2;
            else out.push_back({Token::Eq, "=", start}), ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < line.size() &&
                   (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_'))
                ++i;
            out.push_back({Token::Ident, line.substr(start, i - start), start});
        } else {
            fail("unexpected character", i);
        }
    }
    out.push_back({Token::End, "", line.size()});
    return out;
}

class MdLineParser {
public:
    MdLineParser(const std::string& source, std::size_t lineno, std::vector<Token> tokens,
                 const Schema& schema, const SimilarityRegistry& sims)
        : source_(source), lineno_(lineno), toks_(std::move(tokens)), schema_(schema), sims_(sims) {}

    MatchingDependency parse(std::string default_id) {
        MatchingDependency md;
        md.id = std::move(default_id);
        // optional "name:" prefix
        if (peek(0).kind == Token::Ident && peek(1).kind == Token::Colon) {
            md.id = next().text;
            next();
        }
        parse_lhs_atom(md);
        while (peek(0).kind == Token::Amp) {
            next();
            parse_lhs_atom(md);
        }
        expect(Token::Arrow, "'->'");
        parse_rhs_atom(md);
        while (peek(0).kind == Token::Amp) {
            next();
            parse_rhs_atom(md);
        }
        expect(Token::End, "end of line");
        finish(md);
        return md;
    }

private:
    const Token& peek(std::size_t ahead) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& what, const Token& tok) const {
        throw input_error(source_, lineno_, tok.text.empty() ? "<end>" : tok.text, what);
    }

    const Token& expect(Token::Kind kind, const std::string& what) {
        if (peek(0).kind != kind) fail("expected " + what, peek(0));
        return next();
    }

    // Rel "[" Attr ("," Attr)* "]"
    std::vector<AttrRef> parse_attr_list() {
        const Token& rel = expect(Token::Ident, "relation name");
        if (!schema_.find(rel.text)) fail("unknown relation", rel);
        expect(Token::LBracket, "'['");
        std::vector<AttrRef> attrs;
        for (;;) {
            const Token& a = expect(Token::Ident, "attribute name");
            AttrRef ref{rel.text, a.text};
            if (!schema_.has_attr(ref)) fail("unknown attribute of relation " + rel.text, a);
            attrs.push_back(std::move(ref));
            if (peek(0).kind == Token::Comma) next();
            else break;
        }
        expect(Token::RBracket, "']'");
        return attrs;
    }

    void parse_lhs_atom(MatchingDependency& md) {
        std::vector<AttrRef> left = parse_attr_list();
        std::string sim;
        const Token& op = peek(0);
        if (op.kind == Token::Eq) {
            next();
            sim = "eq";
        } else if (op.kind == Token::Tilde) {
            next();
            // an identifier is the similarity name unless it opens the next
            // attribute list
            if (peek(0).kind == Token::Ident && peek(1).kind != Token::LBracket) {
                const Token& name = next();
                if (!sims_.has(name.text)) fail("unknown similarity predicate", name);
                sim = name.text;
            } else {
                if (!sims_.has("default"))
                    fail("bare '~' requires a similarity named 'default' in the registry", op);
                sim = "default";
            }
        } else {
            fail("expected '~' or '=' in lhs atom", op);
        }
        std::vector<AttrRef> right = parse_attr_list();
        if (left.size() != right.size()) fail("attribute lists have different lengths", op);
        for (std::size_t i = 0; i < left.size(); ++i)
            md.lhs.push_back(LhsPair{left[i], right[i], sim});
    }

    void parse_rhs_atom(MatchingDependency& md) {
        std::vector<AttrRef> left = parse_attr_list();
        const Token& op = peek(0);
        expect(Token::EqEq, "'==' in rhs atom");
        std::vector<AttrRef> right = parse_attr_list();
        if (left.size() != right.size()) fail("attribute lists have different lengths", op);
        for (std::size_t i = 0; i < left.size(); ++i)
            md.rhs.push_back(RhsPair{left[i], right[i]});
    }

    // Orient every pair to the (R,S) relation pattern of the first lhs pair
    // and check the Eq.-(1) shape.
    void finish(MatchingDependency& md) {
        if (md.lhs.empty() || md.rhs.empty())
            throw input_error(source_, lineno_, "", "MD needs a non-empty lhs and rhs");
        const std::string R = md.lhs.front().left.rel;
        const std::string S = md.lhs.front().right.rel;
        auto orient = [&](AttrRef& l, AttrRef& r, const char* side) {
            if (l.rel == R && r.rel == S) return;
            if (R != S && l.rel == S && r.rel == R) {
                std::swap(l, r);
                return;
            }
            throw input_error(source_, lineno_, l.rel + "/" + r.rel,
                              std::string(side) + " pair does not follow the MD's (" + R + "," +
                                  S + ") relation pattern");
        };
        for (auto& p : md.lhs) orient(p.left, p.right, "lhs");
        for (auto& p : md.rhs) orient(p.left, p.right, "rhs");

        std::set<std::string> lhs_rels, rhs_rels;
        for (const auto& p : md.lhs) lhs_rels.insert(p.left.rel), lhs_rels.insert(p.right.rel);
        for (const auto& p : md.rhs) rhs_rels.insert(p.left.rel), rhs_rels.insert(p.right.rel);
        if (lhs_rels != rhs_rels)
            throw input_error(source_, lineno_, "",
                              "lhs and rhs of an MD must mention the same relations");
    }

    const std::string& source_;
    std::size_t lineno_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Schema& schema_;
    const SimilarityRegistry& sims_;
};

}  // namespace detail

// Parses an MD document: '#' comments, one MD per line, optional "name:"
// prefix. Unnamed MDs are called m1, m2, ... in file order.
inline MDSet parse_mds(const std::string& text, std::shared_ptr<const Schema> schema,
                       std::shared_ptr<const SimilarityRegistry> sims,
                       const std::string& source = "<mds>") {
    MDSet set;
    set.schema = std::move(schema);
    set.sims = std::move(sims);
    std::size_t lineno = 0, count = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? end : end - start);
        ++lineno;
        start = end == std::string::npos ? text.size() + 1 : end + 1;
        std::vector<detail::Token> toks = detail::lex_md_line(source, lineno, line);
        if (toks.size() == 1) continue;  // blank or comment-only
        detail::MdLineParser parser(source, lineno, std::move(toks), *set.schema, *set.sims);
        MatchingDependency md = parser.parse("m" + std::to_string(count + 1));
        ++count;
        for (const auto& other : set.mds)
            if (other.id == md.id)
                throw input_error(source, lineno, md.id, "duplicate MD name");
        set.mds.push_back(std::move(md));
    }
    return set;
}

// Deterministic canonical text; parse_mds(print_md(m)) reproduces m.
inline std::string print_md(const MatchingDependency& md) {
    std::string out = md.id + ": ";
    bool first = true;
    for (const auto& p : md.lhs) {
        if (!first) out += " & ";
        first = false;
        out += p.left.str();
        if (p.sim == "eq") out += " = ";
        else if (p.sim == "default") out += " ~ ";
        else out += " ~" + p.sim + " ";
        out += p.right.str();
    }
    out += " -> ";
    first = true;
    for (const auto& p : md.rhs) {
        if (!first) out += " & ";
        first = false;
        out += p.left.str() + " == " + p.right.str();
    }
    return out;
}

inline std::string print_mds(const MDSet& set) {
    std::string out;
    for (const auto& md : set.mds) out += print_md(md) + "\n";
    return out;
}

}  // namespace mdchase
