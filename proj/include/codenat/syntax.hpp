#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codenat/errors.hpp"
#include "codenat/token.hpp"

namespace codenat {

enum class NodeKind : std::uint8_t {
    Unit, PreprocLine, ImportDecl, PackageDecl, Annotation, TypeDecl, Typedef,
    Function, ParamList, Param, Block, VarDecl, FieldDecl, EnumConst,
    ExprStmt, If, While, DoWhile, For, ForEach, Switch, CaseLabel, Return,
    Break, Continue, Goto, Throw, Try, CatchClause, FinallyClause, Labeled,
    Empty, Assert, Synchronized,
    Assign, Ternary, Binary, Unary, PostfixOp, Call, Index, Member, Cast,
    NewExpr, SizeofExpr, Paren, Lambda, NameRef, LiteralRef, ThisRef,
    SuperRef, InitList, TypeRef, ArgList, Declarator,
};

struct Node {
    NodeKind kind;
    std::int32_t tok_begin = -1;  // token index range covered by this node
    std::int32_t tok_end = -1;    // exclusive
    std::int32_t op_token = -1;   // operator token for Binary/Unary/Assign/Postfix
    std::vector<std::int32_t> kids;
};

struct SyntaxTree {
    std::vector<Node> nodes;
    std::int32_t root = -1;

    const Node& at(std::int32_t idx) const { return nodes[static_cast<std::size_t>(idx)]; }
};

// What a declared identifier is, per its first declaration.
enum class IdentKind { Variable, Parameter, Function, Type };

inline const char* to_string(IdentKind k) {
    switch (k) {
        case IdentKind::Variable: return "variable";
        case IdentKind::Parameter: return "parameter";
        case IdentKind::Function: return "function";
        case IdentKind::Type: return "type";
    }
    return "?";
}

// Role of one identifier token. Excluded occurrences (member accesses through
// a receiver, import paths, labels, field/enum-constant declarations) never
// participate in renaming.
enum class OccRole { Decl, Use, Excluded };

struct Occurrence {
    std::int32_t token;
    OccRole role;
    IdentKind kind;  // meaningful when role == Decl
};

struct ParseResult {
    SyntaxTree tree;
    std::vector<Occurrence> occurrences;
};

namespace detail {

inline bool is_java_modifier(std::string_view t) {
    return t == "public" || t == "private" || t == "protected" || t == "static" ||
           t == "final" || t == "abstract" || t == "native" || t == "transient" ||
           t == "volatile" || t == "synchronized" || t == "strictfp" || t == "const";
}

inline bool is_c_modifier(std::string_view t) {
    return t == "const" || t == "static" || t == "extern" || t == "register" ||
           t == "volatile" || t == "inline" || t == "auto" || t == "restrict";
}

inline bool is_java_primitive(std::string_view t) {
    return t == "int" || t == "long" || t == "short" || t == "byte" || t == "char" ||
           t == "float" || t == "double" || t == "boolean" || t == "void" || t == "var";
}

inline bool is_c_primitive(std::string_view t) {
    return t == "int" || t == "long" || t == "short" || t == "char" || t == "float" ||
           t == "double" || t == "void" || t == "signed" || t == "unsigned" ||
           t == "bool" || t == "_Bool" || t == "_Complex" || t == "_Imaginary";
}

// Recursive-descent parser for the Java/C subset the toolkit supports.
// Every structural decision depends only on token kinds, keyword/punctuation
// texts and the set of locally declared type names; it never inspects the
// spelling of an identifier. That keeps parse trees stable under consistent
// identifier renaming, which the alpha-equivalence checks rely on.
class Parser {
public:
    Parser(const std::vector<Token>& tokens, Lang lang, const std::string& source)
        : toks_(tokens), lang_(lang) {
        sig_.reserve(tokens.size());
        for (std::int32_t i = 0; i < static_cast<std::int32_t>(tokens.size()); ++i) {
            if (tokens[static_cast<std::size_t>(i)].kind != TokenKind::Comment)
                sig_.push_back(i);
        }
        lines_.reserve(tokens.size());
        std::size_t line = 0, scanned = 0;
        for (const Token& t : tokens) {
            while (scanned < t.begin && scanned < source.size()) {
                if (source[scanned] == '\n') ++line;
                ++scanned;
            }
            lines_.push_back(line);
        }
    }

    ParseResult run() {
        std::int32_t root = make(NodeKind::Unit);
        while (!eof()) {
            kid(root, parse_external());
        }
        close(root);
        ParseResult out;
        out.tree.nodes = std::move(nodes_);
        out.tree.root = root;
        out.occurrences = std::move(occ_);
        return out;
    }

private:
    const std::vector<Token>& toks_;
    Lang lang_;
    std::vector<std::int32_t> sig_;  // non-comment token indices
    std::vector<std::size_t> lines_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;
    std::vector<Occurrence> occ_;
    std::set<std::string, std::less<>> type_names_;  // struct/class/typedef names seen so far

    // --- token cursor --------------------------------------------------------

    bool eof(std::size_t ahead = 0) const { return pos_ + ahead >= sig_.size(); }

    const Token& tok(std::size_t ahead = 0) const {
        return toks_[static_cast<std::size_t>(sig_[pos_ + ahead])];
    }

    std::int32_t tok_index(std::size_t ahead = 0) const { return sig_[pos_ + ahead]; }

    bool at(TokenKind k, std::string_view text, std::size_t ahead = 0) const {
        return !eof(ahead) && tok(ahead).kind == k && tok(ahead).text == text;
    }

    bool at_kw(std::string_view text, std::size_t ahead = 0) const {
        return at(TokenKind::Keyword, text, ahead);
    }

    bool at_punct(std::string_view text, std::size_t ahead = 0) const {
        return at(TokenKind::Punct, text, ahead);
    }

    bool at_op(std::string_view text, std::size_t ahead = 0) const {
        return at(TokenKind::Operator, text, ahead);
    }

    bool at_ident(std::size_t ahead = 0) const {
        return !eof(ahead) && tok(ahead).kind == TokenKind::Identifier;
    }

    void advance() { ++pos_; }

    [[noreturn]] void fail(const std::string& msg) const {
        std::size_t offset = eof() ? (toks_.empty() ? 0 : toks_.back().end)
                                   : tok().begin;
        throw SyntaxError(msg, offset);
    }

    void expect_punct(std::string_view text) {
        if (!at_punct(text)) fail("expected '" + std::string(text) + "'");
        advance();
    }

    void expect_op(std::string_view text) {
        if (!at_op(text)) fail("expected '" + std::string(text) + "'");
        advance();
    }

    // --- node helpers --------------------------------------------------------

    std::int32_t make(NodeKind kind) {
        Node n;
        n.kind = kind;
        n.tok_begin = eof() ? static_cast<std::int32_t>(toks_.size()) : tok_index();
        nodes_.push_back(std::move(n));
        return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    void close(std::int32_t node) {
        std::int32_t end = eof() ? static_cast<std::int32_t>(toks_.size()) : tok_index();
        nodes_[static_cast<std::size_t>(node)].tok_end = end;
    }

    void kid(std::int32_t parent, std::int32_t child) {
        nodes_[static_cast<std::size_t>(parent)].kids.push_back(child);
    }

    void record(std::int32_t token, OccRole role, IdentKind kind = IdentKind::Variable) {
        occ_.push_back(Occurrence{token, role, kind});
    }

    // Consume the identifier under the cursor, recording its role.
    std::string take_ident(OccRole role, IdentKind kind = IdentKind::Variable) {
        if (!at_ident()) fail("expected identifier");
        std::string name = tok().text;
        record(tok_index(), role, kind);
        advance();
        return name;
    }

    bool declared_type(std::string_view name) const {
        return type_names_.find(name) != type_names_.end();
    }

    // --- generic argument scanning (Java) -------------------------------------
    // Pure lookahead from a '<' token; returns the sig index one past the
    // matching close or nullopt when the bracket run cannot be generics.

    std::optional<std::size_t> scan_generic(std::size_t from) const {
        if (lang_ != Lang::Java) return std::nullopt;
        int depth = 0;
        std::size_t j = from;
        std::size_t guard = 0;
        while (j < sig_.size() && guard++ < 256) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[j])];
            if (t.kind == TokenKind::Operator) {
                if (t.text == "<") ++depth;
                else if (t.text == ">") --depth;
                else if (t.text == ">>") depth -= 2;
                else if (t.text == ">>>") depth -= 3;
                else if (t.text == "&") { /* intersection bound */ }
                else if (t.text == "?") { /* wildcard */ }
                else return std::nullopt;
            } else if (t.kind == TokenKind::Punct) {
                if (t.text != "," && t.text != "." && t.text != "[" && t.text != "]")
                    return std::nullopt;
            } else if (t.kind == TokenKind::Keyword) {
                if (t.text != "extends" && t.text != "super" && !is_java_primitive(t.text))
                    return std::nullopt;
            } else if (t.kind != TokenKind::Identifier) {
                return std::nullopt;
            }
            if (depth <= 0) return depth == 0 ? std::optional<std::size_t>(j + 1)
                                              : std::nullopt;
            ++j;
        }
        return std::nullopt;
    }

    // Consume a scanned generic argument run, marking identifier occurrences.
    void consume_generic(std::size_t end_sig) {
        bool after_dot = false;
        while (pos_ < end_sig) {
            if (at_ident()) {
                record(tok_index(), after_dot ? OccRole::Excluded : OccRole::Use);
            }
            after_dot = at_punct(".");
            advance();
        }
    }

    // --- type parsing ----------------------------------------------------------

    bool at_primitive() const {
        if (eof() || tok().kind != TokenKind::Keyword) return false;
        return lang_ == Lang::Java ? is_java_primitive(tok().text)
                                   : is_c_primitive(tok().text);
    }

    bool at_modifier() const {
        if (eof() || tok().kind != TokenKind::Keyword) return false;
        return lang_ == Lang::Java ? is_java_modifier(tok().text)
                                   : is_c_modifier(tok().text);
    }

    void skip_annotations() {
        while (at_punct("@")) {
            std::int32_t node = make(NodeKind::Annotation);
            advance();
            if (at_ident()) {
                record(tok_index(), OccRole::Excluded);
                advance();
                while (at_punct(".") && at_ident(1)) {
                    advance();
                    record(tok_index(), OccRole::Excluded);
                    advance();
                }
            }
            if (at_punct("(")) skip_balanced_parens(OccRole::Excluded);
            close(node);
        }
    }

    // Consume a balanced (...) run, tagging identifiers with the given role.
    void skip_balanced_parens(OccRole role) {
        int depth = 0;
        do {
            if (eof()) fail("unbalanced parentheses");
            if (at_punct("(")) ++depth;
            else if (at_punct(")")) --depth;
            else if (at_ident()) record(tok_index(), role);
            advance();
        } while (depth > 0);
    }

    // Parses a type expression into a TypeRef node. Returns nullopt when the
    // cursor is not at a type. `known_only` demands typedef knowledge for the
    // bare-identifier form (used by C pointer-declaration disambiguation).
    std::optional<std::int32_t> parse_type() {
        if (eof()) return std::nullopt;
        std::int32_t node = make(NodeKind::TypeRef);

        bool saw = false;
        while (at_modifier() || at_primitive()) {
            saw = saw || at_primitive();
            advance();
        }
        if (saw) {
            consume_array_suffix();
            close(node);
            return node;
        }

        if (at_kw("struct") || at_kw("union") || at_kw("enum") ||
            (lang_ == Lang::Java && at_kw("class"))) {
            advance();
            if (at_ident()) {
                record(tok_index(), OccRole::Use);
                advance();
            }
            consume_pointer_stars();
            close(node);
            return node;
        }

        if (at_ident()) {
            record(tok_index(), OccRole::Use);
            advance();
            if (lang_ == Lang::Java) {
                while (at_punct(".") && at_ident(1)) {
                    advance();
                    record(tok_index(), OccRole::Excluded);
                    advance();
                }
                if (at_op("<")) {
                    auto end = scan_generic(pos_);
                    if (!end) fail("malformed generic arguments");
                    consume_generic(*end);
                }
            }
            consume_array_suffix();
            consume_pointer_stars();
            close(node);
            return node;
        }

        nodes_.pop_back();  // not a type; node was speculative and empty
        return std::nullopt;
    }

    void consume_array_suffix() {
        while (at_punct("[") && at_punct("]", 1)) {
            advance();
            advance();
        }
    }

    void consume_pointer_stars() {
        if (lang_ != Lang::C) return;
        while (at_op("*") || at_kw("const") || at_kw("restrict") || at_kw("volatile"))
            advance();
    }

    // --- declaration-start classification --------------------------------------
    // Bounded lookahead; mirrors parse_type/parse_declarator exactly.

    bool looks_like_declaration() const {
        std::size_t k = pos_;
        bool saw_modifier = false;
        while (k < sig_.size()) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[k])];
            if (t.kind == TokenKind::Keyword &&
                (lang_ == Lang::Java ? is_java_modifier(t.text) : is_c_modifier(t.text))) {
                saw_modifier = true;
                ++k;
                continue;
            }
            break;
        }
        if (k >= sig_.size()) return false;
        const Token& t = toks_[static_cast<std::size_t>(sig_[k])];
        if (t.kind == TokenKind::Keyword) {
            if (lang_ == Lang::Java ? is_java_primitive(t.text) : is_c_primitive(t.text))
                return true;
            if (t.text == "struct" || t.text == "union" || t.text == "enum") return true;
            return saw_modifier;
        }
        if (t.kind != TokenKind::Identifier) return saw_modifier;

        std::size_t j = k + 1;
        auto text_at = [&](std::size_t idx) -> std::string_view {
            return toks_[static_cast<std::size_t>(sig_[idx])].text;
        };
        auto kind_at = [&](std::size_t idx) {
            return toks_[static_cast<std::size_t>(sig_[idx])].kind;
        };
        if (lang_ == Lang::Java) {
            while (j + 1 < sig_.size() && kind_at(j) == TokenKind::Punct &&
                   text_at(j) == "." && kind_at(j + 1) == TokenKind::Identifier)
                j += 2;
            if (j < sig_.size() && kind_at(j) == TokenKind::Operator && text_at(j) == "<") {
                auto end = scan_generic(j);
                if (!end) return false;
                j = *end;
            }
        }
        while (j + 1 < sig_.size() && kind_at(j) == TokenKind::Punct && text_at(j) == "[" &&
               kind_at(j + 1) == TokenKind::Punct && text_at(j + 1) == "]")
            j += 2;
        std::size_t stars = 0;
        if (lang_ == Lang::C) {
            while (j < sig_.size() && kind_at(j) == TokenKind::Operator && text_at(j) == "*") {
                ++j;
                ++stars;
            }
            // function-pointer declarator: T (*name)(
            if (stars == 0 && j + 2 < sig_.size() && kind_at(j) == TokenKind::Punct &&
                text_at(j) == "(" && kind_at(j + 1) == TokenKind::Operator &&
                text_at(j + 1) == "*" && declared_type(t.text))
                return true;
        }
        if (j >= sig_.size() || kind_at(j) != TokenKind::Identifier) return false;
        if (stars > 0) return declared_type(t.text);  // C: `a * b` needs typedef proof
        return true;
    }

    // --- top level --------------------------------------------------------------

    std::int32_t parse_external() {
        if (at_punct("#")) return parse_preproc();
        if (lang_ == Lang::Java) {
            skip_annotations();
            if (at_kw("package")) return parse_package_or_import(NodeKind::PackageDecl);
            if (at_kw("import")) return parse_package_or_import(NodeKind::ImportDecl);
            if (at_type_decl_head()) return parse_java_type_decl();
        } else {
            if (at_kw("typedef")) return parse_typedef();
            if ((at_kw("struct") || at_kw("union") || at_kw("enum")) && is_c_type_definition())
                return parse_c_type_decl();
        }
        if (at_punct(";")) {
            std::int32_t node = make(NodeKind::Empty);
            advance();
            close(node);
            return node;
        }
        return parse_declaration_or_function(/*member=*/false, /*top=*/true);
    }

    std::int32_t parse_preproc() {
        std::int32_t node = make(NodeKind::PreprocLine);
        std::size_t line = lines_[static_cast<std::size_t>(tok_index())];
        advance();
        while (!eof()) {
            std::size_t tline = lines_[static_cast<std::size_t>(tok_index())];
            if (tline != line) {
                // backslash continuation extends the directive
                const Token& prev = toks_[static_cast<std::size_t>(sig_[pos_ - 1])];
                if (prev.text == "\\" && tline == line + 1) line = tline;
                else break;
            }
            if (at_ident()) record(tok_index(), OccRole::Excluded);
            advance();
        }
        close(node);
        return node;
    }

    std::int32_t parse_package_or_import(NodeKind kind) {
        std::int32_t node = make(kind);
        advance();
        if (at_kw("static")) advance();
        while (!eof() && !at_punct(";")) {
            if (at_ident()) record(tok_index(), OccRole::Excluded);
            advance();
        }
        expect_punct(";");
        close(node);
        return node;
    }

    bool at_type_decl_head() const {
        std::size_t k = pos_;
        while (k < sig_.size()) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[k])];
            if (t.kind == TokenKind::Keyword && is_java_modifier(t.text)) {
                ++k;
                continue;
            }
            return t.kind == TokenKind::Keyword &&
                   (t.text == "class" || t.text == "interface" || t.text == "enum");
        }
        return false;
    }

    bool is_c_type_definition() const {
        // struct NAME { ... } or anonymous struct { ... } at declaration head,
        // as opposed to `struct NAME var;` which parse_type handles.
        std::size_t k = pos_ + 1;
        if (k < sig_.size() && toks_[static_cast<std::size_t>(sig_[k])].kind == TokenKind::Identifier)
            ++k;
        return k < sig_.size() && toks_[static_cast<std::size_t>(sig_[k])].kind == TokenKind::Punct &&
               toks_[static_cast<std::size_t>(sig_[k])].text == "{";
    }

    // --- Java type declarations ---------------------------------------------------

    std::int32_t parse_java_type_decl() {
        std::int32_t node = make(NodeKind::TypeDecl);
        while (at_modifier()) advance();
        bool is_enum = at_kw("enum");
        advance();  // class/interface/enum
        std::string name = take_ident(OccRole::Decl, IdentKind::Type);
        type_names_.insert(name);
        if (at_op("<")) {  // type parameters declare nothing renameable here
            auto end = scan_generic(pos_);
            if (!end) fail("malformed type parameters");
            consume_generic(*end);
        }
        while (at_kw("extends") || at_kw("implements")) {
            advance();
            do {
                auto ty = parse_type();
                if (!ty) fail("expected supertype name");
                kid(node, *ty);
            } while (at_punct(",") && (advance(), true));
        }
        expect_punct("{");
        if (is_enum) {
            parse_enum_constants(node);
        }
        while (!eof() && !at_punct("}")) {
            kid(node, parse_java_member(name));
        }
        expect_punct("}");
        close(node);
        return node;
    }

    void parse_enum_constants(std::int32_t parent) {
        while (at_ident()) {
            std::int32_t node = make(NodeKind::EnumConst);
            record(tok_index(), OccRole::Excluded);
            advance();
            if (at_punct("(")) skip_balanced_parens(OccRole::Use);
            close(node);
            kid(parent, node);
            if (at_punct(",")) advance();
            else break;
        }
        if (at_punct(";")) advance();
    }

    std::int32_t parse_java_member(const std::string& class_name) {
        skip_annotations();
        if (at_punct(";")) {
            std::int32_t node = make(NodeKind::Empty);
            advance();
            close(node);
            return node;
        }
        if (at_type_decl_head()) return parse_java_type_decl();

        // constructor: [modifiers] ClassName (
        std::size_t k = pos_;
        while (k < sig_.size()) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[k])];
            if (t.kind == TokenKind::Keyword && is_java_modifier(t.text)) ++k;
            else break;
        }
        if (k + 1 < sig_.size() &&
            toks_[static_cast<std::size_t>(sig_[k])].kind == TokenKind::Identifier &&
            toks_[static_cast<std::size_t>(sig_[k])].text == class_name &&
            toks_[static_cast<std::size_t>(sig_[k + 1])].text == "(") {
            std::int32_t node = make(NodeKind::Function);
            while (at_modifier()) advance();
            record(tok_index(), OccRole::Use);  // ctor name tracks the class name group
            advance();
            kid(node, parse_params());
            if (at_kw("throws")) {
                advance();
                while (at_ident()) {
                    record(tok_index(), OccRole::Use);
                    advance();
                    if (at_punct(",")) advance();
                    else break;
                }
            }
            kid(node, parse_block());
            close(node);
            return node;
        }
        return parse_declaration_or_function(/*member=*/true, /*top=*/false);
    }

    // --- C type declarations ---------------------------------------------------

    std::int32_t parse_c_type_decl(bool member = false) {
        std::int32_t node = make(NodeKind::TypeDecl);
        bool is_enum = at_kw("enum");
        advance();
        if (at_ident()) {
            std::string name = take_ident(OccRole::Decl, IdentKind::Type);
            type_names_.insert(name);
        }
        expect_punct("{");
        if (is_enum) {
            while (at_ident()) {
                std::int32_t c = make(NodeKind::EnumConst);
                record(tok_index(), OccRole::Excluded);
                advance();
                if (at_op("=")) {
                    advance();
                    kid(c, parse_assign_expr());
                }
                close(c);
                kid(node, c);
                if (at_punct(",")) advance();
                else break;
            }
        } else {
            while (!eof() && !at_punct("}")) {
                kid(node, parse_struct_field());
            }
        }
        expect_punct("}");
        // trailing declarators: struct S { ... } a, *b;
        while (at_ident() || at_op("*")) {
            consume_pointer_stars();
            if (!at_ident()) break;
            std::int32_t d = make(NodeKind::VarDecl);
            // a declarator on a nested struct declares a field of the outer one
            record(tok_index(), member ? OccRole::Excluded : OccRole::Decl,
                   IdentKind::Variable);
            advance();
            consume_array_suffix();
            close(d);
            kid(node, d);
            if (at_punct(",")) advance();
            else break;
        }
        expect_punct(";");
        close(node);
        return node;
    }

    std::int32_t parse_struct_field() {
        std::int32_t node = make(NodeKind::FieldDecl);
        if ((at_kw("struct") || at_kw("union") || at_kw("enum")) && is_c_type_definition()) {
            kid(node, parse_c_type_decl(/*member=*/true));
            close(node);
            return node;
        }
        auto ty = parse_type();
        if (!ty) fail("expected field type");
        kid(node, *ty);
        while (true) {
            consume_pointer_stars();
            if (!at_ident()) fail("expected field name");
            record(tok_index(), OccRole::Excluded);  // fields reach code via x.f / x->f
            advance();
            while (at_punct("[")) {
                advance();
                if (!at_punct("]")) kid(node, parse_assign_expr());
                expect_punct("]");
            }
            if (at_op(":")) {  // bit-field width
                advance();
                kid(node, parse_assign_expr());
            }
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(";");
        close(node);
        return node;
    }

    std::int32_t parse_typedef() {
        std::int32_t node = make(NodeKind::Typedef);
        advance();
        if ((at_kw("struct") || at_kw("union") || at_kw("enum")) && is_c_type_definition()) {
            // typedef struct [Tag] { ... } Alias;
            bool is_enum = at_kw("enum");
            advance();
            if (at_ident()) {
                std::string tag = take_ident(OccRole::Decl, IdentKind::Type);
                type_names_.insert(tag);
            }
            expect_punct("{");
            if (is_enum) {
                while (at_ident()) {
                    record(tok_index(), OccRole::Excluded);
                    advance();
                    if (at_op("=")) {
                        advance();
                        kid(node, parse_assign_expr());
                    }
                    if (at_punct(",")) advance();
                    else break;
                }
            } else {
                while (!eof() && !at_punct("}")) kid(node, parse_struct_field());
            }
            expect_punct("}");
        } else {
            auto ty = parse_type();
            if (!ty) fail("expected type after typedef");
            kid(node, *ty);
        }
        while (true) {
            consume_pointer_stars();
            std::string alias = take_ident(OccRole::Decl, IdentKind::Type);
            type_names_.insert(alias);
            consume_array_suffix();
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(";");
        close(node);
        return node;
    }

    // --- functions / variable declarations ----------------------------------------

    std::int32_t parse_declaration_or_function(bool member, bool top) {
        std::int32_t node_begin = eof() ? 0 : tok_index();
        (void)node_begin;
        while (at_modifier()) advance();
        if (lang_ == Lang::Java) skip_annotations();

        auto ty = parse_type();
        if (!ty) fail("expected declaration");

        // C function pointer: T (*name)(params);
        if (lang_ == Lang::C && at_punct("(") && at_op("*", 1)) {
            std::int32_t node = make(NodeKind::VarDecl);
            kid(node, *ty);
            advance();  // (
            while (at_op("*")) advance();
            record(tok_index(), OccRole::Decl, IdentKind::Variable);
            advance();
            expect_punct(")");
            if (at_punct("(")) skip_balanced_parens(OccRole::Use);
            if (at_op("=")) {
                advance();
                kid(node, parse_initializer());
            }
            expect_punct(";");
            close(node);
            return node;
        }

        consume_pointer_stars();
        if (!at_ident()) fail("expected declarator name");
        std::int32_t name_tok = tok_index();
        std::string name = tok().text;
        advance();

        if (at_punct("(")) {
            // function definition or prototype
            record(name_tok, OccRole::Decl, IdentKind::Function);
            std::int32_t node = make(NodeKind::Function);
            kid(node, *ty);
            kid(node, parse_params());
            if (lang_ == Lang::Java && at_kw("throws")) {
                advance();
                while (at_ident()) {
                    record(tok_index(), OccRole::Use);
                    advance();
                    if (at_punct(",")) advance();
                    else break;
                }
            }
            if (at_punct("{")) {
                kid(node, parse_block());
            } else {
                expect_punct(";");
            }
            close(node);
            return node;
        }

        // variable declaration; field names in Java class bodies stay excluded
        IdentKind dk = IdentKind::Variable;
        OccRole role = member && lang_ == Lang::Java ? OccRole::Excluded : OccRole::Decl;
        record(name_tok, role, dk);
        std::int32_t node = make(member ? NodeKind::FieldDecl : NodeKind::VarDecl);
        kid(node, *ty);
        parse_declarator_rest(node, member);
        while (at_punct(",")) {
            advance();
            consume_pointer_stars();
            if (!at_ident()) fail("expected declarator name");
            record(tok_index(), role, dk);
            advance();
            parse_declarator_rest(node, member);
        }
        expect_punct(";");
        close(node);
        (void)top;
        return node;
    }

    void parse_declarator_rest(std::int32_t node, bool member) {
        (void)member;
        while (at_punct("[")) {
            advance();
            if (!at_punct("]")) kid(node, parse_assign_expr());
            expect_punct("]");
        }
        if (at_op("=")) {
            advance();
            kid(node, parse_initializer());
        }
    }

    std::int32_t parse_initializer() {
        if (at_punct("{")) return parse_init_list();
        return parse_assign_expr();
    }

    std::int32_t parse_init_list() {
        std::int32_t node = make(NodeKind::InitList);
        expect_punct("{");
        while (!eof() && !at_punct("}")) {
            if (at_punct("{")) kid(node, parse_init_list());
            else if (at_punct(".") && at_ident(1)) {  // C designated initializer
                advance();
                record(tok_index(), OccRole::Excluded);
                advance();
                expect_op("=");
                kid(node, parse_initializer());
            } else kid(node, parse_assign_expr());
            if (at_punct(",")) advance();
            else break;
        }
        expect_punct("}");
        close(node);
        return node;
    }

    std::int32_t parse_params() {
        std::int32_t node = make(NodeKind::ParamList);
        expect_punct("(");
        if (at_punct(")")) {
            advance();
            close(node);
            return node;
        }
        while (true) {
            std::int32_t p = make(NodeKind::Param);
            if (lang_ == Lang::Java) skip_annotations();
            while (at_modifier()) advance();
            if (at_op("...")) {  // C varargs
                advance();
                close(p);
                kid(node, p);
                break;
            }
            auto ty = parse_type();
            if (!ty) fail("expected parameter type");
            kid(p, *ty);
            if (lang_ == Lang::Java && at_op("...")) advance();  // Java varargs
            consume_pointer_stars();
            if (at_ident()) {  // C prototypes may omit the name
                record(tok_index(), OccRole::Decl, IdentKind::Parameter);
                advance();
                consume_array_suffix();
                while (at_punct("[")) {  // sized array param
                    advance();
                    if (!at_punct("]")) kid(p, parse_assign_expr());
                    expect_punct("]");
                }
            }
            close(p);
            kid(node, p);
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(")");
        close(node);
        return node;
    }

    // --- statements -----------------------------------------------------------------

    std::int32_t parse_block() {
        std::int32_t node = make(NodeKind::Block);
        expect_punct("{");
        while (!eof() && !at_punct("}")) {
            kid(node, parse_stmt());
        }
        expect_punct("}");
        close(node);
        return node;
    }

    std::int32_t parse_stmt() {
        if (at_punct("{")) return parse_block();
        if (at_punct(";")) {
            std::int32_t node = make(NodeKind::Empty);
            advance();
            close(node);
            return node;
        }
        if (at_punct("#")) return parse_preproc();
        if (at_kw("if")) return parse_if();
        if (at_kw("while")) return parse_while();
        if (at_kw("do")) return parse_do();
        if (at_kw("for")) return parse_for();
        if (at_kw("switch")) return parse_switch();
        if (at_kw("return")) {
            std::int32_t node = make(NodeKind::Return);
            advance();
            if (!at_punct(";")) kid(node, parse_expr());
            expect_punct(";");
            close(node);
            return node;
        }
        if (at_kw("break") || at_kw("continue")) {
            std::int32_t node = make(at_kw("break") ? NodeKind::Break : NodeKind::Continue);
            advance();
            if (at_ident()) {  // Java labeled break/continue
                record(tok_index(), OccRole::Excluded);
                advance();
            }
            expect_punct(";");
            close(node);
            return node;
        }
        if (at_kw("goto")) {
            std::int32_t node = make(NodeKind::Goto);
            advance();
            take_ident(OccRole::Excluded);
            expect_punct(";");
            close(node);
            return node;
        }
        if (at_kw("throw")) {
            std::int32_t node = make(NodeKind::Throw);
            advance();
            kid(node, parse_expr());
            expect_punct(";");
            close(node);
            return node;
        }
        if (at_kw("try")) return parse_try();
        if (at_kw("assert") && lang_ == Lang::Java) {
            std::int32_t node = make(NodeKind::Assert);
            advance();
            kid(node, parse_expr());
            if (at_op(":")) {
                advance();
                kid(node, parse_expr());
            }
            expect_punct(";");
            close(node);
            return node;
        }
        if (at_kw("synchronized") && at_punct("(", 1)) {
            std::int32_t node = make(NodeKind::Synchronized);
            advance();
            expect_punct("(");
            kid(node, parse_expr());
            expect_punct(")");
            kid(node, parse_block());
            close(node);
            return node;
        }
        if (lang_ == Lang::Java && at_type_decl_head()) return parse_java_type_decl();
        if (lang_ == Lang::C && at_kw("typedef")) return parse_typedef();
        if (lang_ == Lang::C && (at_kw("struct") || at_kw("union") || at_kw("enum")) &&
            is_c_type_definition())
            return parse_c_type_decl();

        // labeled statement: IDENT ':' (but not ternary/case/qualified)
        if (at_ident() && at_op(":", 1)) {
            std::int32_t node = make(NodeKind::Labeled);
            record(tok_index(), OccRole::Excluded);
            advance();
            advance();
            kid(node, parse_stmt());
            close(node);
            return node;
        }

        if (looks_like_declaration())
            return parse_declaration_or_function(/*member=*/false, /*top=*/false);

        std::int32_t node = make(NodeKind::ExprStmt);
        kid(node, parse_expr());
        expect_punct(";");
        close(node);
        return node;
    }

    std::int32_t parse_if() {
        std::int32_t node = make(NodeKind::If);
        advance();
        expect_punct("(");
        kid(node, parse_expr());
        expect_punct(")");
        kid(node, parse_stmt());
        if (at_kw("else")) {
            advance();
            kid(node, parse_stmt());
        }
        close(node);
        return node;
    }

    std::int32_t parse_while() {
        std::int32_t node = make(NodeKind::While);
        advance();
        expect_punct("(");
        kid(node, parse_expr());
        expect_punct(")");
        kid(node, parse_stmt());
        close(node);
        return node;
    }

    std::int32_t parse_do() {
        std::int32_t node = make(NodeKind::DoWhile);
        advance();
        kid(node, parse_stmt());
        if (!at_kw("while")) fail("expected 'while' after do body");
        advance();
        expect_punct("(");
        kid(node, parse_expr());
        expect_punct(")");
        expect_punct(";");
        close(node);
        return node;
    }

    std::int32_t parse_for() {
        std::int32_t node = make(NodeKind::For);
        advance();
        expect_punct("(");

        if (looks_like_declaration()) {
            // could be a Java enhanced for: Type name : iterable
            std::size_t save = pos_;
            std::size_t occ_save = occ_.size();
            std::size_t nodes_save = nodes_.size();
            auto ty = parse_type();
            if (ty && at_ident() && at_op(":", 1) && lang_ == Lang::Java) {
                nodes_[static_cast<std::size_t>(node)].kind = NodeKind::ForEach;
                kid(node, *ty);
                record(tok_index(), OccRole::Decl, IdentKind::Variable);
                advance();
                advance();  // ':'
                kid(node, parse_expr());
                expect_punct(")");
                kid(node, parse_stmt());
                close(node);
                return node;
            }
            pos_ = save;  // plain for with declaration init
            occ_.resize(occ_save);
            nodes_.resize(nodes_save);
            kid(node, parse_for_init_decl());
        } else if (!at_punct(";")) {
            kid(node, parse_expr_list());
            expect_punct(";");
        } else {
            advance();
        }

        if (!at_punct(";")) kid(node, parse_expr());
        expect_punct(";");
        if (!at_punct(")")) kid(node, parse_expr_list());
        expect_punct(")");
        kid(node, parse_stmt());
        close(node);
        return node;
    }

    // declaration init of a classic for; same as a VarDecl statement
    std::int32_t parse_for_init_decl() {
        std::int32_t node = make(NodeKind::VarDecl);
        while (at_modifier()) advance();
        auto ty = parse_type();
        if (!ty) fail("expected type in for-init");
        kid(node, *ty);
        while (true) {
            consume_pointer_stars();
            if (!at_ident()) fail("expected declarator name");
            record(tok_index(), OccRole::Decl, IdentKind::Variable);
            advance();
            parse_declarator_rest(node, false);
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(";");
        close(node);
        return node;
    }

    std::int32_t parse_expr_list() {
        std::int32_t first = parse_expr();
        while (at_punct(",")) {
            advance();
            std::int32_t node = make(NodeKind::Binary);
            kid(node, first);
            kid(node, parse_expr());
            close(node);
            first = node;
        }
        return first;
    }

    std::int32_t parse_switch() {
        std::int32_t node = make(NodeKind::Switch);
        advance();
        expect_punct("(");
        kid(node, parse_expr());
        expect_punct(")");
        expect_punct("{");
        while (!eof() && !at_punct("}")) {
            if (at_kw("case")) {
                std::int32_t c = make(NodeKind::CaseLabel);
                advance();
                kid(c, parse_expr());
                expect_op(":");
                close(c);
                kid(node, c);
            } else if (at_kw("default")) {
                std::int32_t c = make(NodeKind::CaseLabel);
                advance();
                expect_op(":");
                close(c);
                kid(node, c);
            } else {
                kid(node, parse_stmt());
            }
        }
        expect_punct("}");
        close(node);
        return node;
    }

    std::int32_t parse_try() {
        std::int32_t node = make(NodeKind::Try);
        advance();
        if (at_punct("(")) {  // try-with-resources
            advance();
            while (!eof() && !at_punct(")")) {
                if (looks_like_declaration()) {
                    std::int32_t d = make(NodeKind::VarDecl);
                    while (at_modifier()) advance();
                    auto ty = parse_type();
                    if (!ty) fail("expected resource type");
                    kid(d, *ty);
                    record(tok_index(), OccRole::Decl, IdentKind::Variable);
                    advance();
                    expect_op("=");
                    kid(d, parse_assign_expr());
                    close(d);
                    kid(node, d);
                } else {
                    kid(node, parse_expr());
                }
                if (at_punct(";")) advance();
            }
            expect_punct(")");
        }
        kid(node, parse_block());
        while (at_kw("catch")) {
            std::int32_t c = make(NodeKind::CatchClause);
            advance();
            expect_punct("(");
            while (at_modifier()) advance();
            auto ty = parse_type();
            if (!ty) fail("expected exception type");
            kid(c, *ty);
            while (at_op("|")) {  // multi-catch
                advance();
                auto more = parse_type();
                if (!more) fail("expected exception type");
                kid(c, *more);
            }
            if (at_ident()) {
                record(tok_index(), OccRole::Decl, IdentKind::Parameter);
                advance();
            }
            expect_punct(")");
            kid(c, parse_block());
            close(c);
            kid(node, c);
        }
        if (at_kw("finally")) {
            std::int32_t f = make(NodeKind::FinallyClause);
            advance();
            kid(f, parse_block());
            close(f);
            kid(node, f);
        }
        close(node);
        return node;
    }

    // --- expressions -------------------------------------------------------------

    std::int32_t parse_expr() { return parse_assign_expr(); }

    bool at_assign_op() const {
        if (eof() || tok().kind != TokenKind::Operator) return false;
        const std::string& t = tok().text;
        return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" ||
               t == "%=" || t == "&=" || t == "|=" || t == "^=" || t == "<<=" ||
               t == ">>=" || t == ">>>=";
    }

    std::int32_t parse_assign_expr() {
        std::int32_t lhs = parse_ternary();
        if (at_assign_op()) {
            std::int32_t node = make(NodeKind::Assign);
            nodes_[static_cast<std::size_t>(node)].op_token = tok_index();
            advance();
            kid(node, lhs);
            kid(node, at_punct("{") ? parse_init_list() : parse_assign_expr());
            close(node);
            return node;
        }
        return lhs;
    }

    std::int32_t parse_ternary() {
        std::int32_t cond = parse_binary(0);
        if (at_op("?")) {
            std::int32_t node = make(NodeKind::Ternary);
            advance();
            kid(node, cond);
            kid(node, parse_assign_expr());
            expect_op(":");
            kid(node, parse_assign_expr());
            close(node);
            return node;
        }
        return cond;
    }

    // binary precedence, loosest first
    int binary_level(const Token& t) const {
        if (t.kind == TokenKind::Operator) {
            const std::string& s = t.text;
            if (s == "||") return 1;
            if (s == "&&") return 2;
            if (s == "|") return 3;
            if (s == "^") return 4;
            if (s == "&") return 5;
            if (s == "==" || s == "!=") return 6;
            if (s == "<" || s == ">" || s == "<=" || s == ">=") return 7;
            if (s == "<<" || s == ">>" || s == ">>>") return 8;
            if (s == "+" || s == "-") return 9;
            if (s == "*" || s == "/" || s == "%") return 10;
        }
        if (t.kind == TokenKind::Keyword && t.text == "instanceof") return 7;
        return 0;
    }

    std::int32_t parse_binary(int min_level) {
        std::int32_t lhs = parse_unary();
        while (!eof()) {
            int level = binary_level(tok());
            if (level == 0 || level < min_level) break;
            if (at_kw("instanceof")) {
                std::int32_t node = make(NodeKind::Binary);
                nodes_[static_cast<std::size_t>(node)].op_token = tok_index();
                advance();
                auto ty = parse_type();
                if (!ty) fail("expected type after instanceof");
                kid(node, lhs);
                kid(node, *ty);
                close(node);
                lhs = node;
                continue;
            }
            std::int32_t node = make(NodeKind::Binary);
            nodes_[static_cast<std::size_t>(node)].op_token = tok_index();
            advance();
            kid(node, lhs);
            kid(node, parse_binary(level + 1));
            close(node);
            lhs = node;
        }
        return lhs;
    }

    bool starts_unary() const {
        if (eof()) return false;
        const Token& t = tok();
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Literal:
                return true;
            case TokenKind::Keyword:
                return t.text == "new" || t.text == "this" || t.text == "super" ||
                       t.text == "sizeof" || t.text == "true" || t.text == "false" ||
                       t.text == "null";
            case TokenKind::Operator:
                return t.text == "+" || t.text == "-" || t.text == "!" || t.text == "~" ||
                       t.text == "++" || t.text == "--" || t.text == "*" || t.text == "&";
            case TokenKind::Punct:
                return t.text == "(";
            default:
                return false;
        }
    }

    std::int32_t parse_unary() {
        if (at_op("+") || at_op("-") || at_op("!") || at_op("~") || at_op("++") ||
            at_op("--") || (lang_ == Lang::C && (at_op("*") || at_op("&")))) {
            std::int32_t node = make(NodeKind::Unary);
            nodes_[static_cast<std::size_t>(node)].op_token = tok_index();
            advance();
            kid(node, parse_unary());
            close(node);
            return node;
        }
        if (lang_ == Lang::C && at_kw("sizeof")) {
            std::int32_t node = make(NodeKind::SizeofExpr);
            advance();
            if (at_punct("(") && paren_is_type(pos_ + 1)) {
                advance();
                auto ty = parse_type();
                kid(node, *ty);
                expect_punct(")");
            } else {
                kid(node, parse_unary());
            }
            close(node);
            return node;
        }
        if (lang_ == Lang::Java && at_kw("new")) return parse_postfix_tail(parse_new());
        if (at_punct("(")) {
            // cast, lambda, or parenthesized expression
            if (auto lambda_end = scan_lambda_params(); lambda_end) return parse_lambda();
            if (paren_is_type(pos_ + 1) && cast_operand_follows()) {
                std::int32_t node = make(NodeKind::Cast);
                advance();
                auto ty = parse_type();
                kid(node, *ty);
                expect_punct(")");
                kid(node, parse_unary());
                close(node);
                return parse_postfix_tail(node);
            }
            std::int32_t node = make(NodeKind::Paren);
            advance();
            kid(node, parse_expr());
            expect_punct(")");
            close(node);
            return parse_postfix_tail(node);
        }
        if (lang_ == Lang::Java && at_ident() && at_op("->", 1)) return parse_lambda();
        return parse_postfix_tail(parse_primary());
    }

    // whether sig position `from` starts a type that ends right at a ')'
    bool paren_is_type(std::size_t from) const {
        std::size_t j = from;
        bool saw_type_word = false;
        bool bare_ident = false;
        std::size_t idents = 0;
        std::size_t guard = 0;
        while (j < sig_.size() && guard++ < 64) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[j])];
            if (t.kind == TokenKind::Punct && t.text == ")") break;
            if (t.kind == TokenKind::Keyword &&
                ((lang_ == Lang::Java ? is_java_primitive(t.text) : is_c_primitive(t.text)) ||
                 t.text == "const" || t.text == "struct" || t.text == "union" ||
                 t.text == "enum" || t.text == "volatile" || t.text == "unsigned" ||
                 t.text == "signed")) {
                saw_type_word = true;
                ++j;
                continue;
            }
            if (t.kind == TokenKind::Identifier) {
                ++idents;
                bare_ident = true;
                ++j;
                continue;
            }
            if (t.kind == TokenKind::Operator && t.text == "*" && lang_ == Lang::C) {
                saw_type_word = saw_type_word || bare_ident;  // `(T*)` with typedef T
                ++j;
                continue;
            }
            if (t.kind == TokenKind::Punct && (t.text == "[" || t.text == "]")) {
                saw_type_word = true;
                ++j;
                continue;
            }
            if (t.kind == TokenKind::Operator && t.text == "<" && lang_ == Lang::Java) {
                auto end = scan_generic(j);
                if (!end) return false;
                saw_type_word = true;
                j = *end;
                continue;
            }
            return false;
        }
        if (j >= sig_.size()) return false;
        if (idents > 1) return false;
        if (saw_type_word) return true;
        // single bare identifier: only a cast when we know it names a type
        if (bare_ident && idents == 1) {
            const Token& t0 = toks_[static_cast<std::size_t>(sig_[from])];
            return t0.kind == TokenKind::Identifier && declared_type(t0.text);
        }
        return false;
    }

    // token after the closing ')' must be able to start an operand; this keeps
    // `(a) - b` an arithmetic expression even when `a` names a type
    bool cast_operand_follows() const {
        std::size_t j = pos_;
        int depth = 0;
        while (j < sig_.size()) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[j])];
            if (t.kind == TokenKind::Punct && t.text == "(") ++depth;
            if (t.kind == TokenKind::Punct && t.text == ")") {
                --depth;
                if (depth == 0) break;
            }
            ++j;
        }
        if (j + 1 >= sig_.size()) return false;
        const Token& next = toks_[static_cast<std::size_t>(sig_[j + 1])];
        switch (next.kind) {
            case TokenKind::Identifier:
            case TokenKind::Literal:
                return true;
            case TokenKind::Keyword:
                return next.text == "new" || next.text == "this" || next.text == "sizeof" ||
                       next.text == "true" || next.text == "false" || next.text == "null";
            case TokenKind::Operator:
                return next.text == "!" || next.text == "~" ||
                       (lang_ == Lang::C && (next.text == "*" || next.text == "&" ||
                                             next.text == "-" || next.text == "+"));
            case TokenKind::Punct:
                return next.text == "(";
            default:
                return false;
        }
    }

    // lambda lookahead: '(' [idents/types] ')' '->'
    std::optional<std::size_t> scan_lambda_params() const {
        if (lang_ != Lang::Java) return std::nullopt;
        std::size_t j = pos_;
        int depth = 0;
        while (j < sig_.size()) {
            const Token& t = toks_[static_cast<std::size_t>(sig_[j])];
            if (t.kind == TokenKind::Punct && t.text == "(") ++depth;
            if (t.kind == TokenKind::Punct && t.text == ")") {
                --depth;
                if (depth == 0) break;
            }
            ++j;
        }
        if (j + 1 < sig_.size()) {
            const Token& next = toks_[static_cast<std::size_t>(sig_[j + 1])];
            if (next.kind == TokenKind::Operator && next.text == "->")
                return j + 1;
        }
        return std::nullopt;
    }

    std::int32_t parse_lambda() {
        std::int32_t node = make(NodeKind::Lambda);
        if (at_ident()) {
            record(tok_index(), OccRole::Decl, IdentKind::Parameter);
            advance();
        } else {
            expect_punct("(");
            while (!eof() && !at_punct(")")) {
                if (looks_like_declaration()) {
                    auto ty = parse_type();
                    if (ty) kid(node, *ty);
                }
                if (at_ident()) {
                    record(tok_index(), OccRole::Decl, IdentKind::Parameter);
                    advance();
                }
                if (at_punct(",")) advance();
                else break;
            }
            expect_punct(")");
        }
        expect_op("->");
        kid(node, at_punct("{") ? parse_block() : parse_assign_expr());
        close(node);
        return node;
    }

    std::int32_t parse_new() {
        std::int32_t node = make(NodeKind::NewExpr);
        advance();  // new
        auto ty = parse_type();
        if (!ty) fail("expected type after new");
        kid(node, *ty);
        if (at_punct("(")) {
            kid(node, parse_args());
            if (at_punct("{")) {  // anonymous class body
                int depth = 0;
                do {
                    if (eof()) fail("unterminated anonymous class body");
                    if (at_punct("{")) ++depth;
                    else if (at_punct("}")) --depth;
                    else if (at_ident()) record(tok_index(), OccRole::Use);
                    advance();
                } while (depth > 0);
            }
        } else {
            while (at_punct("[")) {
                advance();
                if (!at_punct("]")) kid(node, parse_assign_expr());
                expect_punct("]");
            }
            if (at_punct("{")) kid(node, parse_init_list());
        }
        close(node);
        return node;
    }

    std::int32_t parse_args() {
        std::int32_t node = make(NodeKind::ArgList);
        expect_punct("(");
        while (!eof() && !at_punct(")")) {
            kid(node, at_punct("{") ? parse_init_list() : parse_assign_expr());
            if (at_punct(",")) advance();
            else break;
        }
        expect_punct(")");
        close(node);
        return node;
    }

    std::int32_t parse_postfix_tail(std::int32_t base) {
        while (!eof()) {
            if (at_punct("(")) {
                std::int32_t node = make(NodeKind::Call);
                kid(node, base);
                kid(node, parse_args());
                close(node);
                base = node;
                continue;
            }
            if (at_punct("[")) {
                std::int32_t node = make(NodeKind::Index);
                advance();
                kid(node, base);
                kid(node, parse_expr());
                expect_punct("]");
                close(node);
                base = node;
                continue;
            }
            if (at_punct(".") || (lang_ == Lang::C && at_op("->")) ||
                (lang_ == Lang::Java && at_op("::"))) {
                std::int32_t node = make(NodeKind::Member);
                nodes_[static_cast<std::size_t>(node)].op_token = tok_index();
                advance();
                if (at_ident()) {
                    record(tok_index(), OccRole::Excluded);  // member of a receiver
                    advance();
                } else if (at_kw("this") || at_kw("class") || at_kw("new") ||
                           at_kw("super")) {
                    advance();
                } else {
                    fail("expected member name");
                }
                kid(node, base);
                close(node);
                base = node;
                continue;
            }
            if (at_op("++") || at_op("--")) {
                std::int32_t node = make(NodeKind::PostfixOp);
                nodes_[static_cast<std::size_t>(node)].op_token = tok_index();
                advance();
                kid(node, base);
                close(node);
                base = node;
                continue;
            }
            break;
        }
        return base;
    }

    std::int32_t parse_primary() {
        if (eof()) fail("unexpected end of input in expression");
        const Token& t = tok();
        if (t.kind == TokenKind::Literal) {
            std::int32_t node = make(NodeKind::LiteralRef);
            advance();
            close(node);
            return node;
        }
        if (t.kind == TokenKind::Keyword &&
            (t.text == "true" || t.text == "false" || t.text == "null")) {
            std::int32_t node = make(NodeKind::LiteralRef);
            advance();
            close(node);
            return node;
        }
        if (t.kind == TokenKind::Keyword && t.text == "this") {
            std::int32_t node = make(NodeKind::ThisRef);
            advance();
            close(node);
            return node;
        }
        if (t.kind == TokenKind::Keyword && t.text == "super") {
            std::int32_t node = make(NodeKind::SuperRef);
            advance();
            close(node);
            return node;
        }
        if (t.kind == TokenKind::Identifier) {
            std::int32_t node = make(NodeKind::NameRef);
            record(tok_index(), OccRole::Use);
            advance();
            close(node);
            return node;
        }
        fail("unexpected token '" + t.text + "'");
    }
};

}  // namespace detail

// Parses a token stream into a concrete syntax tree plus the identifier
// occurrence list. Throws SyntaxError on the first structural problem.
inline ParseResult parse_tokens(const std::vector<Token>& tokens, Lang lang,
                                const std::string& source) {
    detail::Parser parser(tokens, lang, source);
    return parser.run();
}

}  // namespace codenat
