#include "metagramme/parser.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "metagramme/lexer.hpp"

namespace metagramme {

namespace {

class Parser {
public:
    Parser(const std::string& source, const std::string& filename)
        : toks_(tokenize(source, filename)) {}

    std::vector<MgClassDecl> metagrammar() {
        std::vector<MgClassDecl> classes;
        std::set<std::string> seen;
        while (!at(Tok::End)) {
            MgClassDecl c = class_decl();
            if (!seen.insert(c.name).second)
                throw MgError(ErrKind::DuplicateClass, "class '" + c.name + "' defined twice", c.pos);
            classes.push_back(std::move(c));
        }
        return classes;
    }

    LexiconDecls lexicon() {
        LexiconDecls out;
        std::set<std::string> seen;
        while (!at(Tok::End)) {
            SourcePos pos = peek().pos;
            expect_kw("class");
            std::string label = expect(Tok::Ident, "entry class name").text;
            if (!seen.insert(label).second)
                throw MgError(ErrKind::DuplicateClass, "entry '" + label + "' defined twice", pos);
            expect(Tok::LBrace, "'{'");
            Token dim = expect(Tok::Dim, "<lemma> or <morpho>");
            if (dim.text == "lemma") out.lemmas.push_back(lemma_block(label, pos));
            else if (dim.text == "morpho") out.morphs.push_back(morph_block(label, pos));
            else throw MgError(ErrKind::Syntax, "expected <lemma> or <morpho>, got <" + dim.text + ">", dim.pos);
            expect(Tok::RBrace, "'}'");
        }
        return out;
    }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_kw(const char* kw) const { return at(Tok::Ident) && peek().text == kw; }
    Token advance() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    Token expect(Tok k, const std::string& what) {
        if (!at(k))
            throw MgError(ErrKind::Syntax,
                          "expected " + what + ", got " + to_string(peek().kind) +
                              (peek().text.empty() ? "" : " '" + peek().text + "'"),
                          peek().pos);
        return advance();
    }

    void expect_kw(const char* kw) {
        if (!at_kw(kw))
            throw MgError(ErrKind::Syntax,
                          std::string("expected '") + kw + "', got '" + peek().text + "'", peek().pos);
        advance();
    }

    bool accept(Tok k) {
        if (at(k)) { advance(); return true; }
        return false;
    }

    // ---- .mg grammar ----

    MgClassDecl class_decl() {
        MgClassDecl c;
        c.pos = peek().pos;
        expect_kw("class");
        c.name = expect(Tok::Ident, "class name").text;
        while (true) {
            if (at_kw("import")) {
                advance();
                do c.imports.push_back(invocation());
                while (at(Tok::Ident) && peek(1).kind == Tok::LBracket);
            } else if (at_kw("export")) {
                advance();
                while (at(Tok::Var)) c.exports.push_back(advance().text);
            } else if (at_kw("declare")) {
                advance();
                while (at(Tok::Var)) c.declares.push_back(advance().text);
            } else {
                break;
            }
        }
        expect(Tok::LBrace, "'{'");
        if (!at(Tok::RBrace)) c.body = statement();
        expect(Tok::RBrace, "'}'");
        return c;
    }

    // `;` (conjunction) binds tighter than `|` (disjunction).
    StatementPtr statement() { return disjunction(); }

    StatementPtr disjunction() {
        SourcePos pos = peek().pos;
        std::vector<StatementPtr> parts;
        parts.push_back(conjunction());
        while (accept(Tok::Pipe)) parts.push_back(conjunction());
        if (parts.size() == 1) return std::move(parts.front());
        auto s = std::make_unique<Statement>();
        s->kind = Statement::Kind::Disjunction;
        s->parts = std::move(parts);
        s->pos = pos;
        return s;
    }

    StatementPtr conjunction() {
        SourcePos pos = peek().pos;
        std::vector<StatementPtr> parts;
        parts.push_back(primary());
        while (accept(Tok::Semi)) parts.push_back(primary());
        if (parts.size() == 1) return std::move(parts.front());
        auto s = std::make_unique<Statement>();
        s->kind = Statement::Kind::Conjunction;
        s->parts = std::move(parts);
        s->pos = pos;
        return s;
    }

    StatementPtr primary() {
        SourcePos pos = peek().pos;
        if (accept(Tok::LBrace)) {
            StatementPtr inner = statement();
            expect(Tok::RBrace, "'}'");
            return inner;
        }
        if (at(Tok::Dim) && peek().text == "syn") {
            advance();
            auto s = std::make_unique<Statement>();
            s->kind = Statement::Kind::Syn;
            s->pos = pos;
            expect(Tok::LBrace, "'{'");
            syn_items(s->syn);
            expect(Tok::RBrace, "'}'");
            return s;
        }
        if (at(Tok::Dim) && peek().text == "iface") {
            advance();
            auto s = std::make_unique<Statement>();
            s->kind = Statement::Kind::Iface;
            s->pos = pos;
            expect(Tok::LBrace, "'{'");
            s->iface = iface_entries();
            expect(Tok::RBrace, "'}'");
            return s;
        }
        if (at(Tok::Var)) {
            // `?x = C[...]` (bound invocation) or `?a = ?b[.Export]` (equation)
            std::string lhs = advance().text;
            expect(Tok::Eq, "'='");
            if (at(Tok::Ident)) {
                Invocation inv = invocation();
                inv.bind_to = lhs;
                inv.pos = pos;
                auto s = std::make_unique<Statement>();
                s->kind = Statement::Kind::Invoke;
                s->invoke = std::move(inv);
                s->pos = pos;
                return s;
            }
            auto s = std::make_unique<Statement>();
            s->kind = Statement::Kind::Equation;
            s->equation.lhs = lhs;
            s->equation.rhs_var = expect(Tok::Var, "variable or invocation").text;
            if (accept(Tok::Dot))
                s->equation.rhs_export = expect(Tok::Ident, "exported name").text;
            s->equation.pos = pos;
            s->pos = pos;
            return s;
        }
        if (at(Tok::Ident)) {
            auto s = std::make_unique<Statement>();
            s->kind = Statement::Kind::Invoke;
            s->invoke = invocation();
            s->pos = pos;
            return s;
        }
        throw MgError(ErrKind::Syntax, "expected a statement, got " + std::string(to_string(peek().kind)),
                      peek().pos);
    }

    Invocation invocation() {
        Invocation inv;
        inv.pos = peek().pos;
        inv.callee = expect(Tok::Ident, "class name").text;
        expect(Tok::LBracket, "'['");
        if (!at(Tok::RBracket)) {
            do {
                if (at(Tok::Var)) inv.args.push_back("?" + advance().text);
                else inv.args.push_back(expect(Tok::Ident, "node argument").text);
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
        if (accept(Tok::StarEq)) {
            inv.decoration = fs_literal();
            inv.has_decoration = true;
        }
        return inv;
    }

    void syn_items(SynBlock& block) {
        while (true) {
            accept(Tok::Semi);                       // optional separators
            if (at_kw("node")) { block.nodes.push_back(node_decl()); continue; }
            if (at(Tok::Var)) { block.relations.push_back(relation()); continue; }
            break;
        }
    }

    NodeSpec node_decl() {
        NodeSpec n;
        n.pos = peek().pos;
        expect_kw("node");
        if (at(Tok::Var)) n.var = advance().text;
        if (accept(Tok::LParen)) {
            n.public_name = expect(Tok::Ident, "public node name").text;
            expect(Tok::RParen, "')'");
        }
        if (at(Tok::LBracket)) node_attrs(n);
        if (accept(Tok::LBrace)) {
            while (at_kw("node")) n.children.push_back(node_decl());
            expect(Tok::RBrace, "'}'");
        }
        return n;
    }

    void node_attrs(NodeSpec& n) {
        expect(Tok::LBracket, "'['");
        if (!at(Tok::RBracket)) {
            do {
                Token key = expect(Tok::Ident, "attribute name");
                if (key.text == "top" || key.text == "bot") {
                    expect(Tok::Colon, "':'");
                    SynFS fs = fs_literal();
                    SynFS& dst = key.text == "top" ? n.top : n.bot;
                    for (auto& f : fs) add_feat(dst, f, key.pos);
                    continue;
                }
                expect(Tok::Eq, "'='");
                if (key.text == "cat") {
                    if (n.has_cat)
                        throw MgError(ErrKind::Syntax, "duplicate attribute 'cat'", key.pos);
                    n.cat = syn_value();
                    n.has_cat = true;
                } else if (key.text == "mark") {
                    if (n.has_mark)
                        throw MgError(ErrKind::Syntax, "duplicate attribute 'mark'", key.pos);
                    Token m = expect(Tok::Ident, "mark value");
                    n.mark = parse_mark(m);
                    n.has_mark = true;
                } else {
                    // Features outside top:/bot: land in top.
                    add_feat(n.top, {key.text, syn_value()}, key.pos);
                }
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
    }

    NodeMark parse_mark(const Token& m) {
        if (m.text == "none") return NodeMark::None;
        if (m.text == "anchor") return NodeMark::Anchor;
        if (m.text == "subst") return NodeMark::Subst;
        if (m.text == "foot") return NodeMark::Foot;
        if (m.text == "coanchor") return NodeMark::Coanchor;
        throw MgError(ErrKind::Syntax, "unknown mark '" + m.text + "'", m.pos);
    }

    RelationSpec relation() {
        RelationSpec r;
        r.pos = peek().pos;
        r.lhs = expect(Tok::Var, "node variable").text;
        switch (peek().kind) {
            case Tok::ArrowR: r.op = RelOpSyntax::Idom; break;
            case Tok::ArrowRStar: r.op = RelOpSyntax::Dom; break;
            case Tok::Gg: r.op = RelOpSyntax::Iprec; break;
            case Tok::GgStar: r.op = RelOpSyntax::Prec; break;
            case Tok::Eq: r.op = RelOpSyntax::Eq; break;
            default:
                throw MgError(ErrKind::Syntax, "expected a relation operator", peek().pos);
        }
        advance();
        r.rhs = expect(Tok::Var, "node variable").text;
        return r;
    }

    SynValue syn_value() {
        if (at(Tok::Var)) return SynValue{"", advance().text};
        Token t = expect(Tok::Ident, "atom or variable");
        if (!is_valid_atom(t.text))
            throw MgError(ErrKind::Syntax, "invalid atom '" + t.text + "'", t.pos);
        return SynValue{t.text, ""};
    }

    void add_feat(SynFS& fs, SynFeat f, const SourcePos& pos) {
        auto it = std::lower_bound(fs.begin(), fs.end(), f,
                                   [](const SynFeat& a, const SynFeat& b) { return a.attr < b.attr; });
        if (it != fs.end() && it->attr == f.attr)
            throw MgError(ErrKind::Syntax, "duplicate attribute '" + f.attr + "'", pos);
        fs.insert(it, std::move(f));
    }

    SynFS fs_literal() {
        SynFS fs;
        expect(Tok::LBracket, "'['");
        if (!at(Tok::RBracket)) {
            do {
                Token key = expect(Tok::Ident, "attribute name");
                expect(Tok::Eq, "'='");
                add_feat(fs, {key.text, syn_value()}, key.pos);
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
        return fs;
    }

    SynFS iface_entries() {
        SynFS fs;
        while (!at(Tok::RBrace)) {
            Token key = expect(Tok::Ident, "attribute name");
            expect(Tok::Eq, "'='");
            add_feat(fs, {key.text, syn_value()}, key.pos);
            if (!accept(Tok::Comma) && !accept(Tok::Semi)) break;
        }
        return fs;
    }

    // ---- lexicon dialect ----

    FeatureValue atom_value() {
        Token t = expect(Tok::Ident, "atom");
        if (!is_valid_atom(t.text))
            throw MgError(ErrKind::Syntax, "invalid atom '" + t.text + "'", t.pos);
        return FeatureValue::atom(t.text);
    }

    LemmaEntryDecl lemma_block(const std::string& label, const SourcePos& pos) {
        LemmaEntryDecl l;
        l.label = label;
        l.pos = pos;
        expect(Tok::LBrace, "'{'");
        bool first = true;
        while (!at(Tok::RBrace)) {
            if (!first) expect(Tok::Semi, "';'");
            if (at(Tok::RBrace)) break;              // tolerate trailing ';'
            first = false;
            Token key = expect(Tok::Ident, "lemma field");
            if (key.text == "entry") {
                expect(Tok::ArrowL, "'<-'");
                l.entry = expect(Tok::Str, "quoted lemma").text;
            } else if (key.text == "cat") {
                expect(Tok::ArrowL, "'<-'");
                l.cat = expect(Tok::Ident, "category").text;
            } else if (key.text == "fam") {
                expect(Tok::ArrowL, "'<-'");
                l.family = expect(Tok::Ident, "family name").text;
            } else if (key.text == "filter") {
                std::string attr = expect(Tok::Ident, "filter attribute").text;
                expect(Tok::Eq, "'='");
                if (l.filters.has(attr))
                    throw MgError(ErrKind::Syntax, "duplicate filter '" + attr + "'", key.pos);
                l.filters.set(attr, atom_value());
            } else if (key.text == "coanchor") {
                CoanchorDecl co;
                co.pos = key.pos;
                co.node_name = expect(Tok::Ident, "node name").text;
                expect(Tok::ArrowR, "'->'");
                co.form = expect(Tok::Str, "quoted form").text;
                expect(Tok::Slash, "'/'");
                co.cat = expect(Tok::Ident, "category").text;
                l.coanchors.push_back(std::move(co));
            } else if (key.text == "equation") {
                EquationDecl eq;
                eq.pos = key.pos;
                eq.node_name = expect(Tok::Ident, "node name").text;
                expect(Tok::ArrowR, "'->'");
                std::string attr = expect(Tok::Ident, "attribute").text;
                expect(Tok::Eq, "'='");
                eq.fs.set(attr, atom_value());
                l.equations.push_back(std::move(eq));
            } else {
                throw MgError(ErrKind::Syntax, "unknown lemma field '" + key.text + "'", key.pos);
            }
        }
        expect(Tok::RBrace, "'}'");
        if (l.entry.empty()) throw MgError(ErrKind::MissingField, "<lemma> block '" + label + "' lacks 'entry'", pos);
        if (l.cat.empty()) throw MgError(ErrKind::MissingField, "<lemma> block '" + label + "' lacks 'cat'", pos);
        if (l.family.empty()) throw MgError(ErrKind::MissingField, "<lemma> block '" + label + "' lacks 'fam'", pos);
        return l;
    }

    MorphEntryDecl morph_block(const std::string& label, const SourcePos& pos) {
        MorphEntryDecl m;
        m.label = label;
        m.pos = pos;
        expect(Tok::LBrace, "'{'");
        bool first = true;
        while (!at(Tok::RBrace)) {
            if (!first) expect(Tok::Semi, "';'");
            if (at(Tok::RBrace)) break;
            first = false;
            Token key = expect(Tok::Ident, "morph field");
            if (key.text == "morph") {
                expect(Tok::ArrowL, "'<-'");
                m.form = expect(Tok::Str, "quoted form").text;
            } else if (key.text == "lemma") {
                expect(Tok::ArrowL, "'<-'");
                m.lemma = expect(Tok::Str, "quoted lemma").text;
            } else if (key.text == "cat") {
                expect(Tok::ArrowL, "'<-'");
                m.cat = expect(Tok::Ident, "category").text;
            } else if (key.text == "feat") {
                std::string attr = expect(Tok::Ident, "feature attribute").text;
                expect(Tok::Eq, "'='");
                if (m.feats.has(attr))
                    throw MgError(ErrKind::Syntax, "duplicate feature '" + attr + "'", key.pos);
                m.feats.set(attr, atom_value());
            } else {
                throw MgError(ErrKind::Syntax, "unknown morph field '" + key.text + "'", key.pos);
            }
        }
        expect(Tok::RBrace, "'}'");
        if (m.form.empty()) throw MgError(ErrKind::MissingField, "<morpho> block '" + label + "' lacks 'morph'", pos);
        if (m.lemma.empty()) throw MgError(ErrKind::MissingField, "<morpho> block '" + label + "' lacks 'lemma'", pos);
        if (m.cat.empty()) throw MgError(ErrKind::MissingField, "<morpho> block '" + label + "' lacks 'cat'", pos);
        return m;
    }
};

// ---- undeclared-variable check ----

void collect_vars(const SynFS& fs, std::set<std::string>& used) {
    for (const auto& f : fs)
        if (f.value.is_var()) used.insert(f.value.var);
}

void collect_vars(const NodeSpec& n, std::set<std::string>& used) {
    if (!n.var.empty()) used.insert(n.var);
    if (n.has_cat && n.cat.is_var()) used.insert(n.cat.var);
    collect_vars(n.top, used);
    collect_vars(n.bot, used);
    for (const auto& c : n.children) collect_vars(c, used);
}

struct VarScan {
    std::set<std::string> used;
    std::vector<const Invocation*> invocations;

    void scan(const Statement& s) {
        switch (s.kind) {
            case Statement::Kind::Conjunction:
            case Statement::Kind::Disjunction:
                for (const auto& p : s.parts) scan(*p);
                break;
            case Statement::Kind::Syn:
                for (const auto& n : s.syn.nodes) collect_vars(n, used);
                for (const auto& r : s.syn.relations) { used.insert(r.lhs); used.insert(r.rhs); }
                break;
            case Statement::Kind::Iface:
                collect_vars(s.iface, used);
                break;
            case Statement::Kind::Invoke:
                scan_invocation(s.invoke);
                break;
            case Statement::Kind::Equation:
                used.insert(s.equation.lhs);
                used.insert(s.equation.rhs_var);
                break;
        }
    }

    void scan_invocation(const Invocation& inv) {
        invocations.push_back(&inv);
        for (const auto& a : inv.args)
            if (!a.empty() && a[0] == '?') used.insert(a.substr(1));
        collect_vars(inv.decoration, used);
        if (!inv.bind_to.empty()) used.insert(inv.bind_to);
    }
};

} // namespace

void check_undeclared_variables(const std::vector<MgClassDecl>& classes, bool lenient) {
    std::map<std::string, const MgClassDecl*> index;
    for (const auto& c : classes) index[c.name] = &c;

    for (const auto& c : classes) {
        VarScan scan;
        for (const auto& imp : c.imports) scan.scan_invocation(imp);
        if (c.body) scan.scan(*c.body);

        std::set<std::string> available(c.declares.begin(), c.declares.end());
        bool complete = true;
        for (const Invocation* inv : scan.invocations) {
            auto it = index.find(inv->callee);
            if (it == index.end()) {
                if (!lenient)
                    throw MgError(ErrKind::UnknownClass,
                                  "class '" + inv->callee + "' invoked from '" + c.name +
                                      "' is not defined",
                                  inv->pos);
                complete = false;
                continue;
            }
            for (const auto& e : it->second->exports) available.insert(e);
        }
        if (!complete && lenient) continue;
        for (const auto& e : c.exports) {
            if (!available.count(e))
                throw MgError(ErrKind::UndeclaredVariable,
                              "exported variable '?" + e + "' in class '" + c.name +
                                  "' is neither declared nor importable from an invoked class",
                              c.pos);
        }
        for (const auto& v : scan.used) {
            if (!available.count(v))
                throw MgError(ErrKind::UndeclaredVariable,
                              "variable '?" + v + "' in class '" + c.name +
                                  "' is neither declared nor importable from an invoked class",
                              c.pos);
        }
    }
}

std::vector<MgClassDecl> parse_metagrammar(const std::string& source, const std::string& filename) {
    Parser p(source, filename);
    std::vector<MgClassDecl> classes = p.metagrammar();
    check_undeclared_variables(classes, /*lenient=*/true);
    return classes;
}

LexiconDecls parse_lexicon(const std::string& source, const std::string& filename) {
    Parser p(source, filename);
    return p.lexicon();
}

} // namespace metagramme
