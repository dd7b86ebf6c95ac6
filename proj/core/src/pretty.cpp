#include <sstream>

#include "metagramme/ast.hpp"

namespace metagramme {

const char* to_string(ErrKind k) {
    switch (k) {
        case ErrKind::Syntax: return "syntax error";
        case ErrKind::UndeclaredVariable: return "undeclared variable";
        case ErrKind::DuplicateClass: return "duplicate class";
        case ErrKind::MissingField: return "missing field";
        case ErrKind::UnknownClass: return "unknown class";
        case ErrKind::CyclicImport: return "cyclic import";
        case ErrKind::ArityMismatch: return "arity mismatch";
        case ErrKind::UnknownExport: return "unknown export";
        case ErrKind::ExportCollision: return "export collision";
        case ErrKind::UnknownFamily: return "unknown family";
        case ErrKind::InconsistentNode: return "inconsistent node";
        case ErrKind::IllFormedDescription: return "ill-formed description";
        case ErrKind::DescriptionTooLarge: return "description too large";
        case ErrKind::ExpansionOverflow: return "expansion overflow";
        case ErrKind::BadManifest: return "bad manifest";
        case ErrKind::Io: return "i/o error";
    }
    return "error";
}

const char* to_string(DiagKind k) {
    switch (k) {
        case DiagKind::UnknownForm: return "unknown form";
        case DiagKind::CoanchorNodeMissing: return "coanchor node missing";
        case DiagKind::CoanchorCatMismatch: return "coanchor category mismatch";
    }
    return "diagnostic";
}

std::string MgError::format(ErrKind kind, const std::string& message, const SourcePos& pos) {
    std::string out = to_string(kind);
    out += ": ";
    out += message;
    if (!pos.file.empty()) {
        out += " (" + pos.file;
        if (pos.line > 0) out += ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col);
        out += ")";
    }
    return out;
}

const char* to_string(NodeMark m) {
    switch (m) {
        case NodeMark::None: return "none";
        case NodeMark::Anchor: return "anchor";
        case NodeMark::Subst: return "subst";
        case NodeMark::Foot: return "foot";
        case NodeMark::Coanchor: return "coanchor";
    }
    return "?";
}

const char* to_string(RelOpSyntax op) {
    switch (op) {
        case RelOpSyntax::Idom: return "->";
        case RelOpSyntax::Dom: return "->*";
        case RelOpSyntax::Iprec: return ">>";
        case RelOpSyntax::Prec: return ">>*";
        case RelOpSyntax::Eq: return "=";
    }
    return "?";
}

namespace {

std::string show(const SynValue& v) { return v.is_var() ? "?" + v.var : v.atom; }

std::string show(const SynFS& fs) {
    std::string out = "[";
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) out += ", ";
        out += fs[i].attr + "=" + show(fs[i].value);
    }
    return out + "]";
}

void print_node(std::ostringstream& out, const NodeSpec& n, int indent) {
    std::string pad(indent, ' ');
    out << pad << "node";
    if (!n.var.empty()) out << " ?" << n.var;
    if (!n.public_name.empty()) out << " (" << n.public_name << ")";
    std::string attrs;
    if (n.has_cat) attrs += "cat=" + show(n.cat);
    if (n.has_mark) attrs += std::string(attrs.empty() ? "" : ", ") + "mark=" + to_string(n.mark);
    if (!n.top.empty()) attrs += std::string(attrs.empty() ? "" : ", ") + "top:" + show(n.top);
    if (!n.bot.empty()) attrs += std::string(attrs.empty() ? "" : ", ") + "bot:" + show(n.bot);
    if (!attrs.empty()) out << " [" << attrs << "]";
    if (!n.children.empty()) {
        out << " {\n";
        for (const auto& c : n.children) print_node(out, c, indent + 2);
        out << pad << "}\n";
    } else {
        out << "\n";
    }
}

std::string show(const Invocation& inv) {
    std::string out;
    if (!inv.bind_to.empty()) out += "?" + inv.bind_to + " = ";
    out += inv.callee + "[";
    for (std::size_t i = 0; i < inv.args.size(); ++i) {
        if (i) out += ",";
        out += inv.args[i];
    }
    out += "]";
    if (inv.has_decoration) out += " *= " + show(inv.decoration);
    return out;
}

void print_stmt(std::ostringstream& out, const Statement& s, int indent) {
    std::string pad(indent, ' ');
    switch (s.kind) {
        case Statement::Kind::Conjunction:
        case Statement::Kind::Disjunction: {
            const char* sep = s.kind == Statement::Kind::Conjunction ? ";" : "|";
            out << pad << "{\n";
            for (std::size_t i = 0; i < s.parts.size(); ++i) {
                print_stmt(out, *s.parts[i], indent + 2);
                if (i + 1 < s.parts.size()) out << pad << sep << "\n";
            }
            out << pad << "}\n";
            break;
        }
        case Statement::Kind::Syn:
            out << pad << "<syn>{\n";
            for (const auto& n : s.syn.nodes) print_node(out, n, indent + 2);
            for (const auto& r : s.syn.relations)
                out << pad << "  ?" << r.lhs << " " << to_string(r.op) << " ?" << r.rhs << "\n";
            out << pad << "}\n";
            break;
        case Statement::Kind::Iface:
            out << pad << "<iface>{ " << show(s.iface).substr(1, show(s.iface).size() - 2) << " }\n";
            break;
        case Statement::Kind::Invoke:
            out << pad << show(s.invoke) << "\n";
            break;
        case Statement::Kind::Equation:
            out << pad << "?" << s.equation.lhs << " = ?" << s.equation.rhs_var;
            if (!s.equation.rhs_export.empty()) out << "." << s.equation.rhs_export;
            out << "\n";
            break;
    }
}

} // namespace

std::string pretty_print(const MgClassDecl& c) {
    std::ostringstream out;
    out << "class " << c.name << "\n";
    for (const auto& imp : c.imports) out << "import " << show(imp) << "\n";
    if (!c.exports.empty()) {
        out << "export";
        for (const auto& e : c.exports) out << " ?" << e;
        out << "\n";
    }
    if (!c.declares.empty()) {
        out << "declare";
        for (const auto& d : c.declares) out << " ?" << d;
        out << "\n";
    }
    out << "{\n";
    if (c.body) print_stmt(out, *c.body, 2);
    out << "}\n";
    return out.str();
}

std::string pretty_print(const LemmaEntryDecl& l) {
    std::ostringstream out;
    out << "class " << l.label << " {\n<lemma> {\n";
    out << "  entry <- \"" << l.entry << "\";\n";
    out << "  cat <- " << l.cat << ";\n";
    out << "  fam <- " << l.family;
    for (const auto& [attr, v] : l.filters) out << ";\n  filter " << attr << " = " << v.atom();
    for (const auto& co : l.coanchors)
        out << ";\n  coanchor " << co.node_name << " -> \"" << co.form << "\"/" << co.cat;
    for (const auto& eq : l.equations)
        for (const auto& [attr, v] : eq.fs)
            out << ";\n  equation " << eq.node_name << " -> " << attr << " = " << v.atom();
    out << " }}\n";
    return out.str();
}

std::string pretty_print(const MorphEntryDecl& m) {
    std::ostringstream out;
    out << "class " << m.label << " {\n<morpho> {\n";
    out << "  morph <- \"" << m.form << "\";\n";
    out << "  lemma <- \"" << m.lemma << "\";\n";
    out << "  cat <- " << m.cat;
    for (const auto& [attr, v] : m.feats) out << ";\n  feat " << attr << " = " << v.atom();
    out << " }}\n";
    return out.str();
}

namespace {

bool eq_nodes(const NodeSpec& a, const NodeSpec& b) {
    if (a.var != b.var || a.public_name != b.public_name || a.has_cat != b.has_cat ||
        a.has_mark != b.has_mark || a.top != b.top || a.bot != b.bot)
        return false;
    if (a.has_cat && !(a.cat == b.cat)) return false;
    if (a.has_mark && a.mark != b.mark) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!eq_nodes(a.children[i], b.children[i])) return false;
    return true;
}

bool eq_invocation(const Invocation& a, const Invocation& b) {
    return a.callee == b.callee && a.args == b.args && a.has_decoration == b.has_decoration &&
           (!a.has_decoration || a.decoration == b.decoration) && a.bind_to == b.bind_to;
}

} // namespace

bool structurally_equal(const Statement& a, const Statement& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Statement::Kind::Conjunction:
        case Statement::Kind::Disjunction: {
            if (a.parts.size() != b.parts.size()) return false;
            for (std::size_t i = 0; i < a.parts.size(); ++i)
                if (!structurally_equal(*a.parts[i], *b.parts[i])) return false;
            return true;
        }
        case Statement::Kind::Syn: {
            if (a.syn.nodes.size() != b.syn.nodes.size() ||
                a.syn.relations.size() != b.syn.relations.size())
                return false;
            for (std::size_t i = 0; i < a.syn.nodes.size(); ++i)
                if (!eq_nodes(a.syn.nodes[i], b.syn.nodes[i])) return false;
            for (std::size_t i = 0; i < a.syn.relations.size(); ++i) {
                const auto& x = a.syn.relations[i];
                const auto& y = b.syn.relations[i];
                if (x.op != y.op || x.lhs != y.lhs || x.rhs != y.rhs) return false;
            }
            return true;
        }
        case Statement::Kind::Iface:
            return a.iface == b.iface;
        case Statement::Kind::Invoke:
            return eq_invocation(a.invoke, b.invoke);
        case Statement::Kind::Equation:
            return a.equation.lhs == b.equation.lhs && a.equation.rhs_var == b.equation.rhs_var &&
                   a.equation.rhs_export == b.equation.rhs_export;
    }
    return false;
}

bool structurally_equal(const MgClassDecl& a, const MgClassDecl& b) {
    if (a.name != b.name || a.exports != b.exports || a.declares != b.declares) return false;
    if (a.imports.size() != b.imports.size()) return false;
    for (std::size_t i = 0; i < a.imports.size(); ++i)
        if (!eq_invocation(a.imports[i], b.imports[i])) return false;
    if (!a.body != !b.body) return false;
    return !a.body || structurally_equal(*a.body, *b.body);
}

bool structurally_equal(const LemmaEntryDecl& a, const LemmaEntryDecl& b) {
    if (a.label != b.label || a.entry != b.entry || a.cat != b.cat || a.family != b.family ||
        a.filters != b.filters)
        return false;
    if (a.coanchors.size() != b.coanchors.size() || a.equations.size() != b.equations.size())
        return false;
    for (std::size_t i = 0; i < a.coanchors.size(); ++i) {
        const auto& x = a.coanchors[i];
        const auto& y = b.coanchors[i];
        if (x.node_name != y.node_name || x.form != y.form || x.cat != y.cat) return false;
    }
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        const auto& x = a.equations[i];
        const auto& y = b.equations[i];
        if (x.node_name != y.node_name || x.fs != y.fs) return false;
    }
    return true;
}

bool structurally_equal(const MorphEntryDecl& a, const MorphEntryDecl& b) {
    return a.label == b.label && a.form == b.form && a.lemma == b.lemma && a.cat == b.cat &&
           a.feats == b.feats;
}

} // namespace metagramme
