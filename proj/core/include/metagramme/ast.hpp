// Syntax tree for the metagrammar DSL (.mg class files) and the lexicon
// dialect (.lex lemma entries, .morph inflected-form entries).
#ifndef METAGRAMME_AST_HPP
#define METAGRAMME_AST_HPP

#include <memory>
#include <string>
#include <vector>

#include "metagramme/diagnostics.hpp"
#include "metagramme/featstruct.hpp"

namespace metagramme {

enum class NodeMark { None, Anchor, Subst, Foot, Coanchor };

const char* to_string(NodeMark m);

// Grammar-side feature values carry variable *names*; they are allocated in
// a per-description BindingEnv only at expansion time.
struct SynValue {
    std::string atom;                         // exactly one of atom/var is set
    std::string var;
    bool is_var() const { return !var.empty(); }
    bool operator==(const SynValue& o) const { return atom == o.atom && var == o.var; }
};

struct SynFeat {
    std::string attr;
    SynValue value;
    bool operator==(const SynFeat& o) const { return attr == o.attr && value == o.value; }
};

using SynFS = std::vector<SynFeat>;           // kept sorted by attribute

// One `node` statement.  `var` may be empty (anonymous node); `public_name`
// is the externally visible name used by coanchors and equations.  Features
// written outside top:/bot: land in `top`.  NodeSpecs naming the same
// variable are merged at expansion time.
struct NodeSpec {
    std::string var;
    std::string public_name;
    SynValue cat;                             // unset when not given
    bool has_cat = false;
    NodeMark mark = NodeMark::None;
    bool has_mark = false;
    SynFS top, bot;
    std::vector<NodeSpec> children;           // nested braces: immediate dominance
    SourcePos pos;
};

enum class RelOpSyntax { Idom, Dom, Iprec, Prec, Eq };

const char* to_string(RelOpSyntax op);

struct RelationSpec {
    RelOpSyntax op;
    std::string lhs, rhs;                     // node variable names
    SourcePos pos;
};

// Node equation statement: `?lhs = ?rhs` or `?lhs = ?rhs_var.rhs_export`.
struct NodeEquationStmt {
    std::string lhs;
    std::string rhs_var;
    std::string rhs_export;                   // empty for plain var-to-var
    SourcePos pos;
};

struct Statement;
using StatementPtr = std::unique_ptr<Statement>;

struct SynBlock {
    std::vector<NodeSpec> nodes;              // top-level nodes: no implicit relation
    std::vector<RelationSpec> relations;
};

struct Invocation {
    std::string callee;
    std::vector<std::string> args;            // positional; "?x" = caller var, else public name
    SynFS decoration;                         // from `*= [...]`
    bool has_decoration = false;
    std::string bind_to;                      // "?x = C[...]" when non-empty
    SourcePos pos;
};

struct Statement {
    enum class Kind { Conjunction, Disjunction, Syn, Iface, Invoke, Equation } kind;
    std::vector<StatementPtr> parts;          // Conjunction / Disjunction
    SynBlock syn;
    SynFS iface;
    Invocation invoke;
    NodeEquationStmt equation;
    SourcePos pos;
};

struct MgClassDecl {
    std::string name;
    std::vector<std::string> exports;         // declared export order matters
    std::vector<std::string> declares;
    std::vector<Invocation> imports;          // `import C[]` header lines
    StatementPtr body;                        // may be null (empty class)
    SourcePos pos;
};

struct CoanchorDecl {
    std::string node_name;                    // public node name in the template
    std::string form;                         // fixed inflected surface form
    std::string cat;
    SourcePos pos;
};

struct EquationDecl {
    std::string node_name;
    FeatureStructure fs;                      // one attr=value pair per written equation
    SourcePos pos;
};

struct LemmaEntryDecl {
    std::string label;                        // declaring class name (diagnostics only)
    std::string entry;                        // lemma string
    std::string cat;
    std::string family;
    FeatureStructure filters;
    std::vector<CoanchorDecl> coanchors;
    std::vector<EquationDecl> equations;
    SourcePos pos;

    bool is_mwe() const { return !coanchors.empty(); }
};

struct MorphEntryDecl {
    std::string label;
    std::string form;                         // surface form
    std::string lemma;
    std::string cat;
    FeatureStructure feats;
    SourcePos pos;
};

// Pretty-printing; parse(pretty_print(x)) is structurally identical to x.
std::string pretty_print(const MgClassDecl& c);
std::string pretty_print(const LemmaEntryDecl& l);
std::string pretty_print(const MorphEntryDecl& m);

bool structurally_equal(const MgClassDecl& a, const MgClassDecl& b);
bool structurally_equal(const LemmaEntryDecl& a, const LemmaEntryDecl& b);
bool structurally_equal(const MorphEntryDecl& a, const MorphEntryDecl& b);
bool structurally_equal(const Statement& a, const Statement& b);

} // namespace metagramme

#endif
