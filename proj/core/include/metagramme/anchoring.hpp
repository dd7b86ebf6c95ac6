#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metagramme/parser.hpp"
#include "metagramme/treesolver.hpp"

namespace metagramme {

// Lemma and morphology entries merged from one or more lexicon sources.
// Entry labels must stay unique across sources.
class Lexicon {
public:
    void add_source(const std::string& source, const std::string& filename);
    void add_decls(LexiconDecls decls);

    const std::vector<LemmaEntryDecl>& lemmas() const { return lemmas_; }
    const std::vector<MorphEntryDecl>& morphs() const { return morphs_; }

    std::vector<const MorphEntryDecl*> morphs_for(const std::string& surface) const;
    std::vector<const LemmaEntryDecl*> lemmas_for(const std::string& entry,
                                                  const std::string& cat) const;

private:
    void register_label(const std::string& label, const SourcePos& pos);

    std::vector<LemmaEntryDecl> lemmas_;
    std::vector<MorphEntryDecl> morphs_;
    std::map<std::string, SourcePos> labels_;
    std::multimap<std::string, std::size_t> by_surface_;
    std::multimap<std::string, std::size_t> by_entry_; // key "entry/cat"
};

struct AnchoredNode {
    std::string cat;
    NodeMark mark = NodeMark::None;
    std::string name;
    std::string lex; // surface material at anchor, coanchor and lexical leaves
    TplFS top;
    TplFS bot;
    std::vector<int> children;
};

// A lexicalized elementary tree: a template whose anchor (and coanchors, for
// multiword entries) have been filled in and whose features absorbed the
// entry's filters, equations and inflection.
struct AnchoredTree {
    std::vector<AnchoredNode> nodes; // preorder, node 0 is the root
    TplFS iface;
    int var_count = 0;
    std::string family;
    std::string lemma_label;
    std::string lemma_id; // lexical components joined with '-', in leaf order
    bool is_mwe = false;

    int anchor() const;
    int foot() const;
    bool is_auxiliary() const { return foot() >= 0; }
};

std::string to_canonical(const AnchoredTree& t);

using CompiledFamilies = std::map<std::string, std::vector<TreeTemplate>>;

// Combines one template with one lemma entry: filters unify with the
// interface, coanchor declarations claim the matching named nodes, equations
// unify into the named node's top. Returns nothing when the entry does not
// fit; reports a diagnostic when the template lacks a declared coanchor
// point or its category differs.
std::optional<AnchoredTree> anchor_lemma(const TreeTemplate& tpl, const LemmaEntryDecl& lemma,
                                         DiagnosticSink* sink = nullptr);

// All lexicalized trees for one surface token: every inflected reading, each
// lemma of that reading, each template of the lemma's family. Inflection
// features unify into the anchor's top. Unknown surface forms yield an
// UnknownForm diagnostic and no trees.
std::vector<AnchoredTree> anchor_token(const Lexicon& lexicon, const CompiledFamilies& families,
                                       const std::string& surface, DiagnosticSink* sink = nullptr);

} // namespace metagramme
