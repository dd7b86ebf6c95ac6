#include "metagramme/anchoring.hpp"

#include <set>

namespace metagramme {

void Lexicon::register_label(const std::string& label, const SourcePos& pos) {
    auto [it, inserted] = labels_.emplace(label, pos);
    if (!inserted)
        throw MgError(ErrKind::DuplicateClass,
                      "lexicon entry '" + label + "' is already defined (first seen in " +
                          it->second.file + ")",
                      pos);
}

void Lexicon::add_decls(LexiconDecls decls) {
    for (auto& l : decls.lemmas) {
        register_label(l.label, l.pos);
        by_entry_.emplace(l.entry + "/" + l.cat, lemmas_.size());
        lemmas_.push_back(std::move(l));
    }
    for (auto& m : decls.morphs) {
        register_label(m.label, m.pos);
        by_surface_.emplace(m.form, morphs_.size());
        morphs_.push_back(std::move(m));
    }
}

void Lexicon::add_source(const std::string& source, const std::string& filename) {
    add_decls(parse_lexicon(source, filename));
}

std::vector<const MorphEntryDecl*> Lexicon::morphs_for(const std::string& surface) const {
    std::vector<const MorphEntryDecl*> out;
    auto [lo, hi] = by_surface_.equal_range(surface);
    for (auto it = lo; it != hi; ++it) out.push_back(&morphs_[it->second]);
    return out;
}

std::vector<const LemmaEntryDecl*> Lexicon::lemmas_for(const std::string& entry,
                                                       const std::string& cat) const {
    std::vector<const LemmaEntryDecl*> out;
    auto [lo, hi] = by_entry_.equal_range(entry + "/" + cat);
    for (auto it = lo; it != hi; ++it) out.push_back(&lemmas_[it->second]);
    return out;
}

int AnchoredTree::anchor() const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].mark == NodeMark::Anchor) return static_cast<int>(i);
    return -1;
}

int AnchoredTree::foot() const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].mark == NodeMark::Foot) return static_cast<int>(i);
    return -1;
}

namespace {

std::string fs_str(const TplFS& fs) {
    std::string out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) out += ",";
        out += fs[i].first + "=";
        out += fs[i].second.is_var() ? "?" + std::to_string(fs[i].second.var)
                                     : fs[i].second.atom;
    }
    return out;
}

void node_str(const AnchoredTree& t, int idx, std::string& out) {
    const AnchoredNode& n = t.nodes[idx];
    out += "(";
    out += n.cat;
    if (n.mark != NodeMark::None) {
        out += ":";
        out += to_string(n.mark);
    }
    if (!n.name.empty()) out += "{" + n.name + "}";
    if (!n.lex.empty()) out += "'" + n.lex + "'";
    if (!n.top.empty() || !n.bot.empty())
        out += "[" + fs_str(n.top) + "|" + fs_str(n.bot) + "]";
    for (int c : n.children) {
        out += " ";
        node_str(t, c, out);
    }
    out += ")";
}

struct WorkNode {
    std::string cat;
    NodeMark mark = NodeMark::None;
    std::string name;
    std::string lex;
    FeatureStructure top;
    FeatureStructure bot;
    std::vector<int> children;
};

struct Work {
    std::vector<WorkNode> nodes;
    FeatureStructure iface;
    BindingEnv env;
    int anchor = -1;
};

FeatureStructure to_fs(const TplFS& fs) {
    FeatureStructure out;
    for (const auto& [attr, v] : fs)
        out.set(attr, v.is_var() ? FeatureValue::var(v.var) : FeatureValue::atom(v.atom));
    return out;
}

Work from_template(const TreeTemplate& t) {
    Work w;
    for (int i = 0; i < t.var_count; ++i) w.env.fresh("v" + std::to_string(i));
    for (const auto& n : t.nodes) {
        WorkNode wn;
        wn.cat = n.cat;
        wn.mark = n.mark;
        wn.name = n.name;
        wn.top = to_fs(n.top);
        wn.bot = to_fs(n.bot);
        wn.children = n.children;
        w.nodes.push_back(std::move(wn));
    }
    w.iface = to_fs(t.iface);
    w.anchor = [&] {
        for (std::size_t i = 0; i < w.nodes.size(); ++i)
            if (w.nodes[i].mark == NodeMark::Anchor) return static_cast<int>(i);
        return -1;
    }();
    return w;
}

bool unify_into(FeatureStructure& target, const FeatureStructure& add, BindingEnv& env) {
    auto r = unify(target, add, env);
    if (!r) return false;
    target = std::move(r->fs);
    env = std::move(r->env);
    return true;
}

void diag(DiagnosticSink* sink, DiagKind kind, const std::string& message) {
    if (sink) sink->push_back({kind, message});
}

// Filters, coanchors and equations of one lemma entry applied to a template.
// The anchor's `lex` is the citation form; inflection replaces it later.
std::optional<Work> apply_lemma(const TreeTemplate& tpl, const LemmaEntryDecl& lemma,
                                DiagnosticSink* sink) {
    Work w = from_template(tpl);
    if (w.anchor < 0) return std::nullopt;
    if (w.nodes[w.anchor].cat != lemma.cat) return std::nullopt;
    if (!unify_into(w.iface, lemma.filters, w.env)) return std::nullopt;

    auto find_named = [&](const std::string& name) {
        for (std::size_t i = 0; i < w.nodes.size(); ++i)
            if (w.nodes[i].name == name) return static_cast<int>(i);
        return -1;
    };

    std::set<int> claimed;
    for (const auto& co : lemma.coanchors) {
        int idx = find_named(co.node_name);
        if (idx < 0 || w.nodes[idx].mark != NodeMark::Coanchor || claimed.count(idx)) {
            diag(sink, DiagKind::CoanchorNodeMissing,
                 "entry '" + lemma.label + "': family '" + tpl.family +
                     "' template has no free coanchor point named '" + co.node_name + "'");
            return std::nullopt;
        }
        if (w.nodes[idx].cat != co.cat) {
            diag(sink, DiagKind::CoanchorCatMismatch,
                 "entry '" + lemma.label + "': coanchor '" + co.node_name + "' expects category '" +
                     co.cat + "' but the node is '" + w.nodes[idx].cat + "'");
            return std::nullopt;
        }
        w.nodes[idx].lex = co.form;
        claimed.insert(idx);
    }
    for (std::size_t i = 0; i < w.nodes.size(); ++i)
        if (w.nodes[i].mark == NodeMark::Coanchor && !claimed.count(static_cast<int>(i)))
            return std::nullopt; // template requires more lexical material than the entry provides

    for (const auto& eq : lemma.equations) {
        int idx = find_named(eq.node_name);
        if (idx < 0) {
            diag(sink, DiagKind::CoanchorNodeMissing,
                 "entry '" + lemma.label + "': equation targets unknown node '" + eq.node_name +
                     "'");
            return std::nullopt;
        }
        if (!unify_into(w.nodes[idx].top, eq.fs, w.env)) return std::nullopt;
    }
    w.nodes[w.anchor].lex = lemma.entry;
    return w;
}

AnchoredTree finalize(const Work& w, const TreeTemplate& tpl, const LemmaEntryDecl& lemma) {
    AnchoredTree out;
    std::map<VarId, int> canon;
    auto conv = [&](const FeatureValue& v) {
        FeatureValue r = resolve(v, w.env);
        if (r.is_atom()) return TplValue{r.atom(), -1};
        VarId rep = w.env.root(r.var());
        auto it = canon.find(rep);
        if (it == canon.end()) it = canon.emplace(rep, static_cast<int>(canon.size())).first;
        return TplValue{"", it->second};
    };
    auto conv_fs = [&](const FeatureStructure& fs) {
        TplFS res;
        for (const auto& [attr, v] : fs) res.emplace_back(attr, conv(v));
        return res;
    };
    for (const auto& n : w.nodes) {
        AnchoredNode an;
        an.cat = n.cat;
        an.mark = n.mark;
        an.name = n.name;
        an.lex = n.lex;
        an.top = conv_fs(n.top);
        an.bot = conv_fs(n.bot);
        an.children = n.children;
        out.nodes.push_back(std::move(an));
    }
    out.iface = conv_fs(w.iface);
    out.var_count = static_cast<int>(canon.size());
    out.family = tpl.family;
    out.lemma_label = lemma.label;
    out.is_mwe = !lemma.coanchors.empty();
    std::string id;
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
        if (w.nodes[i].lex.empty()) continue;
        if (!id.empty()) id += "-";
        id += static_cast<int>(i) == w.anchor ? lemma.entry : w.nodes[i].lex;
    }
    out.lemma_id = id;
    return out;
}

} // namespace

std::string to_canonical(const AnchoredTree& t) {
    std::string out;
    if (!t.nodes.empty()) node_str(t, 0, out);
    out += " / [" + fs_str(t.iface) + "] / " + t.lemma_label + ":" + t.lemma_id;
    if (t.is_mwe) out += " (mwe)";
    return out;
}

std::optional<AnchoredTree> anchor_lemma(const TreeTemplate& tpl, const LemmaEntryDecl& lemma,
                                         DiagnosticSink* sink) {
    auto w = apply_lemma(tpl, lemma, sink);
    if (!w) return std::nullopt;
    return finalize(*w, tpl, lemma);
}

std::vector<AnchoredTree> anchor_token(const Lexicon& lexicon, const CompiledFamilies& families,
                                       const std::string& surface, DiagnosticSink* sink) {
    auto morphs = lexicon.morphs_for(surface);
    if (morphs.empty()) {
        diag(sink, DiagKind::UnknownForm,
             "surface form '" + surface + "' is not in the morphological lexicon");
        return {};
    }
    std::vector<AnchoredTree> out;
    std::set<std::string> seen;
    for (const MorphEntryDecl* m : morphs) {
        for (const LemmaEntryDecl* lemma : lexicon.lemmas_for(m->lemma, m->cat)) {
            auto fit = families.find(lemma->family);
            if (fit == families.end()) continue;
            for (const TreeTemplate& tpl : fit->second) {
                auto w = apply_lemma(tpl, *lemma, sink);
                if (!w) continue;
                if (!unify_into(w->nodes[w->anchor].top, m->feats, w->env)) continue;
                AnchoredTree t = finalize(*w, tpl, *lemma);
                t.nodes[t.anchor()].lex = surface;
                if (seen.insert(to_canonical(t)).second) out.push_back(std::move(t));
            }
        }
    }
    return out;
}

} // namespace metagramme
