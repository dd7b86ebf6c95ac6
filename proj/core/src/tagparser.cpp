#include "metagramme/tagparser.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

namespace metagramme {

std::vector<std::string> tokenize_sentence(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

namespace {

struct Inst {
    const AnchoredTree* tree = nullptr;
    int pos = -1; // anchoring position
    std::vector<int> parent;
    std::vector<int> child_index; // position among the parent's children
};

// Chart item coordinates. `kind`: 0 = node assembled, adjunction still
// possible ("bot"); 1 = adjunction decided ("top"); 2 = first `dot` children
// assembled. `p`,`q` delimit the foot gap, -1/-1 when there is none.
struct Key {
    int kind = 0;
    int inst = -1;
    int node = -1;
    int dot = 0;
    int i = -1, j = -1, p = -1, q = -1;
    auto operator<=>(const Key&) const = default;
};

enum Op { OpScan, OpFoot, OpPass, OpExtend, OpSubst, OpAdjoin };

struct Bp {
    Op op;
    Key a, b;
    int pos = -1;
};

struct Item {
    std::vector<Bp> alts;
};

// One elementary-tree use inside a derivation. Children are shared so that
// enumeration can copy partial results cheaply.
struct Use {
    int inst = -1;
    std::vector<std::pair<int, std::shared_ptr<const Use>>> substs;
    std::vector<std::pair<int, std::shared_ptr<const Use>>> adjoins;
    std::vector<std::pair<int, int>> scans; // leaf node -> token position
};

void merge_frag(Use& into, const Use& from) {
    into.substs.insert(into.substs.end(), from.substs.begin(), from.substs.end());
    into.adjoins.insert(into.adjoins.end(), from.adjoins.begin(), from.adjoins.end());
    into.scans.insert(into.scans.end(), from.scans.begin(), from.scans.end());
}

std::string serialize_use(const Use& u) {
    auto substs = u.substs;
    auto adjoins = u.adjoins;
    auto scans = u.scans;
    std::sort(substs.begin(), substs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::sort(adjoins.begin(), adjoins.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::sort(scans.begin(), scans.end());
    std::string out = "#" + std::to_string(u.inst) + "(";
    for (const auto& [node, sub] : substs)
        out += "s" + std::to_string(node) + "=" + serialize_use(*sub);
    for (const auto& [node, sub] : adjoins)
        out += "a" + std::to_string(node) + "=" + serialize_use(*sub);
    for (const auto& [node, pos] : scans)
        out += "@" + std::to_string(node) + ":" + std::to_string(pos);
    return out + ")";
}

class Parser {
public:
    Parser(const std::vector<Inst>& instances, const std::vector<std::string>& tokens,
           const ParseOptions& options)
        : insts_(instances), tokens_(tokens), opt_(options) {}

    ParseReport run() {
        const int n = static_cast<int>(tokens_.size());
        for (std::size_t t = 0; t < insts_.size(); ++t) seed(static_cast<int>(t));
        while (!agenda_.empty()) {
            Key k = agenda_.front();
            agenda_.pop_front();
            process(k);
        }

        ParseReport report;
        std::set<std::string> seen;
        for (std::size_t t = 0; t < insts_.size(); ++t) {
            const Inst& inst = insts_[t];
            if (inst.tree->foot() >= 0) continue;
            if (inst.tree->nodes[0].cat != opt_.start_cat) continue;
            Key accept{1, static_cast<int>(t), 0, 0, 0, n, -1, -1};
            if (!chart_.count(accept)) continue;
            for (Use& u : expand_use(accept)) {
                std::string ser = serialize_use(u);
                if (!seen.insert(ser).second) continue;
                std::string derived;
                if (!replay(u, derived)) continue;
                DerivationOutcome out;
                out.derivation = std::move(ser);
                out.derived = std::move(derived);
                out.mwes = collect_mwes(u);
                report.derivations.push_back(std::move(out));
            }
        }
        std::sort(report.derivations.begin(), report.derivations.end(),
                  [](const DerivationOutcome& a, const DerivationOutcome& b) {
                      return a.derivation < b.derivation;
                  });
        if (report.derivations.size() > opt_.max_derivations) {
            report.derivations.resize(opt_.max_derivations);
            truncated_ = true;
        }
        report.truncated = truncated_;
        return report;
    }

private:
    const std::vector<Inst>& insts_;
    const std::vector<std::string>& tokens_;
    const ParseOptions& opt_;

    std::map<Key, Item> chart_;
    std::deque<Key> agenda_;
    bool truncated_ = false;

    // partner indices, filled when an item is processed
    std::map<std::tuple<int, int, int>, std::vector<Key>> top_by_start_;  // inst,node,i
    std::map<std::tuple<int, int, int, int>, std::vector<Key>> part_by_end_; // inst,node,dot,j
    std::map<std::string, std::vector<Key>> init_roots_by_cat_;
    std::map<std::tuple<std::string, int, int>, std::vector<Key>> hosts_by_span_;  // cat,i,j
    std::map<std::tuple<std::string, int, int>, std::vector<Key>> aux_by_gap_;     // cat,p,q

    const AnchoredTree& tree(int inst) const { return *insts_[inst].tree; }

    bool adjoinable(int inst, int node) const {
        const AnchoredNode& an = tree(inst).nodes[node];
        if (an.mark == NodeMark::Subst || an.mark == NodeMark::Foot ||
            an.mark == NodeMark::Coanchor)
            return false;
        return !an.children.empty() || an.mark == NodeMark::Anchor;
    }

    void add(const Key& k, const Bp& bp) {
        auto [it, inserted] = chart_.emplace(k, Item{});
        it->second.alts.push_back(bp);
        if (inserted) agenda_.push_back(k);
    }

    void seed(int t) {
        const AnchoredTree& tr = tree(t);
        const int n = static_cast<int>(tokens_.size());
        for (std::size_t nd = 0; nd < tr.nodes.size(); ++nd) {
            const AnchoredNode& an = tr.nodes[nd];
            int node = static_cast<int>(nd);
            if (an.mark == NodeMark::Anchor) {
                int pos = insts_[t].pos;
                add(Key{0, t, node, 0, pos, pos + 1, -1, -1}, Bp{OpScan, {}, {}, pos});
            } else if (an.mark == NodeMark::Coanchor) {
                for (int pos = 0; pos < n; ++pos)
                    if (tokens_[pos] == an.lex)
                        add(Key{0, t, node, 0, pos, pos + 1, -1, -1}, Bp{OpScan, {}, {}, pos});
            } else if (an.mark == NodeMark::Foot) {
                for (int p = 0; p <= n; ++p)
                    for (int q = p; q <= n; ++q)
                        add(Key{0, t, node, 0, p, q, p, q}, Bp{OpFoot, {}, {}});
            }
        }
    }

    void process(const Key& k) {
        if (k.kind == 0)
            process_bot(k);
        else if (k.kind == 1)
            process_top(k);
        else
            process_part(k);
    }

    void process_bot(const Key& k) {
        // null adjunction (or the only option for leaves that refuse it)
        add(Key{1, k.inst, k.node, 0, k.i, k.j, k.p, k.q}, Bp{OpPass, k, {}});
        if (!adjoinable(k.inst, k.node)) return;
        const std::string& cat = tree(k.inst).nodes[k.node].cat;
        hosts_by_span_[{cat, k.i, k.j}].push_back(k);
        auto it = aux_by_gap_.find({cat, k.i, k.j});
        if (it != aux_by_gap_.end())
            for (const Key& aux : it->second)
                add(Key{1, k.inst, k.node, 0, aux.i, aux.j, k.p, k.q}, Bp{OpAdjoin, k, aux});
    }

    void process_top(const Key& k) {
        const Inst& inst = insts_[k.inst];
        const AnchoredTree& tr = tree(k.inst);
        if (k.node == 0) {
            if (tr.foot() < 0 && k.p < 0) {
                const std::string& cat = tr.nodes[0].cat;
                init_roots_by_cat_[cat].push_back(k);
                for (std::size_t t = 0; t < insts_.size(); ++t) {
                    const AnchoredTree& host = tree(static_cast<int>(t));
                    for (std::size_t nd = 0; nd < host.nodes.size(); ++nd)
                        if (host.nodes[nd].mark == NodeMark::Subst && host.nodes[nd].cat == cat)
                            add(Key{0, static_cast<int>(t), static_cast<int>(nd), 0, k.i, k.j,
                                    -1, -1},
                                Bp{OpSubst, {}, k});
                }
            }
            if (tr.foot() >= 0 && k.p >= 0) {
                const std::string& cat = tr.nodes[0].cat;
                aux_by_gap_[{cat, k.p, k.q}].push_back(k);
                auto it = hosts_by_span_.find({cat, k.p, k.q});
                if (it != hosts_by_span_.end())
                    for (const Key& host : it->second)
                        add(Key{1, host.inst, host.node, 0, k.i, k.j, host.p, host.q},
                            Bp{OpAdjoin, host, k});
            }
            return;
        }
        // contribute to the parent's assembly
        int parent = inst.parent[k.node];
        int cpos = inst.child_index[k.node];
        top_by_start_[{k.inst, k.node, k.i}].push_back(k);
        if (cpos == 0) {
            extend_part(Key{}, k, parent, 1);
        } else {
            auto it = part_by_end_.find({k.inst, parent, cpos, k.i});
            if (it != part_by_end_.end())
                for (const Key& part : it->second) extend_part(part, k, parent, cpos + 1);
        }
    }

    void extend_part(const Key& part, const Key& child, int parent, int newdot) {
        int i = newdot == 1 ? child.i : part.i;
        int p = newdot == 1 ? -1 : part.p;
        int q = newdot == 1 ? -1 : part.q;
        if (child.p >= 0) {
            if (p >= 0) return; // two gaps cannot combine
            p = child.p;
            q = child.q;
        }
        Key nk{2, child.inst, parent, newdot, i, child.j, p, q};
        add(nk, newdot == 1 ? Bp{OpPass, child, {}} : Bp{OpExtend, part, child});
    }

    void process_part(const Key& k) {
        const AnchoredTree& tr = tree(k.inst);
        int nkids = static_cast<int>(tr.nodes[k.node].children.size());
        if (k.dot == nkids) {
            add(Key{0, k.inst, k.node, 0, k.i, k.j, k.p, k.q}, Bp{OpPass, k, {}});
            return;
        }
        part_by_end_[{k.inst, k.node, k.dot, k.j}].push_back(k);
        int next_child = tr.nodes[k.node].children[k.dot];
        auto it = top_by_start_.find({k.inst, next_child, k.j});
        if (it != top_by_start_.end())
            for (const Key& child : it->second) extend_part(k, child, k.node, k.dot + 1);
    }

    // ---- derivation enumeration ----

    void cap(std::vector<Use>& v) {
        if (v.size() > opt_.max_derivations) {
            v.resize(opt_.max_derivations);
            truncated_ = true;
        }
    }

    std::vector<Use> expand_use(const Key& root_top) {
        std::vector<Use> frags = expand_key(root_top);
        for (Use& f : frags) f.inst = root_top.inst;
        return frags;
    }

    std::vector<Use> expand_key(const Key& k) {
        std::vector<Use> out;
        const Item& item = chart_.at(k);
        for (const Bp& bp : item.alts) {
            switch (bp.op) {
                case OpScan: {
                    Use f;
                    f.scans.emplace_back(k.node, bp.pos);
                    out.push_back(std::move(f));
                    break;
                }
                case OpFoot:
                    out.emplace_back();
                    break;
                case OpPass: {
                    for (Use& f : expand_key(bp.a)) out.push_back(std::move(f));
                    break;
                }
                case OpExtend: {
                    std::vector<Use> left = expand_key(bp.a);
                    std::vector<Use> right = expand_key(bp.b);
                    for (const Use& l : left)
                        for (const Use& r : right) {
                            Use f = l;
                            merge_frag(f, r);
                            out.push_back(std::move(f));
                        }
                    break;
                }
                case OpSubst: {
                    for (Use& u : expand_use(bp.b)) {
                        Use f;
                        f.substs.emplace_back(k.node, std::make_shared<Use>(std::move(u)));
                        out.push_back(std::move(f));
                    }
                    break;
                }
                case OpAdjoin: {
                    std::vector<Use> hosts = expand_key(bp.a);
                    std::vector<Use> auxes = expand_use(bp.b);
                    for (const Use& h : hosts)
                        for (const Use& a : auxes) {
                            Use f = h;
                            f.adjoins.emplace_back(k.node, std::make_shared<Use>(a));
                            out.push_back(std::move(f));
                        }
                    break;
                }
            }
            cap(out);
            if (out.size() == opt_.max_derivations && truncated_) break;
        }
        return out;
    }

    // ---- feature replay ----

    struct RN {
        std::string cat;
        FeatureStructure top, bot;
        std::string lex;
        std::vector<int> kids;
    };

    struct ReplayCtx {
        std::vector<RN> arena;
        std::vector<int> parent;
        BindingEnv env;
    };

    static bool unify_into(FeatureStructure& target, const FeatureStructure& add,
                           BindingEnv& env) {
        auto r = unify(target, add, env);
        if (!r) return false;
        target = std::move(r->fs);
        env = std::move(r->env);
        return true;
    }

    static void relink(ReplayCtx& ctx, int parent, int from, int to) {
        for (int& kid : ctx.arena[parent].kids)
            if (kid == from) kid = to;
        ctx.parent[to] = parent;
    }

    bool build_use(ReplayCtx& ctx, const Use& u, int& root_out, int& foot_out) {
        const AnchoredTree& tr = tree(u.inst);
        const int base = static_cast<int>(ctx.arena.size());
        std::vector<VarId> vid(tr.var_count);
        for (int v = 0; v < tr.var_count; ++v) vid[v] = ctx.env.fresh("u" + std::to_string(v));
        auto to_fs = [&](const TplFS& fs) {
            FeatureStructure out;
            for (const auto& [attr, v] : fs)
                out.set(attr, v.is_var() ? FeatureValue::var(vid[v.var])
                                         : FeatureValue::atom(v.atom));
            return out;
        };
        for (const auto& an : tr.nodes) {
            RN rn;
            rn.cat = an.cat;
            rn.top = to_fs(an.top);
            rn.bot = to_fs(an.bot);
            rn.lex = an.lex;
            for (int c : an.children) rn.kids.push_back(base + c);
            ctx.arena.push_back(std::move(rn));
            ctx.parent.push_back(-1);
        }
        for (int nd = 0; nd < static_cast<int>(tr.nodes.size()); ++nd)
            for (int kid : ctx.arena[base + nd].kids) ctx.parent[kid] = base + nd;

        int root = base;
        int foot = tr.foot() >= 0 ? base + tr.foot() : -1;

        for (const auto& [node, sub] : u.substs) {
            int sub_root = -1, sub_foot = -1;
            if (!build_use(ctx, *sub, sub_root, sub_foot)) return false;
            int h = base + node;
            if (!unify_into(ctx.arena[sub_root].top, ctx.arena[h].top, ctx.env)) return false;
            relink(ctx, ctx.parent[h], h, sub_root);
        }
        for (const auto& [node, sub] : u.adjoins) {
            int aux_root = -1, aux_foot = -1;
            if (!build_use(ctx, *sub, aux_root, aux_foot)) return false;
            int h = base + node;
            if (!unify_into(ctx.arena[aux_root].top, ctx.arena[h].top, ctx.env)) return false;
            if (!unify_into(ctx.arena[h].bot, ctx.arena[aux_foot].bot, ctx.env)) return false;
            ctx.arena[h].top = ctx.arena[aux_foot].top;
            if (h == root) {
                root = aux_root;
            } else {
                relink(ctx, ctx.parent[h], h, aux_root);
            }
            relink(ctx, ctx.parent[aux_foot], aux_foot, h);
        }
        root_out = root;
        foot_out = foot;
        return true;
    }

    bool replay(const Use& u, std::string& derived) {
        ReplayCtx ctx;
        int root = -1, foot = -1;
        if (!build_use(ctx, u, root, foot)) return false;
        // final top/bottom unification at every derived node
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (!unify_into(ctx.arena[v].top, ctx.arena[v].bot, ctx.env)) return false;
            for (int kid : ctx.arena[v].kids) stack.push_back(kid);
        }
        derived = print_node(ctx, root);
        return true;
    }

    static std::string print_node(const ReplayCtx& ctx, int v) {
        const RN& n = ctx.arena[v];
        std::string cat;
        for (char c : n.cat) cat += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        std::string out = "(" + cat;
        if (n.kids.empty()) {
            out += " " + n.lex;
        } else {
            for (int kid : n.kids) out += " " + print_node(ctx, kid);
        }
        return out + ")";
    }

    std::vector<MweSpan> collect_mwes(const Use& u) {
        std::vector<MweSpan> out;
        gather_mwes(u, out);
        std::sort(out.begin(), out.end(), [](const MweSpan& a, const MweSpan& b) {
            if (a.positions != b.positions) return a.positions < b.positions;
            return a.lemma_id < b.lemma_id;
        });
        return out;
    }

    void gather_mwes(const Use& u, std::vector<MweSpan>& out) {
        const AnchoredTree& tr = tree(u.inst);
        if (tr.is_mwe) {
            MweSpan span;
            span.lemma_id = tr.lemma_id;
            for (const auto& [node, pos] : u.scans) span.positions.push_back(pos + 1);
            std::sort(span.positions.begin(), span.positions.end());
            out.push_back(std::move(span));
        }
        for (const auto& [node, sub] : u.substs) gather_mwes(*sub, out);
        for (const auto& [node, sub] : u.adjoins) gather_mwes(*sub, out);
    }
};

} // namespace

ParseReport parse_sentence(const Lexicon& lexicon, const CompiledFamilies& families,
                           const std::vector<std::string>& tokens, const ParseOptions& options,
                           DiagnosticSink* sink) {
    if (tokens.empty()) return {};

    // Anchor every token, buffering each position's diagnostics.  A form with
    // no entries of its own may still be legitimate sentence material: multiword
    // entries carry their dependent words as coanchors of the governing tree,
    // and the chart scans those at whatever position the form occupies.  Such a
    // position is not a gap and its UnknownForm diagnostic would be misleading.
    std::vector<std::vector<AnchoredTree>> per_token;
    std::vector<DiagnosticSink> held(tokens.size());
    per_token.reserve(tokens.size());
    for (std::size_t pos = 0; pos < tokens.size(); ++pos)
        per_token.push_back(anchor_token(lexicon, families, tokens[pos], &held[pos]));

    std::unordered_set<std::string> coanchor_forms;
    for (const auto& trees : per_token)
        for (const AnchoredTree& t : trees)
            for (const AnchoredNode& n : t.nodes)
                if (n.mark == NodeMark::Coanchor) coanchor_forms.insert(n.lex);

    bool gap = false;
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        bool covered_by_coanchor =
            per_token[pos].empty() && coanchor_forms.count(tokens[pos]) > 0;
        if (per_token[pos].empty() && !covered_by_coanchor) gap = true;
        if (sink && !covered_by_coanchor)
            sink->insert(sink->end(), held[pos].begin(), held[pos].end());
    }
    if (gap) return {};

    std::vector<Inst> instances;
    for (std::size_t pos = 0; pos < per_token.size(); ++pos) {
        for (const AnchoredTree& t : per_token[pos]) {
            Inst inst;
            inst.tree = &t;
            inst.pos = static_cast<int>(pos);
            inst.parent.assign(t.nodes.size(), -1);
            inst.child_index.assign(t.nodes.size(), -1);
            for (std::size_t nd = 0; nd < t.nodes.size(); ++nd)
                for (std::size_t c = 0; c < t.nodes[nd].children.size(); ++c) {
                    inst.parent[t.nodes[nd].children[c]] = static_cast<int>(nd);
                    inst.child_index[t.nodes[nd].children[c]] = static_cast<int>(c);
                }
            instances.push_back(std::move(inst));
        }
    }

    Parser parser(instances, tokens, options);
    return parser.run();
}

} // namespace metagramme
