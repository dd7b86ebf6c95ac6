#include "metagramme/resolver.hpp"

#include <map>
#include <memory>

namespace metagramme {

const char* to_string(RelOp op) {
    switch (op) {
        case RelOp::Idom: return "->";
        case RelOp::Dom: return "->*";
        case RelOp::Iprec: return ">>";
        case RelOp::Prec: return ">>*";
    }
    return "?";
}

namespace {

// What a variable can denote during expansion: a description node, a feature
// value, or a whole class instance (`?x = C[...]`), whose exported entities
// are reachable as `?x.Name`. Instance fields are immutable once built, so
// forked paths may share them.
struct Entity {
    enum class Kind { Node, Value, Instance };
    Kind kind = Kind::Value;
    int node = -1;
    VarId var = -1;
    std::shared_ptr<const std::map<std::string, Entity>> fields;

    static Entity make_node(int idx) {
        Entity e;
        e.kind = Kind::Node;
        e.node = idx;
        return e;
    }
    static Entity make_value(VarId v) {
        Entity e;
        e.kind = Kind::Value;
        e.var = v;
        return e;
    }
};

using Scope = std::map<std::string, Entity>;

struct Frame {
    const MgClassDecl* decl = nullptr;
    std::string tag; // "Class#k", used for debug names and provenance
    Scope scope;
};

struct PathState {
    std::vector<DescNode> nodes;
    std::vector<Relation> relations;
    std::vector<std::pair<int, int>> equalities;
    FeatureStructure iface;
    BindingEnv env;
    Scope ambient; // description-wide public names
    std::vector<Frame> frames;
    std::map<std::string, int> instance_count;
    std::vector<std::string> choices;
};

std::optional<NodeMark> merge_marks(NodeMark a, NodeMark b) {
    if (a == NodeMark::None) return b;
    if (b == NodeMark::None) return a;
    if (a == b) return a;
    return std::nullopt;
}

bool same_entity(const Entity& a, const Entity& b, const BindingEnv& env) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Entity::Kind::Node: return a.node == b.node;
        case Entity::Kind::Value: return env.same_class(a.var, b.var);
        case Entity::Kind::Instance: return a.fields == b.fields;
    }
    return false;
}

class Expander {
public:
    Expander(const Grammar& g, const ExpandOptions& opt) : g_(g), opt_(opt) {}

    std::vector<FlatDescription> run(const std::string& class_name) {
        Invocation inv;
        inv.callee = class_name;
        std::vector<PathState> states = invoke(PathState{}, inv);
        std::vector<FlatDescription> out;
        out.reserve(states.size());
        for (auto& s : states) {
            FlatDescription d;
            d.nodes = std::move(s.nodes);
            d.relations = std::move(s.relations);
            d.equalities = std::move(s.equalities);
            d.iface = std::move(s.iface);
            d.env = std::move(s.env);
            d.family = class_name;
            for (std::size_t i = 0; i < s.choices.size(); ++i) {
                if (i) d.provenance += ";";
                d.provenance += s.choices[i];
            }
            out.push_back(std::move(d));
        }
        return out;
    }

private:
    const Grammar& g_;
    const ExpandOptions& opt_;

    void check_overflow(std::size_t n) {
        if (n > opt_.max_descriptions)
            throw MgError(ErrKind::ExpansionOverflow,
                          "expansion exceeds the cap of " +
                              std::to_string(opt_.max_descriptions) + " descriptions");
    }

    Scope& current_scope(PathState& s) {
        return s.frames.empty() ? s.ambient : s.frames.back().scope;
    }

    std::string current_tag(const PathState& s) {
        return s.frames.empty() ? std::string("<top>") : s.frames.back().tag;
    }

    // Registers `name -> e` in a scope; re-registering the same entity is a
    // no-op, anything else is a collision.
    void bind_name(PathState& s, Scope& scope, const std::string& name, const Entity& e,
                   const SourcePos& pos) {
        auto it = scope.find(name);
        if (it == scope.end()) {
            scope.emplace(name, e);
            return;
        }
        if (!same_entity(it->second, e, s.env))
            throw MgError(ErrKind::ExportCollision,
                          "name '" + name + "' is already bound to a different entity", pos);
    }

    void assign_public_name(PathState& s, int node, const std::string& name,
                            const SourcePos& pos) {
        DescNode& n = s.nodes[node];
        if (n.public_name.empty())
            n.public_name = name;
        else if (n.public_name != name)
            throw MgError(ErrKind::ExportCollision,
                          "node '" + n.debug_name + "' already has public name '" +
                              n.public_name + "', cannot also be named '" + name + "'",
                          pos);
        bind_name(s, s.ambient, name, Entity::make_node(node), pos);
    }

    FeatureValue resolve_value(PathState& s, Scope& scope, const SynValue& v,
                               const SourcePos& pos) {
        if (!v.is_var()) return FeatureValue::atom(v.atom);
        auto it = scope.find(v.var);
        if (it == scope.end()) {
            VarId id = s.env.fresh(v.var);
            scope.emplace(v.var, Entity::make_value(id));
            return FeatureValue::var(id);
        }
        if (it->second.kind != Entity::Kind::Value)
            throw MgError(ErrKind::IllFormedDescription,
                          "variable '?" + v.var + "' does not denote a feature value", pos);
        return FeatureValue::var(it->second.var);
    }

    FeatureStructure resolve_synfs(PathState& s, Scope& scope, const SynFS& fs,
                                   const SourcePos& pos) {
        FeatureStructure out;
        for (const auto& f : fs) out.set(f.attr, resolve_value(s, scope, f.value, pos));
        return out;
    }

    bool unify_into(FeatureStructure& target, const FeatureStructure& addition,
                    BindingEnv& env) {
        auto r = unify(target, addition, env);
        if (!r) return false;
        target = std::move(r->fs);
        env = std::move(r->env);
        return true;
    }

    // Returns the index of the node denoted by `var`, materializing a bare
    // node on first use.
    int node_for_var(PathState& s, Scope& scope, const std::string& var, const SourcePos& pos) {
        auto it = scope.find(var);
        if (it != scope.end()) {
            if (it->second.kind != Entity::Kind::Node)
                throw MgError(ErrKind::IllFormedDescription,
                              "variable '?" + var + "' does not denote a node", pos);
            return it->second.node;
        }
        int idx = static_cast<int>(s.nodes.size());
        DescNode n;
        n.debug_name = current_tag(s) + "." + var;
        s.nodes.push_back(std::move(n));
        scope.emplace(var, Entity::make_node(idx));
        return idx;
    }

    // Merges a node declaration into the state; returns false when a feature
    // or mark clash kills this path.
    bool build_node(PathState& s, Scope& scope, const NodeSpec& spec, int& out_idx) {
        int idx;
        if (!spec.var.empty()) {
            idx = node_for_var(s, scope, spec.var, spec.pos);
        } else {
            idx = static_cast<int>(s.nodes.size());
            DescNode n;
            n.debug_name = current_tag(s) + ".n" + std::to_string(idx);
            s.nodes.push_back(std::move(n));
        }
        out_idx = idx;

        if (spec.has_cat) {
            FeatureValue v = resolve_value(s, scope, spec.cat, spec.pos);
            if (!s.nodes[idx].cat) {
                s.nodes[idx].cat = v;
            } else if (!unify_values(*s.nodes[idx].cat, v, s.env)) {
                return false;
            }
        }
        if (spec.has_mark) {
            auto merged = merge_marks(s.nodes[idx].mark, spec.mark);
            if (!merged) return false;
            s.nodes[idx].mark = *merged;
        }
        if (!spec.top.empty()) {
            FeatureStructure add = resolve_synfs(s, scope, spec.top, spec.pos);
            if (!unify_into(s.nodes[idx].top, add, s.env)) return false;
        }
        if (!spec.bot.empty()) {
            FeatureStructure add = resolve_synfs(s, scope, spec.bot, spec.pos);
            if (!unify_into(s.nodes[idx].bot, add, s.env)) return false;
        }
        if (!spec.public_name.empty()) assign_public_name(s, idx, spec.public_name, spec.pos);

        int prev_child = -1;
        for (const auto& child : spec.children) {
            int cidx = -1;
            if (!build_node(s, scope, child, cidx)) return false;
            s.relations.push_back({RelOp::Idom, idx, cidx});
            // Sibling juxtaposition is transitive precedence: material from other
            // fragments may interleave, and minimal-model solving tightens the
            // order to adjacency when nothing does.
            if (prev_child >= 0) s.relations.push_back({RelOp::Prec, prev_child, cidx});
            prev_child = cidx;
        }
        return true;
    }

    // Makes `var` denote `e` in `scope`, merging when already bound. Returns
    // false when a value merge fails (kills the path).
    bool bind_var(PathState& s, Scope& scope, const std::string& var, const Entity& e,
                  const SourcePos& pos) {
        auto it = scope.find(var);
        if (it == scope.end()) {
            scope.emplace(var, e);
            return true;
        }
        const Entity& old = it->second;
        if (old.kind == Entity::Kind::Node && e.kind == Entity::Kind::Node) {
            if (old.node != e.node) s.equalities.emplace_back(old.node, e.node);
            return true;
        }
        if (old.kind == Entity::Kind::Value && e.kind == Entity::Kind::Value)
            return s.env.merge(old.var, e.var);
        throw MgError(ErrKind::IllFormedDescription,
                      "variable '?" + var + "' is bound to an incompatible kind of entity", pos);
    }

    std::vector<PathState> invoke(PathState caller, const Invocation& inv) {
        const MgClassDecl* callee = g_.find(inv.callee);
        if (!callee)
            throw MgError(ErrKind::UnknownClass, "class '" + inv.callee + "' is not defined",
                          inv.pos);
        for (const auto& f : caller.frames)
            if (f.decl == callee)
                throw MgError(ErrKind::CyclicImport,
                              "class '" + inv.callee + "' invokes itself (directly or indirectly)",
                              inv.pos);
        if (inv.args.size() > callee->exports.size())
            throw MgError(ErrKind::ArityMismatch,
                          "class '" + inv.callee + "' exports " +
                              std::to_string(callee->exports.size()) + " names but " +
                              std::to_string(inv.args.size()) + " arguments were given",
                          inv.pos);

        int inst = ++caller.instance_count[callee->name];
        std::string tag = callee->name + "#" + std::to_string(inst);
        caller.frames.push_back(Frame{callee, tag, {}});

        std::vector<PathState> states;
        states.push_back(std::move(caller));
        for (const auto& imp : callee->imports) {
            std::vector<PathState> next;
            for (auto& st : states) {
                auto r = invoke(std::move(st), imp);
                for (auto& t : r) next.push_back(std::move(t));
            }
            check_overflow(next.size());
            states = std::move(next);
        }
        if (callee->body) states = eval(std::move(states), *callee->body);

        std::vector<PathState> out;
        for (auto& st : states) {
            Scope& cs = st.frames.back().scope;
            auto fields = std::make_shared<std::map<std::string, Entity>>();
            for (const auto& name : callee->exports) {
                auto it = cs.find(name);
                if (it != cs.end())
                    fields->emplace(name, it->second);
                else
                    fields->emplace(name, Entity::make_value(st.env.fresh(name)));
            }
            st.frames.pop_back();
            Scope& target = current_scope(st);

            bool alive = true;
            for (std::size_t i = 0; i < inv.args.size() && alive; ++i) {
                const Entity& e = fields->at(callee->exports[i]);
                const std::string& arg = inv.args[i];
                if (!arg.empty() && arg[0] == '?') {
                    alive = bind_var(st, target, arg.substr(1), e, inv.pos);
                } else {
                    if (e.kind != Entity::Kind::Node)
                        throw MgError(ErrKind::IllFormedDescription,
                                      "argument '" + arg + "' names a non-node export of '" +
                                          inv.callee + "'",
                                      inv.pos);
                    assign_public_name(st, e.node, arg, inv.pos);
                    bind_name(st, target, arg, e, inv.pos);
                }
            }
            if (alive && inv.bind_to.empty()) {
                for (std::size_t i = inv.args.size(); i < callee->exports.size(); ++i) {
                    const std::string& name = callee->exports[i];
                    const Entity& e = fields->at(name);
                    bind_name(st, target, name, e, inv.pos);
                    if (e.kind == Entity::Kind::Node) assign_public_name(st, e.node, name, inv.pos);
                }
            }
            if (alive && !inv.bind_to.empty()) {
                Entity e;
                e.kind = Entity::Kind::Instance;
                e.fields = fields;
                bind_name(st, target, inv.bind_to, e, inv.pos);
            }
            if (alive && inv.has_decoration) {
                FeatureStructure d = resolve_synfs(st, target, inv.decoration, inv.pos);
                alive = unify_into(st.iface, d, st.env);
            }
            if (alive) out.push_back(std::move(st));
        }
        return out;
    }

    std::vector<PathState> eval(std::vector<PathState> states, const Statement& stmt) {
        std::vector<PathState> out;
        switch (stmt.kind) {
            case Statement::Kind::Conjunction:
                for (const auto& part : stmt.parts) states = eval(std::move(states), *part);
                return states;
            case Statement::Kind::Disjunction: {
                for (auto& st : states) {
                    for (std::size_t k = 0; k < stmt.parts.size(); ++k) {
                        PathState fork = st;
                        fork.choices.push_back(current_tag(fork) + ":" + std::to_string(k));
                        auto r = eval_one(std::move(fork), *stmt.parts[k]);
                        for (auto& t : r) out.push_back(std::move(t));
                        check_overflow(out.size());
                    }
                }
                return out;
            }
            default:
                for (auto& st : states) {
                    auto r = eval_one(std::move(st), stmt);
                    for (auto& t : r) out.push_back(std::move(t));
                }
                check_overflow(out.size());
                return out;
        }
    }

    std::vector<PathState> eval_one(PathState st, const Statement& stmt) {
        switch (stmt.kind) {
            case Statement::Kind::Conjunction:
            case Statement::Kind::Disjunction: {
                std::vector<PathState> v;
                v.push_back(std::move(st));
                return eval(std::move(v), stmt);
            }
            case Statement::Kind::Syn: {
                Scope& scope = current_scope(st);
                for (const auto& spec : stmt.syn.nodes) {
                    int idx = -1;
                    if (!build_node(st, scope, spec, idx)) return {};
                }
                for (const auto& rel : stmt.syn.relations) {
                    if (rel.op == RelOpSyntax::Eq) {
                        int a = node_for_var(st, scope, rel.lhs, rel.pos);
                        int b = node_for_var(st, scope, rel.rhs, rel.pos);
                        if (a != b) st.equalities.emplace_back(a, b);
                        continue;
                    }
                    RelOp op = rel.op == RelOpSyntax::Idom    ? RelOp::Idom
                               : rel.op == RelOpSyntax::Dom   ? RelOp::Dom
                               : rel.op == RelOpSyntax::Iprec ? RelOp::Iprec
                                                              : RelOp::Prec;
                    int a = node_for_var(st, scope, rel.lhs, rel.pos);
                    int b = node_for_var(st, scope, rel.rhs, rel.pos);
                    st.relations.push_back({op, a, b});
                }
                std::vector<PathState> v;
                v.push_back(std::move(st));
                return v;
            }
            case Statement::Kind::Iface: {
                Scope& scope = current_scope(st);
                FeatureStructure add = resolve_synfs(st, scope, stmt.iface, stmt.pos);
                if (!unify_into(st.iface, add, st.env)) return {};
                std::vector<PathState> v;
                v.push_back(std::move(st));
                return v;
            }
            case Statement::Kind::Invoke:
                return invoke(std::move(st), stmt.invoke);
            case Statement::Kind::Equation: {
                Scope& scope = current_scope(st);
                const auto& eq = stmt.equation;
                auto rhs_it = scope.find(eq.rhs_var);
                if (!eq.rhs_export.empty()) {
                    if (rhs_it == scope.end() ||
                        rhs_it->second.kind != Entity::Kind::Instance)
                        throw MgError(ErrKind::IllFormedDescription,
                                      "'?" + eq.rhs_var + "' does not denote a class instance",
                                      eq.pos);
                    auto f = rhs_it->second.fields->find(eq.rhs_export);
                    if (f == rhs_it->second.fields->end())
                        throw MgError(ErrKind::UnknownExport,
                                      "class instance '?" + eq.rhs_var + "' has no export '" +
                                          eq.rhs_export + "'",
                                      eq.pos);
                    if (!bind_var(st, scope, eq.lhs, f->second, eq.pos)) return {};
                } else if (rhs_it != scope.end()) {
                    if (!bind_var(st, scope, eq.lhs, rhs_it->second, eq.pos)) return {};
                } else {
                    auto lhs_it = scope.find(eq.lhs);
                    if (lhs_it == scope.end())
                        throw MgError(ErrKind::IllFormedDescription,
                                      "equation between two unbound variables '?" + eq.lhs +
                                          "' and '?" + eq.rhs_var + "'",
                                      eq.pos);
                    scope.emplace(eq.rhs_var, lhs_it->second);
                }
                std::vector<PathState> v;
                v.push_back(std::move(st));
                return v;
            }
        }
        return {};
    }
};

} // namespace

std::vector<FlatDescription> expand(const Grammar& grammar, const std::string& class_name,
                                    const ExpandOptions& options) {
    if (!grammar.find(class_name))
        throw MgError(ErrKind::UnknownClass, "class '" + class_name + "' is not defined");
    Expander e(grammar, options);
    return e.run(class_name);
}

} // namespace metagramme
