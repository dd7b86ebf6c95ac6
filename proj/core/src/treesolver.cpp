#include "metagramme/treesolver.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace metagramme {

int TreeTemplate::anchor() const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].mark == NodeMark::Anchor) return static_cast<int>(i);
    return -1;
}

int TreeTemplate::foot() const {
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

void node_str(const TreeTemplate& t, int idx, bool full, std::string& out) {
    const TemplateNode& n = t.nodes[idx];
    out += "(";
    out += n.cat;
    if (n.mark != NodeMark::None) {
        out += ":";
        out += to_string(n.mark);
    }
    if (!n.name.empty()) out += "{" + n.name + "}";
    if (full && (!n.top.empty() || !n.bot.empty()))
        out += "[" + fs_str(n.top) + "|" + fs_str(n.bot) + "]";
    for (int c : n.children) {
        out += " ";
        node_str(t, c, full, out);
    }
    out += ")";
}

} // namespace

std::string to_canonical(const TreeTemplate& t) {
    std::string out;
    if (!t.nodes.empty()) node_str(t, 0, /*full=*/true, out);
    out += " / [" + fs_str(t.iface) + "]";
    return out;
}

std::string to_shape(const TreeTemplate& t) {
    std::string out;
    if (!t.nodes.empty()) node_str(t, 0, /*full=*/false, out);
    return out;
}

namespace {

bool fs_merge(FeatureStructure& target, const FeatureStructure& add, BindingEnv& env) {
    auto r = unify(target, add, env);
    if (!r) return false;
    target = std::move(r->fs);
    env = std::move(r->env);
    return true;
}

// Folds node `b` into node `a`: the identification test. Categories must
// unify, marks must be absent or equal, public names must be absent or
// equal, and both feature structures must unify.
bool merge_desc_nodes(DescNode& a, const DescNode& b, BindingEnv& env) {
    if (b.cat) {
        if (!a.cat)
            a.cat = *b.cat;
        else if (!unify_values(*a.cat, *b.cat, env))
            return false;
    }
    if (b.mark != NodeMark::None) {
        if (a.mark == NodeMark::None)
            a.mark = b.mark;
        else if (a.mark != b.mark)
            return false;
    }
    if (!b.public_name.empty()) {
        if (a.public_name.empty())
            a.public_name = b.public_name;
        else if (a.public_name != b.public_name)
            return false;
    }
    return fs_merge(a.top, b.top, env) && fs_merge(a.bot, b.bot, env);
}

// Applies the explicit node equations: a failed merge here is a grammar
// error, not merely an unsatisfiable alternative.
FlatDescription apply_equalities(const FlatDescription& in) {
    std::vector<int> uf(in.nodes.size());
    for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    for (const auto& [a, b] : in.equalities) {
        int ra = find(a), rb = find(b);
        if (ra != rb) uf[std::max(ra, rb)] = std::min(ra, rb);
    }

    FlatDescription out;
    out.iface = in.iface;
    out.env = in.env;
    out.family = in.family;
    out.provenance = in.provenance;

    std::map<int, int> unit_of_root;
    std::vector<int> remap(in.nodes.size());
    for (std::size_t i = 0; i < in.nodes.size(); ++i) {
        int r = find(static_cast<int>(i));
        auto it = unit_of_root.find(r);
        if (it == unit_of_root.end()) {
            unit_of_root.emplace(r, static_cast<int>(out.nodes.size()));
            remap[i] = static_cast<int>(out.nodes.size());
            out.nodes.push_back(in.nodes[i]);
        } else {
            remap[i] = it->second;
            DescNode& target = out.nodes[it->second];
            std::string other = in.nodes[i].debug_name;
            if (!merge_desc_nodes(target, in.nodes[i], out.env))
                throw MgError(ErrKind::InconsistentNode,
                              "nodes '" + target.debug_name + "' and '" + other +
                                  "' are equated but cannot be identified");
            target.debug_name += "=" + other;
        }
    }
    for (const auto& r : in.relations)
        out.relations.push_back({r.op, remap[r.a], remap[r.b]});
    return out;
}

void check_dominance_cycles(const FlatDescription& d) {
    std::vector<std::vector<int>> adj(d.nodes.size());
    for (const auto& r : d.relations) {
        if (r.op == RelOp::Idom) {
            if (r.a == r.b)
                throw MgError(ErrKind::IllFormedDescription,
                              "node '" + d.nodes[r.a].debug_name + "' immediately dominates itself");
            adj[r.a].push_back(r.b);
        } else if (r.op == RelOp::Dom && r.a != r.b) {
            adj[r.a].push_back(r.b);
        }
    }
    std::vector<int> color(d.nodes.size(), 0);
    std::function<void(int)> visit = [&](int v) {
        color[v] = 1;
        for (int w : adj[v]) {
            if (color[w] == 1)
                throw MgError(ErrKind::IllFormedDescription,
                              "dominance constraints are cyclic at node '" +
                                  d.nodes[w].debug_name + "'");
            if (color[w] == 0) visit(w);
        }
        color[v] = 2;
    };
    for (std::size_t i = 0; i < d.nodes.size(); ++i)
        if (color[i] == 0) visit(static_cast<int>(i));
}

struct Partition {
    std::vector<DescNode> cells;
    BindingEnv env;
    std::vector<int> cell_of; // description node -> cell
};

// All set partitions of the description's nodes into exactly `k`
// identifiable cells, in restricted-growth order (deterministic).
void enumerate_partitions(const FlatDescription& d, int k, std::vector<Partition>& out) {
    const int n = static_cast<int>(d.nodes.size());
    std::function<void(int, std::vector<DescNode>, BindingEnv, std::vector<int>)> rec =
        [&](int i, std::vector<DescNode> cells, BindingEnv env, std::vector<int> assign) {
            const int g = static_cast<int>(cells.size());
            if (g > k || g + (n - i) < k) return;
            if (i == n) {
                out.push_back(Partition{std::move(cells), std::move(env), std::move(assign)});
                return;
            }
            for (int c = 0; c < g; ++c) {
                std::vector<DescNode> cells2 = cells;
                BindingEnv env2 = env;
                if (merge_desc_nodes(cells2[c], d.nodes[i], env2)) {
                    std::vector<int> assign2 = assign;
                    assign2[i] = c;
                    rec(i + 1, std::move(cells2), std::move(env2), std::move(assign2));
                }
            }
            if (g < k) {
                std::vector<DescNode> cells2 = cells;
                cells2.push_back(d.nodes[i]);
                std::vector<int> assign2 = assign;
                assign2[i] = g;
                rec(i + 1, std::move(cells2), env, std::move(assign2));
            }
        };
    rec(0, {}, d.env, std::vector<int>(n, -1));
}

// Converts one ordered tree over cells into a template. Returns false when
// the model is not a well-formed elementary tree (unresolved category, or a
// foot whose category differs from the root's).
bool build_template(const Partition& p, int root, const std::vector<std::vector<int>>& ordered,
                    TreeTemplate& t, const FeatureStructure& iface) {
    std::vector<int> preorder;
    std::vector<int> newidx(p.cells.size(), -1);
    std::function<void(int)> visit = [&](int c) {
        newidx[c] = static_cast<int>(preorder.size());
        preorder.push_back(c);
        for (int kid : ordered[c]) visit(kid);
    };
    visit(root);
    if (preorder.size() != p.cells.size()) return false;

    std::map<VarId, int> canon;
    auto conv = [&](const FeatureValue& v) {
        FeatureValue r = resolve(v, p.env);
        if (r.is_atom()) return TplValue{r.atom(), -1};
        VarId rep = p.env.root(r.var());
        auto it = canon.find(rep);
        if (it == canon.end()) it = canon.emplace(rep, static_cast<int>(canon.size())).first;
        return TplValue{"", it->second};
    };
    auto conv_fs = [&](const FeatureStructure& fs) {
        TplFS out;
        for (const auto& [attr, v] : fs) out.emplace_back(attr, conv(v));
        return out;
    };

    t.nodes.clear();
    t.nodes.resize(p.cells.size());
    for (std::size_t pi = 0; pi < preorder.size(); ++pi) {
        const DescNode& cell = p.cells[preorder[pi]];
        TemplateNode& n = t.nodes[pi];
        if (!cell.cat) return false;
        FeatureValue cat = resolve(*cell.cat, p.env);
        if (!cat.is_atom()) return false;
        n.cat = cat.atom();
        n.mark = cell.mark;
        n.name = cell.public_name;
        n.top = conv_fs(cell.top);
        n.bot = conv_fs(cell.bot);
        for (int kid : ordered[preorder[pi]]) n.children.push_back(newidx[kid]);
    }
    t.iface = conv_fs(iface);
    t.var_count = static_cast<int>(canon.size());

    int f = t.foot();
    if (f >= 0 && t.nodes[f].cat != t.nodes[0].cat) return false;
    return true;
}

void models_for_partition(const FlatDescription& d, const Partition& p,
                          std::vector<TreeTemplate>& out) {
    const int k = static_cast<int>(p.cells.size());
    int anchors = 0, feet = 0;
    for (const auto& c : p.cells) {
        if (c.mark == NodeMark::Anchor) ++anchors;
        if (c.mark == NodeMark::Foot) ++feet;
    }
    if (anchors != 1 || feet > 1) return;

    std::set<std::pair<int, int>> idom, iprec, prec, dom;
    for (const auto& r : d.relations) {
        int a = p.cell_of[r.a], b = p.cell_of[r.b];
        switch (r.op) {
            case RelOp::Idom:
                if (a == b) return;
                idom.insert({a, b});
                break;
            case RelOp::Iprec:
                if (a == b) return;
                iprec.insert({a, b});
                break;
            case RelOp::Prec:
                if (a == b) return;
                prec.insert({a, b});
                break;
            case RelOp::Dom:
                if (a != b) dom.insert({a, b});
                break;
        }
    }

    std::vector<int> parent(k, -1);
    std::vector<std::vector<int>> kids(k);
    for (const auto& [a, b] : idom) {
        if (parent[b] != -1) return; // two distinct immediate parents
        parent[b] = a;
        kids[a].push_back(b);
    }
    int root = -1;
    for (int c = 0; c < k; ++c) {
        if (parent[c] == -1) {
            if (root != -1) return; // forest
            root = c;
        }
    }
    if (root == -1) return;
    {
        std::vector<char> seen(k, 0);
        std::function<void(int)> mark = [&](int c) {
            seen[c] = 1;
            for (int kid : kids[c]) mark(kid);
        };
        mark(root);
        for (int c = 0; c < k; ++c)
            if (!seen[c]) return; // cycle among non-root cells
    }
    for (const auto& [a, b] : iprec)
        if (parent[a] == -1 || parent[a] != parent[b]) return; // not siblings

    // Enumerate sibling orders per node, respecting immediate precedence
    // within each sibling set; general precedence and dominance constraints
    // are checked on the completed tree.
    std::vector<std::vector<std::vector<int>>> orders(k);
    for (int c = 0; c < k; ++c) {
        if (kids[c].empty()) {
            orders[c].push_back({});
            continue;
        }
        std::vector<int> perm = kids[c];
        std::sort(perm.begin(), perm.end());
        do {
            bool ok = true;
            for (const auto& [a, b] : iprec) {
                if (parent[a] != c) continue;
                auto ia = std::find(perm.begin(), perm.end(), a);
                auto ib = std::find(perm.begin(), perm.end(), b);
                if (ib != ia + 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) orders[c].push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (orders[c].empty()) return;
    }

    std::vector<std::vector<int>> chosen(k);
    std::function<void(int)> pick = [&](int c) {
        if (c == k) {
            std::vector<int> tin(k), tout(k);
            int clock = 0;
            std::function<void(int)> stamp = [&](int v) {
                tin[v] = clock++;
                for (int kid : chosen[v]) stamp(kid);
                tout[v] = clock++;
            };
            stamp(root);
            auto ancestor = [&](int a, int b) { return tin[a] <= tin[b] && tout[b] <= tout[a]; };
            for (const auto& [a, b] : dom)
                if (!ancestor(a, b)) return;
            for (const auto& [a, b] : prec)
                if (!(tout[a] < tin[b])) return;
            TreeTemplate t;
            if (build_template(p, root, chosen, t, d.iface)) out.push_back(std::move(t));
            return;
        }
        for (const auto& ord : orders[c]) {
            chosen[c] = ord;
            pick(c + 1);
        }
    };
    pick(0);
}

} // namespace

std::vector<TreeTemplate> solve(const FlatDescription& desc, const SolveOptions& options) {
    FlatDescription d = apply_equalities(desc);
    check_dominance_cycles(d);
    const int n = static_cast<int>(d.nodes.size());
    if (n == 0) return {};
    if (n > options.max_nodes)
        throw MgError(ErrKind::DescriptionTooLarge,
                      "description has " + std::to_string(n) + " nodes after equations; the cap is " +
                          std::to_string(options.max_nodes));

    for (int k = 1; k <= n; ++k) {
        std::vector<Partition> parts;
        enumerate_partitions(d, k, parts);
        std::vector<TreeTemplate> models;
        for (const auto& p : parts) models_for_partition(d, p, models);
        if (!models.empty()) {
            for (auto& m : models) {
                m.family = d.family;
                m.provenance = d.provenance;
            }
            return models;
        }
    }
    return {};
}

std::vector<TreeTemplate> compile_family(const Grammar& grammar, const std::string& family,
                                         const ExpandOptions& expand_options,
                                         const SolveOptions& solve_options,
                                         ModelStatistics* stats) {
    auto descriptions = expand(grammar, family, expand_options);
    std::vector<std::pair<std::string, TreeTemplate>> keyed;
    std::set<std::string> seen;
    std::size_t model_count = 0;
    for (const auto& d : descriptions) {
        auto models = solve(d, solve_options);
        model_count += models.size();
        for (auto& t : models) {
            std::string key = to_canonical(t);
            if (seen.insert(key).second) keyed.emplace_back(std::move(key), std::move(t));
        }
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<TreeTemplate> out;
    out.reserve(keyed.size());
    for (auto& [key, t] : keyed) out.push_back(std::move(t));
    if (stats) {
        stats->descriptions = descriptions.size();
        stats->models = model_count;
        stats->templates = out.size();
    }
    return out;
}

} // namespace metagramme
