#include "metagramme/featstruct.hpp"

#include <cctype>
#include <stdexcept>

namespace metagramme {

bool is_valid_atom(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s) {
        if (!(std::isalnum(c) || c == '_' || c == '+' || c == '-')) return false;
    }
    return true;
}

FeatureValue FeatureValue::atom(std::string a) {
    if (!is_valid_atom(a)) throw std::invalid_argument("invalid atom: '" + a + "'");
    FeatureValue v;
    v.atom_ = std::move(a);
    return v;
}

FeatureValue FeatureValue::var(VarId id) {
    if (id < 0) throw std::invalid_argument("invalid variable id");
    FeatureValue v;
    v.var_ = id;
    return v;
}

const FeatureValue* FeatureStructure::get(const std::string& attr) const {
    auto it = entries_.find(attr);
    return it == entries_.end() ? nullptr : &it->second;
}

VarId BindingEnv::fresh(std::string name) {
    slots_.push_back({static_cast<int>(slots_.size()), std::move(name), ""});
    return static_cast<VarId>(slots_.size()) - 1;
}

VarId BindingEnv::root(VarId v) const {
    while (slots_[v].parent != v) v = slots_[v].parent;
    return v;
}

const std::string* BindingEnv::atom_of(VarId v) const {
    const Slot& s = slots_[root(v)];
    return s.atom.empty() ? nullptr : &s.atom;
}

bool BindingEnv::merge(VarId a, VarId b) {
    a = root(a);
    b = root(b);
    if (a == b) return true;
    if (!slots_[a].atom.empty() && !slots_[b].atom.empty() && slots_[a].atom != slots_[b].atom)
        return false;
    // Keep the bound atom (if any) on the surviving root.
    if (slots_[a].atom.empty()) std::swap(a, b);
    slots_[b].parent = a;
    return true;
}

bool BindingEnv::bind(VarId v, const std::string& atom) {
    v = root(v);
    if (!slots_[v].atom.empty()) return slots_[v].atom == atom;
    slots_[v].atom = atom;
    return true;
}

bool unify_values(const FeatureValue& a, const FeatureValue& b, BindingEnv& env) {
    if (a.is_atom() && b.is_atom()) return a.atom() == b.atom();
    if (a.is_var() && b.is_var()) return env.merge(a.var(), b.var());
    if (a.is_var()) return env.bind(a.var(), b.atom());
    return env.bind(b.var(), a.atom());
}

std::optional<UnifyResult> unify(const FeatureStructure& a, const FeatureStructure& b,
                                 const BindingEnv& env, UnifyFailure* why) {
    UnifyResult out{a, env};
    for (const auto& [attr, bv] : b) {
        const FeatureValue* av = out.fs.get(attr);
        if (!av) {
            out.fs.set(attr, bv);
            continue;
        }
        if (!unify_values(*av, bv, out.env)) {
            if (why) *why = {attr, render(*av, &out.env), render(bv, &out.env)};
            return std::nullopt;
        }
    }
    return out;
}

FeatureValue resolve(const FeatureValue& v, const BindingEnv& env) {
    if (!v.is_var()) return v;
    if (const std::string* a = env.atom_of(v.var())) return FeatureValue::atom(*a);
    return FeatureValue::var(env.root(v.var()));
}

FeatureStructure resolve(const FeatureStructure& fs, const BindingEnv& env) {
    FeatureStructure out;
    for (const auto& [attr, v] : fs) out.set(attr, resolve(v, env));
    return out;
}

std::string render(const FeatureValue& v, const BindingEnv* env) {
    if (v.is_atom()) return v.atom();
    if (env) {
        if (const std::string* a = env->atom_of(v.var())) return *a;
        VarId r = env->root(v.var());
        const std::string& n = env->name_of(r);
        return "?" + (n.empty() ? std::to_string(r) : n);
    }
    return "?" + std::to_string(v.var());
}

std::string render(const FeatureStructure& fs, const BindingEnv* env) {
    std::string out = "[";
    bool first = true;
    for (const auto& [attr, v] : fs) {
        if (!first) out += ", ";
        first = false;
        out += attr + "=" + render(v, env);
    }
    return out + "]";
}

} // namespace metagramme
