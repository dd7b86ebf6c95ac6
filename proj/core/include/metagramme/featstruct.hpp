// Flat feature structures: attribute -> atom-or-variable maps with a
// union-find binding environment.  Unification is non-destructive: it
// returns a fresh structure plus an extended copy of the environment.
#ifndef METAGRAMME_FEATSTRUCT_HPP
#define METAGRAMME_FEATSTRUCT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace metagramme {

using VarId = int;

// An atom is a non-empty string over [a-zA-Z0-9_+-].
bool is_valid_atom(const std::string& s);

class FeatureValue {
public:
    FeatureValue() : var_(-1) {}                       // empty atom sentinel; not valid
    static FeatureValue atom(std::string a);
    static FeatureValue var(VarId v);

    bool is_var() const { return var_ >= 0; }
    bool is_atom() const { return var_ < 0 && !atom_.empty(); }
    VarId var() const { return var_; }
    const std::string& atom() const { return atom_; }

    bool operator==(const FeatureValue& o) const { return var_ == o.var_ && atom_ == o.atom_; }
    bool operator!=(const FeatureValue& o) const { return !(*this == o); }

private:
    std::string atom_;
    VarId var_;
};

// The empty structure is the unification identity.
class FeatureStructure {
public:
    FeatureStructure() = default;

    void set(const std::string& attr, FeatureValue v) { entries_[attr] = std::move(v); }
    const FeatureValue* get(const std::string& attr) const;
    bool has(const std::string& attr) const { return entries_.count(attr) != 0; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Sorted by attribute (std::map order); rendering relies on this.
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool operator==(const FeatureStructure& o) const { return entries_ == o.entries_; }
    bool operator!=(const FeatureStructure& o) const { return !(*this == o); }

private:
    std::map<std::string, FeatureValue> entries_;
};

// Union-find over variables.  Each partition may be bound to at most one
// atom.  Values are small; copying an environment is the intended way to
// get the non-destructive unification contract.
class BindingEnv {
public:
    VarId fresh(std::string name = "");
    std::size_t size() const { return slots_.size(); }

    VarId root(VarId v) const;                         // representative, no compression
    const std::string* atom_of(VarId v) const;         // nullptr if unbound
    const std::string& name_of(VarId v) const { return slots_[v].name; }

    // Mutating primitives used by unify(); fail (return false) on atom clash.
    bool merge(VarId a, VarId b);
    bool bind(VarId v, const std::string& atom);

    bool same_class(VarId a, VarId b) const { return root(a) == root(b); }

private:
    struct Slot {
        int parent;
        std::string name;
        std::string atom;                              // empty = unbound
    };
    std::vector<Slot> slots_;
};

struct UnifyFailure {
    std::string attribute;
    std::string left;                                  // rendered conflicting values
    std::string right;
};

struct UnifyResult {
    FeatureStructure fs;
    BindingEnv env;
};

// Unify two structures under an environment.  On success the result holds
// the merged structure and an extended copy of `env`; the inputs are never
// modified.  On failure returns nullopt and, if `why` is non-null, fills in
// the first conflicting attribute.
std::optional<UnifyResult> unify(const FeatureStructure& a, const FeatureStructure& b,
                                 const BindingEnv& env, UnifyFailure* why = nullptr);

// Unify a single pair of values inside an already-copied environment.
bool unify_values(const FeatureValue& a, const FeatureValue& b, BindingEnv& env);

// Replace every variable bound in `env` by its atom; unbound variables are
// normalised to their class representative (so sharing stays visible).
FeatureStructure resolve(const FeatureStructure& fs, const BindingEnv& env);
FeatureValue resolve(const FeatureValue& v, const BindingEnv& env);

// Rendering: "[attr=value, attr=?Var]" in sorted attribute order.
std::string render(const FeatureValue& v, const BindingEnv* env = nullptr);
std::string render(const FeatureStructure& fs, const BindingEnv* env = nullptr);

} // namespace metagramme

#endif
