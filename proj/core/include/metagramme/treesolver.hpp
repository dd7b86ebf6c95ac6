#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "metagramme/resolver.hpp"

namespace metagramme {

// A feature value inside a compiled template: either an atom or a canonical
// variable index (0-based, renumbered per template in a fixed traversal
// order, so structurally equal templates serialize identically).
struct TplValue {
    std::string atom;
    int var = -1;
    bool is_var() const { return var >= 0; }
    bool operator==(const TplValue&) const = default;
};

using TplFS = std::vector<std::pair<std::string, TplValue>>; // sorted by attribute

struct TemplateNode {
    std::string cat;
    NodeMark mark = NodeMark::None;
    std::string name; // public name, empty when anonymous
    TplFS top;
    TplFS bot;
    std::vector<int> children; // indices into TreeTemplate::nodes, left to right
};

// An elementary tree template: one minimal model of a description. Node 0 is
// the root and nodes are stored in preorder.
struct TreeTemplate {
    std::vector<TemplateNode> nodes;
    TplFS iface;
    int var_count = 0;
    std::string family;
    std::string provenance;

    int anchor() const;
    int foot() const;
    bool is_auxiliary() const { return foot() >= 0; }
};

// Full one-line serialization: structure, marks, names, features, interface.
// Used for deduplication, ordering, and golden comparisons.
std::string to_canonical(const TreeTemplate& t);

// Structure-only serialization: categories, marks and public names.
std::string to_shape(const TreeTemplate& t);

struct SolveOptions {
    int max_nodes = 12; // cap on description size after explicit merges
};

struct ModelStatistics {
    std::size_t descriptions = 0;
    std::size_t models = 0;
    std::size_t templates = 0;
};

// Enumerates the minimal valid models of a description: among all node
// identifications consistent with categories, marks, features and public
// names, keeps the partitions with the fewest cells that admit at least one
// well-formed lexicalized tree, and returns every consistent linearization.
std::vector<TreeTemplate> solve(const FlatDescription& desc, const SolveOptions& options = {});

// expand + solve for every alternative, deduplicated by canonical form and
// sorted canonically.
std::vector<TreeTemplate> compile_family(const Grammar& grammar, const std::string& family,
                                         const ExpandOptions& expand_options = {},
                                         const SolveOptions& solve_options = {},
                                         ModelStatistics* stats = nullptr);

} // namespace metagramme
