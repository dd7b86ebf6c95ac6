#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metagramme/featstruct.hpp"
#include "metagramme/grammar.hpp"

namespace metagramme {

// A node of a flat tree description: the output of class expansion, before
// any tree solving. `cat` may be an unresolved variable at this stage; `top`
// and `bot` are feature structures over the description's binding
// environment.
struct DescNode {
    std::string debug_name;
    std::string public_name;
    std::optional<FeatureValue> cat;
    NodeMark mark = NodeMark::None;
    FeatureStructure top;
    FeatureStructure bot;
};

enum class RelOp { Idom, Dom, Iprec, Prec };
const char* to_string(RelOp op);

struct Relation {
    RelOp op;
    int a = -1;
    int b = -1;
};

// One fully expanded alternative of a family class: every disjunction has
// been decided, every invocation inlined. Node equalities requested by
// equations are kept explicit; the tree solver merges them first.
struct FlatDescription {
    std::vector<DescNode> nodes;
    std::vector<Relation> relations;
    std::vector<std::pair<int, int>> equalities;
    FeatureStructure iface;
    BindingEnv env;
    std::string family;
    std::string provenance;
};

struct ExpandOptions {
    std::size_t max_descriptions = 10000;
};

// Expands `class_name` into all of its alternatives. The grammar must be
// linked. Deterministic: alternatives appear in source order of the
// disjunctions that produced them.
std::vector<FlatDescription> expand(const Grammar& grammar, const std::string& class_name,
                                    const ExpandOptions& options = {});

} // namespace metagramme
