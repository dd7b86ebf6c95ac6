#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "metagramme/ast.hpp"

namespace metagramme {

// A set of metagrammar classes merged from one or more sources. Class names
// must be unique across all sources. After `link()` every invocation target
// is known and every variable is accounted for, so expansion cannot fail on
// name-resolution grounds.
class Grammar {
public:
    void add_source(const std::string& source, const std::string& filename);
    void add_classes(std::vector<MgClassDecl> decls);
    void link();

    bool linked() const { return linked_; }
    const MgClassDecl* find(const std::string& name) const;
    const std::vector<MgClassDecl>& classes() const { return classes_; }

private:
    std::vector<MgClassDecl> classes_;
    std::map<std::string, std::size_t> index_;
    bool linked_ = false;
};

// The grammar-side entry points a lexicon can select with `fam <- name`.
// Every family must name a class defined in the grammar.
struct FamilyTable {
    std::vector<std::string> names;
    bool contains(const std::string& name) const;
};

FamilyTable build_family_table(const Grammar& grammar,
                               const std::vector<std::string>& family_names);

} // namespace metagramme
