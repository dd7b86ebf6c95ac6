#include "metagramme/grammar.hpp"

#include <algorithm>

#include "metagramme/parser.hpp"

namespace metagramme {

void Grammar::add_source(const std::string& source, const std::string& filename) {
    add_classes(parse_metagrammar(source, filename));
}

void Grammar::add_classes(std::vector<MgClassDecl> decls) {
    for (auto& d : decls) {
        auto [it, inserted] = index_.emplace(d.name, classes_.size());
        if (!inserted)
            throw MgError(ErrKind::DuplicateClass,
                          "class '" + d.name + "' is already defined (first seen in " +
                              classes_[it->second].pos.file + ")",
                          d.pos);
        classes_.push_back(std::move(d));
    }
    linked_ = false;
}

void Grammar::link() {
    check_undeclared_variables(classes_, /*lenient=*/false);
    linked_ = true;
}

const MgClassDecl* Grammar::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &classes_[it->second];
}

bool FamilyTable::contains(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

FamilyTable build_family_table(const Grammar& grammar,
                               const std::vector<std::string>& family_names) {
    FamilyTable table;
    for (const auto& name : family_names) {
        if (!grammar.find(name))
            throw MgError(ErrKind::UnknownFamily,
                          "family '" + name + "' does not name a grammar class");
        if (!table.contains(name)) table.names.push_back(name);
    }
    return table;
}

} // namespace metagramme
