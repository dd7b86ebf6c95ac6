#ifndef METAGRAMME_PARSER_HPP
#define METAGRAMME_PARSER_HPP

#include <string>
#include <utility>
#include <vector>

#include "metagramme/ast.hpp"

namespace metagramme {

// Parse a .mg source into class declarations.  Checks for duplicate class
// names within the source and, for classes whose invoked classes are all
// present in the same source, that every variable used in the body is
// declared or reachable through an invocation's exports.
std::vector<MgClassDecl> parse_metagrammar(const std::string& source,
                                           const std::string& filename = "<input>");

struct LexiconDecls {
    std::vector<LemmaEntryDecl> lemmas;
    std::vector<MorphEntryDecl> morphs;
};

// Parse a .lex / .morph source; <lemma> and <morpho> blocks may be
// interleaved across files.
LexiconDecls parse_lexicon(const std::string& source,
                           const std::string& filename = "<input>");

// Static variable check for a set of classes.  `lenient` skips the check for
// classes that invoke something outside `classes` (their exports are not
// knowable yet); the resolver re-checks dynamically during expansion.
void check_undeclared_variables(const std::vector<MgClassDecl>& classes, bool lenient);

} // namespace metagramme

#endif
