#ifndef METAGRAMME_LEXER_HPP
#define METAGRAMME_LEXER_HPP

#include <string>
#include <vector>

#include "metagramme/diagnostics.hpp"

namespace metagramme {

enum class Tok {
    Ident,        // bare identifier / atom
    Var,          // ?name
    Str,          // "surface form"
    Dim,          // <syn> <iface> <lemma> <morpho>, text() holds syn/iface/...
    LBrace, RBrace,
    LBracket, RBracket,
    LParen, RParen,
    Semi, Pipe, Comma, Colon, Dot, Slash,
    Eq,           // =
    StarEq,       // *=
    ArrowL,       // <-
    ArrowR,       // ->
    ArrowRStar,   // ->*
    Gg,           // >>
    GgStar,       // >>*
    End,
};

const char* to_string(Tok t);

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

// Tokenise a whole source.  `%` starts a comment running to end of line.
// Throws MgError{Syntax} on malformed input.
std::vector<Token> tokenize(const std::string& source, const std::string& filename = "<input>");

} // namespace metagramme

#endif
