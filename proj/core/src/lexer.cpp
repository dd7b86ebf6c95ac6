#include "metagramme/lexer.hpp"

#include <cctype>

namespace metagramme {

const char* to_string(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Var: return "variable";
        case Tok::Str: return "string";
        case Tok::Dim: return "dimension";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Semi: return "';'";
        case Tok::Pipe: return "'|'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Dot: return "'.'";
        case Tok::Slash: return "'/'";
        case Tok::Eq: return "'='";
        case Tok::StarEq: return "'*='";
        case Tok::ArrowL: return "'<-'";
        case Tok::ArrowR: return "'->'";
        case Tok::ArrowRStar: return "'->*'";
        case Tok::Gg: return "'>>'";
        case Tok::GgStar: return "'>>*'";
        case Tok::End: return "end of input";
    }
    return "?";
}

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
// Identifiers double as feature atoms; '+'/'-' are valid atom characters but
// '-' is only consumed when not opening a '->' arrow.
bool ident_cont(unsigned char c) { return std::isalnum(c) || c == '_' || c == '+'; }

struct Cursor {
    const std::string& src;
    std::string file;
    std::size_t i = 0;
    int line = 1, col = 1;

    bool eof() const { return i >= src.size(); }
    char peek(std::size_t k = 0) const { return i + k < src.size() ? src[i + k] : '\0'; }
    char advance() {
        char c = src[i++];
        if (c == '\n') { line++; col = 1; } else { col++; }
        return c;
    }
    SourcePos pos() const { return {file, line, col}; }
};

[[noreturn]] void fail(const Cursor& c, const std::string& what) {
    throw MgError(ErrKind::Syntax, what, c.pos());
}

} // namespace

std::vector<Token> tokenize(const std::string& source, const std::string& filename) {
    Cursor c{source, filename};
    std::vector<Token> out;

    auto push = [&](Tok k, std::string text, SourcePos pos) {
        out.push_back({k, std::move(text), std::move(pos)});
    };

    while (!c.eof()) {
        char ch = c.peek();
        if (ch == '%') {                                   // comment to end of line
            while (!c.eof() && c.peek() != '\n') c.advance();
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) { c.advance(); continue; }

        SourcePos pos = c.pos();
        if (ident_start(ch) || std::isdigit(static_cast<unsigned char>(ch)) || ch == '+') {
            std::string t;
            while (!c.eof()) {
                char k = c.peek();
                if (ident_cont(k)) { t += c.advance(); continue; }
                // '-' belongs to the identifier unless it starts '->'.
                if (k == '-' && c.peek(1) != '>') { t += c.advance(); continue; }
                break;
            }
            push(Tok::Ident, t, pos);
            continue;
        }
        switch (ch) {
            case '?': {
                c.advance();
                if (!ident_start(c.peek()) && !std::isdigit(static_cast<unsigned char>(c.peek())))
                    fail(c, "expected variable name after '?'");
                std::string t;
                while (!c.eof() && (ident_cont(c.peek()))) t += c.advance();
                push(Tok::Var, t, pos);
                break;
            }
            case '"': {
                c.advance();
                std::string t;
                while (!c.eof() && c.peek() != '"' && c.peek() != '\n') t += c.advance();
                if (c.eof() || c.peek() != '"') fail(c, "unterminated string literal");
                c.advance();
                push(Tok::Str, t, pos);
                break;
            }
            case '<': {
                // <syn> <iface> <lemma> <morpho> or <-
                if (c.peek(1) == '-') { c.advance(); c.advance(); push(Tok::ArrowL, "<-", pos); break; }
                c.advance();
                std::string t;
                while (!c.eof() && c.peek() != '>' && !std::isspace(static_cast<unsigned char>(c.peek())))
                    t += c.advance();
                if (c.peek() != '>') fail(c, "unterminated '<" + t + "' dimension tag");
                c.advance();
                if (t != "syn" && t != "iface" && t != "lemma" && t != "morpho")
                    fail(c, "unknown dimension '<" + t + ">'");
                push(Tok::Dim, t, pos);
                break;
            }
            case '-': {
                if (c.peek(1) != '>') fail(c, "stray '-'");
                c.advance(); c.advance();
                if (c.peek() == '*') { c.advance(); push(Tok::ArrowRStar, "->*", pos); }
                else push(Tok::ArrowR, "->", pos);
                break;
            }
            case '>': {
                if (c.peek(1) != '>') fail(c, "stray '>'");
                c.advance(); c.advance();
                if (c.peek() == '*') { c.advance(); push(Tok::GgStar, ">>*", pos); }
                else push(Tok::Gg, ">>", pos);
                break;
            }
            case '*': {
                if (c.peek(1) != '=') fail(c, "stray '*'");
                c.advance(); c.advance();
                push(Tok::StarEq, "*=", pos);
                break;
            }
            case '{': c.advance(); push(Tok::LBrace, "{", pos); break;
            case '}': c.advance(); push(Tok::RBrace, "}", pos); break;
            case '[': c.advance(); push(Tok::LBracket, "[", pos); break;
            case ']': c.advance(); push(Tok::RBracket, "]", pos); break;
            case '(': c.advance(); push(Tok::LParen, "(", pos); break;
            case ')': c.advance(); push(Tok::RParen, ")", pos); break;
            case ';': c.advance(); push(Tok::Semi, ";", pos); break;
            case '|': c.advance(); push(Tok::Pipe, "|", pos); break;
            case ',': c.advance(); push(Tok::Comma, ",", pos); break;
            case ':': c.advance(); push(Tok::Colon, ":", pos); break;
            case '.': c.advance(); push(Tok::Dot, ".", pos); break;
            case '/': c.advance(); push(Tok::Slash, "/", pos); break;
            case '=': c.advance(); push(Tok::Eq, "=", pos); break;
            default:
                fail(c, std::string("unexpected character '") + ch + "'");
        }
    }
    out.push_back({Tok::End, "", c.pos()});
    return out;
}

} // namespace metagramme
