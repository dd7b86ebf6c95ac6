// Error taxonomy shared by all pipeline stages.  Fatal conditions throw
// MgError; recoverable per-entry conditions (unknown surface form, coanchor
// mismatches) are appended to a DiagnosticSink and processing continues.
#ifndef METAGRAMME_DIAGNOSTICS_HPP
#define METAGRAMME_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace metagramme {

struct SourcePos {
    std::string file;
    int line = 0;
    int col = 0;
};

enum class ErrKind {
    Syntax,
    UndeclaredVariable,
    DuplicateClass,
    MissingField,
    UnknownClass,
    CyclicImport,
    ArityMismatch,
    UnknownExport,
    ExportCollision,
    UnknownFamily,
    InconsistentNode,
    IllFormedDescription,
    DescriptionTooLarge,
    ExpansionOverflow,
    BadManifest,
    Io,
};

const char* to_string(ErrKind k);

class MgError : public std::runtime_error {
public:
    MgError(ErrKind kind, std::string message, SourcePos pos = {})
        : std::runtime_error(format(kind, message, pos)), kind_(kind), pos_(std::move(pos)) {}

    ErrKind kind() const { return kind_; }
    const SourcePos& pos() const { return pos_; }

private:
    static std::string format(ErrKind kind, const std::string& message, const SourcePos& pos);
    ErrKind kind_;
    SourcePos pos_;
};

enum class DiagKind {
    UnknownForm,
    CoanchorNodeMissing,
    CoanchorCatMismatch,
};

struct Diagnostic {
    DiagKind kind;
    std::string message;
};

using DiagnosticSink = std::vector<Diagnostic>;

const char* to_string(DiagKind k);

} // namespace metagramme

#endif
