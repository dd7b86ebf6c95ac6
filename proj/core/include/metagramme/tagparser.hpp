#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "metagramme/anchoring.hpp"

namespace metagramme {

struct ParseOptions {
    std::string start_cat = "s";
    std::size_t max_derivations = 512;
};

// A multiword expression recognized in one derivation: the entry's lemma id
// and the 1-based token positions of its lexical material.
struct MweSpan {
    std::string lemma_id;
    std::vector<int> positions;
    bool operator==(const MweSpan&) const = default;
};

struct DerivationOutcome {
    std::string derivation; // canonical serialization of the derivation tree
    std::string derived;    // bracketed derived tree
    std::vector<MweSpan> mwes;
    bool idiomatic() const { return !mwes.empty(); }
};

struct ParseReport {
    std::vector<DerivationOutcome> derivations;
    bool truncated = false;

    bool any() const { return !derivations.empty(); }
    bool idiomatic() const {
        for (const auto& d : derivations)
            if (d.idiomatic()) return true;
        return false;
    }
    bool literal_only() const { return any() && !idiomatic(); }
};

std::vector<std::string> tokenize_sentence(const std::string& line);

// Anchors every token, runs a CYK-style chart over the lexicalized trees
// (substitution everywhere, adjunction at internal nodes and anchors, at
// most one adjunction per node), enumerates derivations up to the cap, and
// replays feature unification over each one; derivations whose features
// clash are dropped.
ParseReport parse_sentence(const Lexicon& lexicon, const CompiledFamilies& families,
                           const std::vector<std::string>& tokens,
                           const ParseOptions& options = {}, DiagnosticSink* sink = nullptr);

} // namespace metagramme
