#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "metagramme/tagparser.hpp"
#include "oracles/derivation_oracle.hpp"

using namespace metagramme;

namespace {

// A small grammar exercising every parser mechanism: substitution,
// auxiliary determiners (with a feature gate that blocks stacking), an
// adverb that adjoins at the verbal anchor, subject agreement, and an
// idiom whose object is fixed lexical material.
const char* kGrammar =
    "class TransTpl declare ?r ?su ?v ?ob ?N {\n"
    "  <syn>{ node ?r [cat=s] {\n"
    "    node ?su [cat=n, mark=subst, top:[def=plus, num=?N]]\n"
    "    node ?v [cat=v, mark=anchor, top:[num=?N]]\n"
    "    node ?ob [cat=n, mark=subst, top:[def=plus]]\n"
    "  } }\n"
    "}\n"
    "class IntransTpl declare ?r ?su ?v ?N {\n"
    "  <syn>{ node ?r [cat=s] {\n"
    "    node ?su [cat=n, mark=subst, top:[def=plus, num=?N]]\n"
    "    node ?v [cat=v, mark=anchor, top:[num=?N]]\n"
    "  } }\n"
    "}\n"
    "class MweTpl declare ?r ?su ?v ?np ?d ?n2 {\n"
    "  <syn>{ node ?r [cat=s] {\n"
    "    node ?su [cat=n, mark=subst, top:[def=plus]]\n"
    "    node ?v [cat=v, mark=anchor]\n"
    "    node ?np [cat=n, bot:[def=plus]] {\n"
    "      node ?d (DetCo) [cat=d, mark=coanchor]\n"
    "      node ?n2 (NounCo) [cat=n, mark=coanchor]\n"
    "    }\n"
    "  } }\n"
    "}\n"
    "class PropTpl declare ?x { <syn>{ node ?x [cat=n, mark=anchor, bot:[def=plus]] } }\n"
    "class NounTpl declare ?x { <syn>{ node ?x [cat=n, mark=anchor, bot:[def=minus]] } }\n"
    "class DetTpl declare ?r ?d ?f {\n"
    "  <syn>{ node ?r [cat=n, bot:[def=plus]] {\n"
    "    node ?d [cat=d, mark=anchor]\n"
    "    node ?f [cat=n, mark=foot, top:[def=minus]]\n"
    "  } }\n"
    "}\n"
    "class AdvTpl declare ?r ?f ?a {\n"
    "  <syn>{ node ?r [cat=v] {\n"
    "    node ?f [cat=v, mark=foot]\n"
    "    node ?a [cat=adv, mark=anchor]\n"
    "  } }\n"
    "}\n"
    "class PropFam { PropTpl[] }\n"
    "class NounFam { NounTpl[] }\n"
    "class DetFam { DetTpl[] }\n"
    "class VFam { TransTpl[] | IntransTpl[] }\n"
    "class InFam { IntransTpl[] }\n"
    "class TransFam { TransTpl[] }\n"
    "class MweFam { MweTpl[] }\n"
    "class AdvFam { AdvTpl[] }\n";

const char* kLexicon =
    "class jeanL { <lemma> { entry <- \"jean\"; cat <- n; fam <- PropFam } }\n"
    "class chatL { <lemma> { entry <- \"chat\"; cat <- n; fam <- NounFam } }\n"
    "class leL { <lemma> { entry <- \"le\"; cat <- d; fam <- DetFam } }\n"
    "class voirL { <lemma> { entry <- \"voir\"; cat <- v; fam <- VFam } }\n"
    "class dormirL { <lemma> { entry <- \"dormir\"; cat <- v; fam <- InFam } }\n"
    "class prendreLitL { <lemma> { entry <- \"prendre\"; cat <- v; fam <- TransFam } }\n"
    "class prendreIdL { <lemma> {\n"
    "  entry <- \"prendre\"; cat <- v; fam <- MweFam;\n"
    "  coanchor DetCo -> \"le\" / d;\n"
    "  coanchor NounCo -> \"chat\" / n\n"
    "} }\n"
    "class viteL { <lemma> { entry <- \"vite\"; cat <- adv; fam <- AdvFam } }\n"
    "class jeanM { <morpho> { morph <- \"jean\"; lemma <- \"jean\"; cat <- n; feat num = sg } }\n"
    "class chatM { <morpho> { morph <- \"chat\"; lemma <- \"chat\"; cat <- n; feat num = sg } }\n"
    "class chatsM { <morpho> { morph <- \"chats\"; lemma <- \"chat\"; cat <- n; feat num = pl } }\n"
    "class leM { <morpho> { morph <- \"le\"; lemma <- \"le\"; cat <- d } }\n"
    "class voitM { <morpho> { morph <- \"voit\"; lemma <- \"voir\"; cat <- v; feat num = sg } }\n"
    "class dortM { <morpho> { morph <- \"dort\"; lemma <- \"dormir\"; cat <- v; feat num = sg } }\n"
    "class prendM { <morpho> { morph <- \"prend\"; lemma <- \"prendre\"; cat <- v; feat num = sg } }\n"
    "class viteM { <morpho> { morph <- \"vite\"; lemma <- \"vite\"; cat <- adv } }\n";

struct Fixture {
    Grammar grammar;
    Lexicon lexicon;
    CompiledFamilies families;

    Fixture() {
        grammar.add_source(kGrammar, "toy.mg");
        grammar.link();
        lexicon.add_source(kLexicon, "toy.lex");
        for (const char* fam : {"PropFam", "NounFam", "DetFam", "VFam", "InFam", "TransFam",
                                "MweFam", "AdvFam"})
            families[fam] = compile_family(grammar, fam);
    }

    ParseReport parse(const std::string& line, const ParseOptions& opt = {}) const {
        return parse_sentence(lexicon, families, tokenize_sentence(line), opt);
    }

    std::vector<DerivationOutcome> force(const std::vector<std::string>& tokens,
                                         const std::string& start = "s") const {
        std::vector<std::vector<AnchoredTree>> per_token;
        for (const auto& tok : tokens) per_token.push_back(anchor_token(lexicon, families, tok));
        return oracle::parse_by_force(per_token, tokens, start);
    }
};

void check_against_oracle(const Fixture& f, const std::vector<std::string>& tokens) {
    CAPTURE(tokens);
    ParseReport rep = parse_sentence(f.lexicon, f.families, tokens);
    REQUIRE_FALSE(rep.truncated);
    auto forced = f.force(tokens);
    REQUIRE(rep.derivations.size() == forced.size());
    for (std::size_t i = 0; i < forced.size(); ++i) {
        CHECK(rep.derivations[i].derivation == forced[i].derivation);
        CHECK(rep.derivations[i].derived == forced[i].derived);
        CHECK(rep.derivations[i].mwes == forced[i].mwes);
    }
}

} // namespace

TEST_CASE("sentence tokenization splits on any whitespace") {
    CHECK(tokenize_sentence("  jean \t voit\nle chat ") ==
          std::vector<std::string>{"jean", "voit", "le", "chat"});
    CHECK(tokenize_sentence("").empty());
    CHECK(tokenize_sentence("   ").empty());
}

TEST_CASE("a minimal sentence yields one derivation with exact serializations") {
    Fixture f;
    ParseReport rep = f.parse("jean dort");
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.derivations[0].derivation == "#1(s1=#0(@0:0)@2:1)");
    CHECK(rep.derivations[0].derived == "(S (N jean) (V dort))");
    CHECK(rep.derivations[0].mwes.empty());
    CHECK(rep.literal_only());
    CHECK_FALSE(rep.truncated);
}

TEST_CASE("determiners adjoin onto bare nouns") {
    Fixture f;
    ParseReport rep = f.parse("le chat dort");
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.derivations[0].derivation == "#2(s1=#1(a0=#0(@1:0)@0:1)@2:2)");
    CHECK(rep.derivations[0].derived == "(S (N (D le) (N chat)) (V dort))");
}

TEST_CASE("feature replay rejects structurally valid derivations") {
    Fixture f;
    // bare common noun as subject: def=minus meets the def=plus requirement
    CHECK_FALSE(f.parse("chat dort").any());
    // proper noun refuses a determiner: def=plus below, def=minus above
    CHECK_FALSE(f.parse("le jean dort").any());
    // determiner stacking: the outer determiner's foot wants def=minus
    CHECK_FALSE(f.parse("le le chat dort").any());
    // subject agreement: plural noun under a singular verb
    CHECK_FALSE(f.parse("le chats dort").any());
    // the object position does not constrain number
    CHECK(f.parse("jean voit le chats").any());
}

TEST_CASE("one verb entry can span several templates") {
    Fixture f;
    CHECK(f.parse("jean voit").derivations.size() == 1);
    CHECK(f.parse("jean voit le chat").derivations.size() == 1);
    CHECK(f.parse("jean voit jean").derivations.size() == 1);
    CHECK_FALSE(f.parse("jean dort le chat").any());
}

TEST_CASE("an idiom parses alongside its literal reading") {
    Fixture f;
    ParseReport rep = f.parse("jean prend le chat");
    REQUIRE(rep.derivations.size() == 2);
    CHECK(rep.idiomatic());
    CHECK_FALSE(rep.literal_only());
    // both readings project the same derived tree
    CHECK(rep.derivations[0].derived == "(S (N jean) (V prend) (N (D le) (N chat)))");
    CHECK(rep.derivations[0].derived == rep.derivations[1].derived);
    int idiomatic = 0;
    for (const auto& d : rep.derivations)
        if (d.idiomatic()) {
            ++idiomatic;
            REQUIRE(d.mwes.size() == 1);
            CHECK(d.mwes[0].lemma_id == "prendre-le-chat");
            CHECK(d.mwes[0].positions == std::vector<int>{2, 3, 4});
        }
    CHECK(idiomatic == 1);
}

TEST_CASE("coanchor material needs no lexicon entry of its own") {
    // Same grammar, but 'chat' exists only as the idiom's fixed object: no
    // lemma, no morph.  The token is still covered by the coanchor scan.
    const char* lex =
        "class jeanL { <lemma> { entry <- \"jean\"; cat <- n; fam <- PropFam } }\n"
        "class leL { <lemma> { entry <- \"le\"; cat <- d; fam <- DetFam } }\n"
        "class voirL { <lemma> { entry <- \"voir\"; cat <- v; fam <- VFam } }\n"
        "class prendreIdL { <lemma> {\n"
        "  entry <- \"prendre\"; cat <- v; fam <- MweFam;\n"
        "  coanchor DetCo -> \"le\" / d;\n"
        "  coanchor NounCo -> \"chat\" / n\n"
        "} }\n"
        "class jeanM { <morpho> { morph <- \"jean\"; lemma <- \"jean\"; cat <- n } }\n"
        "class leM { <morpho> { morph <- \"le\"; lemma <- \"le\"; cat <- d } }\n"
        "class voitM { <morpho> { morph <- \"voit\"; lemma <- \"voir\"; cat <- v } }\n"
        "class prendM { <morpho> { morph <- \"prend\"; lemma <- \"prendre\"; cat <- v } }\n";
    Grammar grammar;
    grammar.add_source(kGrammar, "toy.mg");
    grammar.link();
    Lexicon lexicon;
    lexicon.add_source(lex, "toy.lex");
    CompiledFamilies families;
    for (const char* fam : {"PropFam", "DetFam", "VFam", "MweFam"})
        families[fam] = compile_family(grammar, fam);

    DiagnosticSink sink;
    ParseReport rep = parse_sentence(lexicon, families,
                                     tokenize_sentence("jean prend le chat"), {}, &sink);
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.idiomatic());
    CHECK(sink.empty());

    // Without the idiom's head in the sentence nothing covers the form,
    // so it is reported as unknown and the parse is abandoned.
    sink.clear();
    rep = parse_sentence(lexicon, families, tokenize_sentence("jean voit le chat"), {}, &sink);
    CHECK_FALSE(rep.any());
    REQUIRE(sink.size() == 1);
    CHECK(sink[0].kind == DiagKind::UnknownForm);
}

TEST_CASE("coanchors bind farther right when the subject is complex") {
    Fixture f;
    ParseReport rep = f.parse("le chat prend le chat");
    REQUIRE(rep.derivations.size() == 2);
    for (const auto& d : rep.derivations)
        if (d.idiomatic()) CHECK(d.mwes[0].positions == std::vector<int>{3, 4, 5});
}

TEST_CASE("coanchor forms must match the surface exactly") {
    Fixture f;
    // 'chats' is not the fixed form 'chat': only the literal reading remains
    ParseReport rep = f.parse("jean prend le chats");
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.literal_only());
}

TEST_CASE("an adverb adjoins at the verbal anchor itself") {
    Fixture f;
    ParseReport rep = f.parse("jean dort vite");
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.derivations[0].derived == "(S (N jean) (V (V dort) (ADV vite)))");

    // inside the idiom the adverb splits the anchor from its fixed object
    ParseReport idiom = f.parse("jean prend vite le chat");
    REQUIRE(idiom.derivations.size() == 2);
    CHECK(idiom.idiomatic());
    for (const auto& d : idiom.derivations)
        if (d.idiomatic()) CHECK(d.mwes[0].positions == std::vector<int>{2, 4, 5});
}

TEST_CASE("every token must be covered exactly once") {
    Fixture f;
    CHECK_FALSE(f.parse("jean prend le le chat").any());
    CHECK_FALSE(f.parse("jean prend").any());
    CHECK_FALSE(f.parse("prend le chat").any());
    CHECK_FALSE(f.parse("chat prend le chat").any());
}

TEST_CASE("the start category is configurable") {
    Fixture f;
    CHECK_FALSE(f.parse("le chat").any());
    ParseOptions np;
    np.start_cat = "n";
    ParseReport rep = f.parse("le chat", np);
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.derivations[0].derived == "(N (D le) (N chat))");
}

TEST_CASE("the derivation cap truncates the sorted report") {
    Fixture f;
    ParseOptions capped;
    capped.max_derivations = 1;
    ParseReport rep = f.parse("jean prend le chat", capped);
    REQUIRE(rep.derivations.size() == 1);
    CHECK(rep.truncated);
    ParseReport full = f.parse("jean prend le chat");
    CHECK(rep.derivations[0].derivation == full.derivations[0].derivation);
}

TEST_CASE("unknown and uncovered tokens produce an empty report") {
    Fixture f;
    DiagnosticSink sink;
    ParseReport rep = parse_sentence(f.lexicon, f.families,
                                     tokenize_sentence("jean xyzzy"), {}, &sink);
    CHECK_FALSE(rep.any());
    REQUIRE(sink.size() == 1);
    CHECK(sink[0].kind == DiagKind::UnknownForm);

    CHECK_FALSE(parse_sentence(f.lexicon, f.families, {}).any());
}

TEST_CASE("the chart agrees with brute force on every short sentence") {
    Fixture f;
    const std::vector<std::string> vocab{"jean", "voit", "dort", "le",
                                         "chat", "chats", "prend", "vite"};
    int parsed = 0, ambiguous = 0, idiomatic = 0;
    std::vector<std::string> tokens;
    auto visit = [&](auto&& self, int remaining) -> void {
        if (!tokens.empty()) {
            ParseReport rep = parse_sentence(f.lexicon, f.families, tokens);
            auto forced = f.force(tokens);
            CAPTURE(tokens);
            REQUIRE_FALSE(rep.truncated);
            REQUIRE(rep.derivations.size() == forced.size());
            for (std::size_t i = 0; i < forced.size(); ++i) {
                CHECK(rep.derivations[i].derivation == forced[i].derivation);
                CHECK(rep.derivations[i].derived == forced[i].derived);
                CHECK(rep.derivations[i].mwes == forced[i].mwes);
            }
            parsed += rep.any();
            ambiguous += rep.derivations.size() > 1;
            idiomatic += rep.idiomatic();
        }
        if (remaining == 0) return;
        for (const auto& w : vocab) {
            tokens.push_back(w);
            self(self, remaining - 1);
            tokens.pop_back();
        }
    };
    visit(visit, 4);
    // the sweep must exercise real coverage, not vacuous agreement
    CHECK(parsed >= 20);
    CHECK(ambiguous > 0);
    CHECK(idiomatic > 0);
}

TEST_CASE("the chart agrees with brute force on selected longer sentences") {
    Fixture f;
    for (const char* line : {
             "le chat prend le chat",
             "le chat voit le chat",
             "jean prend vite le chat",
             "le chat prend vite le chat",
             "jean voit le chat vite",
             "le chat dort vite",
             "le le chat prend le chat",
             "jean prend le le chat",
             "le chat prend le chats",
             "le chats voit le chat",
             "jean voit le chat le chat",
             "vite jean prend le chat",
         })
        check_against_oracle(f, tokenize_sentence(line));
}
