// Acceptance battery.  Each criterion prints exactly one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails.  Criteria with a stated
// time budget include the elapsed check in their pass condition.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"

#include "metagramme/project.hpp"
#include "metagramme/tagparser.hpp"

#include "../oracles/derivation_oracle.hpp"
#include "../oracles/model_oracle.hpp"
#include "../oracles/unify_oracle.hpp"

using namespace metagramme;
using nlohmann::json;

namespace {

std::string assets(const std::string& rel) {
    return std::string(METAGRAMME_ASSETS_DIR) + "/" + rel;
}

struct Outcome {
    bool ok = true;
    std::string detail; // first failure, for the report line

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: compiled templates cover the golden tree shapes ----

std::string strip_names(const std::string& shape) {
    static const std::regex name_re("\\{[^}]*\\}");
    return std::regex_replace(shape, name_re, "");
}

Outcome golden_shape_coverage() {
    Outcome r;
    auto t0 = std::chrono::steady_clock::now();
    Project p = load_project(assets("minigrammar.json"));
    std::ifstream in(assets("golden/template-shapes.tsv"));
    r.require(in.good(), "cannot open golden/template-shapes.tsv");
    std::map<std::string, std::set<std::string>> shapes_of;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        r.require(tab != std::string::npos, "malformed golden row: " + line);
        if (tab == std::string::npos) continue;
        std::string fam = line.substr(0, tab), want = line.substr(tab + 1);
        if (!shapes_of.count(fam))
            for (const auto& tpl : compile_family(p.grammar, fam))
                shapes_of[fam].insert(strip_names(to_shape(tpl)));
        r.require(shapes_of[fam].count(want) > 0, fam + " lacks shape " + want);
    }
    r.require(seconds_since(t0) < 5.0, "exceeded the 5 s budget");
    return r;
}

// ---- 2: description solving agrees with the brute-force model oracle ----

Outcome model_oracle_sweep() {
    Outcome r;
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(0xacce97u);
    auto chance = [&](double p) { return std::uniform_real_distribution<>(0, 1)(rng) < p; };
    auto pick = [&](int n) { return std::uniform_int_distribution<>(0, n - 1)(rng); };

    const char* cats[] = {"s", "n", "v"};
    const char* names[] = {"P", "Q"};
    const char* atoms[] = {"a", "b"};

    int checked = 0, nonempty = 0;
    for (int iter = 0; iter < 250; ++iter) {
        FlatDescription d;
        std::vector<VarId> vars;
        auto val = [&](const std::string& spec) {
            if (spec.size() > 1 && spec[0] == '?') {
                int i = spec[1] - '0';
                while (static_cast<int>(vars.size()) <= i)
                    vars.push_back(d.env.fresh("v" + std::to_string(vars.size())));
                return FeatureValue::var(vars[i]);
            }
            return FeatureValue::atom(spec);
        };

        int n = 2 + pick(5); // 2..6 node variables
        int anchor_plan = chance(0.7) ? 1 : (chance(0.5) ? 0 : 2);
        std::vector<int> anchor_at;
        for (int i = 0; i < anchor_plan; ++i) anchor_at.push_back(pick(n));

        for (int i = 0; i < n; ++i) {
            DescNode dn;
            dn.debug_name = "n" + std::to_string(i);
            if (chance(0.85))
                dn.cat = val(chance(0.8) ? cats[pick(3)] : "?" + std::to_string(pick(2)));
            if (std::count(anchor_at.begin(), anchor_at.end(), i))
                dn.mark = NodeMark::Anchor;
            else if (chance(0.12))
                dn.mark = NodeMark::Subst;
            else if (chance(0.08))
                dn.mark = NodeMark::Foot;
            if (chance(0.15)) dn.public_name = names[pick(2)];
            if (chance(0.4))
                dn.top.set("f", val(chance(0.7) ? atoms[pick(2)] : "?" + std::to_string(pick(2))));
            if (chance(0.25))
                dn.bot.set("g", val(chance(0.7) ? atoms[pick(2)] : "?" + std::to_string(pick(2))));
            d.nodes.push_back(std::move(dn));
        }
        for (int i = 1; i < n; ++i)
            if (chance(0.8)) d.relations.push_back({RelOp::Idom, pick(i), i});
        if (chance(0.4)) d.relations.push_back({RelOp::Dom, pick(n), pick(n)});
        if (chance(0.35)) d.relations.push_back({RelOp::Iprec, pick(n), pick(n)});
        if (chance(0.3)) d.relations.push_back({RelOp::Prec, pick(n), pick(n)});
        if (chance(0.25)) d.equalities.emplace_back(pick(n), pick(n));
        if (chance(0.3)) d.iface.set("i", val(chance(0.5) ? atoms[pick(2)] : "?0"));

        oracle::ModelAnswer expected = oracle::solve_by_force(d);
        if (expected.error) {
            try {
                solve(d);
                r.require(false, "iteration " + std::to_string(iter) + ": solver succeeded where the oracle expects an error");
            } catch (const MgError& e) {
                r.require(e.kind() == *expected.error,
                          "iteration " + std::to_string(iter) + ": wrong error kind");
            }
            ++checked;
            continue;
        }
        std::vector<std::string> got;
        try {
            for (const auto& tpl : solve(d)) got.push_back(to_canonical(tpl));
            std::sort(got.begin(), got.end());
        } catch (const MgError& e) {
            r.require(false, "iteration " + std::to_string(iter) + ": solver threw " +
                                 std::string(e.what()));
            continue;
        }
        r.require(got == expected.canonicals,
                  "iteration " + std::to_string(iter) + ": model sets differ");
        ++checked;
        nonempty += !expected.canonicals.empty();
    }
    r.require(checked >= 200, "fewer than 200 descriptions checked");
    r.require(nonempty > 30, "generator produced too few satisfiable descriptions");
    r.require(seconds_since(t0) < 60.0, "exceeded the 60 s budget");
    return r;
}

// ---- 3: the restrictive contrast sentences keep their exact readings ----

Outcome restrictive_contrasts() {
    Outcome r;
    Project p = load_project(assets("minigrammar.json"));
    CompiledGrammar cg = compile_project(p);
    auto parse_at = [&](const std::string& text, const std::string& cat) {
        ParseOptions opt;
        opt.start_cat = cat;
        return parse_sentence(p.lexicon, cg.families, tokenize_sentence(text), opt);
    };

    ParseReport base = parse_at("Jean prend la porte", "s");
    r.require(base.any() && base.idiomatic(), "'Jean prend la porte' must have an idiomatic reading");

    for (const char* text : {"Jean la prend", "la porte est prise par Jean",
                             "Jean prend la grande porte"}) {
        ParseReport rep = parse_at(text, "s");
        r.require(rep.any(), std::string("'") + text + "' must keep its literal parse");
        r.require(!rep.idiomatic(), std::string("'") + text + "' must not be idiomatic");
    }

    // The extraction has no clause-level path at all; as a noun phrase it
    // parses, but only literally.
    r.require(!parse_at("la porte que Jean prend", "s").any(),
              "'la porte que Jean prend' must not parse as a clause");
    ParseReport np = parse_at("la porte que Jean prend", "n");
    r.require(np.any(), "'la porte que Jean prend' must parse as a noun phrase");
    r.require(!np.idiomatic(), "'la porte que Jean prend' must not be idiomatic");
    return r;
}

// ---- 4: entry filters select exactly the golden anchored subset ----

Outcome filter_selection() {
    Outcome r;
    Project p = load_project(assets("minigrammar.json"));
    auto tpls = compile_family(p.grammar, "mwen0Vn1");
    const LemmaEntryDecl* lemma = nullptr;
    for (const auto& l : p.lexicon.lemmas())
        if (l.label == "mweLemmePrendreLaPorte") lemma = &l;
    r.require(lemma != nullptr, "lexicon lacks mweLemmePrendreLaPorte");
    if (!lemma) return r;

    std::set<std::string> got;
    for (const auto& tpl : tpls) {
        DiagnosticSink sink;
        if (auto a = anchor_lemma(tpl, *lemma, &sink)) got.insert(to_canonical(*a));
    }
    std::set<std::string> want;
    std::ifstream in(assets("golden/prendre-la-porte-anchored.txt"));
    r.require(in.good(), "cannot open golden/prendre-la-porte-anchored.txt");
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) want.insert(line);
    r.require(got == want, "anchored template set differs from the golden subset");

    // structural cross-check: one template per subject realization, all with
    // the lexicalized determiner-noun object
    std::set<std::string> shapes;
    for (const auto& canon : got) {
        // shape = canonical string with features, names and lexical material removed
        std::string s = std::regex_replace(canon, std::regex("\\[[^\\]]*\\]|\\{[^}]*\\}|'[^']*'"), "");
        shapes.insert(s.substr(0, s.find(" / ")));
    }
    std::set<std::string> expect_shapes = {
        "(s (n:subst) (vn (v:anchor)) (n (d:coanchor) (n:coanchor)))",
        "(s (cl:subst) (vn (v:anchor)) (n (d:coanchor) (n:coanchor)))",
        "(n (n:foot) (c:subst) (s (vn (v:anchor)) (n (d:coanchor) (n:coanchor))))",
    };
    r.require(shapes == expect_shapes, "anchored shapes are not the three subject realizations");
    return r;
}

// ---- 5: adding covered idioms grows the lexicon but not the grammar ----

std::string run_tool(const std::string& args, int* code) {
    std::string cmd = std::string(METAGRAMME_BINARY_DIR) + "/tools/metagramme " + args + " 2>/dev/null";
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        *code = -1;
        return out;
    }
    char buf[4096];
    std::size_t got;
    while ((got = ::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    int status = ::pclose(pipe);
    *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

Outcome factorization_plateau() {
    Outcome r;
    const char* manifests[] = {"minigrammar.json", "minigrammar-plus1.json",
                               "minigrammar-plus2.json"};
    std::vector<GrammarSnapshot> snaps;
    for (const char* m : manifests) {
        Project p = load_project(assets(m));
        snaps.push_back(snapshot(p, compile_project(p)));
    }
    for (int i : {1, 2}) {
        r.require(snaps[i].classes == snaps[0].classes, "class count changed");
        r.require(snaps[i].templates == snaps[0].templates, "template count changed");
        r.require(snaps[i].lemmas == snaps[i - 1].lemmas + 1, "lemma count did not grow by 1");
        r.require(snaps[i].mwe_lemmas == snaps[i - 1].mwe_lemmas + 1,
                  "idiom count did not grow by 1");
    }
    for (int i : {1, 2}) {
        int code = -1;
        std::string out = run_tool("stats -a " + assets(manifests[i - 1]) + " -b " +
                                       assets(manifests[i]),
                                   &code);
        r.require(code == 0, "stats command failed");
        if (code != 0) continue;
        json rep = json::parse(out);
        r.require(rep["classes"]["delta"] == "+0.0%", "stats does not report +0.0% classes");
        r.require(rep["templates"]["delta"] == "+0.0%", "stats does not report +0.0% templates");
    }
    return r;
}

// ---- 6: growth percentages round half-up to one decimal ----

Outcome growth_arithmetic() {
    Outcome r;
    r.require(format_growth_percent(285, 337) == "+18.2%",
              "285 -> 337 must print +18.2%, got " + format_growth_percent(285, 337));
    r.require(format_growth_percent(5, 31) == "+520.0%",
              "5 -> 31 must print +520.0%, got " + format_growth_percent(5, 31));
    return r;
}

// ---- 7: unification properties hold on randomized cases ----

// Partition/bindings over the case's variables plus the structure's content
// with every variable resolved to its class (atom when bound, else the class's
// smallest case-variable index).  Equal signatures mean equal constraints:
// a bound variable is characterized by its atom alone, so class membership
// among bound variables is ignored (two variables bound to the same atom are
// the same constraint whether or not their classes were merged).
std::string unify_signature(const oracle::UnifyCase& c, const FeatureStructure& fs,
                            const BindingEnv& env) {
    std::ostringstream out;
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
        if (const std::string* a = env.atom_of(c.vars[i])) {
            out << i << "=" << *a << ";";
            continue;
        }
        for (std::size_t j = i + 1; j < c.vars.size(); ++j)
            if (env.same_class(c.vars[i], c.vars[j])) out << i << "~" << j << ";";
    }
    out << "|";
    for (const auto& [attr, v] : fs) {
        out << attr << ":";
        if (v.is_atom()) {
            out << v.atom();
        } else if (const std::string* a = env.atom_of(v.var())) {
            out << *a;
        } else {
            for (std::size_t i = 0; i < c.vars.size(); ++i)
                if (env.same_class(c.vars[i], v.var())) {
                    out << "#" << i;
                    break;
                }
        }
        out << ";";
    }
    return out.str();
}

Outcome unify_properties() {
    Outcome r;
    oracle::CaseGen gen(0xacce55u);
    std::mt19937 rng(0x7e57u);
    auto chance = [&](double p) { return std::uniform_real_distribution<>(0, 1)(rng) < p; };
    auto pick = [&](int n) { return std::uniform_int_distribution<>(0, n - 1)(rng); };

    int cases = 0;
    for (int i = 0; i < 1200; ++i) {
        oracle::UnifyCase c = gen.next();
        std::string tag = "case " + std::to_string(i) + ": ";

        // ground truth, both argument orders (commutativity)
        auto ab = unify(c.a, c.b, c.env);
        auto ba = unify(c.b, c.a, c.env);
        if (auto bad = oracle::check_unify_answer(c, ab)) r.require(false, tag + *bad);
        if (auto bad = oracle::check_unify_answer(c, ba)) r.require(false, tag + "(swapped) " + *bad);
        r.require(ab.has_value() == ba.has_value(), tag + "success is not commutative");
        if (ab && ba)
            r.require(unify_signature(c, ab->fs, ab->env) == unify_signature(c, ba->fs, ba->env),
                      tag + "results are not commutative");

        // idempotence: a structure unifies with itself without new constraints
        auto aa = unify(c.a, c.a, c.env);
        r.require(aa.has_value(), tag + "self-unification failed");
        if (aa)
            r.require(unify_signature(c, aa->fs, aa->env) == unify_signature(c, c.a, c.env),
                      tag + "self-unification added constraints");

        // identity: the empty structure changes nothing
        auto ae = unify(c.a, FeatureStructure{}, c.env);
        r.require(ae.has_value(), tag + "unification with the identity failed");
        if (ae)
            r.require(unify_signature(c, ae->fs, ae->env) == unify_signature(c, c.a, c.env),
                      tag + "the empty structure is not an identity");

        // associativity up to bindings, with a third structure over the same
        // variables (same shape as the generator's)
        FeatureStructure third;
        for (const std::string& attr : {"f", "g", "h", "k"}) {
            if (!chance(0.6)) continue;
            if (chance(0.5))
                third.set(attr, FeatureValue::atom(c.alphabet[pick(3)]));
            else
                third.set(attr, FeatureValue::var(c.vars[pick(4)]));
        }
        std::optional<UnifyResult> left, right;
        if (ab) left = unify(ab->fs, third, ab->env);
        auto bc = unify(c.b, third, c.env);
        if (bc) right = unify(c.a, bc->fs, bc->env);
        r.require(left.has_value() == right.has_value(), tag + "success is not associative");
        if (left && right)
            r.require(unify_signature(c, left->fs, left->env) ==
                          unify_signature(c, right->fs, right->env),
                      tag + "results are not associative up to bindings");
        ++cases;
    }
    r.require(cases >= 1000, "fewer than 1000 cases");
    return r;
}

// ---- 8: parsing agrees with the brute-force derivation oracle ----

Outcome parser_oracle_sweep() {
    Outcome r;
    auto t0 = std::chrono::steady_clock::now();
    Project p = load_project(assets("toy/toy.json"));
    CompiledGrammar cg = compile_project(p);

    const std::vector<std::string> forms = {"le", "chat", "Max", "dort", "voit", "bien"};
    std::map<std::string, std::vector<AnchoredTree>> anchored;
    for (const auto& f : forms) anchored[f] = anchor_token(p.lexicon, cg.families, f);

    ParseOptions opt;
    opt.start_cat = cg.start_cat;
    opt.max_derivations = 1 << 20;

    long sentences = 0, with_parse = 0;
    for (int len = 1; len <= 5 && r.ok; ++len) {
        std::vector<int> idx(len, 0);
        while (true) {
            std::vector<std::string> tokens;
            std::vector<std::vector<AnchoredTree>> per_token;
            for (int i : idx) {
                tokens.push_back(forms[i]);
                per_token.push_back(anchored[forms[i]]);
            }
            ParseReport rep = parse_sentence(p.lexicon, cg.families, tokens, opt);
            auto forced = oracle::parse_by_force(per_token, tokens, cg.start_cat);
            std::string tag = "'";
            for (int i = 0; i < len; ++i) tag += (i ? " " : "") + tokens[i];
            tag += "': ";
            r.require(!rep.truncated, tag + "unexpected truncation");
            r.require(rep.derivations.size() == forced.size(), tag + "derivation counts differ");
            if (rep.derivations.size() == forced.size())
                for (std::size_t k = 0; k < forced.size(); ++k) {
                    r.require(rep.derivations[k].derivation == forced[k].derivation,
                              tag + "derivation trees differ");
                    r.require(rep.derivations[k].derived == forced[k].derived,
                              tag + "derived trees differ");
                    r.require(rep.derivations[k].mwes == forced[k].mwes,
                              tag + "idiom spans differ");
                }
            ++sentences;
            with_parse += rep.any();

            int d = len - 1;
            while (d >= 0 && ++idx[d] == static_cast<int>(forms.size())) idx[d--] = 0;
            if (d < 0) break;
        }
    }
    r.require(sentences == 9330, "expected 9330 sentences, saw " + std::to_string(sentences));
    r.require(with_parse > 0, "no sentence parsed at all");
    r.require(seconds_since(t0) < 120.0, "exceeded the 120 s budget");
    return r;
}

// ---- 9: the bundled corpus meets its expectation tags ----

Outcome corpus_regression() {
    Outcome r;
    Project p = load_project(assets("minigrammar.json"));
    CompiledGrammar cg = compile_project(p);
    ParseOptions opt;
    opt.start_cat = cg.start_cat;

    int rows = 0;
    for (const char* file :
         {"corpus/restrictive.tsv", "corpus/appendix-dev.tsv", "corpus/appendix-test.tsv"}) {
        std::ifstream in(assets(file));
        r.require(in.good(), std::string("cannot open ") + file);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream row(line);
            std::string text, tag, ref;
            std::getline(row, text, '\t');
            std::getline(row, tag, '\t');
            std::getline(row, ref, '\t');
            ParseReport rep = parse_sentence(p.lexicon, cg.families, tokenize_sentence(text), opt);
            std::string what = "'" + text + "' (" + ref + ")";
            if (tag == "expect-idiomatic") {
                r.require(rep.any() && rep.idiomatic(), what + " must parse idiomatically");
            } else if (tag == "expect-literal-only") {
                r.require(rep.any() && !rep.idiomatic(), what + " must parse literally only");
            } else if (tag == "expect-no-parse") {
                r.require(!rep.any(), what + " must not parse");
            } else {
                r.require(false, what + " carries unknown tag " + tag);
            }
            ++rows;
        }
    }
    r.require(rows == 18, "expected 18 corpus rows, saw " + std::to_string(rows));

    // the sentences set aside are exactly the known-unsolved ones
    std::set<std::string> skipped;
    std::ifstream in(assets("corpus/skipped.txt"));
    r.require(in.good(), "cannot open corpus/skipped.txt");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        skipped.insert(line.substr(0, line.find('\t')));
    }
    const std::set<std::string> expected_skips = {
        "mis en examen, Jean a été suspendu",
        "le saint dont elle porte le nom",
        "Paris qui porte aujourd'hui son nom",
        "il verra le puits porter son nom",
        "la école porte son nom maintenant",
        "les visions se font intenses",
        "le terrain se trouve pris sous le feu",
    };
    r.require(skipped == expected_skips, "skipped.txt is not exactly the unsolved sentence set");
    return r;
}

} // namespace

int main() {
    struct Criterion {
        const char* label;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"1 compiled templates cover the golden tree shapes", golden_shape_coverage},
        {"2 description solving matches the brute-force model oracle", model_oracle_sweep},
        {"3 restrictive contrast sentences keep their exact readings", restrictive_contrasts},
        {"4 entry filters select exactly the golden anchored subset", filter_selection},
        {"5 added idioms grow the lexicon but not the grammar", factorization_plateau},
        {"6 growth percentages round half-up to one decimal", growth_arithmetic},
        {"7 unification properties hold on randomized cases", unify_properties},
        {"8 parsing matches the brute-force derivation oracle", parser_oracle_sweep},
        {"9 the bundled corpus meets its expectation tags", corpus_regression},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("unhandled exception: ") + e.what();
        }
        double secs = seconds_since(t0);
        if (out.ok) {
            std::printf("[PASS] %s (%.2fs)\n", c.label, secs);
        } else {
            std::printf("[FAIL] %s (%.2fs): %s\n", c.label, secs, out.detail.c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    if (failed) std::printf("%d of 9 acceptance criteria failed\n", failed);
    else std::printf("all 9 acceptance criteria passed\n");
    return failed ? 1 : 0;
}
