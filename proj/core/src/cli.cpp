#include "metagramme/cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "metagramme/project.hpp"
#include "metagramme/tagparser.hpp"

namespace metagramme {

namespace {

using nlohmann::json;

struct Session {
    CompiledGrammar compiled;
    Lexicon lexicon;
};

Session load_session(const std::string& compiled_path, const std::string& manifest_path) {
    Session s;
    if (!manifest_path.empty()) {
        Project project = load_project(manifest_path);
        s.compiled = compile_project(project);
        s.lexicon = std::move(project.lexicon);
    } else {
        s.compiled = compiled_from_json(read_file(compiled_path));
        ProjectManifest manifest = load_manifest(s.compiled.manifest_path);
        for (const auto& l : manifest.lexicon) s.lexicon.add_source(read_file(l), l);
    }
    return s;
}

void report_diagnostics(const DiagnosticSink& sink) {
    for (const auto& d : sink) std::cerr << to_string(d.kind) << ": " << d.message << "\n";
}

json mwes_to_json(const std::vector<MweSpan>& mwes) {
    json out = json::array();
    for (const auto& m : mwes) out.push_back({{"id", m.lemma_id}, {"span", m.positions}});
    return out;
}

void emit_sentence(const std::string& sentence, const Session& s) {
    DiagnosticSink sink;
    ParseOptions opt;
    opt.start_cat = s.compiled.start_cat;
    opt.max_derivations = s.compiled.caps.derivations;
    ParseReport report =
        parse_sentence(s.lexicon, s.compiled.families, tokenize_sentence(sentence), opt, &sink);
    report_diagnostics(sink);

    json line;
    line["sentence"] = sentence;
    line["parses"] = report.derivations.size();
    line["truncated"] = report.truncated;
    line["idiomatic"] = report.idiomatic();
    line["literal_only"] = report.literal_only();
    json ds = json::array();
    for (const auto& d : report.derivations)
        ds.push_back({{"derived", d.derived}, {"mwes", mwes_to_json(d.mwes)}});
    line["derivations"] = std::move(ds);
    std::cout << line.dump() << "\n";
}

int cmd_compile(const std::string& manifest_path, const std::string& out_path) {
    Project project = load_project(manifest_path);
    CompiledGrammar compiled = compile_project(project);
    std::string text = to_json(compiled);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw MgError(ErrKind::Io, "cannot write '" + out_path + "'");
        out << text;
        std::size_t total = 0;
        for (const auto& [family, st] : compiled.stats) {
            total += st.templates;
            std::cout << json{{"family", family},
                              {"descriptions", st.descriptions},
                              {"models", st.models},
                              {"templates", st.templates}}
                             .dump()
                      << "\n";
        }
        std::cout << json{{"families", compiled.families.size()}, {"templates", total}}.dump()
                  << "\n";
    }
    return 0;
}

int cmd_anchor(const std::string& compiled_path, const std::string& manifest_path,
               const std::string& word) {
    Session s = load_session(compiled_path, manifest_path);
    DiagnosticSink sink;
    auto trees = anchor_token(s.lexicon, s.compiled.families, word, &sink);
    report_diagnostics(sink);
    for (const auto& t : trees) {
        std::cout << json{{"surface", word},
                          {"family", t.family},
                          {"lemma", t.lemma_label},
                          {"id", t.lemma_id},
                          {"mwe", t.is_mwe},
                          {"tree", to_canonical(t)}}
                         .dump()
                  << "\n";
    }
    return 0;
}

int cmd_parse(const std::string& compiled_path, const std::string& manifest_path,
              const std::string& sentence, const std::string& corpus_path) {
    Session s = load_session(compiled_path, manifest_path);
    if (!sentence.empty()) emit_sentence(sentence, s);
    if (!corpus_path.empty()) {
        std::istringstream in(read_file(corpus_path));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::string text = line.substr(0, line.find('\t'));
            if (!text.empty()) emit_sentence(text, s);
        }
    }
    return 0;
}

int cmd_stats(const std::string& before_path, const std::string& after_path) {
    Project before = load_project(before_path);
    Project after = load_project(after_path);
    GrammarSnapshot b = snapshot(before, compile_project(before));
    GrammarSnapshot a = snapshot(after, compile_project(after));
    GrowthReport r = growth(b, a);
    auto entry = [](const GrowthEntry& e) {
        return json{{"before", e.before}, {"after", e.after}, {"delta", e.delta}};
    };
    std::cout << json{{"classes", entry(r.classes)},
                      {"templates", entry(r.templates)},
                      {"lemmas", entry(r.lemmas)},
                      {"mwe_lemmas", entry(r.mwe_lemmas)}}
                     .dump()
              << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"metagramme: a metagrammar compiler and parser for lexicalized tree grammars"};
    app.require_subcommand(1);

    std::string manifest_path, out_path, compiled_path, word, sentence, corpus_path;
    std::string before_path, after_path;

    CLI::App* compile = app.add_subcommand("compile", "compile a project manifest to a grammar file");
    compile->add_option("-m,--manifest", manifest_path, "project manifest")->required();
    compile->add_option("-o,--output", out_path, "output file (stdout when omitted)");

    CLI::App* anchor = app.add_subcommand("anchor", "show the lexicalized trees of one surface form");
    auto* ag = anchor->add_option("-g,--grammar", compiled_path, "compiled grammar file");
    auto* am = anchor->add_option("-m,--manifest", manifest_path, "project manifest");
    anchor->add_option("-w,--word", word, "surface form")->required();
    ag->excludes(am);

    CLI::App* parse = app.add_subcommand("parse", "parse sentences");
    auto* pg = parse->add_option("-g,--grammar", compiled_path, "compiled grammar file");
    auto* pm = parse->add_option("-m,--manifest", manifest_path, "project manifest");
    auto* ps = parse->add_option("-s,--sentence", sentence, "sentence to parse");
    auto* pc = parse->add_option("-c,--corpus", corpus_path, "corpus file, first tab field per line");
    pg->excludes(pm);

    CLI::App* stats = app.add_subcommand("stats", "growth between two project states");
    stats->add_option("-a,--before", before_path, "baseline manifest")->required();
    stats->add_option("-b,--after", after_path, "extended manifest")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help and friends
            app.exit(e);
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (compile->parsed()) return cmd_compile(manifest_path, out_path);
        if (anchor->parsed()) {
            if (compiled_path.empty() && manifest_path.empty())
                throw MgError(ErrKind::BadManifest, "anchor needs --grammar or --manifest");
            return cmd_anchor(compiled_path, manifest_path, word);
        }
        if (parse->parsed()) {
            if (compiled_path.empty() && manifest_path.empty())
                throw MgError(ErrKind::BadManifest, "parse needs --grammar or --manifest");
            if (!*ps && !*pc)
                throw MgError(ErrKind::BadManifest, "parse needs --sentence or --corpus");
            return cmd_parse(compiled_path, manifest_path, sentence, corpus_path);
        }
        if (stats->parsed()) return cmd_stats(before_path, after_path);
    } catch (const MgError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace metagramme
