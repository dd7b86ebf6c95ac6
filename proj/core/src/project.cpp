#include "metagramme/project.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace metagramme {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MgError(ErrKind::Io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& rel) {
    fs::path p(rel);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (fs::path(base_dir) / p).lexically_normal().string();
}

std::vector<std::string> path_list(const json& j, const std::string& key,
                                   const std::string& base_dir, bool required,
                                   const std::string& manifest_path) {
    std::vector<std::string> out;
    if (!j.contains(key)) {
        if (required)
            throw MgError(ErrKind::BadManifest,
                          "manifest '" + manifest_path + "' lacks the '" + key + "' list");
        return out;
    }
    if (!j[key].is_array())
        throw MgError(ErrKind::BadManifest, "'" + key + "' must be a list in '" + manifest_path + "'");
    for (const auto& e : j[key]) {
        if (!e.is_string())
            throw MgError(ErrKind::BadManifest,
                          "'" + key + "' entries must be strings in '" + manifest_path + "'");
        out.push_back(resolve(base_dir, e.get<std::string>()));
    }
    return out;
}

void apply_caps_env(ProjectCaps& caps) {
    const char* raw = std::getenv("METAGRAMME_CAPS");
    if (!raw || !*raw) return;
    std::istringstream in(raw);
    std::string part;
    while (std::getline(in, part, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos)
            throw MgError(ErrKind::BadManifest,
                          "METAGRAMME_CAPS entries must look like key=value, got '" + part + "'");
        std::string key = part.substr(0, eq);
        std::string value = part.substr(eq + 1);
        std::size_t n = 0;
        try {
            n = std::stoul(value);
        } catch (const std::exception&) {
            throw MgError(ErrKind::BadManifest,
                          "METAGRAMME_CAPS value for '" + key + "' is not a number");
        }
        if (key == "descriptions")
            caps.descriptions = n;
        else if (key == "derivations")
            caps.derivations = n;
        else
            throw MgError(ErrKind::BadManifest, "METAGRAMME_CAPS has no cap named '" + key + "'");
    }
}

NodeMark mark_from_string(const std::string& s) {
    if (s == "none") return NodeMark::None;
    if (s == "anchor") return NodeMark::Anchor;
    if (s == "subst") return NodeMark::Subst;
    if (s == "foot") return NodeMark::Foot;
    if (s == "coanchor") return NodeMark::Coanchor;
    throw MgError(ErrKind::BadManifest, "unknown node mark '" + s + "'");
}

json fs_to_json(const TplFS& fs) {
    json out = json::object();
    for (const auto& [attr, v] : fs) {
        if (v.is_var())
            out[attr] = json{{"var", v.var}};
        else
            out[attr] = v.atom;
    }
    return out;
}

TplFS fs_from_json(const json& j) {
    TplFS out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_string())
            out.emplace_back(it.key(), TplValue{it.value().get<std::string>(), -1});
        else
            out.emplace_back(it.key(), TplValue{"", it.value().at("var").get<int>()});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

} // namespace

ProjectManifest load_manifest(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw MgError(ErrKind::BadManifest, "manifest '" + path + "' is not valid JSON: " + e.what());
    }
    std::string base_dir = fs::path(path).parent_path().string();
    if (base_dir.empty()) base_dir = ".";

    ProjectManifest m;
    m.path = path;
    m.grammar = path_list(j, "grammar", base_dir, /*required=*/true, path);
    m.lexicon = path_list(j, "lexicon", base_dir, /*required=*/false, path);
    if (j.contains("start_cat")) m.start_cat = j["start_cat"].get<std::string>();
    if (j.contains("caps")) {
        const auto& caps = j["caps"];
        if (caps.contains("descriptions")) m.caps.descriptions = caps["descriptions"].get<std::size_t>();
        if (caps.contains("derivations")) m.caps.derivations = caps["derivations"].get<std::size_t>();
    }
    if (!j.contains("families") || !j["families"].is_array())
        throw MgError(ErrKind::BadManifest, "manifest '" + path + "' lacks the 'families' list");
    for (const auto& f : j["families"]) m.families.push_back(f.get<std::string>());
    apply_caps_env(m.caps);
    return m;
}

Project load_project(const std::string& manifest_path) {
    Project p;
    p.manifest = load_manifest(manifest_path);
    for (const auto& g : p.manifest.grammar) p.grammar.add_source(read_file(g), g);
    p.grammar.link();
    build_family_table(p.grammar, p.manifest.families);
    for (const auto& l : p.manifest.lexicon) p.lexicon.add_source(read_file(l), l);
    return p;
}

CompiledGrammar compile_project(const Project& project) {
    CompiledGrammar out;
    out.manifest_path = project.manifest.path;
    out.start_cat = project.manifest.start_cat;
    out.caps = project.manifest.caps;
    ExpandOptions eopt;
    eopt.max_descriptions = project.manifest.caps.descriptions;
    for (const auto& family : project.manifest.families) {
        ModelStatistics st;
        out.families[family] = compile_family(project.grammar, family, eopt, {}, &st);
        out.stats[family] = st;
    }
    return out;
}

std::string to_json(const CompiledGrammar& compiled) {
    json j;
    j["format"] = "metagramme-grammar/1";
    j["manifest"] = compiled.manifest_path;
    j["start_cat"] = compiled.start_cat;
    j["caps"] = {{"descriptions", compiled.caps.descriptions},
                 {"derivations", compiled.caps.derivations}};
    json families = json::object();
    for (const auto& [name, templates] : compiled.families) {
        json list = json::array();
        for (const TreeTemplate& t : templates) {
            json jt;
            jt["kind"] = t.is_auxiliary() ? "auxiliary" : "initial";
            jt["provenance"] = t.provenance;
            jt["root"] = 0;
            jt["var_count"] = t.var_count;
            jt["iface"] = fs_to_json(t.iface);
            json nodes = json::array();
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
                const TemplateNode& n = t.nodes[i];
                json jn;
                jn["id"] = i;
                jn["cat"] = n.cat;
                jn["mark"] = to_string(n.mark);
                jn["name"] = n.name;
                jn["top"] = fs_to_json(n.top);
                jn["bot"] = fs_to_json(n.bot);
                jn["children"] = n.children;
                nodes.push_back(std::move(jn));
            }
            jt["nodes"] = std::move(nodes);
            list.push_back(std::move(jt));
        }
        families[name] = std::move(list);
    }
    j["families"] = std::move(families);
    json stats = json::object();
    for (const auto& [name, st] : compiled.stats)
        stats[name] = {{"descriptions", st.descriptions},
                       {"models", st.models},
                       {"templates", st.templates}};
    j["stats"] = std::move(stats);
    return j.dump(2) + "\n";
}

CompiledGrammar compiled_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw MgError(ErrKind::BadManifest, std::string("compiled grammar is not valid JSON: ") + e.what());
    }
    if (!j.contains("format") || j["format"].get<std::string>() != "metagramme-grammar/1")
        throw MgError(ErrKind::BadManifest, "compiled grammar has an unsupported format tag");
    CompiledGrammar out;
    out.manifest_path = j.value("manifest", std::string());
    out.start_cat = j.value("start_cat", std::string("s"));
    if (j.contains("caps")) {
        out.caps.descriptions = j["caps"].value("descriptions", out.caps.descriptions);
        out.caps.derivations = j["caps"].value("derivations", out.caps.derivations);
    }
    for (auto fit = j["families"].begin(); fit != j["families"].end(); ++fit) {
        std::vector<TreeTemplate> templates;
        for (const auto& jt : fit.value()) {
            TreeTemplate t;
            t.family = fit.key();
            t.provenance = jt.value("provenance", std::string());
            t.var_count = jt.value("var_count", 0);
            t.iface = fs_from_json(jt.at("iface"));
            for (const auto& jn : jt.at("nodes")) {
                TemplateNode n;
                n.cat = jn.at("cat").get<std::string>();
                n.mark = mark_from_string(jn.at("mark").get<std::string>());
                n.name = jn.value("name", std::string());
                n.top = fs_from_json(jn.at("top"));
                n.bot = fs_from_json(jn.at("bot"));
                for (const auto& c : jn.at("children")) n.children.push_back(c.get<int>());
                t.nodes.push_back(std::move(n));
            }
            templates.push_back(std::move(t));
        }
        out.families[fit.key()] = std::move(templates);
    }
    if (j.contains("stats")) {
        for (auto sit = j["stats"].begin(); sit != j["stats"].end(); ++sit) {
            ModelStatistics st;
            st.descriptions = sit.value().value("descriptions", 0u);
            st.models = sit.value().value("models", 0u);
            st.templates = sit.value().value("templates", 0u);
            out.stats[sit.key()] = st;
        }
    }
    return out;
}

GrammarSnapshot snapshot(const Project& project, const CompiledGrammar& compiled) {
    GrammarSnapshot s;
    s.classes = project.grammar.classes().size();
    for (const auto& [name, templates] : compiled.families) s.templates += templates.size();
    s.lemmas = project.lexicon.lemmas().size();
    for (const auto& l : project.lexicon.lemmas())
        if (!l.coanchors.empty()) ++s.mwe_lemmas;
    return s;
}

std::string format_growth_percent(std::size_t before, std::size_t after) {
    if (before == 0) return "n/a";
    double percent = 100.0 * (static_cast<double>(after) - static_cast<double>(before)) /
                     static_cast<double>(before);
    long long tenths = static_cast<long long>(std::floor(percent * 10.0 + 0.5));
    std::string out = tenths < 0 ? "-" : "+";
    long long mag = tenths < 0 ? -tenths : tenths;
    out += std::to_string(mag / 10) + "." + std::to_string(mag % 10) + "%";
    return out;
}

GrowthReport growth(const GrammarSnapshot& before, const GrammarSnapshot& after) {
    auto entry = [](std::size_t b, std::size_t a) {
        return GrowthEntry{b, a, format_growth_percent(b, a)};
    };
    GrowthReport r;
    r.classes = entry(before.classes, after.classes);
    r.templates = entry(before.templates, after.templates);
    r.lemmas = entry(before.lemmas, after.lemmas);
    r.mwe_lemmas = entry(before.mwe_lemmas, after.mwe_lemmas);
    return r;
}

} // namespace metagramme
