#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "metagramme/anchoring.hpp"
#include "metagramme/grammar.hpp"
#include "metagramme/treesolver.hpp"

namespace metagramme {

std::string read_file(const std::string& path); // throws Io

struct ProjectCaps {
    std::size_t descriptions = 10000;
    std::size_t derivations = 512;
};

// On-disk project description (JSON). Relative paths resolve against the
// manifest's directory. METAGRAMME_CAPS ("descriptions=N,derivations=M")
// overrides the caps.
struct ProjectManifest {
    std::string path;
    std::vector<std::string> grammar;
    std::vector<std::string> lexicon;
    std::string start_cat = "s";
    ProjectCaps caps;
    std::vector<std::string> families;
};

ProjectManifest load_manifest(const std::string& path);

struct Project {
    ProjectManifest manifest;
    Grammar grammar;
    Lexicon lexicon;
};

Project load_project(const std::string& manifest_path);

struct CompiledGrammar {
    std::string manifest_path;
    std::string start_cat = "s";
    ProjectCaps caps;
    CompiledFamilies families;
    std::map<std::string, ModelStatistics> stats;
};

CompiledGrammar compile_project(const Project& project);

std::string to_json(const CompiledGrammar& compiled);
CompiledGrammar compiled_from_json(const std::string& json_text);

// ---- growth accounting between two project states ----

struct GrammarSnapshot {
    std::size_t classes = 0;
    std::size_t templates = 0;
    std::size_t lemmas = 0;
    std::size_t mwe_lemmas = 0;
};

GrammarSnapshot snapshot(const Project& project, const CompiledGrammar& compiled);

struct GrowthEntry {
    std::size_t before = 0;
    std::size_t after = 0;
    std::string delta; // signed percentage, one decimal, half-up ("+1.2%")
};

struct GrowthReport {
    GrowthEntry classes;
    GrowthEntry templates;
    GrowthEntry lemmas;
    GrowthEntry mwe_lemmas;
};

GrowthReport growth(const GrammarSnapshot& before, const GrammarSnapshot& after);

// 100*(after-before)/before rounded half-up to one decimal; "n/a" when
// `before` is zero.
std::string format_growth_percent(std::size_t before, std::size_t after);

} // namespace metagramme
