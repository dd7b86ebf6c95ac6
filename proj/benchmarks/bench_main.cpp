#include <benchmark/benchmark.h>

#include "metagramme/project.hpp"
#include "metagramme/tagparser.hpp"

namespace {

const std::string kManifest = std::string(METAGRAMME_ASSETS_DIR) + "/minigrammar.json";

const metagramme::Project& project() {
    static metagramme::Project p = metagramme::load_project(kManifest);
    return p;
}

const metagramme::CompiledGrammar& compiled() {
    static metagramme::CompiledGrammar c = metagramme::compile_project(project());
    return c;
}

void BM_Unify(benchmark::State& state) {
    using namespace metagramme;
    FeatureStructure a, b;
    a.set("num", FeatureValue::atom("sg"));
    a.set("gen", FeatureValue::var(0));
    a.set("pers", FeatureValue::atom("3"));
    b.set("gen", FeatureValue::atom("f"));
    b.set("mode", FeatureValue::var(1));
    BindingEnv env;
    env.fresh("G");
    env.fresh("M");
    for (auto _ : state) {
        auto r = unify(a, b, env);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Unify);

void BM_CompileFamily(benchmark::State& state) {
    const auto& p = project();
    for (auto _ : state) {
        auto templates = metagramme::compile_family(p.grammar, "mwen0Vn1");
        benchmark::DoNotOptimize(templates);
    }
}
BENCHMARK(BM_CompileFamily)->Unit(benchmark::kMillisecond);

void BM_ParseSentence(benchmark::State& state) {
    const auto& p = project();
    const auto& c = compiled();
    auto tokens = metagramme::tokenize_sentence("Jean prend la porte");
    metagramme::ParseOptions opt;
    opt.start_cat = c.start_cat;
    for (auto _ : state) {
        auto report = metagramme::parse_sentence(p.lexicon, c.families, tokens, opt);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_ParseSentence)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
