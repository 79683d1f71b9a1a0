// Serial reference vs OpenMP fan-out for the per-image stages.

#include "synth.hpp"

#include "patimt/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace patimt;
namespace pl = patimt::pipeline;

namespace {

const synth::SyntheticCorpus& corpus()
{
    static const auto sc = synth::corpus(1, 2000);
    return sc;
}

struct Eval {
    std::vector<InstructionInstance> instances;
    std::vector<pl::PredictionEntry> predictions;
};

const Eval& eval_fixture()
{
    static const Eval e = [] {
        const auto& sc = corpus();
        std::vector<ImageAnnotation> anns;
        for (const auto& r : pl::merge_corpus_serial(sc.records, {})) {
            ImageAnnotation a{r.image_id, r.dims, r.scenario, r.lang_pair.value_or(LangPair::EnZh), {}, r.blocks};
            for (auto& b : a.blocks)
                b.translation = sc.dictionary.at(*b.text);
            anns.push_back(std::move(a));
        }
        Eval out;
        out.instances = pl::build_corpus_instances_serial(anns, default_question_pool(),
                                                          {InstanceFormat::Structured, BoxDialect::Boxed1000, 0});
        for (const auto& i : out.instances)
            out.predictions.push_back({i.id, i.image_id, i.task, i.answer});
        return out;
    }();
    return e;
}

void BM_MergeSerial(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(pl::merge_corpus_serial(corpus().records, {}));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(corpus().records.size()));
}

void BM_MergeParallel(benchmark::State& st)
{
    const int jobs = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(pl::merge_corpus(corpus().records, {}, jobs));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(corpus().records.size()));
}

void BM_EvaluateSerial(benchmark::State& st)
{
    const auto& e = eval_fixture();
    for (auto _ : st)
        benchmark::DoNotOptimize(pl::evaluate_corpus_serial(e.instances, e.predictions, {}));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(e.instances.size()));
}

void BM_EvaluateParallel(benchmark::State& st)
{
    const auto& e = eval_fixture();
    const int jobs = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(pl::evaluate_corpus(e.instances, e.predictions, {}, jobs));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(e.instances.size()));
}

} // namespace

BENCHMARK(BM_MergeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MergeParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
