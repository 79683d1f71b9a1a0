#include "patimt/pipeline.hpp"

#include <json.hpp>

#include <unordered_map>

namespace patimt::pipeline {

using nlohmann::json;

int default_jobs() noexcept
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

template <class Fn>
auto run_map(std::size_t n, Fn&& fn, int jobs, bool parallel)
{
    if (parallel)
        return parallel_map(n, fn, jobs);
    return serial_map(n, fn);
}

std::vector<FilterVerdict> filter_impl(const std::vector<LinesRecord>& records, const FilterParams& p, int jobs,
                                       bool parallel)
{
    p.validate();
    return run_map(records.size(), [&](std::size_t i) { return check_image(records[i].lines, records[i].dims, p); },
                   jobs, parallel);
}

std::vector<BlocksRecord> merge_impl(const std::vector<LinesRecord>& records, const MergeParams& p, int jobs,
                                     bool parallel)
{
    p.validate();
    return run_map(
        records.size(),
        [&](std::size_t i) {
            const auto& r = records[i];
            return BlocksRecord{r.image_id, r.dims, r.scenario, r.lang_pair, spatial_merge(r.lines, p)};
        },
        jobs, parallel);
}

std::vector<BlocksRecord> refine_impl(const std::vector<LinesRecord>& records,
                                      const std::map<std::string, std::vector<LayoutBlock>>& layout,
                                      const RefineParams& p, int jobs, bool parallel)
{
    p.validate();
    return run_map(
        records.size(),
        [&](std::size_t i) {
            const auto& r = records[i];
            ImageAnnotation ann{r.image_id, r.dims, r.scenario, r.lang_pair.value_or(LangPair::EnZh), r.lines, {}};
            std::optional<std::vector<LayoutBlock>> blocks;
            if (auto it = layout.find(r.image_id); it != layout.end())
                blocks = it->second;
            return BlocksRecord{r.image_id, r.dims, r.scenario, r.lang_pair, adaptive_process(ann, blocks, p)};
        },
        jobs, parallel);
}

std::vector<InstructionInstance> instances_impl(const std::vector<ImageAnnotation>& corpus, const QuestionPool& pool,
                                                const InstructionOptions& opt, int jobs, bool parallel,
                                                Diagnostics* diag)
{
    pool.validate();
    struct PerImage {
        std::vector<InstructionInstance> instances;
        Diagnostics diag;
    };
    auto per_image = run_map(
        corpus.size(),
        [&](std::size_t i) {
            PerImage r;
            r.instances = build_instances(corpus[i], pool, opt.format, opt.dialect, opt.seed, &r.diag);
            if (r.instances.empty())
                r.diag.warn("image '" + corpus[i].image_id + "': no translated text blocks, no instances");
            return r;
        },
        jobs, parallel);
    std::vector<InstructionInstance> out;
    for (auto& r : per_image) {
        for (auto& inst : r.instances)
            out.push_back(std::move(inst));
        if (diag)
            for (auto& m : r.diag.messages)
                diag->warn(std::move(m));
    }
    return out;
}

TokenizerMode mode_for(const InstructionInstance& inst)
{
    return target_is_cjk(inst.lang_pair) ? TokenizerMode::Cjk : TokenizerMode::Latin;
}

std::vector<AlignedPrediction> align_impl(const std::vector<InstructionInstance>& instances,
                                          const std::vector<PredictionEntry>& predictions,
                                          const EvaluationOptions& opt, int jobs, bool parallel, Diagnostics* diag)
{
    std::unordered_map<std::string, std::size_t> by_id;
    std::map<std::pair<std::string, TaskKind>, std::vector<std::size_t>> by_key;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        by_id.emplace(instances[i].id, i);
        by_key[{instances[i].image_id, instances[i].task}].push_back(i);
    }
    std::map<std::pair<std::string, TaskKind>, std::size_t> next_in_key;
    std::vector<const PredictionEntry*> entry_for(instances.size(), nullptr);
    for (const auto& e : predictions) {
        std::optional<std::size_t> target;
        if (e.id) {
            if (auto it = by_id.find(*e.id); it != by_id.end())
                target = it->second;
        } else {
            auto key = std::make_pair(e.image_id, e.task);
            auto it = by_key.find(key);
            if (it != by_key.end()) {
                auto& k = next_in_key[key];
                // skip instances already claimed by id
                while (k < it->second.size() && entry_for[it->second[k]])
                    ++k;
                if (k < it->second.size())
                    target = it->second[k++];
            }
        }
        if (!target || entry_for[*target]) {
            if (diag)
                diag->warn("prediction for '" + (e.id ? *e.id : e.image_id) + "' (" + std::string(to_string(e.task)) +
                           ") matches no open instance, ignored");
            continue;
        }
        entry_for[*target] = &e;
    }

    return run_map(
        instances.size(),
        [&](std::size_t i) {
            const auto& inst = instances[i];
            AlignedPrediction a;
            a.instance = &inst;
            a.entry = entry_for[i];
            if (!a.entry) {
                a.parsed.diagnostics.push_back("no prediction");
                return a;
            }
            const auto fmt = opt.format_override.value_or(inst.format);
            const auto dialect = opt.dialect_override.value_or(inst.dialect);
            try {
                a.parsed = parse_prediction(a.entry->output, fmt, dialect, inst.dims, opt.strictness);
            } catch (const PredictionParseError& e) {
                a.parsed.records.clear();
                a.parsed.diagnostics.push_back(std::string("unparseable: ") + e.what());
            }
            return a;
        },
        jobs, parallel);
}

CorpusEvaluation evaluate_impl(const std::vector<InstructionInstance>& instances,
                               const std::vector<PredictionEntry>& predictions, const EvaluationOptions& opt,
                               int jobs, bool parallel)
{
    CorpusEvaluation out;
    Diagnostics diag;
    const auto aligned = align_impl(instances, predictions, opt, jobs, parallel, &diag);

    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!instances[i].scenario)
            throw InvalidArgument("instance '" + instances[i].id + "' has no scenario; cannot assign an evaluation category");
        auto [it, fresh] = members.try_emplace(instances[i].image_id);
        if (fresh)
            order.push_back(instances[i].image_id);
        it->second.push_back(i);
    }

    struct PerImage {
        ImageDiagnostic diag;
        std::optional<BleuStats> region;
        std::optional<FullImageStats> full;
    };
    auto per_image = run_map(
        order.size(),
        [&](std::size_t k) {
            PerImage r;
            const auto& idx = members.at(order[k]);
            const auto& first = instances[idx.front()];
            r.diag.image_id = first.image_id;
            r.diag.category = eval_category(*first.scenario);
            for (auto i : idx) {
                const auto& inst = instances[i];
                const auto& a = aligned[i];
                for (const auto& m : a.parsed.diagnostics)
                    r.diag.messages.push_back(inst.id + ": " + m);
                if (inst.task == TaskKind::Region) {
                    if (a.parsed.records.size() > 1)
                        r.diag.messages.push_back(inst.id + ": several records for a region query, first one used");
                    const std::string hyp =
                        a.parsed.records.empty() ? std::string() : a.parsed.records.front().translation;
                    if (!r.region)
                        r.region.emplace();
                    *r.region += segment_stats(hyp, inst.gold.front().translation, mode_for(inst));
                    ++r.diag.region_queries;
                } else {
                    if (inst.gold.empty()) {
                        r.diag.messages.push_back(inst.id + ": no gold blocks, skipped");
                        continue;
                    }
                    std::vector<GoldBlock> gold;
                    for (const auto& g : inst.gold)
                        gold.push_back({g.bbox, g.translation});
                    const auto st = score_fullimage_image(gold, a.parsed.records, mode_for(inst), opt.matching);
                    if (!r.full) {
                        r.full = st;
                    } else {
                        r.full->bleu += st.bleu;
                        r.full->iou_sum += st.iou_sum;
                        r.full->gold_boxes += st.gold_boxes;
                    }
                }
            }
            if (r.region)
                r.diag.region_bleu = bleu_from_stats(*r.region, opt.smoothing);
            if (r.full) {
                r.diag.fullimage_bleu = bleu_from_stats(r.full->bleu, opt.smoothing);
                r.diag.iou = r.full->iou_sum / static_cast<double>(r.full->gold_boxes);
            }
            return r;
        },
        jobs, parallel);

    std::vector<RegionImageResult> region;
    std::vector<FullImageImageResult> full;
    for (auto& r : per_image) {
        if (r.region)
            region.push_back({r.diag.category, *r.region});
        if (r.full)
            full.push_back({r.diag.category, *r.full});
        out.images.push_back(std::move(r.diag));
    }
    if (!region.empty())
        out.region = aggregate(region, opt.smoothing, &diag);
    if (!full.empty())
        out.fullimage = aggregate(full, opt.smoothing, &diag);
    out.warnings = std::move(diag.messages);
    return out;
}

} // namespace

std::vector<FilterVerdict> filter_corpus(const std::vector<LinesRecord>& records, const FilterParams& p, int jobs)
{
    return filter_impl(records, p, jobs, true);
}

std::vector<FilterVerdict> filter_corpus_serial(const std::vector<LinesRecord>& records, const FilterParams& p)
{
    return filter_impl(records, p, 1, false);
}

std::vector<BlocksRecord> merge_corpus(const std::vector<LinesRecord>& records, const MergeParams& p, int jobs)
{
    return merge_impl(records, p, jobs, true);
}

std::vector<BlocksRecord> merge_corpus_serial(const std::vector<LinesRecord>& records, const MergeParams& p)
{
    return merge_impl(records, p, 1, false);
}

std::vector<BlocksRecord> refine_corpus(const std::vector<LinesRecord>& records,
                                        const std::map<std::string, std::vector<LayoutBlock>>& layout,
                                        const RefineParams& p, int jobs)
{
    return refine_impl(records, layout, p, jobs, true);
}

std::vector<BlocksRecord> refine_corpus_serial(const std::vector<LinesRecord>& records,
                                               const std::map<std::string, std::vector<LayoutBlock>>& layout,
                                               const RefineParams& p)
{
    return refine_impl(records, layout, p, 1, false);
}

std::vector<InstructionInstance> build_corpus_instances(const std::vector<ImageAnnotation>& corpus,
                                                        const QuestionPool& pool, const InstructionOptions& opt,
                                                        int jobs, Diagnostics* diag)
{
    return instances_impl(corpus, pool, opt, jobs, true, diag);
}

std::vector<InstructionInstance> build_corpus_instances_serial(const std::vector<ImageAnnotation>& corpus,
                                                               const QuestionPool& pool,
                                                               const InstructionOptions& opt, Diagnostics* diag)
{
    return instances_impl(corpus, pool, opt, 1, false, diag);
}

std::vector<PredictionEntry> parse_prediction_file(std::string_view bytes)
{
    std::vector<PredictionEntry> out;
    std::size_t index = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = bytes.size();
        const auto line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(index, "<record>", std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object())
            throw ParseError(index, "<record>", "record is not an object");
        PredictionEntry e;
        for (const char* key : {"image_id", "task", "output"})
            if (!j.contains(key) || !j[key].is_string())
                throw ParseError(index, key, "missing or not a string");
        e.image_id = j["image_id"].get<std::string>();
        auto task = parse_task_kind(j["task"].get<std::string>());
        if (!task)
            throw ParseError(index, "task", "expected region or full-image");
        e.task = *task;
        e.output = j["output"].get<std::string>();
        if (j.contains("id")) {
            if (!j["id"].is_string())
                throw ParseError(index, "id", "not a string");
            e.id = j["id"].get<std::string>();
        }
        out.push_back(std::move(e));
        ++index;
    }
    return out;
}

std::string serialize_prediction_entry(const PredictionEntry& e)
{
    nlohmann::ordered_json j;
    if (e.id)
        j["id"] = *e.id;
    j["image_id"] = e.image_id;
    j["task"] = std::string(to_string(e.task));
    j["output"] = e.output;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<AlignedPrediction> align_and_parse(const std::vector<InstructionInstance>& instances,
                                               const std::vector<PredictionEntry>& predictions,
                                               const EvaluationOptions& opt, int jobs, Diagnostics* diag)
{
    return align_impl(instances, predictions, opt, jobs, true, diag);
}

CorpusEvaluation evaluate_corpus(const std::vector<InstructionInstance>& instances,
                                 const std::vector<PredictionEntry>& predictions, const EvaluationOptions& opt,
                                 int jobs)
{
    return evaluate_impl(instances, predictions, opt, jobs, true);
}

CorpusEvaluation evaluate_corpus_serial(const std::vector<InstructionInstance>& instances,
                                        const std::vector<PredictionEntry>& predictions,
                                        const EvaluationOptions& opt)
{
    return evaluate_impl(instances, predictions, opt, 1, false);
}

} // namespace patimt::pipeline
