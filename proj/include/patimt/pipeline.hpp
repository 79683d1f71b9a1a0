#pragma once

// Corpus-level kernels. Every stage fans out over images with OpenMP and has
// a `_serial` twin that runs the same per-image work in a plain loop; the
// serial versions are the reference the parallel ones are tested against.

#include "patimt/corpus.hpp"
#include "patimt/evaluate.hpp"
#include "patimt/filters.hpp"
#include "patimt/instruct.hpp"
#include "patimt/predparse.hpp"
#include "patimt/refine.hpp"
#include "patimt/spatial_merge.hpp"

#include <exception>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace patimt::pipeline {

/// Applies `fn(i)` for i in [0,n) on up to `jobs` threads. Results keep index
/// order; the first exception (by index) is rethrown after the loop.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, int jobs) -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : 1)
    for (long i = 0; i < count; ++i) {
        try {
            slots[static_cast<std::size_t>(i)].emplace(fn(static_cast<std::size_t>(i)));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

template <class Fn>
auto serial_map(std::size_t n, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    std::vector<std::invoke_result_t<Fn&, std::size_t>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(fn(i));
    return out;
}

int default_jobs() noexcept;

// -- filter ---------------------------------------------------------------

std::vector<FilterVerdict> filter_corpus(const std::vector<LinesRecord>& records, const FilterParams& p, int jobs);
std::vector<FilterVerdict> filter_corpus_serial(const std::vector<LinesRecord>& records, const FilterParams& p);

// -- merge / refine -------------------------------------------------------

/// Spatial merge of every record. Scenario and language pair carry over.
std::vector<BlocksRecord> merge_corpus(const std::vector<LinesRecord>& records, const MergeParams& p, int jobs);
std::vector<BlocksRecord> merge_corpus_serial(const std::vector<LinesRecord>& records, const MergeParams& p);

/// Adaptive processing of every record; `layout` holds the layout-engine
/// blocks by image id (needed for hard scenarios).
std::vector<BlocksRecord> refine_corpus(const std::vector<LinesRecord>& records,
                                        const std::map<std::string, std::vector<LayoutBlock>>& layout,
                                        const RefineParams& p, int jobs);
std::vector<BlocksRecord> refine_corpus_serial(const std::vector<LinesRecord>& records,
                                               const std::map<std::string, std::vector<LayoutBlock>>& layout,
                                               const RefineParams& p);

// -- instructions ---------------------------------------------------------

struct InstructionOptions {
    InstanceFormat format = InstanceFormat::PlainText;
    BoxDialect dialect = BoxDialect::PlainUnit;
    std::uint64_t seed = 0;
};

std::vector<InstructionInstance> build_corpus_instances(const std::vector<ImageAnnotation>& corpus,
                                                        const QuestionPool& pool, const InstructionOptions& opt,
                                                        int jobs, Diagnostics* diag = nullptr);
std::vector<InstructionInstance> build_corpus_instances_serial(const std::vector<ImageAnnotation>& corpus,
                                                               const QuestionPool& pool,
                                                               const InstructionOptions& opt,
                                                               Diagnostics* diag = nullptr);

// -- evaluation -----------------------------------------------------------

/// One line of a prediction file.
struct PredictionEntry {
    std::optional<std::string> id;
    std::string image_id;
    TaskKind task = TaskKind::Region;
    std::string output;
};

std::vector<PredictionEntry> parse_prediction_file(std::string_view bytes);
std::string serialize_prediction_entry(const PredictionEntry& e);

struct EvaluationOptions {
    ParseStrictness strictness = ParseStrictness::Salvage;
    MatchMethod matching = MatchMethod::Optimal;
    BleuSmoothing smoothing = BleuSmoothing::None;
    std::optional<BoxDialect> dialect_override;
    std::optional<InstanceFormat> format_override;
};

/// Parsed prediction aligned to its gold instance.
struct AlignedPrediction {
    const InstructionInstance* instance = nullptr;
    const PredictionEntry* entry = nullptr; // null when the model gave no answer
    ParseOutcome parsed;
};

/// Pairs predictions with instances (by id when given, otherwise by
/// (image_id, task) in order of appearance) and parses each output.
std::vector<AlignedPrediction> align_and_parse(const std::vector<InstructionInstance>& instances,
                                               const std::vector<PredictionEntry>& predictions,
                                               const EvaluationOptions& opt, int jobs,
                                               Diagnostics* diag = nullptr);

struct ImageDiagnostic {
    std::string image_id;
    EvalCategory category;
    std::size_t region_queries = 0;
    std::optional<double> region_bleu;
    std::optional<double> fullimage_bleu;
    std::optional<double> iou;
    std::vector<std::string> messages;
};

struct CorpusEvaluation {
    std::optional<EvalReport> region;
    std::optional<EvalReport> fullimage;
    std::vector<ImageDiagnostic> images;
    std::vector<std::string> warnings;
};

CorpusEvaluation evaluate_corpus(const std::vector<InstructionInstance>& instances,
                                 const std::vector<PredictionEntry>& predictions, const EvaluationOptions& opt,
                                 int jobs);
CorpusEvaluation evaluate_corpus_serial(const std::vector<InstructionInstance>& instances,
                                        const std::vector<PredictionEntry>& predictions,
                                        const EvaluationOptions& opt);

} // namespace patimt::pipeline
