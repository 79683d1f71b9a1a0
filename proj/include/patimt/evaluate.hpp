#pragma once

#include "patimt/corpus.hpp"
#include "patimt/predparse.hpp"
#include "patimt/scenario.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace patimt {

enum class TokenizerMode { Latin, Cjk };

/// Case-preserving tokenization. Latin: whitespace-delimited, punctuation
/// split into standalone tokens. Cjk: each CJK code point is a token, other
/// runs follow the latin rules.
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

enum class BleuSmoothing { None, Exp };

/// Sufficient statistics for corpus BLEU-4; they add up across segments.
struct BleuStats {
    std::array<std::size_t, 4> matches{};
    std::array<std::size_t, 4> totals{};
    std::size_t hyp_len = 0;
    std::size_t ref_len = 0;

    BleuStats& operator+=(const BleuStats& o) noexcept;
    friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats segment_stats(std::string_view hypothesis, std::string_view reference, TokenizerMode mode);

/// BLEU in [0,100] from pooled statistics.
double bleu_from_stats(const BleuStats& s, BleuSmoothing smoothing = BleuSmoothing::None);

/// Corpus BLEU-4 over (hypothesis, reference) pairs, as a percentage.
/// Throws InvalidArgument on an empty list.
double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& pairs, TokenizerMode mode,
                   BleuSmoothing smoothing = BleuSmoothing::None);

enum class MatchMethod { Optimal, Greedy };

std::optional<MatchMethod> parse_match_method(std::string_view s) noexcept;
std::string_view to_string(MatchMethod m) noexcept;

struct Matching {
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (gold, pred), sorted by gold index
    std::vector<double> ious;                               // parallel to pairs
    MatchMethod method = MatchMethod::Optimal;

    double total_iou() const noexcept;
};

/// One-to-one matching of predicted to gold boxes. Optimal maximizes the
/// summed IoU (rectangular assignment); greedy repeatedly takes the best
/// remaining pair. Zero-IoU pairs are never reported.
Matching match_boxes(const std::vector<BBox>& gold, const std::vector<BBox>& pred, MatchMethod method);

/// Mean matched IoU over gold boxes; unmatched gold boxes count 0.
double grounding_iou(const std::vector<BBox>& gold, const std::vector<BBox>& pred, MatchMethod method);

/// Corpus BLEU of region predictions against their single references. A
/// missing prediction scores as an empty hypothesis.
double evaluate_region(const std::vector<std::optional<PredictionRecord>>& preds,
                       const std::vector<std::string>& gold_translations, TokenizerMode mode,
                       BleuSmoothing smoothing = BleuSmoothing::None);

struct GoldBlock {
    BBox bbox; // absolute pixels
    std::string translation;
};

/// Per-image full-image statistics, additive across images.
struct FullImageStats {
    BleuStats bleu;
    double iou_sum = 0; // sum of matched IoU
    std::size_t gold_boxes = 0;
};

/// Translation pairing for one image: hypotheses[i] is the prediction text
/// paired with gold[i] (empty when unpaired).
struct FullImagePairing {
    std::vector<std::string> hypotheses;
    Matching matching;
};

FullImagePairing pair_fullimage(const std::vector<GoldBlock>& gold, const std::vector<PredictionRecord>& preds,
                                MatchMethod method);

/// Scores one image: boxes are matched, matched predictions pair with their
/// gold translation, unmatched gold pairs with an empty hypothesis. If no box
/// matches at all, translations pair up by position instead.
FullImageStats score_fullimage_image(const std::vector<GoldBlock>& gold, const std::vector<PredictionRecord>& preds,
                                     TokenizerMode mode, MatchMethod method);

struct FullImageResult {
    double bleu = 0;
    double iou = 0;
};

FullImageResult evaluate_fullimage(
    const std::vector<std::pair<std::vector<GoldBlock>, std::vector<PredictionRecord>>>& images, TokenizerMode mode,
    MatchMethod method, BleuSmoothing smoothing = BleuSmoothing::None, Diagnostics* diag = nullptr);

/// Metric row of a report.
struct MetricRow {
    double bleu = 0;
    std::optional<double> iou;
    std::size_t n_images = 0;
};

struct EvalReport {
    std::map<EvalCategory, MetricRow> per_category;
    MetricRow overall; // unweighted mean over populated categories
};

/// Region-task statistics of one image.
struct RegionImageResult {
    EvalCategory category;
    BleuStats bleu;
};

struct FullImageImageResult {
    EvalCategory category;
    FullImageStats stats;
};

EvalReport aggregate(const std::vector<RegionImageResult>& images, BleuSmoothing smoothing = BleuSmoothing::None,
                     Diagnostics* diag = nullptr);
EvalReport aggregate(const std::vector<FullImageImageResult>& images, BleuSmoothing smoothing = BleuSmoothing::None,
                     Diagnostics* diag = nullptr);

} // namespace patimt
