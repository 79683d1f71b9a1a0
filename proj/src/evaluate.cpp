#include "patimt/evaluate.hpp"

#include "patimt/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace patimt {

std::vector<std::string> tokenize(std::string_view s, TokenizerMode mode)
{
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    };
    for (char32_t cp : text::decode_utf8(s)) {
        if (text::is_space(cp)) {
            flush();
        } else if ((mode == TokenizerMode::Cjk && text::is_cjk(cp)) || text::is_punct(cp)) {
            flush();
            std::string t;
            text::append_utf8(t, cp);
            tokens.push_back(std::move(t));
        } else {
            text::append_utf8(cur, cp);
        }
    }
    flush();
    return tokens;
}

BleuStats& BleuStats::operator+=(const BleuStats& o) noexcept
{
    for (int n = 0; n < 4; ++n) {
        matches[n] += o.matches[n];
        totals[n] += o.totals[n];
    }
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    return *this;
}

namespace {

using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& toks, std::size_t n)
{
    NgramCounts c;
    if (toks.size() < n)
        return c;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::vector<std::string_view> key(toks.begin() + i, toks.begin() + i + n);
        ++c[key];
    }
    return c;
}

} // namespace

BleuStats segment_stats(std::string_view hypothesis, std::string_view reference, TokenizerMode mode)
{
    const auto hyp = tokenize(hypothesis, mode);
    const auto ref = tokenize(reference, mode);
    BleuStats s;
    s.hyp_len = hyp.size();
    s.ref_len = ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto hc = count_ngrams(hyp, n);
        const auto rc = count_ngrams(ref, n);
        std::size_t matched = 0;
        for (const auto& [gram, count] : hc) {
            auto it = rc.find(gram);
            if (it != rc.end())
                matched += std::min(count, it->second);
        }
        s.matches[n - 1] = matched;
        s.totals[n - 1] = hyp.size() >= n ? hyp.size() - n + 1 : 0;
    }
    return s;
}

double bleu_from_stats(const BleuStats& s, BleuSmoothing smoothing)
{
    if (s.hyp_len == 0)
        return 0.0;
    double log_sum = 0;
    double smooth = 1.0;
    for (int n = 0; n < 4; ++n) {
        if (s.totals[n] == 0)
            return 0.0;
        double p;
        if (s.matches[n] == 0) {
            if (smoothing == BleuSmoothing::None)
                return 0.0;
            smooth *= 2.0;
            p = 1.0 / (smooth * static_cast<double>(s.totals[n]));
        } else {
            p = static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]);
        }
        log_sum += std::log(p);
    }
    const double c = static_cast<double>(s.hyp_len);
    const double r = static_cast<double>(s.ref_len);
    const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    const double score = 100.0 * bp * std::exp(log_sum / 4.0);
    return std::clamp(score, 0.0, 100.0);
}

double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& pairs, TokenizerMode mode,
                   BleuSmoothing smoothing)
{
    if (pairs.empty())
        throw InvalidArgument("corpus_bleu needs at least one segment");
    BleuStats total;
    for (const auto& [hyp, ref] : pairs)
        total += segment_stats(hyp, ref, mode);
    return bleu_from_stats(total, smoothing);
}

std::optional<MatchMethod> parse_match_method(std::string_view s) noexcept
{
    if (s == "optimal")
        return MatchMethod::Optimal;
    if (s == "greedy")
        return MatchMethod::Greedy;
    return std::nullopt;
}

std::string_view to_string(MatchMethod m) noexcept { return m == MatchMethod::Optimal ? "optimal" : "greedy"; }

double Matching::total_iou() const noexcept
{
    double t = 0;
    for (double v : ious)
        t += v;
    return t;
}

namespace {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// shortest augmenting paths with potentials. Returns the column per row.
std::vector<std::size_t> assign_rows(const std::vector<std::vector<double>>& cost)
{
    const std::size_t n = cost.size();
    const std::size_t m = cost.front().size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(m + 1, 0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j])
                    continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0)
            col[p[j] - 1] = j - 1;
    return col;
}

} // namespace

Matching match_boxes(const std::vector<BBox>& gold, const std::vector<BBox>& pred, MatchMethod method)
{
    Matching out;
    out.method = method;
    if (gold.empty() || pred.empty())
        return out;

    std::vector<std::vector<double>> m(gold.size(), std::vector<double>(pred.size()));
    for (std::size_t g = 0; g < gold.size(); ++g)
        for (std::size_t p = 0; p < pred.size(); ++p)
            m[g][p] = iou(gold[g], pred[p]);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (method == MatchMethod::Optimal) {
        const bool transpose = gold.size() > pred.size();
        const std::size_t rows = transpose ? pred.size() : gold.size();
        const std::size_t cols = transpose ? gold.size() : pred.size();
        std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                cost[r][c] = -(transpose ? m[c][r] : m[r][c]);
        const auto col = assign_rows(cost);
        for (std::size_t r = 0; r < rows; ++r)
            pairs.emplace_back(transpose ? col[r] : r, transpose ? r : col[r]);
    } else {
        std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
        for (std::size_t g = 0; g < gold.size(); ++g)
            for (std::size_t p = 0; p < pred.size(); ++p)
                if (m[g][p] > 0)
                    cand.emplace_back(m[g][p], g, p);
        std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
            if (std::get<0>(a) != std::get<0>(b))
                return std::get<0>(a) > std::get<0>(b);
            return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
        });
        std::vector<char> gused(gold.size(), 0), pused(pred.size(), 0);
        for (const auto& [val, g, p] : cand) {
            if (gused[g] || pused[p])
                continue;
            gused[g] = pused[p] = 1;
            pairs.emplace_back(g, p);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [g, p] : pairs) {
        if (m[g][p] <= 0)
            continue;
        out.pairs.emplace_back(g, p);
        out.ious.push_back(m[g][p]);
    }
    return out;
}

double grounding_iou(const std::vector<BBox>& gold, const std::vector<BBox>& pred, MatchMethod method)
{
    if (gold.empty())
        throw InvalidArgument("grounding_iou is undefined without gold boxes");
    return match_boxes(gold, pred, method).total_iou() / static_cast<double>(gold.size());
}

double evaluate_region(const std::vector<std::optional<PredictionRecord>>& preds,
                       const std::vector<std::string>& gold_translations, TokenizerMode mode, BleuSmoothing smoothing)
{
    if (preds.size() != gold_translations.size())
        throw InvalidArgument("region evaluation: " + std::to_string(preds.size()) + " predictions for " +
                              std::to_string(gold_translations.size()) + " queries");
    if (preds.empty())
        throw InvalidArgument("region evaluation: no queries");
    BleuStats total;
    for (std::size_t i = 0; i < preds.size(); ++i)
        total += segment_stats(preds[i] ? preds[i]->translation : std::string(), gold_translations[i], mode);
    return bleu_from_stats(total, smoothing);
}

FullImagePairing pair_fullimage(const std::vector<GoldBlock>& gold, const std::vector<PredictionRecord>& preds,
                                MatchMethod method)
{
    std::vector<BBox> gboxes;
    for (const auto& g : gold)
        gboxes.push_back(g.bbox);
    std::vector<BBox> pboxes;
    std::vector<std::size_t> pidx;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].bbox) {
            pboxes.push_back(*preds[i].bbox);
            pidx.push_back(i);
        }
    }
    FullImagePairing out;
    out.matching = match_boxes(gboxes, pboxes, method);
    out.hypotheses.assign(gold.size(), std::string());
    if (!out.matching.pairs.empty()) {
        for (const auto& [g, p] : out.matching.pairs)
            out.hypotheses[g] = preds[pidx[p]].translation;
    } else {
        // no box overlaps at all: fall back to reading-order pairing
        for (std::size_t i = 0; i < gold.size() && i < preds.size(); ++i)
            out.hypotheses[i] = preds[i].translation;
    }
    return out;
}

FullImageStats score_fullimage_image(const std::vector<GoldBlock>& gold, const std::vector<PredictionRecord>& preds,
                                     TokenizerMode mode, MatchMethod method)
{
    const auto pairing = pair_fullimage(gold, preds, method);
    FullImageStats st;
    st.gold_boxes = gold.size();
    st.iou_sum = pairing.matching.total_iou();
    for (std::size_t g = 0; g < gold.size(); ++g)
        st.bleu += segment_stats(pairing.hypotheses[g], gold[g].translation, mode);
    return st;
}

FullImageResult evaluate_fullimage(
    const std::vector<std::pair<std::vector<GoldBlock>, std::vector<PredictionRecord>>>& images, TokenizerMode mode,
    MatchMethod method, BleuSmoothing smoothing, Diagnostics* diag)
{
    FullImageStats total;
    std::size_t scored = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& [gold, preds] = images[i];
        if (gold.empty()) {
            if (diag)
                diag->warn("image " + std::to_string(i) + ": no gold blocks, skipped");
            continue;
        }
        const auto st = score_fullimage_image(gold, preds, mode, method);
        total.bleu += st.bleu;
        total.iou_sum += st.iou_sum;
        total.gold_boxes += st.gold_boxes;
        ++scored;
    }
    if (scored == 0)
        throw InvalidArgument("full-image evaluation: no image with gold blocks");
    return {bleu_from_stats(total.bleu, smoothing), total.iou_sum / static_cast<double>(total.gold_boxes)};
}

namespace {

void finish_overall(EvalReport& rep, Diagnostics* diag)
{
    double bleu_sum = 0, iou_sum = 0;
    std::size_t n = 0, n_iou = 0;
    for (auto c : kAllEvalCategories) {
        auto it = rep.per_category.find(c);
        if (it == rep.per_category.end()) {
            if (diag)
                diag->warn("category '" + std::string(to_string(c)) + "' has no images; left out of the overall mean");
            continue;
        }
        bleu_sum += it->second.bleu;
        ++n;
        if (it->second.iou) {
            iou_sum += *it->second.iou;
            ++n_iou;
        }
        rep.overall.n_images += it->second.n_images;
    }
    if (n > 0)
        rep.overall.bleu = bleu_sum / static_cast<double>(n);
    if (n_iou > 0)
        rep.overall.iou = iou_sum / static_cast<double>(n_iou);
}

} // namespace

EvalReport aggregate(const std::vector<RegionImageResult>& images, BleuSmoothing smoothing, Diagnostics* diag)
{
    std::map<EvalCategory, std::pair<BleuStats, std::size_t>> pooled;
    for (const auto& im : images) {
        auto& [stats, n] = pooled[im.category];
        stats += im.bleu;
        ++n;
    }
    EvalReport rep;
    for (const auto& [cat, p] : pooled)
        rep.per_category[cat] = MetricRow{bleu_from_stats(p.first, smoothing), std::nullopt, p.second};
    finish_overall(rep, diag);
    return rep;
}

EvalReport aggregate(const std::vector<FullImageImageResult>& images, BleuSmoothing smoothing, Diagnostics* diag)
{
    struct Acc {
        FullImageStats st;
        std::size_t n = 0;
    };
    std::map<EvalCategory, Acc> pooled;
    for (const auto& im : images) {
        auto& a = pooled[im.category];
        a.st.bleu += im.stats.bleu;
        a.st.iou_sum += im.stats.iou_sum;
        a.st.gold_boxes += im.stats.gold_boxes;
        ++a.n;
    }
    EvalReport rep;
    for (const auto& [cat, a] : pooled) {
        MetricRow row{bleu_from_stats(a.st.bleu, smoothing), std::nullopt, a.n};
        if (a.st.gold_boxes > 0)
            row.iou = a.st.iou_sum / static_cast<double>(a.st.gold_boxes);
        rep.per_category[cat] = row;
    }
    finish_overall(rep, diag);
    return rep;
}

} // namespace patimt
