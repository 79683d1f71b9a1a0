// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include "oracles.hpp"
#include "synth.hpp"

#include "patimt/cli.hpp"
#include "patimt/evaluate.hpp"
#include "patimt/filters.hpp"
#include "patimt/instruct.hpp"
#include "patimt/predparse.hpp"
#include "patimt/refine.hpp"
#include "patimt/scenario.hpp"
#include "patimt/spatial_merge.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace patimt;
namespace fs = std::filesystem;
using Exact = boost::multiprecision::cpp_rational;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects the first failure message; later ones are counted.
struct Checker {
    Outcome out;
    int failures = 0;

    void expect(bool cond, const std::string& what)
    {
        if (cond)
            return;
        if (failures++ == 0)
            out.detail = what;
        out.ok = false;
    }
    Outcome done(const std::string& summary)
    {
        if (out.ok)
            out.detail = summary;
        else if (failures > 1)
            out.detail += " (+" + std::to_string(failures - 1) + " more)";
        return out;
    }
};

using Clock = std::chrono::steady_clock;

int report(const std::string& name, double limit_s, const std::function<Outcome()>& fn)
{
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_s > 0 && secs >= limit_s && o.ok)
        o = {false, "took " + std::to_string(secs) + " s, limit " + std::to_string(limit_s) + " s"};
    std::ostringstream t;
    t.precision(3);
    t << std::fixed << secs;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << name << "  [" << t.str() << " s]  " << o.detail << std::endl;
    return o.ok ? 0 : 1;
}

// -- geometry ---------------------------------------------------------------

Outcome geometry_oracle()
{
    Checker c;
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> d(0, 4 * 512);
    for (int i = 0; i < 1000; ++i) {
        // quarter-pixel grid keeps every value exactly representable
        auto q = [&] { return d(rng) / 4.0; };
        const BBox a(q(), q(), q(), q()), b(q(), q(), q(), q());
        const auto qa = oracle::to_qbox(a, 4), qb = oracle::to_qbox(b, 4);
        c.expect(iou(a, b) == boost::rational_cast<double>(oracle::iou(qa, qb)), "iou differs on pair " + std::to_string(i));
        c.expect(overlap_ratio(a, b) == boost::rational_cast<double>(oracle::overlap_ratio(qa, qb)),
                 "overlap_ratio differs on pair " + std::to_string(i));
        const auto u = union_box(a, b);
        const auto qu = oracle::union_box(qa, qb);
        c.expect(oracle::to_qbox(u, 4).x1 == qu.x1 && oracle::to_qbox(u, 4).y1 == qu.y1 &&
                     oracle::to_qbox(u, 4).x2 == qu.x2 && oracle::to_qbox(u, 4).y2 == qu.y2,
                 "union_box differs on pair " + std::to_string(i));
    }
    return c.done("1000 random pairs agree exactly with rational arithmetic");
}

// -- spatial merge ------------------------------------------------------------

Outcome merge_conformance()
{
    Checker c;
    std::mt19937_64 rng(777);
    MergeParams p; // x_ths 1.0, y_ths 0.5
    std::size_t boxes = 0;
    for (int trial = 0; trial < 200; ++trial) {
        synth::LayoutOptions opt;
        opt.x_ths = p.x_ths;
        opt.y_ths = p.y_ths;
        const auto layout = synth::planted_layout(rng, opt);
        boxes += layout.lines.size();
        const auto groups = group_boxes(layout.lines, p);
        std::set<std::vector<std::size_t>> got, want(layout.clusters.begin(), layout.clusters.end());
        for (auto g : groups) {
            std::sort(g.begin(), g.end());
            got.insert(g);
        }
        c.expect(got == want, "partition mismatch in layout " + std::to_string(trial));
        const auto blocks = spatial_merge(layout.lines, p);
        std::multiset<std::string> texts, want_texts(layout.texts.begin(), layout.texts.end());
        for (const auto& b : blocks)
            texts.insert(*b.text);
        c.expect(texts == want_texts, "merged text mismatch in layout " + std::to_string(trial));
    }
    return c.done("200 planted layouts (" + std::to_string(boxes) + " boxes) recovered exactly");
}

// -- refinement ---------------------------------------------------------------

Outcome refinement_conservation()
{
    Checker c;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> U(0, 1);
    std::size_t total_k = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // Layout blocks tile the left half; omitted lines live on the right.
        std::vector<LayoutBlock> blocks;
        std::vector<OcrLine> lines;
        const int n_blocks = 1 + static_cast<int>(rng() % 4);
        for (int b = 0; b < n_blocks; ++b) {
            const double y = 20 + b * 240;
            const BBox box(10, y, 480, y + 200);
            const bool text = rng() % 4 != 0;
            blocks.push_back({text ? BlockKind::Text : BlockKind::Table, box,
                              text ? std::optional<std::string>("block " + std::to_string(b)) : std::nullopt,
                              std::nullopt});
            const int m = static_cast<int>(rng() % 4);
            for (int k = 0; k < m; ++k) {
                const double ly = y + 10 + k * 45;
                lines.push_back({"covered" + std::to_string(b) + "_" + std::to_string(k),
                                 BBox(20 + U(rng) * 50, ly, 300 + U(rng) * 150, ly + 30), {}});
            }
        }
        const int k_omit = static_cast<int>(rng() % 6);
        std::vector<std::string> omitted_texts;
        for (int k = 0; k < k_omit; ++k) {
            const double y = 20 + k * 180 + U(rng) * 60;
            omitted_texts.push_back("lost" + std::to_string(trial) + "x" + std::to_string(k));
            lines.push_back({omitted_texts.back(), BBox(520 + U(rng) * 100, y, 800 + U(rng) * 150, y + 25 + U(rng) * 10), {}});
        }
        std::shuffle(lines.begin(), lines.end(), rng);
        total_k += static_cast<std::size_t>(k_omit);

        const RefineParams p;
        const auto omitted = find_omitted(lines, blocks, p.coverage_tau);
        std::set<std::string> got;
        for (const auto& l : omitted)
            got.insert(l.text);
        c.expect(got == std::set<std::string>(omitted_texts.begin(), omitted_texts.end()),
                 "find_omitted mismatch in case " + std::to_string(trial));

        const auto refined = refine_blocks(lines, blocks, p);
        BlocksRecord before{"r", {1000, 1000}, std::nullopt, std::nullopt, blocks};
        BlocksRecord after{"r", {1000, 1000}, std::nullopt, std::nullopt, refined};
        std::vector<LayoutBlock> appended;
        std::vector<bool> used(blocks.size(), false);
        for (const auto& rb : refined) {
            bool original = false;
            for (std::size_t i = 0; i < blocks.size() && !original; ++i)
                if (!used[i] && serialize_blocks_record({"r", {1000, 1000}, std::nullopt, std::nullopt, {rb}}) ==
                                    serialize_blocks_record({"r", {1000, 1000}, std::nullopt, std::nullopt, {blocks[i]}})) {
                    used[i] = true;
                    original = true;
                }
            if (!original)
                appended.push_back(rb);
        }
        c.expect(std::all_of(used.begin(), used.end(), [](bool u) { return u; }),
                 "original block missing or altered in case " + std::to_string(trial));
        for (const auto& t : omitted_texts) {
            int hits = 0;
            for (const auto& a : appended) {
                std::istringstream words(*a.text);
                for (std::string w; words >> w;)
                    hits += w == t;
            }
            c.expect(hits == 1, "omitted line '" + t + "' appears " + std::to_string(hits) + " times");
        }
        c.expect(refined.size() == blocks.size() + appended.size(), "unexpected block count");
    }
    return c.done("100 cases, " + std::to_string(total_k) + " planted omissions conserved");
}

// -- dialect round trip ---------------------------------------------------------

std::string random_text(std::mt19937_64& rng, bool cjk)
{
    static const char* const extras[] = {"\"quoted\"", "back\\slash", "{brace}", "a,b", "50%", "x:y", "(paren)", "\xC3\xA9t\xC3\xA9"};
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
        if (i)
            s += ' ';
        if (cjk)
            s += synth::cjk_phrase(rng, 2 + static_cast<int>(rng() % 3));
        else if (rng() % 4 == 0)
            s += extras[rng() % 8];
        else
            s += synth::word(rng);
    }
    return s;
}

Outcome dialect_round_trip()
{
    Checker c;
    std::mt19937_64 rng(99);
    const BoxDialect dialects[] = {BoxDialect::PlainUnit, BoxDialect::Boxed1000, BoxDialect::Det999,
                                   BoxDialect::Absolute};
    const InstanceFormat formats[] = {InstanceFormat::PlainText, InstanceFormat::Structured};
    std::size_t checked = 0;
    for (int a = 0; a < 500; ++a) {
        ImageAnnotation ann;
        ann.image_id = "rt" + std::to_string(a);
        ann.dims = {100 + static_cast<int>(rng() % 3900), 100 + static_cast<int>(rng() % 3900)};
        ann.scenario = kAllScenarios[rng() % 10];
        ann.lang_pair = rng() % 2 ? LangPair::EnZh : LangPair::ZhEn;
        const int nb = 1 + static_cast<int>(rng() % 5);
        std::uniform_real_distribution<double> fx(0, ann.dims.width), fy(0, ann.dims.height);
        for (int b = 0; b < nb; ++b) {
            const bool src_cjk = ann.lang_pair == LangPair::ZhEn;
            ann.blocks.push_back({BlockKind::Text, BBox(fx(rng), fy(rng), fx(rng), fy(rng)), random_text(rng, src_cjk),
                                  random_text(rng, !src_cjk)});
        }
        for (auto d : dialects) {
            const double unit = d == BoxDialect::PlainUnit ? 0.01 : 1.0;
            const CoordSpace space = dialect_space(d);
            for (auto f : formats) {
                const auto insts = build_instances(ann, default_question_pool(), f, d, 1);
                for (const auto& inst : insts) {
                    const auto parsed = parse_prediction(inst.answer, f, d, ann.dims, ParseStrictness::Strict);
                    const std::string where = ann.image_id + " " + std::string(to_string(d)) + "/" +
                                              std::string(to_string(f)) + " " + inst.id;
                    if (parsed.records.size() != inst.gold.size()) {
                        c.expect(false, where + ": record count");
                        continue;
                    }
                    for (std::size_t g = 0; g < inst.gold.size(); ++g) {
                        const auto& rec = parsed.records[g];
                        const auto& gold = inst.gold[g];
                        c.expect(rec.text && *rec.text == gold.text, where + ": text");
                        c.expect(rec.translation == gold.translation, where + ": translation");
                        if (inst.task == TaskKind::Region) {
                            // region answers carry no box; the question does
                            const auto pos = inst.question.find(box_token(gold.bbox, d, ann.dims));
                            c.expect(pos != std::string::npos, where + ": question box");
                            continue;
                        }
                        if (!rec.bbox) {
                            c.expect(false, where + ": box missing");
                            continue;
                        }
                        const auto pb = convert(*rec.bbox, space, ann.dims);
                        const auto gb = convert(gold.bbox, space, ann.dims);
                        const double err = std::max({std::fabs(pb.x1() - gb.x1()), std::fabs(pb.y1() - gb.y1()),
                                                     std::fabs(pb.x2() - gb.x2()), std::fabs(pb.y2() - gb.y2())});
                        c.expect(err <= unit + 1e-9, where + ": box error " + std::to_string(err));
                        ++checked;
                    }
                }
            }
        }
    }
    return c.done("500 annotations x 4 dialects x 2 formats; " + std::to_string(checked) +
                  " boxes within one coordinate unit");
}

// -- BLEU -------------------------------------------------------------------------

Outcome bleu_fixtures()
{
    Checker c;
    std::mt19937_64 rng(5);
    std::vector<std::pair<std::string, std::string>> corpus;
    for (int i = 0; i < 30; ++i) {
        std::string s;
        for (int w = 0, n = 4 + static_cast<int>(rng() % 10); w < n; ++w)
            s += (w ? " " : "") + synth::word(rng, 1);
        corpus.emplace_back(s, s);
    }
    c.expect(corpus_bleu(corpus, TokenizerMode::Latin) == 100.0, "identical corpus is not exactly 100");
    const double bp = corpus_bleu({{"a b c d", "a b c d e f"}}, TokenizerMode::Latin);
    c.expect(std::fabs(bp - 60.65) <= 0.01, "brevity fixture gave " + std::to_string(bp));
    c.expect(corpus_bleu({{"p q r s t", "a b c d e"}}, TokenizerMode::Latin) == 0.0, "zero-overlap fixture not 0");

    // a corpus with partial overlap, shuffled 50 times
    std::vector<std::pair<std::string, std::string>> mixed;
    for (int i = 0; i < 20; ++i) {
        std::string h, r;
        for (int w = 0; w < 8; ++w) {
            const auto word = synth::word(rng, 1);
            r += (w ? " " : "") + word;
            h += (w ? " " : "") + (rng() % 3 ? word : synth::word(rng, 1));
        }
        mixed.emplace_back(h, r);
    }
    const double base = corpus_bleu(mixed, TokenizerMode::Latin);
    for (int s = 0; s < 50; ++s) {
        std::shuffle(mixed.begin(), mixed.end(), rng);
        c.expect(corpus_bleu(mixed, TokenizerMode::Latin) == base, "shuffle changed the score");
    }
    std::ostringstream summary;
    summary << "100.0 / " << std::fixed;
    summary.precision(4);
    summary << bp << " / 0.0; 50 shuffles invariant";
    return c.done(summary.str());
}

// -- matching -----------------------------------------------------------------------

Exact exact_iou(const BBox& a, const BBox& b)
{
    const auto qa = oracle::to_qbox(a, 1), qb = oracle::to_qbox(b, 1);
    const auto r = oracle::iou(qa, qb);
    return Exact(r.numerator()) / Exact(r.denominator());
}

Exact best_by_enumeration(const std::vector<BBox>& gold, const std::vector<BBox>& pred)
{
    // try every injective partial map gold -> pred
    Exact best = 0;
    std::vector<bool> used(pred.size(), false);
    std::function<void(std::size_t, Exact)> rec = [&](std::size_t g, Exact acc) {
        if (g == gold.size()) {
            best = std::max(best, acc);
            return;
        }
        rec(g + 1, acc);
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (used[p])
                continue;
            used[p] = true;
            rec(g + 1, acc + exact_iou(gold[g], pred[p]));
            used[p] = false;
        }
    };
    rec(0, 0);
    return best;
}

Outcome matching_optimality()
{
    Checker c;
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> pos(0, 60), size(4, 30);
    int greedy_strictly_worse = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto boxes = [&](std::size_t n) {
            std::vector<BBox> v;
            for (std::size_t i = 0; i < n; ++i) {
                const int x = pos(rng), y = pos(rng);
                v.emplace_back(x, y, x + size(rng), y + size(rng));
            }
            return v;
        };
        const auto gold = boxes(rng() % 7), pred = boxes(rng() % 7);
        auto total = [&](const Matching& m) {
            Exact t = 0;
            for (auto [g, p] : m.pairs)
                t += exact_iou(gold[g], pred[p]);
            return t;
        };
        const auto opt = match_boxes(gold, pred, MatchMethod::Optimal);
        const auto greedy = match_boxes(gold, pred, MatchMethod::Greedy);
        const Exact best = best_by_enumeration(gold, pred);
        c.expect(total(opt) == best, "optimal total below the enumerated maximum on instance " + std::to_string(trial));
        c.expect(total(opt) >= total(greedy), "greedy beat optimal on instance " + std::to_string(trial));
        greedy_strictly_worse += total(greedy) < best;
    }
    return c.done("500 instances up to 6x6 equal the enumerated maximum (greedy lower on " +
                  std::to_string(greedy_strictly_worse) + ")");
}

// -- end to end ---------------------------------------------------------------------

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("patimt_accept_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int cli(std::vector<std::string> args, std::string* out = nullptr)
{
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out)
        *out = o.str();
    if (code != 0)
        std::cerr << e.str();
    return code;
}

Outcome end_to_end()
{
    Checker c;
    TempDir dir;
    const auto sc = synth::corpus(2024, 60);
    write_file(dir / "lines.jsonl", serialize_lines_file(sc.records));
    write_file(dir / "dict.json", nlohmann::json(sc.dictionary).dump());
    c.expect(cli({"filter", "--in", dir / "lines.jsonl", "--out", dir / "kept.jsonl"}) == 0, "filter failed");
    c.expect(cli({"merge", "--in", dir / "kept.jsonl", "--out", dir / "blocks.jsonl"}) == 0, "merge failed");
    double worst_iou = 1, worst_bleu = 100;
    for (const std::string dialect : {"plain-unit", "boxed-1000", "det-999", "absolute"}) {
        for (const std::string format : {"plain-text", "structured"}) {
            const std::string tag = dialect + "/" + format;
            const auto inst = dir / ("inst_" + dialect + "_" + format + ".jsonl");
            const auto pred = dir / ("pred_" + dialect + "_" + format + ".jsonl");
            const auto rep = dir / ("report_" + dialect + "_" + format + ".json");
            c.expect(cli({"--seed", "11", "--dialect", dialect, "--format", format, "build-instructions", "--in",
                          dir / "blocks.jsonl", "--translator", "dict:" + (dir / "dict.json"), "--out", inst}) == 0,
                     tag + ": build-instructions failed");
            // a perfect model answers with the gold answer
            std::string preds;
            for (const auto& i : parse_instances_file(read_file(inst)))
                preds += nlohmann::json{{"id", i.id},
                                        {"image_id", i.image_id},
                                        {"task", std::string(to_string(i.task))},
                                        {"output", i.answer}}
                             .dump() +
                         "\n";
            write_file(pred, preds);
            c.expect(cli({"parse-predictions", "--gold", inst, "--pred", pred, "--out", dir / "parsed.jsonl"}) == 0,
                     tag + ": parse-predictions failed");
            c.expect(cli({"evaluate", "--gold", inst, "--pred", pred, "--report", rep}) == 0, tag + ": evaluate failed");
            const auto report = nlohmann::json::parse(read_file(rep));
            const double rb = report["overall"]["region"]["bleu"].get<double>();
            const double fb = report["overall"]["full_image"]["bleu"].get<double>();
            const double iou = report["overall"]["full_image"]["iou"].get<double>();
            c.expect(rb == 100.0 && fb == 100.0, tag + ": BLEU " + std::to_string(rb) + "/" + std::to_string(fb));
            c.expect(iou >= 0.99, tag + ": IoU " + std::to_string(iou));
            c.expect(report["per_category"].size() == 6, tag + ": populated categories " +
                                                             std::to_string(report["per_category"].size()));
            for (const auto& [cat, row] : report["per_category"].items())
                c.expect(row.contains("region") && row.contains("full_image"), tag + ": incomplete row " + cat);
            worst_iou = std::min(worst_iou, iou);
            worst_bleu = std::min({worst_bleu, rb, fb});
        }
    }
    std::ostringstream s;
    s << "60 images x 8 dialect/format runs: BLEU " << worst_bleu << ", min IoU " << worst_iou << ", 6 categories";
    return c.done(s.str());
}

// -- stats ---------------------------------------------------------------------------

Outcome stats_law()
{
    Checker c;
    auto line = [](const char* t) { return OcrLine{t, BBox(0, 0, 10, 10), std::nullopt}; };
    auto block = [](const char* t, const char* tr) {
        return LayoutBlock{BlockKind::Text, BBox(0, 0, 10, 10), std::string(t), std::string(tr)};
    };
    std::vector<ImageAnnotation> fixture{
        // 3 OCR lines merged into 2 blocks; 5 source words, 4 target characters
        {"poster", {100, 100}, ScenarioLabel::Poster, LangPair::EnZh,
         {line("Big"), line("Sale"), line("Today only now")},
         {block("Big Sale", "\xE5\xA4\xA7\xE5\x8D\x96"), block("Today only now", "\xE4\xBB\x8A\xE5\xA4\xA9")}},
        // Chinese source: 6 ideographs; English target of 4 words
        {"doc", {100, 100}, ScenarioLabel::Document, LangPair::ZhEn,
         {line("\xE4\xBD\xA0\xE5\xA5\xBD"), line("\xE4\xB8\x96\xE7\x95\x8C\xE5\xA5\xBD\xE5\x95\x8A")},
         {block("\xE4\xBD\xA0\xE5\xA5\xBD\xE4\xB8\x96\xE7\x95\x8C\xE5\xA5\xBD\xE5\x95\x8A", "hello world, how nice"),
          {BlockKind::Image, BBox(0, 0, 5, 5), std::nullopt, std::nullopt}}},
        // mixed script: "iPhone" + 2 ideographs = 3 words; 1 line, 1 block
        {"ad", {100, 100}, ScenarioLabel::Ads, LangPair::ZhEn,
         {line("iPhone\xE6\x89\x8B\xE6\x9C\xBA")},
         {block("iPhone\xE6\x89\x8B\xE6\x9C\xBA", "iPhone phone")}},
    };
    const auto s = corpus_stats(fixture);
    const CorpusStats want{3, 6, 4, 5 + 6 + 3, 4 + 4 + 2};
    c.expect(s == want, "got {" + std::to_string(s.images) + ", " + std::to_string(s.ocr_boxes) + ", " +
                            std::to_string(s.boxes) + ", " + std::to_string(s.src_words) + ", " +
                            std::to_string(s.tgt_words) + "}");
    // additivity over images
    CorpusStats sum;
    for (const auto& a : fixture)
        sum += corpus_stats({a});
    c.expect(sum == s, "statistics are not additive");
    return c.done("{images 3, ocr_boxes 6, boxes 4, src_words 14, tgt_words 10}");
}

// -- filters ---------------------------------------------------------------------------

Outcome filter_rules()
{
    Checker c;
    const FilterParams p;
    const ImageDims dims{1000, 1000};
    auto reasons = [&](const std::vector<OcrLine>& lines) { return check_image(lines, dims, p).reasons; };

    c.expect(reasons({}) == std::vector<FilterReason>{FilterReason::EmptyOcr}, "empty OCR not rejected alone");

    const BBox big(0, 0, 500, 500);
    c.expect(reasons({{"aaa", big, {}}}) == std::vector<FilterReason>{FilterReason::Repetition}, "\"aaa\" run kept");
    c.expect(reasons({{"aa", big, {}}}).empty(), "\"aa\" rejected");
    c.expect(reasons({{"a a a", big, {}}}).empty(), "spaced run rejected");

    // 200 x 149 = 29,800 px^2 = 2.98% < 3%; 200 x 150 = 3% exactly is kept
    c.expect(reasons({{"ok", BBox(0, 0, 200, 149), {}}}) == std::vector<FilterReason>{FilterReason::LowCoverage},
             "2.98% coverage kept");
    c.expect(reasons({{"ok", BBox(0, 0, 200, 150), {}}}).empty(), "3.00% coverage rejected");
    // coverage sums every line box
    c.expect(reasons({{"ok", BBox(0, 0, 100, 150), {}}, {"ok", BBox(300, 0, 400, 150), {}}}).empty(),
             "summed coverage ignored");
    return c.done("empty OCR, \"aaa\" run and 2.98% < 3% coverage each rejected; boundaries kept");
}

// -- classification --------------------------------------------------------------------

Outcome classification_math()
{
    Checker c;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    LabelBank bank;
    const auto& cfg = default_label_config();
    for (const auto& g : cfg.groups)
        for (const auto& l : g.labels) {
            LabelEntry e{l, g.superclass, {}};
            for (std::size_t t = 0; t < cfg.templates.size(); ++t) {
                Embedding v(32);
                for (auto& x : v)
                    x = n(rng);
                e.embeddings.push_back(v);
            }
            bank.entries.push_back(std::move(e));
        }
    const auto labels = ensemble(bank);
    for (int i = 0; i < 100; ++i) {
        Embedding v(32);
        for (auto& x : v)
            x = n(rng);
        Embedding v3 = v;
        for (auto& x : v3)
            x *= 3;
        c.expect(classify(v, labels) == classify(v3, labels), "scale changed the label for vector " + std::to_string(i));
    }
    using S = ScenarioLabel;
    using E = EvalCategory;
    const std::tuple<S, Difficulty, E> table[] = {
        {S::Ads, Difficulty::Easy, E::AdsBookPoster},      {S::Book, Difficulty::Easy, E::AdsBookPoster},
        {S::Poster, Difficulty::Easy, E::AdsBookPoster},   {S::Natural, Difficulty::Easy, E::NaturalStreet},
        {S::Street, Difficulty::Easy, E::NaturalStreet},   {S::HandWritten, Difficulty::Easy, E::HandWritten},
        {S::Infographic, Difficulty::Hard, E::Infographic}, {S::Document, Difficulty::Hard, E::Document},
        {S::Chart, Difficulty::Easy, E::ChartTable},       {S::Table, Difficulty::Easy, E::ChartTable},
    };
    for (auto [s, d, e] : table) {
        c.expect(difficulty(s) == d, std::string("difficulty of ") + std::string(to_string(s)));
        c.expect(eval_category(s) == e, std::string("category of ") + std::string(to_string(s)));
    }
    return c.done("classify(v) == classify(3v) on 100 vectors; 10/10 difficulty and category mappings");
}

} // namespace

int main()
{
    int failed = 0;
    failed += report("geometry-oracle", 1.0, geometry_oracle);
    failed += report("algorithm1-conformance", 5.0, merge_conformance);
    failed += report("refinement-conservation", 0, refinement_conservation);
    failed += report("dialect-round-trip", 0, dialect_round_trip);
    failed += report("bleu-fixtures", 0, bleu_fixtures);
    failed += report("matching-optimality", 0, matching_optimality);
    failed += report("end-to-end-identity", 30.0, end_to_end);
    failed += report("stats-law", 0, stats_law);
    failed += report("filter-rules", 0, filter_rules);
    failed += report("classification-math", 0, classification_math);
    std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
              << std::endl;
    return failed;
}
