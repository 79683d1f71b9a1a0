#include "patimt/cli.hpp"

#include "patimt/corpus.hpp"
#include "patimt/evaluate.hpp"
#include "patimt/pipeline.hpp"
#include "patimt/scenario.hpp"
#include "patimt/translator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <random>

namespace patimt::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string dump(const ordered_json& j)
{
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

template <class T>
void read_number(const json& obj, const char* key, T& dst)
{
    if (auto it = obj.find(key); it != obj.end()) {
        if (!it->is_number())
            throw InvalidArgument(std::string("config key '") + key + "' must be a number");
        dst = it->get<T>();
    }
}

} // namespace

void apply_config(ToolConfig& cfg, std::string_view json_bytes)
{
    json doc;
    try {
        doc = json::parse(json_bytes);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object())
        throw InvalidArgument("config must be a JSON object");
    if (auto it = doc.find("merge"); it != doc.end()) {
        read_number(*it, "x_ths", cfg.merge.x_ths);
        read_number(*it, "y_ths", cfg.merge.y_ths);
        read_number(*it, "row_tolerance", cfg.merge.row_tolerance);
        if (auto j = it->find("joiner"); j != it->end()) {
            if (!j->is_string())
                throw InvalidArgument("config key 'joiner' must be a string");
            cfg.merge.joiner = j->get<std::string>();
        }
    }
    if (auto it = doc.find("refine"); it != doc.end())
        read_number(*it, "coverage_tau", cfg.refine.coverage_tau);
    if (auto it = doc.find("filter"); it != doc.end()) {
        read_number(*it, "repetition_len", cfg.filter.repetition_len);
        read_number(*it, "coverage_threshold", cfg.filter.coverage_threshold);
    }
    auto enum_key = [&](const char* key, auto parse, auto& dst) {
        if (auto it = doc.find(key); it != doc.end()) {
            auto v = it->is_string() ? parse(it->template get<std::string>()) : std::nullopt;
            if (!v)
                throw InvalidArgument(std::string("config key '") + key + "' has an invalid value");
            dst = *v;
        }
    };
    enum_key("dialect", parse_box_dialect, cfg.dialect);
    enum_key("format", parse_instance_format, cfg.format);
    enum_key("strictness", parse_strictness, cfg.strictness);
    read_number(doc, "seed", cfg.seed);
    read_number(doc, "jobs", cfg.jobs);
    if (auto it = doc.find("translator"); it != doc.end()) {
        if (auto s = it->find("serial"); s != it->end()) {
            if (!s->is_boolean())
                throw InvalidArgument("config key 'translator.serial' must be a boolean");
            cfg.translator_serial = s->get<bool>();
        }
    }
    if (cfg.jobs < 1)
        throw InvalidArgument("config key 'jobs' must be >= 1");
    cfg.merge.validate();
    cfg.filter.validate();
    cfg.refine.merge = cfg.merge;
    cfg.refine.validate();
}

namespace {

struct Io {
    std::ostream& out;
    std::ostream& err;
};

void print_summary(Io& io, const ordered_json& j) { io.out << dump(j) << '\n'; }

void report_diagnostics(Io& io, const std::vector<std::string>& messages, std::size_t limit = 50)
{
    for (std::size_t i = 0; i < messages.size() && i < limit; ++i)
        io.err << "warning: " << messages[i] << '\n';
    if (messages.size() > limit)
        io.err << "warning: ... " << (messages.size() - limit) << " more\n";
}

ordered_json bbox_json(const BBox& b)
{
    auto num = [](double v) -> ordered_json {
        if (std::floor(v) == v && std::fabs(v) < 1e15)
            return static_cast<long long>(v);
        return v;
    };
    return ordered_json::array({num(b.x1()), num(b.y1()), num(b.x2()), num(b.y2())});
}

// ---- classify ------------------------------------------------------------

struct ClassifyOpts {
    std::string embeddings, in, out;
};

int cmd_classify(const ToolConfig& cfg, const ClassifyOpts& o, Io& io)
{
    const auto ef = parse_embedding_file(read_file(o.embeddings));
    const auto labels = ensemble(ef.bank);
    const auto predicted = pipeline::parallel_map(
        ef.images.size(), [&](std::size_t i) { return classify(ef.images[i].vector, labels); }, cfg.jobs);
    std::map<std::string, ScenarioLabel> by_id;
    for (std::size_t i = 0; i < ef.images.size(); ++i)
        by_id[ef.images[i].image_id] = predicted[i];

    ordered_json summary{{"command", "classify"}, {"images", ef.images.size()}};
    if (!o.in.empty()) {
        auto records = parse_lines_file(read_file(o.in));
        std::size_t labeled = 0;
        std::vector<std::string> warnings;
        for (auto& r : records) {
            if (auto it = by_id.find(r.image_id); it != by_id.end()) {
                r.scenario = it->second;
                ++labeled;
            } else {
                warnings.push_back("image '" + r.image_id + "' has no embedding; left unlabeled");
            }
        }
        report_diagnostics(io, warnings);
        write_file(o.out, serialize_lines_file(records));
        summary["records"] = records.size();
        summary["labeled"] = labeled;
    } else {
        std::string bytes;
        for (std::size_t i = 0; i < ef.images.size(); ++i) {
            const auto s = predicted[i];
            ordered_json j{{"image_id", ef.images[i].image_id},
                           {"scenario", std::string(to_string(s))},
                           {"difficulty", std::string(to_string(difficulty(s)))},
                           {"eval_category", std::string(to_string(eval_category(s)))}};
            bytes += dump(j) + '\n';
        }
        write_file(o.out, bytes);
    }
    std::map<std::string, std::size_t> hist;
    for (auto s : predicted)
        ++hist[std::string(to_string(s))];
    summary["scenarios"] = hist;
    summary["out"] = o.out;
    print_summary(io, summary);
    return kOk;
}

// ---- filter --------------------------------------------------------------

struct FilterOpts {
    std::string in, out, rejected;
};

int cmd_filter(const ToolConfig& cfg, const FilterOpts& o, Io& io)
{
    const auto records = parse_lines_file(read_file(o.in));
    const auto verdicts = pipeline::filter_corpus(records, cfg.filter, cfg.jobs);
    std::vector<LinesRecord> kept;
    std::string rejected;
    std::map<std::string, std::size_t> reasons;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (verdicts[i].keep) {
            kept.push_back(records[i]);
            continue;
        }
        ordered_json j{{"image_id", records[i].image_id}, {"reasons", ordered_json::array()}};
        for (auto r : verdicts[i].reasons) {
            j["reasons"].push_back(std::string(to_string(r)));
            ++reasons[std::string(to_string(r))];
        }
        rejected += dump(j) + '\n';
    }
    write_file(o.out, serialize_lines_file(kept));
    if (!o.rejected.empty())
        write_file(o.rejected, rejected);
    print_summary(io, {{"command", "filter"},
                       {"images", records.size()},
                       {"kept", kept.size()},
                       {"dropped", records.size() - kept.size()},
                       {"reasons", reasons},
                       {"out", o.out}});
    return kOk;
}

// ---- merge / refine --------------------------------------------------------

struct MergeOpts {
    std::string in, out;
};

std::size_t count_blocks(const std::vector<BlocksRecord>& rs)
{
    std::size_t n = 0;
    for (const auto& r : rs)
        n += r.blocks.size();
    return n;
}

int cmd_merge(const ToolConfig& cfg, const MergeOpts& o, Io& io)
{
    const auto records = parse_lines_file(read_file(o.in));
    const auto merged = pipeline::merge_corpus(records, cfg.merge, cfg.jobs);
    write_file(o.out, serialize_blocks_file(merged));
    std::size_t lines = 0;
    for (const auto& r : records)
        lines += r.lines.size();
    print_summary(io, {{"command", "merge"},
                       {"images", records.size()},
                       {"lines", lines},
                       {"blocks", count_blocks(merged)},
                       {"out", o.out}});
    return kOk;
}

struct RefineOpts {
    std::string lines, blocks, out;
};

int cmd_refine(const ToolConfig& cfg, const RefineOpts& o, Io& io)
{
    const auto records = parse_lines_file(read_file(o.lines));
    std::map<std::string, std::vector<LayoutBlock>> layout;
    Diagnostics diag;
    if (!o.blocks.empty())
        for (auto& b : parse_blocks_file(read_file(o.blocks), &diag))
            layout.emplace(b.image_id, std::move(b.blocks));
    report_diagnostics(io, diag.messages);
    RefineParams p = cfg.refine;
    p.merge = cfg.merge;
    const auto refined = pipeline::refine_corpus(records, layout, p, cfg.jobs);
    write_file(o.out, serialize_blocks_file(refined));
    std::size_t hard = 0;
    for (const auto& r : records)
        if (r.scenario && difficulty(*r.scenario) == Difficulty::Hard)
            ++hard;
    print_summary(io, {{"command", "refine"},
                       {"images", records.size()},
                       {"hard", hard},
                       {"easy", records.size() - hard},
                       {"blocks", count_blocks(refined)},
                       {"out", o.out}});
    return kOk;
}

// ---- build-instructions ----------------------------------------------------

struct BuildOpts {
    std::string in, out, questions, translator, lang_pair = "EN-ZH", blocks_out;
};

int cmd_build(const ToolConfig& cfg, const BuildOpts& o, Io& io)
{
    Diagnostics diag;
    auto records = parse_blocks_file(read_file(o.in), &diag);
    const QuestionPool pool = o.questions.empty() ? default_question_pool() : parse_question_pool(read_file(o.questions));
    const auto default_pair = parse_lang_pair(o.lang_pair);
    if (!default_pair)
        throw InvalidArgument("--lang-pair must be EN-ZH or ZH-EN");

    std::size_t translation_errors = 0;
    if (!o.translator.empty()) {
        auto translator = make_translator(o.translator);
        auto translate_one = [&](std::size_t i) {
            return translate_blocks(records[i].blocks, *translator, records[i].lang_pair.value_or(*default_pair));
        };
        auto outcomes = translator->concurrent() && !cfg.translator_serial ? pipeline::parallel_map(records.size(), translate_one, cfg.jobs)
                                                 : pipeline::serial_map(records.size(), translate_one);
        for (std::size_t i = 0; i < records.size(); ++i) {
            records[i].blocks = std::move(outcomes[i].blocks);
            for (auto& e : outcomes[i].errors) {
                diag.warn("image '" + records[i].image_id + "' " + e);
                ++translation_errors;
            }
        }
        if (!o.blocks_out.empty())
            write_file(o.blocks_out, serialize_blocks_file(records));
    }

    std::vector<ImageAnnotation> corpus;
    corpus.reserve(records.size());
    for (const auto& r : records)
        corpus.push_back({r.image_id, r.dims, r.scenario, r.lang_pair.value_or(*default_pair), {}, r.blocks});
    const pipeline::InstructionOptions opt{cfg.format, cfg.dialect, cfg.seed};
    const auto instances = pipeline::build_corpus_instances(corpus, pool, opt, cfg.jobs, &diag);
    std::string bytes;
    std::size_t region = 0;
    for (const auto& inst : instances) {
        bytes += serialize_instance(inst) + '\n';
        if (inst.task == TaskKind::Region)
            ++region;
    }
    write_file(o.out, bytes);
    ordered_json meta{{"seed", cfg.seed},
                      {"dialect", std::string(to_string(cfg.dialect))},
                      {"format", std::string(to_string(cfg.format))},
                      {"questions", o.questions.empty() ? "built-in" : o.questions},
                      {"images", records.size()},
                      {"instances", instances.size()}};
    write_file(o.out + ".meta.json", meta.dump(2) + "\n");
    report_diagnostics(io, diag.messages);
    print_summary(io, {{"command", "build-instructions"},
                       {"images", records.size()},
                       {"region_instances", region},
                       {"fullimage_instances", instances.size() - region},
                       {"translation_errors", translation_errors},
                       {"seed", cfg.seed},
                       {"out", o.out}});
    return kOk;
}

// ---- parse-predictions -----------------------------------------------------

struct ParsePredOpts {
    std::string gold, pred, out;
};

pipeline::EvaluationOptions eval_options(const ToolConfig& cfg, bool dialect_set, bool format_set)
{
    pipeline::EvaluationOptions opt;
    opt.strictness = cfg.strictness;
    if (dialect_set)
        opt.dialect_override = cfg.dialect;
    if (format_set)
        opt.format_override = cfg.format;
    return opt;
}

int cmd_parse_predictions(const ToolConfig& cfg, const ParsePredOpts& o, const pipeline::EvaluationOptions& opt,
                          Io& io)
{
    const auto instances = parse_instances_file(read_file(o.gold));
    const auto preds = pipeline::parse_prediction_file(read_file(o.pred));
    Diagnostics diag;
    const auto aligned = pipeline::align_and_parse(instances, preds, opt, cfg.jobs, &diag);
    std::string bytes;
    std::size_t n_records = 0, answered = 0;
    for (const auto& a : aligned) {
        ordered_json j{{"id", a.instance->id},
                       {"image_id", a.instance->image_id},
                       {"task", std::string(to_string(a.instance->task))},
                       {"records", ordered_json::array()}};
        for (const auto& r : a.parsed.records) {
            ordered_json rec;
            rec["bbox"] = r.bbox ? bbox_json(*r.bbox) : ordered_json(nullptr);
            rec["text"] = r.text ? ordered_json(*r.text) : ordered_json(nullptr);
            rec["translation"] = r.translation;
            j["records"].push_back(std::move(rec));
        }
        j["diagnostics"] = a.parsed.diagnostics;
        bytes += dump(j) + '\n';
        n_records += a.parsed.records.size();
        if (a.entry)
            ++answered;
    }
    write_file(o.out, bytes);
    report_diagnostics(io, diag.messages);
    print_summary(io, {{"command", "parse-predictions"},
                       {"instances", instances.size()},
                       {"answered", answered},
                       {"records", n_records},
                       {"strictness", std::string(to_string(opt.strictness))},
                       {"out", o.out}});
    return kOk;
}

// ---- evaluate -----------------------------------------------------------------

struct EvaluateOpts {
    std::string gold, pred, report, diagnostics, matching = "optimal", smoothing = "none", external_scorer;
};

ordered_json row_json(const MetricRow& r)
{
    ordered_json j{{"bleu", r.bleu}};
    if (r.iou)
        j["iou"] = *r.iou;
    j["n_images"] = r.n_images;
    return j;
}

// Pipes (hypothesis, reference) pairs as JSON lines into `command` and reads
// a single number from its standard output.
double run_external_scorer(const std::string& command, const std::vector<std::pair<std::string, std::string>>& pairs)
{
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("patimt_pairs_" + std::to_string(std::random_device{}()) + ".jsonl");
    std::string bytes;
    for (const auto& [h, r] : pairs)
        bytes += dump(ordered_json{{"hypothesis", h}, {"reference", r}}) + '\n';
    write_file(tmp.string(), bytes);
    const std::string full = command + " < '" + tmp.string() + "'";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) {
        std::filesystem::remove(tmp);
        throw Error("cannot start external scorer");
    }
    std::string result;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe))
        result += buf;
    const int status = ::pclose(pipe);
    std::filesystem::remove(tmp);
    if (status != 0)
        throw Error("external scorer exited with status " + std::to_string(status));
    try {
        std::size_t used = 0;
        const double v = std::stod(result, &used);
        return v;
    } catch (const std::exception&) {
        throw Error("external scorer printed no number: '" + result + "'");
    }
}

int cmd_evaluate(const ToolConfig& cfg, const EvaluateOpts& o, pipeline::EvaluationOptions opt, Io& io)
{
    opt.matching = *parse_match_method(o.matching);
    opt.smoothing = o.smoothing == "exp" ? BleuSmoothing::Exp : BleuSmoothing::None;
    const auto instances = parse_instances_file(read_file(o.gold));
    const auto preds = pipeline::parse_prediction_file(read_file(o.pred));
    const auto ev = pipeline::evaluate_corpus(instances, preds, opt, cfg.jobs);
    report_diagnostics(io, ev.warnings);

    ordered_json report;
    ordered_json per_cat = ordered_json::object();
    for (auto c : kAllEvalCategories) {
        ordered_json row = ordered_json::object();
        if (ev.region && ev.region->per_category.count(c))
            row["region"] = row_json(ev.region->per_category.at(c));
        if (ev.fullimage && ev.fullimage->per_category.count(c))
            row["full_image"] = row_json(ev.fullimage->per_category.at(c));
        if (!row.empty())
            per_cat[std::string(to_string(c))] = std::move(row);
    }
    report["per_category"] = std::move(per_cat);
    ordered_json overall = ordered_json::object();
    if (ev.region)
        overall["region"] = row_json(ev.region->overall);
    if (ev.fullimage)
        overall["full_image"] = row_json(ev.fullimage->overall);
    report["overall"] = std::move(overall);
    report["config"] = {{"matching", o.matching},
                        {"smoothing", o.smoothing},
                        {"strictness", std::string(to_string(opt.strictness))},
                        {"tokenizer", "cjk for Chinese targets, latin otherwise"},
                        {"instances", instances.size()},
                        {"predictions", preds.size()}};

    if (!o.external_scorer.empty()) {
        Diagnostics d;
        const auto aligned = pipeline::align_and_parse(instances, preds, opt, cfg.jobs, &d);
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& a : aligned) {
            const auto& inst = *a.instance;
            if (inst.task == TaskKind::Region) {
                pairs.emplace_back(a.parsed.records.empty() ? "" : a.parsed.records.front().translation,
                                   inst.gold.front().translation);
            } else {
                std::vector<GoldBlock> gold;
                for (const auto& g : inst.gold)
                    gold.push_back({g.bbox, g.translation});
                const auto pairing = pair_fullimage(gold, a.parsed.records, opt.matching);
                for (std::size_t g = 0; g < gold.size(); ++g)
                    pairs.emplace_back(pairing.hypotheses[g], gold[g].translation);
            }
        }
        report["external"] = {{"command", o.external_scorer}, {"score", run_external_scorer(o.external_scorer, pairs)}};
    }

    write_file(o.report, report.dump(2) + "\n");
    if (!o.diagnostics.empty()) {
        std::string bytes;
        for (const auto& d : ev.images) {
            ordered_json j{{"image_id", d.image_id}, {"category", std::string(to_string(d.category))}};
            j["region_queries"] = d.region_queries;
            j["region_bleu"] = d.region_bleu ? ordered_json(*d.region_bleu) : ordered_json(nullptr);
            j["fullimage_bleu"] = d.fullimage_bleu ? ordered_json(*d.fullimage_bleu) : ordered_json(nullptr);
            j["iou"] = d.iou ? ordered_json(*d.iou) : ordered_json(nullptr);
            j["messages"] = d.messages;
            bytes += dump(j) + '\n';
        }
        write_file(o.diagnostics, bytes);
    }

    ordered_json summary{{"command", "evaluate"}, {"images", ev.images.size()}};
    if (ev.region)
        summary["region_bleu"] = ev.region->overall.bleu;
    if (ev.fullimage) {
        summary["fullimage_bleu"] = ev.fullimage->overall.bleu;
        summary["iou"] = ev.fullimage->overall.iou ? ordered_json(*ev.fullimage->overall.iou) : ordered_json(nullptr);
    }
    summary["report"] = o.report;
    print_summary(io, summary);
    return kOk;
}

// ---- stats ------------------------------------------------------------------

struct StatsOpts {
    std::string lines, blocks, out;
};

int cmd_stats(const StatsOpts& o, Io& io)
{
    if (o.lines.empty() && o.blocks.empty())
        throw InvalidArgument("stats needs --lines and/or --blocks");
    Diagnostics diag;
    const auto lines = o.lines.empty() ? std::vector<LinesRecord>{} : parse_lines_file(read_file(o.lines));
    const auto blocks = o.blocks.empty() ? std::vector<BlocksRecord>{} : parse_blocks_file(read_file(o.blocks), &diag);
    const auto s = corpus_stats(join_annotations(lines, blocks), &diag);
    report_diagnostics(io, diag.messages, 5);
    ordered_json j{{"command", "stats"},
                   {"images", s.images},
                   {"ocr_boxes", s.ocr_boxes},
                   {"boxes", s.boxes},
                   {"src_words", s.src_words},
                   {"tgt_words", s.tgt_words}};
    if (!o.out.empty())
        write_file(o.out, dump(j) + "\n");
    print_summary(io, j);
    return kOk;
}

// ---- check ------------------------------------------------------------------

struct CheckOpts {
    std::string lines, blocks, embeddings, instances, pred;
    double norm_tolerance = 1e-4;
};

int cmd_check(const CheckOpts& o, Io& io)
{
    ordered_json summary{{"command", "check"}};
    bool ok = true;
    auto attempt = [&](const char* kind, const std::string& path, auto&& fn) {
        if (path.empty())
            return;
        try {
            summary[kind] = {{"path", path}, {"records", fn(read_file(path))}, {"valid", true}};
        } catch (const std::exception& e) {
            ok = false;
            summary[kind] = {{"path", path}, {"valid", false}, {"error", e.what()}};
            io.err << "error: " << kind << " '" << path << "': " << e.what() << '\n';
        }
    };
    attempt("lines", o.lines, [](const std::string& b) { return parse_lines_file(b).size(); });
    attempt("blocks", o.blocks, [](const std::string& b) { return parse_blocks_file(b).size(); });
    attempt("instances", o.instances, [](const std::string& b) { return parse_instances_file(b).size(); });
    attempt("predictions", o.pred, [](const std::string& b) { return pipeline::parse_prediction_file(b).size(); });
    attempt("embeddings", o.embeddings, [&](const std::string& b) {
        const auto ef = parse_embedding_file(b);
        auto check_norm = [&](const Embedding& v, const std::string& what) {
            double s = 0;
            for (double x : v)
                s += x * x;
            if (std::fabs(std::sqrt(s) - 1.0) > o.norm_tolerance)
                throw InvalidArgument(what + " is not unit norm (|v| = " + std::to_string(std::sqrt(s)) + ")");
        };
        for (const auto& e : ef.bank.entries)
            for (const auto& v : e.embeddings)
                check_norm(v, "label '" + e.label_text + "' vector");
        for (const auto& im : ef.images)
            check_norm(im.vector, "image '" + im.image_id + "' vector");
        ensemble(ef.bank);
        return ef.images.size();
    });
    summary["valid"] = ok;
    print_summary(io, summary);
    return ok ? kOk : kProcessingError;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Io io{out, err};
    CLI::App app{"Corpus construction and evaluation toolkit for position-aware text-image translation"};
    app.name("patimt");
    app.require_subcommand(1, 1);
    app.fallthrough();

    ToolConfig flags;
    std::string config_path, dialect, format, strictness;
    app.add_option("--config", config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
    auto* o_jobs = app.add_option("--jobs", flags.jobs, "worker threads for per-image work")->check(CLI::PositiveNumber);
    auto* o_seed = app.add_option("--seed", flags.seed, "seed for question sampling");
    auto* o_dialect = app.add_option("--dialect", dialect, "box dialect")
                          ->check(CLI::IsMember({"plain-unit", "boxed-1000", "det-999", "absolute"}));
    auto* o_format = app.add_option("--format", format, "instance format")->check(CLI::IsMember({"plain-text", "structured"}));
    auto* o_strict = app.add_option("--strictness", strictness, "prediction parsing mode")
                         ->check(CLI::IsMember({"strict", "salvage"}));

    // module thresholds are accepted by every subcommand
    auto* o_xths = app.add_option("--x-ths", flags.merge.x_ths, "horizontal merge slack (line heights)")
                       ->check(CLI::NonNegativeNumber);
    auto* o_yths = app.add_option("--y-ths", flags.merge.y_ths, "vertical merge slack (line heights)")
                       ->check(CLI::NonNegativeNumber);
    auto* o_rowtol = app.add_option("--row-tolerance", flags.merge.row_tolerance, "same-row band (box heights)")
                         ->check(CLI::NonNegativeNumber);
    auto* o_joiner = app.add_option("--joiner", flags.merge.joiner, "string placed between merged lines");
    auto* o_cjk = app.add_flag("--cjk", "join merged lines without spaces");
    auto* o_tau = app.add_option("--tau", flags.refine.coverage_tau, "coverage above which a line counts as covered")
                      ->check(CLI::Range(0.0, 1.0));
    auto* o_rep = app.add_option("--repetition-len", flags.filter.repetition_len, "repeated-character run length")
                      ->check(CLI::Range(2, 1 << 20));
    auto* o_cov = app.add_option("--coverage-threshold", flags.filter.coverage_threshold,
                                 "minimum text-box area fraction")
                      ->check(CLI::Range(0.0, 1.0));

    ClassifyOpts co;
    auto* classify = app.add_subcommand("classify", "assign scenarios from precomputed CLIP embeddings");
    classify->add_option("--embeddings", co.embeddings, "embedding interchange file")->required()->check(CLI::ExistingFile);
    classify->add_option("--in", co.in, "lines file to annotate with scenarios")->check(CLI::ExistingFile);
    classify->add_option("--out", co.out, "output file")->required();

    FilterOpts fo;
    auto* filter = app.add_subcommand("filter", "drop images failing the OCR exclusion rules");
    filter->add_option("--in", fo.in, "lines file")->required()->check(CLI::ExistingFile);
    filter->add_option("--out", fo.out, "kept lines file")->required();
    filter->add_option("--rejected", fo.rejected, "file listing dropped images and reasons");

    MergeOpts mo;
    auto* merge = app.add_subcommand("merge", "spatially merge OCR lines into text blocks");
    merge->add_option("--in", mo.in, "lines file")->required()->check(CLI::ExistingFile);
    merge->add_option("--out", mo.out, "blocks file")->required();

    RefineOpts ro;
    auto* refine = app.add_subcommand("refine", "adaptive processing: merge easy images, refine layout blocks of hard ones");
    refine->add_option("--lines,--in", ro.lines, "lines file (with scenarios)")->required()->check(CLI::ExistingFile);
    refine->add_option("--blocks", ro.blocks, "layout-engine blocks file")->check(CLI::ExistingFile);
    refine->add_option("--out", ro.out, "blocks file")->required();

    BuildOpts bo;
    auto* build = app.add_subcommand("build-instructions", "build region and full-image instruction instances");
    build->add_option("--in", bo.in, "blocks file")->required()->check(CLI::ExistingFile);
    build->add_option("--out", bo.out, "instances file")->required();
    build->add_option("--questions", bo.questions, "question pool JSON")->check(CLI::ExistingFile);
    build->add_option("--translator", bo.translator, "dict:PATH or http(s) endpoint URL");
    build->add_option("--lang-pair", bo.lang_pair, "default language pair")->check(CLI::IsMember({"EN-ZH", "ZH-EN"}));
    build->add_option("--blocks-out", bo.blocks_out, "write the translated blocks here");
    auto* o_tserial = build->add_flag("--translator-serial", "never call the translator concurrently");

    ParsePredOpts po;
    auto* parsep = app.add_subcommand("parse-predictions", "normalize model outputs into prediction records");
    parsep->add_option("--gold", po.gold, "instances file")->required()->check(CLI::ExistingFile);
    parsep->add_option("--pred", po.pred, "prediction file")->required()->check(CLI::ExistingFile);
    parsep->add_option("--out", po.out, "normalized records file")->required();

    EvaluateOpts eo;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions with BLEU and matched-box IoU");
    evaluate->add_option("--gold", eo.gold, "instances file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--pred", eo.pred, "prediction file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--report", eo.report, "report output")->required();
    evaluate->add_option("--diagnostics", eo.diagnostics, "per-image diagnostics output");
    evaluate->add_option("--matching", eo.matching, "box matching")->check(CLI::IsMember({"optimal", "greedy"}));
    evaluate->add_option("--smoothing", eo.smoothing, "BLEU smoothing")->check(CLI::IsMember({"none", "exp"}));
    evaluate->add_option("--external-scorer", eo.external_scorer,
                         "command reading JSON-lines pairs on stdin and printing one score");

    StatsOpts so;
    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("--lines", so.lines, "lines file")->check(CLI::ExistingFile);
    stats->add_option("--blocks", so.blocks, "blocks file")->check(CLI::ExistingFile);
    stats->add_option("--out", so.out, "write the statistics here too");

    CheckOpts ko;
    auto* check = app.add_subcommand("check", "validate interchange files");
    check->add_option("--lines", ko.lines, "lines file");
    check->add_option("--blocks", ko.blocks, "blocks file");
    check->add_option("--embeddings", ko.embeddings, "embedding file");
    check->add_option("--instances", ko.instances, "instances file");
    check->add_option("--pred", ko.pred, "prediction file");
    check->add_option("--norm-tolerance", ko.norm_tolerance, "allowed deviation from unit norm");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

    try {
        ToolConfig cfg;
        if (!config_path.empty())
            apply_config(cfg, read_file(config_path));
        if (o_jobs->count())
            cfg.jobs = flags.jobs;
        if (o_seed->count())
            cfg.seed = flags.seed;
        if (o_dialect->count())
            cfg.dialect = *parse_box_dialect(dialect);
        if (o_format->count())
            cfg.format = *parse_instance_format(format);
        if (o_strict->count())
            cfg.strictness = *parse_strictness(strictness);
        if (o_xths->count())
            cfg.merge.x_ths = flags.merge.x_ths;
        if (o_yths->count())
            cfg.merge.y_ths = flags.merge.y_ths;
        if (o_rowtol->count())
            cfg.merge.row_tolerance = flags.merge.row_tolerance;
        if (o_joiner->count())
            cfg.merge.joiner = flags.merge.joiner;
        if (o_cjk->count())
            cfg.merge.joiner = "";
        if (o_tau->count())
            cfg.refine.coverage_tau = flags.refine.coverage_tau;
        if (o_rep->count())
            cfg.filter.repetition_len = flags.filter.repetition_len;
        if (o_cov->count())
            cfg.filter.coverage_threshold = flags.filter.coverage_threshold;
        if (o_tserial->count())
            cfg.translator_serial = true;
        cfg.refine.merge = cfg.merge;
        cfg.merge.validate();
        cfg.filter.validate();
        cfg.refine.validate();

        const auto eval_opt = eval_options(cfg, o_dialect->count() > 0, o_format->count() > 0);
        if (*classify)
            return cmd_classify(cfg, co, io);
        if (*filter)
            return cmd_filter(cfg, fo, io);
        if (*merge)
            return cmd_merge(cfg, mo, io);
        if (*refine)
            return cmd_refine(cfg, ro, io);
        if (*build)
            return cmd_build(cfg, bo, io);
        if (*parsep)
            return cmd_parse_predictions(cfg, po, eval_opt, io);
        if (*evaluate)
            return cmd_evaluate(cfg, eo, eval_opt, io);
        if (*stats)
            return cmd_stats(so, io);
        if (*check)
            return cmd_check(ko, io);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kProcessingError;
    }
    return kUsageError;
}

} // namespace patimt::cli
