#include <doctest.h>

#include "patimt/error.hpp"
#include "patimt/scenario.hpp"

#include <cmath>
#include <random>

using namespace patimt;

namespace {

Embedding random_vec(std::mt19937_64& rng, std::size_t dim)
{
    std::normal_distribution<double> n;
    Embedding v(dim);
    for (auto& x : v)
        x = n(rng);
    return v;
}

double norm(const Embedding& v)
{
    double s = 0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_CASE("difficulty and evaluation category tables")
{
    using S = ScenarioLabel;
    using E = EvalCategory;
    const std::pair<S, E> cats[] = {{S::Ads, E::AdsBookPoster},  {S::Book, E::AdsBookPoster},
                                    {S::Poster, E::AdsBookPoster}, {S::Natural, E::NaturalStreet},
                                    {S::Street, E::NaturalStreet}, {S::HandWritten, E::HandWritten},
                                    {S::Infographic, E::Infographic}, {S::Document, E::Document},
                                    {S::Chart, E::ChartTable},     {S::Table, E::ChartTable}};
    for (auto [s, e] : cats) {
        CHECK(eval_category(s) == e);
        const bool hard = s == S::Document || s == S::Infographic;
        CHECK(difficulty(s) == (hard ? Difficulty::Hard : Difficulty::Easy));
        CHECK(parse_scenario(to_string(s)) == s);
    }
    for (auto e : kAllEvalCategories)
        CHECK(parse_eval_category(to_string(e)) == e);
    CHECK(to_string(S::HandWritten) == "hand-written");
    CHECK(to_string(E::AdsBookPoster) == "ads&book&poster");
    CHECK_FALSE(parse_scenario("comic"));
}

TEST_CASE("ensembling averages then renormalizes")
{
    LabelBank bank{{{"a", ScenarioLabel::Ads, {{1, 0}, {0, 1}}}, {"b", ScenarioLabel::Book, {{0, 2}}}}};
    const auto e = ensemble(bank);
    REQUIRE(e.size() == 2);
    CHECK(e[0].vector[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(e[0].vector[1] == doctest::Approx(std::sqrt(0.5)));
    CHECK(e[1].vector == Embedding{0, 1});
    CHECK_THROWS_AS(ensemble(LabelBank{}), InvalidArgument);
    CHECK_THROWS_AS(ensemble(LabelBank{{{"z", ScenarioLabel::Ads, {{1, 0}, {-1, 0}}}}}), InvalidArgument);
    CHECK_THROWS_AS(ensemble(LabelBank{{{"a", ScenarioLabel::Ads, {{1, 0}}}, {"b", ScenarioLabel::Book, {{1, 0, 0}}}}}),
                    InvalidArgument);
}

TEST_CASE("classification picks the nearest label's superclass and is scale invariant")
{
    std::mt19937_64 rng(21);
    LabelBank bank;
    for (auto s : kAllScenarios)
        bank.entries.push_back({std::string(to_string(s)), s, {random_vec(rng, 16), random_vec(rng, 16)}});
    const auto labels = ensemble(bank);
    for (const auto& l : labels)
        CHECK(norm(l.vector) == doctest::Approx(1.0));
    for (int i = 0; i < 100; ++i) {
        auto v = random_vec(rng, 16);
        auto v3 = v;
        for (auto& x : v3)
            x *= 3;
        CHECK(classify(v, labels) == classify(v3, labels));
    }
    // a label's own direction classifies as that label
    for (const auto& l : labels)
        CHECK(classify(l.vector, labels) == l.superclass);
    CHECK_THROWS_AS(classify(Embedding(16, 0.0), labels), InvalidArgument);
    CHECK_THROWS_AS(classify(Embedding(3, 1.0), labels), InvalidArgument);
}

TEST_CASE("ties go to the earlier label")
{
    std::vector<EnsembledLabel> labels{{"x", ScenarioLabel::Chart, {1, 0}}, {"y", ScenarioLabel::Table, {0, 1}}};
    CHECK(classify({1, 1}, labels) == ScenarioLabel::Chart);
}

TEST_CASE("default label configuration")
{
    const auto& cfg = default_label_config();
    CHECK(cfg.groups.size() == 10);
    CHECK(cfg.templates.size() == 9);
    for (const auto& t : cfg.templates)
        CHECK(t.find("{}") != std::string::npos);
    CHECK(apply_template("a photo of {}.", "a poster") == "a photo of a poster.");
}

TEST_CASE("embedding file parsing")
{
    const auto ef = parse_embedding_file(
        R"({"dim":2,"labels":[{"text":"ads","superclass":"ads","vectors":[[1,0]]}],"images":[{"image_id":"i","vector":[0.6,0.8]}]})");
    CHECK(ef.dim == 2);
    REQUIRE(ef.bank.entries.size() == 1);
    CHECK(ef.bank.entries[0].superclass == ScenarioLabel::Ads);
    REQUIRE(ef.images.size() == 1);
    CHECK(ef.images[0].vector[1] == 0.8);
    CHECK_THROWS(parse_embedding_file(
        R"({"dim":3,"labels":[{"text":"ads","superclass":"ads","vectors":[[1,0]]}],"images":[]})"));
    CHECK_THROWS(parse_embedding_file(
        R"({"dim":2,"labels":[{"text":"x","superclass":"comic","vectors":[[1,0]]}],"images":[]})"));
}
