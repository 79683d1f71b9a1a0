#include <doctest.h>

#include "patimt/refine.hpp"

using namespace patimt;

namespace {

LayoutBlock text_block(BBox b, std::string t) { return {BlockKind::Text, b, std::move(t), std::nullopt}; }

} // namespace

TEST_CASE("covered lines are not omitted; image blocks count as cover")
{
    std::vector<OcrLine> lines{{"in", BBox(10, 10, 50, 30), {}},
                               {"half", BBox(90, 10, 130, 30), {}},
                               {"pic", BBox(300, 300, 340, 320), {}},
                               {"out", BBox(600, 600, 650, 620), {}}};
    std::vector<LayoutBlock> blocks{text_block(BBox(0, 0, 110, 40), "in"),
                                    {BlockKind::Image, BBox(290, 290, 400, 400), std::nullopt, std::nullopt}};
    // "half" is exactly 50% covered: kept at tau=0.5
    CHECK(omitted_indices(lines, blocks, 0.5) == std::vector<std::size_t>{3});
    CHECK(omitted_indices(lines, blocks, 0.6) == std::vector<std::size_t>{1, 3});
    CHECK(find_omitted(lines, blocks, 0.5).front().text == "out");
    CHECK(omitted_indices(lines, {}, 0.5).size() == 4);
}

TEST_CASE("refined blocks keep originals and add merged omissions in order")
{
    std::vector<OcrLine> lines{{"late", BBox(10, 900, 60, 920), {}},
                               {"top", BBox(10, 5, 60, 25), {}},
                               {"body", BBox(10, 100, 60, 120), {}}};
    std::vector<LayoutBlock> blocks{text_block(BBox(0, 90, 200, 130), "body")};
    const auto out = refine_blocks(lines, blocks, {});
    REQUIRE(out.size() == 3);
    CHECK(*out[0].text == "top");
    CHECK(out[1] == blocks[0]);
    CHECK(*out[2].text == "late");
}

TEST_CASE("adaptive processing picks the path by scenario")
{
    ImageAnnotation ann{"a", {1000, 1000}, ScenarioLabel::Poster, LangPair::EnZh,
                        {{"a", BBox(0, 0, 50, 20), {}}, {"b", BBox(60, 0, 100, 20), {}}}, {}};
    const auto easy = adaptive_process(ann, std::nullopt, {});
    REQUIRE(easy.size() == 1);
    CHECK(*easy[0].text == "a b");

    ann.scenario = ScenarioLabel::Document;
    CHECK_THROWS_AS(adaptive_process(ann, std::nullopt, {}), MissingBlocksError);
    std::vector<LayoutBlock> layout{text_block(BBox(0, 0, 55, 20), "a")};
    const auto hard = adaptive_process(ann, layout, {});
    REQUIRE(hard.size() == 2);
    CHECK(hard[0] == layout[0]);
    CHECK(*hard[1].text == "b");

    ann.scenario.reset();
    CHECK_THROWS_AS(adaptive_process(ann, layout, {}), InvalidArgument);
}

TEST_CASE("tau must lie in [0,1]")
{
    RefineParams p;
    p.coverage_tau = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
