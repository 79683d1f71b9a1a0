#include <doctest.h>

#include "patimt/predparse.hpp"

using namespace patimt;

namespace {

const ImageDims kDims{200, 100};

} // namespace

TEST_CASE("box text in every surface form")
{
    const BBox want(50, 25, 100, 50);
    CHECK(*parse_box_text("Box([0.25, 0.25, 0.5, 0.5])", BoxDialect::PlainUnit, kDims) == want);
    CHECK(*parse_box_text("[0.25,0.25,0.50,0.50]", BoxDialect::PlainUnit, kDims) == want);
    CHECK(*parse_box_text("<box>[[250, 250, 500, 500]]</box>", BoxDialect::Absolute, kDims) == want);
    const auto det = *parse_box_text("<|det|>[250, 250, 500, 500]<|/det|>", BoxDialect::PlainUnit, kDims);
    CHECK(det.x1() == doctest::Approx(50.05).epsilon(0.001));
    CHECK(*parse_box_text("[50, 25, 100, 50]", BoxDialect::Absolute, kDims) == want);
    CHECK_FALSE(parse_box_text("[1, 2, 3]", BoxDialect::Absolute, kDims));
    CHECK_FALSE(parse_box_text("hello", BoxDialect::Absolute, kDims));
    CHECK_FALSE(parse_box_text("[0, 0, 5, 5]", BoxDialect::PlainUnit, kDims)); // far outside the unit square
}

TEST_CASE("plain region output")
{
    const auto r = parse_plain("Sale today <|translation|> \xE4\xBB\x8A\xE6\x97\xA5", BoxDialect::PlainUnit, kDims);
    REQUIRE(r.records.size() == 1);
    CHECK(*r.records[0].text == "Sale today");
    CHECK(r.records[0].translation == "\xE4\xBB\x8A\xE6\x97\xA5");
    CHECK_FALSE(r.records[0].bbox);
}

TEST_CASE("plain full-image output with boxes and junk lines")
{
    const std::string out = "Here you go:\n"
                            "A <|translation|> B Box([0.25, 0.25, 0.50, 0.50])\n"
                            "\n"
                            "C <|translation|> D <|translation|> E <|det|>[0, 0, 999, 999]<|/det|>\n"
                            "F <|translation|>   \n";
    const auto r = parse_plain(out, BoxDialect::PlainUnit, kDims, ParseStrictness::Salvage);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].translation == "B");
    CHECK(*r.records[0].bbox == BBox(50, 25, 100, 50));
    // split on the first separator only
    CHECK(r.records[1].translation == "D <|translation|> E");
    CHECK(r.records[1].bbox->x2() == doctest::Approx(200));
    CHECK(r.diagnostics.size() == 2);
}

TEST_CASE("strict plain parsing fails only when nothing parses")
{
    CHECK_THROWS_AS(parse_plain("no separator here", BoxDialect::Absolute, kDims, ParseStrictness::Strict),
                    PredictionParseError);
    CHECK(parse_plain("no separator here", BoxDialect::Absolute, kDims, ParseStrictness::Salvage).records.empty());
}

TEST_CASE("structured output, fenced and bare")
{
    const std::string obj = R"({"bbox_2d": [50, 25, 100, 50], "text_content": "A", "translation": "B"})";
    for (const std::string& s : {obj, "```json\n" + obj + "\n```", "[" + obj + "]", "\xEF\xBB\xBF" + obj}) {
        const auto r = parse_structured(s, BoxDialect::Absolute, kDims, ParseStrictness::Strict);
        REQUIRE(r.records.size() == 1);
        CHECK(*r.records[0].bbox == BBox(50, 25, 100, 50));
        CHECK(*r.records[0].text == "A");
        CHECK(r.records[0].translation == "B");
    }
    const auto tagged = parse_structured(R"({"bbox_2d": "<box>[[250, 250, 500, 500]]</box>", "translation": "x"})",
                                         BoxDialect::Boxed1000, kDims, ParseStrictness::Strict);
    CHECK(*tagged.records[0].bbox == BBox(50, 25, 100, 50));
}

TEST_CASE("strict structured parsing rejects malformation")
{
    auto strict = [](const std::string& s) {
        return parse_structured(s, BoxDialect::Absolute, kDims, ParseStrictness::Strict);
    };
    CHECK_THROWS_AS(strict(R"([{"bbox_2d": [1, 2, 3, 4], "translation": "a"},])"), PredictionParseError);
    CHECK_THROWS_AS(strict(R"([{"bbox_2d": [1, 2, 3, 4], "translation": "a"}, {"bbox_2d": [1, 2)"),
                    PredictionParseError);
    CHECK_THROWS_AS(strict(R"({"translation": "a"})"), PredictionParseError);
    CHECK_THROWS_AS(strict("Sure! " R"({"bbox_2d": [1, 2, 3, 4], "translation": "a"})"), PredictionParseError);
}

TEST_CASE("salvage repairs what it can and never throws")
{
    auto salvage = [](const std::string& s) {
        return parse_structured(s, BoxDialect::Absolute, kDims, ParseStrictness::Salvage);
    };
    auto r = salvage(R"(Sure! [{"bbox_2d": [1, 2, 3, 4], "translation": "a"},])");
    REQUIRE(r.records.size() == 1);
    CHECK_FALSE(r.diagnostics.empty());

    r = salvage(R"([{"bbox_2d": [1, 2, 3, 4], "translation": "a"}, {"bbox_2d": [5, 6, 7, 8], "translation": "b"}, {"bbox_2d": [1, 2)");
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[1].translation == "b");

    r = salvage(R"([{"bbox_2d": [1, 2, 3, 4], "translation": "a"}, {"text_content": "no box"}, 5])");
    CHECK(r.records.size() == 1);
    CHECK(r.diagnostics.size() >= 2);

    r = salvage(R"({"bbox_2d": [1, 2, 3, 4], "translation": "a"} trailing words)");
    CHECK(r.records.size() == 1);

    for (const std::string s : {"", "garbage", "[", "{\"a\":", "```", "[[[[", "\xFF\xFE", "]]]"}) {
        CHECK_NOTHROW(salvage(s));
        CHECK(salvage(s).records.empty());
    }
}

TEST_CASE("dispatch by format")
{
    const auto r = parse_prediction("A <|translation|> B [50, 25, 100, 50]", InstanceFormat::PlainText,
                                    BoxDialect::Absolute, kDims, ParseStrictness::Strict);
    REQUIRE(r.records.size() == 1);
    CHECK(*r.records[0].bbox == BBox(50, 25, 100, 50));
    CHECK(*r.records[0].text == "A");
    CHECK(parse_strictness("strict") == ParseStrictness::Strict);
}
