#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "randchain/io.hpp"
#include "randchain/rng.hpp"

using namespace randchain;

namespace {

DetectionMatrix random_matrix(Rng& rng) {
    std::size_t n = 1 + rng.next_below(8);
    std::size_t s = 1 + rng.next_below(12);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n; ++j) names.push_back("det" + std::to_string(j));
    std::vector<SampleId> ids;
    for (std::size_t i = 0; i < s; ++i) ids.push_back("s" + std::to_string(i));
    std::vector<Verdict> cells(n * s);
    for (auto& v : cells) {
        v = rng.next_double() < 0.5 ? Verdict::Malicious : Verdict::Benign;
    }
    return DetectionMatrix(names, ids, cells);
}

}  // namespace

TEST_CASE("parse_matrix reads the documented layout") {
    DetectionMatrix m = parse_matrix("sample,detA,detB\ns1,1,0\n");
    CHECK(m.detector_count() == 2);
    CHECK(m.sample_count() == 1);
    CHECK(m.detector_names() == std::vector<std::string>{"detA", "detB"});
    CHECK(m.at(0, 0) == Verdict::Malicious);
    CHECK(m.at(0, 1) == Verdict::Benign);
    CHECK(detection_count(m, 0) == 1);
}

TEST_CASE("parse_matrix names the bad cell in format errors") {
    CHECK_THROWS_MATCHES(parse_matrix("sample,detA,detB\ns1,2,0\n"), FormatError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("row 1") &&
                             Catch::Matchers::ContainsSubstring("detA")));
}

TEST_CASE("parse_matrix rejects duplicates, ragged rows and empty bodies") {
    CHECK_THROWS_AS(parse_matrix("sample,a\ns1,1\ns1,0\n"), UniquenessError);
    CHECK_THROWS_AS(parse_matrix("sample,a,a\ns1,1,0\n"), UniquenessError);
    CHECK_THROWS_AS(parse_matrix("sample,a,b\ns1,1\n"), ShapeError);
    CHECK_THROWS_AS(parse_matrix("sample,a,b\n"), ShapeError);
    CHECK_THROWS_AS(parse_matrix(""), ShapeError);
    CHECK_THROWS_AS(parse_matrix("id,a\ns1,1\n"), ShapeError);
    CHECK_THROWS_AS(parse_matrix("sample\ns1\n"), ShapeError);
    CHECK_THROWS_AS(parse_matrix("sample,a\n,1\n"), FormatError);
    CHECK_THROWS_AS(parse_matrix("sample,a\ns 1,1\n"), FormatError);
}

TEST_CASE("matrix round-trips through emit and parse") {
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        DetectionMatrix m = random_matrix(rng);
        DetectionMatrix back = parse_matrix(emit_matrix(m));
        CHECK(back == m);
    }
}

TEST_CASE("every non-binary mutation of a verdict bit is rejected") {
    const std::string good = "sample,a,b,c\ns1,1,0,1\ns2,0,0,1\n";
    REQUIRE_NOTHROW(parse_matrix(good));
    const std::string mutants = "2345678 9xXoO.-+tf";
    for (std::size_t pos = 1; pos + 1 < good.size(); ++pos) {
        // verdict bits are exactly the single characters between separators
        bool is_bit_cell = (good[pos] == '0' || good[pos] == '1') &&
                           good[pos - 1] == ',' &&
                           (good[pos + 1] == ',' || good[pos + 1] == '\n');
        if (!is_bit_cell) continue;
        for (char m : mutants) {
            std::string bad = good;
            bad[pos] = m;
            CHECK_THROWS_AS(parse_matrix(bad), ParseError);
        }
    }
}

TEST_CASE("render_number uses 6 significant digits, correctly rounded") {
    // expected strings come from an independent decimal formatter
    CHECK(render_number(0.9512345) == "0.951234");
    CHECK(render_number(0.9512335) == "0.951233");
    CHECK(render_number(0.5) == "0.5");
    CHECK(render_number(1.0) == "1");
    CHECK(render_number(0.0) == "0");
    CHECK(render_number(0.123456789) == "0.123457");
    CHECK(render_number(2.0 / 3.0) == "0.666667");
    CHECK(render_number(1.0 / 3.0) == "0.333333");
    CHECK(render_number(11.0 / 12.0) == "0.916667");
    CHECK(render_number(5.0 / 6.0) == "0.833333");
    CHECK(render_number(0.9999995) == "1");
    CHECK(render_number(0.9999994999) == "0.999999");
}

TEST_CASE("curve reports follow the k,mean,std schema") {
    CurvePoints curve;
    curve.points.push_back({1, 0.9512345, 0.25});
    curve.points.push_back({2, 1.0, 0.0});
    CHECK(emit_curve(curve, ReportFormat::csv) ==
          "k,mean,std\n1,0.951234,0.25\n2,1,0\n");

    std::string json = emit_curve(curve, ReportFormat::json);
    CHECK(json.find("\"k\": 1") != std::string::npos);
    CHECK(json.find("\"mean\": 0.951234") != std::string::npos);
}

TEST_CASE("emitting the same record twice is byte-identical") {
    CurvePoints curve;
    curve.points.push_back({1, 1.0 / 3.0, 0.1239871});
    curve.points.push_back({2, 2.0 / 3.0, 0.0412345});
    CHECK(emit_curve(curve, ReportFormat::csv) == emit_curve(curve, ReportFormat::csv));
    CHECK(emit_curve(curve, ReportFormat::json) == emit_curve(curve, ReportFormat::json));
}

TEST_CASE("curve csv round-trips through its parser") {
    CurvePoints curve;
    curve.points.push_back({1, 0.1234567, 0.0});
    curve.points.push_back({2, 0.6666666666, 0.001234});
    curve.points.push_back({3, 1.0, 0.5});
    std::string once = emit_curve(curve, ReportFormat::csv);
    CurvePoints parsed = parse_curve_csv(once);
    REQUIRE(parsed.points.size() == 3);
    CHECK(emit_curve(parsed, ReportFormat::csv) == once);

    CHECK_THROWS_AS(parse_curve_csv("k,mean\n1,0.5\n"), ShapeError);
    CHECK_THROWS_AS(parse_curve_csv("k,mean,std\n1,zero,0\n"), FormatError);
    CHECK_THROWS_AS(parse_curve_csv("k,mean,std\n"), ShapeError);
}

TEST_CASE("transfer csv schema and round trip") {
    std::vector<TransferRow> rows;
    rows.push_back({"detA", "detB", 100, 47, 0.47});
    rows.push_back({"detA", "detC", 100, 0, 0.0});
    std::string csv = emit_transfer(rows, ReportFormat::csv);
    CHECK(csv ==
          "source,target,evasive_source,evasive_both,rate\n"
          "detA,detB,100,47,0.47\n"
          "detA,detC,100,0,0\n");
    std::vector<TransferRow> parsed = parse_transfer_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(emit_transfer(parsed, ReportFormat::csv) == csv);
}
