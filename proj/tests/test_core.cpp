#include <catch2/catch_amalgamated.hpp>

#include "randchain/core.hpp"
#include "randchain/rng.hpp"

using namespace randchain;

namespace {

DetectionMatrix small_matrix() {
    // rows: s1 = [M,B,M,B], s2 = [B,B,B,B], s3 = [M,M,M,M]
    return DetectionMatrix(
        {"a", "b", "c", "d"}, {"s1", "s2", "s3"},
        {Verdict::Malicious, Verdict::Benign, Verdict::Malicious, Verdict::Benign,
         Verdict::Benign, Verdict::Benign, Verdict::Benign, Verdict::Benign,
         Verdict::Malicious, Verdict::Malicious, Verdict::Malicious, Verdict::Malicious});
}

}  // namespace

TEST_CASE("detection_count counts malicious verdicts per row") {
    DetectionMatrix m = small_matrix();
    CHECK(detection_count(m, 0) == 2);
    CHECK(detection_count(m, 1) == 0);
    CHECK(detection_count(m, 2) == 4);

    std::vector<std::string> names;
    std::vector<Verdict> all_on;
    for (int j = 0; j < 67; ++j) {
        names.push_back("det" + std::to_string(j));
        all_on.push_back(Verdict::Malicious);
    }
    DetectionMatrix full(names, {"s"}, all_on);
    CHECK(detection_count(full, 0) == 67);
}

TEST_CASE("detection_count rejects an out-of-range row") {
    DetectionMatrix m = small_matrix();
    CHECK_THROWS_AS(detection_count(m, 3), RangeError);
}

TEST_CASE("matrix construction enforces uniqueness and shape") {
    CHECK_THROWS_AS(DetectionMatrix({"a", "a"}, {"s1"},
                                    {Verdict::Benign, Verdict::Benign}),
                    UniquenessError);
    CHECK_THROWS_AS(DetectionMatrix({"a"}, {"s1", "s1"},
                                    {Verdict::Benign, Verdict::Benign}),
                    UniquenessError);
    CHECK_THROWS_AS(DetectionMatrix({}, {"s1"}, {}), ShapeError);
    CHECK_THROWS_AS(DetectionMatrix({"a"}, {}, {}), ShapeError);
    CHECK_THROWS_AS(DetectionMatrix({"a"}, {"s1"}, {}), ShapeError);
}

TEST_CASE("detector_score follows the logistic of the linear score") {
    FeatureSample zero{"s", {0.0}, true, {}};
    SyntheticDetector flat = make_detector("flat", {0.0}, 0.0);
    CHECK(detector_score(flat, zero) == 0.5);

    SyntheticDetector unit = make_detector("unit", {1.0}, 0.0);
    CHECK(detector_score(unit, zero) == 0.5);

    SyntheticDetector det = make_detector("d", {2.0, -1.0}, 0.5);
    FeatureSample ones{"s", {1.0, 1.0}, true, {}};
    // logistic(1.5), checked against an independent evaluation
    CHECK(detector_score(det, ones) == Catch::Approx(0.8175744761936437).epsilon(1e-12));
}

TEST_CASE("detector_score rejects dimension mismatches") {
    SyntheticDetector det = make_detector("d", {1.0, 2.0}, 0.0);
    FeatureSample s{"s", {1.0}, true, {}};
    CHECK_THROWS_AS(detector_score(det, s), DimensionError);
}

TEST_CASE("decisive features are exactly the non-zero weights") {
    SyntheticDetector det = make_detector("d", {0.0, 1.5, 0.0, -0.25, 0.0}, 1.0);
    CHECK(det.decisive_features == std::vector<std::size_t>{1, 3});
}

TEST_CASE("verdict is Malicious iff score exceeds 0.5") {
    Rng rng(20260811);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t d = 1 + rng.next_below(16);
        std::vector<double> weights(d);
        std::vector<double> features(d);
        for (std::size_t j = 0; j < d; ++j) {
            weights[j] = rng.normal();
            features[j] = rng.normal() * 2.0;
        }
        SyntheticDetector det = make_detector("d", weights, rng.normal());
        FeatureSample sample{"s", features, true, {}};
        bool malicious = detector_verdict(det, sample) == Verdict::Malicious;
        CHECK(malicious == (detector_score(det, sample) > 0.5));
    }
}

TEST_CASE("detection_count sums to the total malicious cells") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 1 + rng.next_below(10);
        std::size_t s = 1 + rng.next_below(10);
        std::vector<std::string> names;
        for (std::size_t j = 0; j < n; ++j) names.push_back("d" + std::to_string(j));
        std::vector<SampleId> ids;
        for (std::size_t i = 0; i < s; ++i) ids.push_back("s" + std::to_string(i));
        std::vector<Verdict> cells(n * s);
        std::size_t total = 0;
        for (auto& v : cells) {
            bool hit = rng.next_double() < 0.4;
            v = hit ? Verdict::Malicious : Verdict::Benign;
            if (hit) ++total;
        }
        DetectionMatrix m(names, ids, cells);
        std::size_t summed = 0;
        for (std::size_t i = 0; i < s; ++i) summed += detection_count(m, i);
        CHECK(summed == total);
    }
}
