#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "randchain/chain.hpp"
#include "randchain/rng.hpp"

using namespace randchain;

TEST_CASE("select_subset returns k distinct indices in scan order") {
    Rng rng(99);
    std::vector<std::size_t> subset = select_subset(5, 5, rng);
    std::vector<std::size_t> sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("select_subset rejects bad k") {
    Rng rng(1);
    CHECK_THROWS_AS(select_subset(3, 4, rng), ConfigError);
    CHECK_THROWS_AS(select_subset(3, 0, rng), ConfigError);
}

TEST_CASE("select_subset is uniform over single draws") {
    // 67,000 draws of k=1 from n=67 with fresh derived seeds:
    // each index expected 1000 +/- 150 times.
    std::vector<int> counts(67, 0);
    for (uint64_t i = 0; i < 67000; ++i) {
        Rng rng = Rng::derive(4242, {i});
        std::vector<std::size_t> subset = select_subset(67, 1, rng);
        ++counts[subset[0]];
    }
    for (int c : counts) {
        CHECK(c >= 850);
        CHECK(c <= 1150);
    }
}

TEST_CASE("select_subset is deterministic for a fixed seed") {
    Rng a(77), b(77);
    CHECK(select_subset(20, 7, a) == select_subset(20, 7, b));
}

TEST_CASE("chain_scan short-circuits at the first malicious verdict") {
    std::vector<Verdict> row{Verdict::Benign, Verdict::Benign, Verdict::Malicious};

    std::vector<std::size_t> first_flags{2, 0, 1};
    ChainVerdict v = chain_scan(row, first_flags);
    CHECK(v.verdict == Verdict::Malicious);
    CHECK(v.scans_performed == 1);
    REQUIRE(v.flagging_detector.has_value());
    CHECK(*v.flagging_detector == 2);

    std::vector<Verdict> clean{Verdict::Benign, Verdict::Benign, Verdict::Benign};
    std::vector<std::size_t> all{1, 2, 0};
    ChainVerdict b = chain_scan(clean, all);
    CHECK(b.verdict == Verdict::Benign);
    CHECK(b.scans_performed == 3);
    CHECK_FALSE(b.flagging_detector.has_value());

    std::vector<std::size_t> misses{0, 1};
    ChainVerdict m = chain_scan(row, misses);
    CHECK(m.verdict == Verdict::Benign);
    CHECK(m.scans_performed == 2);
}

TEST_CASE("chain_scan rejects empty subsets and bad indices") {
    std::vector<Verdict> row{Verdict::Benign};
    CHECK_THROWS_AS(chain_scan(row, std::vector<std::size_t>{}), ConfigError);
    CHECK_THROWS_AS(chain_scan(row, std::vector<std::size_t>{1}), RangeError);
}

TEST_CASE("chain verdict equals the OR of subset members for every subset") {
    Rng rng(5150);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Verdict> row(6);
        for (auto& v : row) {
            v = rng.next_double() < 0.5 ? Verdict::Malicious : Verdict::Benign;
        }
        for (unsigned mask = 1; mask < 64; ++mask) {
            std::vector<std::size_t> subset;
            bool any = false;
            for (std::size_t j = 0; j < 6; ++j) {
                if (mask & (1u << j)) {
                    subset.push_back(j);
                    any = any || row[j] == Verdict::Malicious;
                }
            }
            ChainVerdict v = chain_scan(row, subset);
            CHECK((v.verdict == Verdict::Malicious) == any);
            CHECK(v.scans_performed >= 1);
            CHECK(v.scans_performed <= subset.size());
            CHECK((v.verdict == Verdict::Malicious) == v.flagging_detector.has_value());
        }
    }
}

TEST_CASE("adding a detector never turns a malicious chain verdict benign") {
    Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.next_below(8);
        std::vector<Verdict> row(n);
        for (auto& v : row) {
            v = rng.next_double() < 0.4 ? Verdict::Malicious : Verdict::Benign;
        }
        std::size_t k = 1 + rng.next_below(n - 1);
        std::vector<std::size_t> subset = select_subset(n, k, rng);
        ChainVerdict before = chain_scan(row, subset);
        std::vector<std::size_t> extended = subset;
        for (std::size_t extra = 0; extra < n; ++extra) {
            if (std::find(subset.begin(), subset.end(), extra) != subset.end()) continue;
            extended.push_back(extra);
            break;
        }
        ChainVerdict after = chain_scan(row, extended);
        if (before.verdict == Verdict::Malicious) {
            CHECK(after.verdict == Verdict::Malicious);
        }
    }
}

TEST_CASE("chain_scan_live matches precomputed verdicts and short-circuits") {
    // zero-weight detectors score exactly 0.5, which does not exceed the
    // strict > 0.5 threshold
    std::vector<SyntheticDetector> flat;
    for (int i = 0; i < 3; ++i) {
        flat.push_back(make_detector("flat" + std::to_string(i), {0.0, 0.0}, 0.0));
    }
    FeatureSample sample{"s", {1.0, -1.0}, true, {}};
    std::vector<std::size_t> subset{0, 1, 2};
    ChainVerdict v = chain_scan_live(sample, flat, subset);
    CHECK(v.verdict == Verdict::Benign);
    CHECK(v.scans_performed == 3);

    std::vector<SyntheticDetector> pool = flat;
    pool.push_back(make_detector("hot", {0.0, 0.0}, 10.0));
    std::vector<std::size_t> with_hot{1, 3, 0};
    ChainVerdict hot = chain_scan_live(sample, pool, with_hot);
    CHECK(hot.verdict == Verdict::Malicious);
    CHECK(hot.scans_performed == 2);
    CHECK(*hot.flagging_detector == 3);
}

TEST_CASE("permuting a live subset never changes the verdict") {
    std::vector<SyntheticDetector> pool;
    pool.push_back(make_detector("a", {1.0}, -2.0));
    pool.push_back(make_detector("b", {1.0}, 0.5));
    pool.push_back(make_detector("c", {-1.0}, 0.1));
    FeatureSample sample{"s", {1.0}, true, {}};

    std::vector<std::size_t> subset{0, 1, 2};
    Verdict reference = chain_scan_live(sample, pool, subset).verdict;
    std::sort(subset.begin(), subset.end());
    do {
        CHECK(chain_scan_live(sample, pool, subset).verdict == reference);
    } while (std::next_permutation(subset.begin(), subset.end()));
}

TEST_CASE("chain config validates its bounds") {
    ChainConfig ok{10, 3, 1};
    CHECK_NOTHROW(ok.validate());
    ChainConfig bad{3, 4, 1};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    ChainConfig zero{3, 0, 1};
    CHECK_THROWS_AS(zero.validate(), ConfigError);
}
