#include <catch_amalgamated.hpp>

#include <numeric>
#include <stdexcept>

#include "ttc/parallel.hpp"

using namespace ttc;

TEST_CASE("parallel_for visits every index once") {
    for (unsigned threads : {0u, 1u, 3u, 8u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no calls expected"); });
}

TEST_CASE("parallel_for rethrows") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("pairwise sum") {
    std::vector<double> v(1001);
    std::iota(v.begin(), v.end(), 0.0);
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    // more accurate than naive left-to-right accumulation
    std::vector<double> small(1 << 20, 0.1);
    CHECK(std::abs(pairwise_sum(small) - 0.1 * (1 << 20)) < 1e-6);
}
