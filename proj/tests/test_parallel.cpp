#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>

#include "qdotsim/parallel.hpp"

using namespace qdotsim;

TEST(Parallel, EveryIndexOnce) {
    for (int threads : {1, 2, 4, 16}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
        for (int h : hits) EXPECT_EQ(h, 1);
    }
}

TEST(Parallel, PropagatesException) {
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t i) {
                                  if (i == 37) throw NumericalError("boom");
                              }),
                 NumericalError);
}

TEST(Parallel, ThreadCountResolution) {
    EXPECT_EQ(resolve_thread_count(3), 3);
    EXPECT_THROW(resolve_thread_count(0), ValidationError);
    setenv("QDOTSIM_THREADS", "5", 1);
    EXPECT_EQ(resolve_thread_count(std::nullopt), 5);
    EXPECT_EQ(resolve_thread_count(2), 2);
    setenv("QDOTSIM_THREADS", "x", 1);
    EXPECT_THROW(resolve_thread_count(std::nullopt), ValidationError);
    unsetenv("QDOTSIM_THREADS");
    EXPECT_GE(resolve_thread_count(std::nullopt), 1);
}
