#include "doctest.h"

#include "genboot/bootstrap/blocks.hpp"
#include "genboot/bootstrap/cbb.hpp"
#include "genboot/bootstrap/generative.hpp"
#include "genboot/bootstrap/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <omp.h>
#include <set>
#include <sstream>

using namespace genboot;
using namespace genboot::bootstrap;

namespace {

std::vector<double> iota_path(std::size_t n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.0);
    return v;
}

// Every count within 5 sd of n * p under Multinomial(n, p).
void check_uniform_counts(const std::vector<std::size_t>& counts, std::size_t n) {
    const double p = 1.0 / counts.size();
    const double mu = n * p;
    const double sd = std::sqrt(n * p * (1.0 - p));
    for (std::size_t k = 0; k < counts.size(); ++k) {
        INFO("cell " << k << " count " << counts[k] << " expected " << mu);
        CHECK(std::abs(static_cast<double>(counts[k]) - mu) <= 5.0 * sd);
    }
}

double mean_stat(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

// Independent quantile: sort, then interpolate at h = p * (m - 1).
double brute_quantile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double h = p * (x.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - lo) * (x[hi] - x[lo]);
}

gan::GeneratorArch toy_generator() {
    gan::GeneratorArch a;
    a.filters = {3, 1};
    a.dilations = {1, 2};
    a.noise_dim = 2;
    return a;
}

nn::NetworkParams random_params(const gan::Generator& g, Rng& rng) {
    return nn::init_network(g.params().specs(), {0.5}, rng);
}

}  // namespace

TEST_CASE("make_blocks enumerates every overlapping window") {
    const std::vector<double> path{1, 2, 3, 4};
    const auto blocks = make_blocks(path, 2);
    REQUIRE(blocks.count() == 3);
    CHECK(std::vector<double>(blocks.block(0).begin(), blocks.block(0).end()) == std::vector<double>{1, 2});
    CHECK(std::vector<double>(blocks.block(1).begin(), blocks.block(1).end()) == std::vector<double>{2, 3});
    CHECK(std::vector<double>(blocks.block(2).begin(), blocks.block(2).end()) == std::vector<double>{3, 4});
    CHECK(make_blocks(path, 3).count() == 2);
    CHECK(make_blocks(path, 1).count() == 4);
    CHECK_THROWS_AS(make_blocks(path, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_blocks(path, 0), std::invalid_argument);
    CHECK_THROWS_AS(blocks.block(3), std::out_of_range);

    // First elements of all blocks plus the tail of the last block give back the path.
    Rng rng = make_stream(1, {1});
    std::vector<double> y(57);
    for (auto& v : y) v = standard_normal(rng);
    for (std::size_t b : {1, 5, 56}) {
        const auto bs = make_blocks(y, b);
        CHECK(bs.count() == y.size() - b + 1);
        std::vector<double> rebuilt;
        for (std::size_t j = 0; j < bs.count(); ++j) rebuilt.push_back(bs.block(j)[0]);
        const auto last = bs.block(bs.count() - 1);
        rebuilt.insert(rebuilt.end(), last.begin() + 1, last.end());
        CHECK(rebuilt == y);
    }
}

TEST_CASE("training batches sample blocks without replacement") {
    const auto blocks = make_blocks(iota_path(30), 5);
    Rng rng = make_stream(2, {1});
    const auto all = training_batch_starts(blocks, blocks.count(), rng);
    std::vector<std::size_t> sorted(all);
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(blocks.count());
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted == expected);

    for (int trial = 0; trial < 200; ++trial) {
        const auto starts = training_batch_starts(blocks, 10, rng);
        CHECK(std::set<std::size_t>(starts.begin(), starts.end()).size() == 10);
    }

    const auto batch = training_batch(blocks, 4, rng);
    REQUIRE(batch.shape() == tensor::Shape{4, 5});
    for (std::size_t i = 0; i < 4; ++i) {
        // Path values equal their index, so each row is start .. start + 4.
        for (std::size_t t = 1; t < 5; ++t) CHECK(batch[i * 5 + t] == batch[i * 5] + t);
    }

    Rng a = make_stream(2, {2});
    Rng b = make_stream(2, {2});
    CHECK(training_batch(blocks, 7, a) == training_batch(blocks, 7, b));
    CHECK_THROWS_AS(training_batch_starts(blocks, blocks.count() + 1, rng), std::invalid_argument);
}

TEST_CASE("single-block batches are uniform over blocks") {
    const auto blocks = make_blocks(iota_path(20), 4);
    Rng rng = make_stream(3, {1});
    std::vector<std::size_t> counts(blocks.count(), 0);
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) ++counts[training_batch_starts(blocks, 1, rng)[0]];
    check_uniform_counts(counts, n);

    // Within larger batches every block is equally likely to be included.
    std::vector<std::size_t> included(blocks.count(), 0);
    const std::size_t batches = 20000;
    for (std::size_t i = 0; i < batches; ++i) {
        for (auto s : training_batch_starts(blocks, 6, rng)) ++included[s];
    }
    const double p = 6.0 / blocks.count();
    for (auto c : included) CHECK(std::abs(c - batches * p) <= 5.0 * std::sqrt(batches * p * (1.0 - p)));
}

TEST_CASE("gb_statistics conventions") {
    const auto flat = gb_statistics({1, 1, 1, 1});
    CHECK(flat.mean == 1.0);
    CHECK(flat.variance == 0.0);
    REQUIRE(flat.intervals.size() == 4);
    for (const auto& i : flat.intervals) {
        CHECK(i.lower == 1.0);
        CHECK(i.upper == 1.0);
    }

    const std::vector<double> half{0.5};
    const auto two = gb_statistics({0, 1}, half);
    CHECK(two.mean == 0.5);
    CHECK(two.variance == 0.25);
    CHECK(two.interval(0.5).lower == 0.25);
    CHECK(two.interval(0.5).upper == 0.75);

    std::vector<double> e(100);
    for (std::size_t i = 0; i < 100; ++i) e[i] = 0.37 * static_cast<double>((i * 37) % 100);
    const auto r = gb_statistics(e);
    for (double level : kDefaultLevels) {
        const double alpha = 1.0 - level;
        CHECK(r.interval(level).lower == doctest::Approx(brute_quantile(e, alpha / 2)).epsilon(1e-14));
        CHECK(r.interval(level).upper == doctest::Approx(brute_quantile(e, 1 - alpha / 2)).epsilon(1e-14));
        CHECK(r.interval(level).lower <= r.interval(level).upper);
    }
    // 90%: positions 4.95 and 94.05 of 0..99 (times 0.37).
    CHECK(r.interval(0.90).lower == doctest::Approx(0.37 * 4.95).epsilon(1e-14));
    CHECK(r.interval(0.90).upper == doctest::Approx(0.37 * 94.05).epsilon(1e-14));
    CHECK(r.estimates == e);

    CHECK(empirical_quantile(std::vector<double>{3.0}, 0.3) == 3.0);
    CHECK(empirical_quantile(std::vector<double>{1.0, 2.0, 4.0}, 0.75) == 3.0);
    CHECK(empirical_quantile(std::vector<double>{1.0, 2.0, 4.0}, 1.0) == 4.0);
    CHECK_THROWS_AS(gb_statistics({}), std::invalid_argument);
    const std::vector<double> bad_level{1.0};
    CHECK_THROWS_AS(gb_statistics({1, 2}, bad_level), std::invalid_argument);
    CHECK_THROWS_AS(r.interval(0.5), std::out_of_range);
}

TEST_CASE("gb_statistics is permutation invariant and affine equivariant") {
    Rng rng = make_stream(4, {1});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> e(2 + uniform_index(rng, 200));
        for (auto& v : e) v = standard_normal(rng);
        const auto base = gb_statistics(e);

        std::vector<double> shuffled(e);
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto perm = gb_statistics(shuffled);
        CHECK(perm.mean == doctest::Approx(base.mean).epsilon(1e-12));
        CHECK(perm.variance == doctest::Approx(base.variance).epsilon(1e-12));
        for (std::size_t k = 0; k < base.intervals.size(); ++k) {
            CHECK(perm.intervals[k].lower == base.intervals[k].lower);
            CHECK(perm.intervals[k].upper == base.intervals[k].upper);
        }

        const double a = uniform01(rng) < 0.5 ? -2.5 : 0.75;
        const double c = 3.0;
        std::vector<double> mapped(e);
        for (auto& v : mapped) v = a * v + c;
        const auto aff = gb_statistics(mapped);
        CHECK(aff.mean == doctest::Approx(a * base.mean + c).epsilon(1e-12));
        CHECK(aff.variance == doctest::Approx(a * a * base.variance).epsilon(1e-12));
        for (std::size_t k = 0; k < base.intervals.size(); ++k) {
            const double lo = a > 0 ? base.intervals[k].lower : base.intervals[k].upper;
            const double hi = a > 0 ? base.intervals[k].upper : base.intervals[k].lower;
            CHECK(aff.intervals[k].lower == doctest::Approx(a * lo + c).epsilon(1e-12));
            CHECK(aff.intervals[k].upper == doctest::Approx(a * hi + c).epsilon(1e-12));
        }
    }
}

TEST_CASE("bootstrap result CSV layouts") {
    const std::vector<double> levels{0.9};
    const auto r = gb_statistics({1.0, 2.0, 4.0}, levels);
    std::ostringstream est;
    write_estimates_csv(est, r, "run=a");
    CHECK(est.str() == "# run=a\nsample_index,estimate\n0,1\n1,2\n2,4\n");
    std::ostringstream sum;
    write_summary_csv(sum, r);
    CHECK(sum.str() == "level,lower,upper,mean,variance\n0.9,1.1,3.8,2.3333333333333335,1.5555555555555556\n");
}

TEST_CASE("CBB resamples are circular block concatenations") {
    const auto path = iota_path(10);
    CHECK(cbb_resample_from_starts(path, 10, std::vector<std::size_t>{0}) == path);
    CHECK(cbb_resample_from_starts(path, 4, std::vector<std::size_t>{8, 0, 5}) ==
          std::vector<double>{8, 9, 0, 1, 0, 1, 2, 3, 5, 6});
    CHECK_THROWS_AS(cbb_resample_from_starts(path, 4, std::vector<std::size_t>{1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(cbb_resample_from_starts(path, 4, std::vector<std::size_t>{1, 2, 10}), std::invalid_argument);

    Rng rng = make_stream(5, {1});
    CHECK(cbb_resample(std::vector<double>(13, 2.5), 4, rng) == std::vector<double>(13, 2.5));
    CHECK_THROWS_AS(cbb_resample(path, 11, rng), std::invalid_argument);
    CHECK_THROWS_AS(cbb_resample(path, 0, rng), std::invalid_argument);

    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t T = 1 + uniform_index(rng, 40);
        const std::size_t b = 1 + uniform_index(rng, T);
        const auto src = iota_path(T);
        const auto r = cbb_resample(src, b, rng);
        REQUIRE(r.size() == T);
        // Inside a block consecutive values advance by one modulo T.
        for (std::size_t t = 0; t < T; ++t) {
            CHECK(r[t] >= 0.0);
            CHECK(r[t] < static_cast<double>(T));
            if (t % b != 0) CHECK(r[t] == std::fmod(r[t - 1] + 1.0, static_cast<double>(T)));
        }
    }
}

TEST_CASE("every CBB slot is uniform over the original positions") {
    for (std::size_t b : {3, 1}) {
        const auto path = iota_path(8);
        Rng rng = make_stream(6, {b});
        const std::size_t n = 100000;
        std::vector<std::vector<std::size_t>> counts(8, std::vector<std::size_t>(8, 0));
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = cbb_resample(path, b, rng);
            for (std::size_t slot = 0; slot < 8; ++slot) ++counts[slot][static_cast<std::size_t>(r[slot])];
        }
        for (std::size_t slot = 0; slot < 8; ++slot) {
            INFO("b " << b << " slot " << slot);
            check_uniform_counts(counts[slot], n);
        }
    }
}

TEST_CASE("CBB bootstrap") {
    Rng rng = make_stream(7, {1});
    std::vector<double> y(500);
    for (auto& v : y) v = standard_normal(rng);

    const auto seven = cbb_bootstrap(y, 10, [](std::span<const double>) { return 7.0; }, 50, kDefaultLevels, {7, {1}});
    for (const auto& i : seven.intervals) {
        CHECK(i.lower == 7.0);
        CHECK(i.upper == 7.0);
    }

    // b = 1 is the iid bootstrap; the percentile interval for the mean has
    // half-width close to 1.96 / sqrt(T).
    const auto iid = cbb_bootstrap(y, 1, mean_stat, 2000, kDefaultLevels, {7, {2}});
    const double half = iid.interval(0.95).length() / 2.0;
    const double target = 1.96 / std::sqrt(500.0);
    CHECK(std::abs(half - target) <= 0.15 * target);
    CHECK(iid.estimates.size() == 2000);

    const auto again = cbb_bootstrap(y, 1, mean_stat, 2000, kDefaultLevels, {7, {2}});
    CHECK(again.estimates == iid.estimates);

    // Resample i depends only on stream i.
    Rng r5 = StreamFamily{7, {2}}.at(5);
    CHECK(iid.estimates[5] == mean_stat(cbb_resample(y, 1, r5)));

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto serial = cbb_bootstrap(y, 25, mean_stat, 300, kDefaultLevels, {9, {}});
    omp_set_num_threads(4);
    const auto parallel = cbb_bootstrap(y, 25, mean_stat, 300, kDefaultLevels, {9, {}});
    omp_set_num_threads(saved);
    CHECK(serial.estimates == parallel.estimates);

    const Statistic failing = [](std::span<const double> x) -> double {
        if (x[0] > 1.5) throw std::domain_error("too large");
        return x[0];
    };
    try {
        cbb_bootstrap(y, 5, failing, 200, kDefaultLevels, {7, {3}});
        FAIL("expected the statistic error to propagate");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("cbb resample") != std::string::npos);
        CHECK(what.find("too large") != std::string::npos);
    }
}

TEST_CASE("generative sampling") {
    const gan::Generator g(toy_generator());
    Rng rng = make_stream(8, {1});
    const auto params = random_params(g, rng);
    const StreamFamily streams{8, {4}};

    CHECK(gb_sample(g, params, 16, 0, streams).empty());

    // Any sampling length works, not just the training block length.
    const auto paths = gb_sample(g, params, 64, 37, streams);
    REQUIRE(paths.size() == 37);
    for (const auto& p : paths) CHECK(p.size() == 64);
    CHECK(gb_sample(g, params, 64, 37, streams) == paths);
    CHECK(paths[0] != paths[1]);

    // Path i is the generator applied to the noise block from stream i.
    for (std::size_t i : {0, 15, 16, 36}) {
        Rng r = streams.at(i);
        tensor::Array z({64 + g.receptive_field(), 2});
        fill_standard_normal(r, z.values());
        const auto direct = gan::generate(g, params, z);
        for (std::size_t t = 0; t < 64; ++t) {
            CHECK(std::abs(direct[t] - paths[i][t]) <= 1e-13 * std::max(1.0, std::abs(direct[t])));
        }
    }

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto serial = gb_sample(g, params, 20, 40, streams);
    omp_set_num_threads(3);
    const auto parallel = gb_sample(g, params, 20, 40, streams);
    omp_set_num_threads(saved);
    CHECK(serial == parallel);

    const auto result = gb_bootstrap(g, params, 64, 37, mean_stat, kDefaultLevels, streams);
    REQUIRE(result.estimates.size() == 37);
    CHECK(result.estimates[3] == mean_stat(paths[3]));
    CHECK_THROWS_AS(gb_sample(g, params, 0, 3, streams), std::invalid_argument);
}
