#include "seleqtl/data_model.hpp"
#include "seleqtl/error.hpp"
#include "seleqtl/pruning.hpp"

#include "../support/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace seleqtl;

TEST_CASE("standardize rejects a constant column") {
    Matrix raw(4, 2);
    raw << 1, 0.3, 1, 1.2, 1, -0.4, 1, 2.0;
    CHECK_THROWS_AS(standardize(raw), Error);
    try {
        standardize(raw);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConstantColumn);
    }
}

TEST_CASE("standardize leaves a standardized column unchanged") {
    Vector c(4);
    c << 1, -1, 2, -2;
    c /= c.norm();
    Matrix raw = c;
    CHECK((standardize(raw) - raw).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("standardize produces mean zero and unit norm columns") {
    Rng rng = make_stream(11, 0, StreamTag::Genotype);
    Matrix raw = testing::gaussian_matrix(30, 7, rng) * 3.0;
    raw.array() += 5.0;
    const Matrix X = standardize(raw);
    for (Index j = 0; j < X.cols(); ++j) {
        double mean = 0.0, ss = 0.0;
        for (Index i = 0; i < X.rows(); ++i) mean += X(i, j);
        mean /= static_cast<double>(X.rows());
        for (Index i = 0; i < X.rows(); ++i) ss += X(i, j) * X(i, j);
        CHECK(std::abs(mean) <= 1e-12);
        CHECK(std::abs(std::sqrt(ss) - 1.0) <= 1e-12);
        CHECK(oracle::pearson(X.col(j), raw.col(j)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK((standardize(X) - X).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("make_panel drops constant columns") {
    Matrix raw(5, 3);
    raw << 0, 1, 2, 1, 1, 0, 2, 1, 1, 0, 1, 2, 1, 1, 0;
    std::vector<std::string> dropped;
    GenePanel p = make_panel("g", raw, Vector::Ones(5), {"a", "b", "c"}, &dropped);
    CHECK(p.variant_count() == 2);
    CHECK(dropped == std::vector<std::string>{"b"});
    CHECK(p.variant_ids == std::vector<std::string>{"a", "c"});
    CHECK(standardization_error(p.X) <= 1e-8);
}

TEST_CASE("marginal sigma") {
    SUBCASE("exact fit is degenerate") {
        Vector x(4);
        x << 1, -1, 1, -1;
        x /= x.norm();
        CHECK_THROWS_AS(estimate_sigma_marginal(x, 2.5 * x), Error);
    }
    SUBCASE("orthogonal case") {
        const int n = 6;
        Vector x(n), y(n);
        x << 1, -1, 0, 0, 0, 0;
        x /= x.norm();
        y << 1, 1, 1, 0, 0, 0;
        y *= std::sqrt((n - 2) / y.squaredNorm());
        CHECK(estimate_sigma_marginal(x, y).sigma == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("random instance against the OLS oracle") {
        Rng rng = make_stream(3, 0, StreamTag::Expression);
        Matrix X = standardize(testing::gaussian_matrix(40, 1, rng));
        const Vector y = testing::gaussian_vector(40, rng) + 0.8 * X.col(0);
        CHECK(estimate_sigma_marginal(X.col(0), y).sigma ==
              doctest::Approx(oracle::simple_regression_sigma(X.col(0), y)).epsilon(1e-10));
    }
}

TEST_CASE("refit sigma") {
    Rng rng = make_stream(4, 0, StreamTag::Expression);
    const Matrix XE = testing::gaussian_matrix(25, 3, rng);
    SUBCASE("y in the span is degenerate") {
        Vector b(3);
        b << 1, -2, 0.5;
        CHECK_THROWS_AS(estimate_sigma_refit(XE, XE * b), Error);
    }
    SUBCASE("empty selection uses the null model") {
        const Vector y = testing::gaussian_vector(25, rng);
        CHECK(estimate_sigma_refit(Matrix(25, 0), y).sigma == doctest::Approx(y.norm() / 5.0).epsilon(1e-14));
    }
    SUBCASE("random instance against normal equations") {
        const Vector y = testing::gaussian_vector(25, rng);
        const Vector b = oracle::normal_equations(XE, y);
        const double expected = std::sqrt((y - XE * b).squaredNorm() / 22.0);
        CHECK(estimate_sigma_refit(XE, y).sigma == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("collinear design is rank deficient") {
        Matrix bad(25, 2);
        bad.col(0) = XE.col(0);
        bad.col(1) = 2.0 * XE.col(0);
        try {
            estimate_sigma_refit(bad, testing::gaussian_vector(25, rng));
            FAIL("expected RankDeficient");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RankDeficient);
        }
    }
}

TEST_CASE("causal structure sampling") {
    std::vector<std::vector<std::size_t>> singletons;
    for (std::size_t i = 0; i < 9; ++i) singletons.push_back({i});
    Rng rng = make_stream(5, 0, StreamTag::CausalStructure);

    SUBCASE("point mass at zero") {
        std::vector<double> dist(10, 0.0);
        dist[0] = 1.0;
        const auto t = sample_causal_structure(singletons, dist, 3.0, rng);
        CHECK(t.causal_indices.empty());
        CHECK(t.effects.empty());
    }
    SUBCASE("point mass at nine with nine singletons") {
        std::vector<double> dist(10, 0.0);
        dist[9] = 1.0;
        const auto t = sample_causal_structure(singletons, dist, 3.0, rng);
        CHECK(t.causal_indices == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
        for (const auto& [k, b] : t.effects) CHECK(b == 3.0);
    }
    SUBCASE("too few clusters") {
        std::vector<double> dist(10, 0.0);
        dist[9] = 1.0;
        std::vector<std::vector<std::size_t>> few(singletons.begin(), singletons.begin() + 4);
        CHECK_THROWS_AS(sample_causal_structure(few, dist, 3.0, rng), Error);
    }
    SUBCASE("count frequencies follow the distribution") {
        const auto dist = default_causal_count_distribution();
        CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        std::vector<std::vector<std::size_t>> clusters;
        for (std::size_t i = 0; i < 30; ++i) clusters.push_back({2 * i, 2 * i + 1});
        const int draws = 100000;
        std::vector<int> counts(10, 0);
        for (int d = 0; d < draws; ++d) {
            const auto t = sample_causal_structure(clusters, dist, 3.0, rng);
            ++counts[t.causal_count()];
            std::set<std::size_t> used;
            for (std::size_t c : t.causal_indices) used.insert(c / 2);
            REQUIRE(used.size() == t.causal_count());
        }
        for (std::size_t k = 0; k < 10; ++k) {
            const double p = dist[k];
            const double se = std::sqrt(p * (1 - p) / draws);
            CHECK(std::abs(counts[k] / double(draws) - p) <= 3 * se + 1e-12);
        }
    }
}

TEST_CASE("synthesized expression") {
    Rng grng = make_stream(6, 0, StreamTag::Genotype);
    const Matrix X = standardize(testing::gaussian_matrix(50, 4, grng));
    SUBCASE("null truth is unit-variance noise") {
        Rng rng = make_stream(6, 0, StreamTag::Expression);
        double ss = 0.0;
        const int reps = 400;
        for (int r = 0; r < reps; ++r) {
            const auto e = synthesize_expression(X, SyntheticTruth{}, rng);
            CHECK(e.mu.cwiseAbs().maxCoeff() == 0.0);
            ss += e.y.squaredNorm();
        }
        const double var = ss / (reps * 50.0);
        CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / (reps * 50.0)));
    }
    SUBCASE("single causal variant has the configured inner product in expectation") {
        SyntheticTruth t;
        t.causal_indices = {2};
        t.effects[2] = 3.0;
        Rng rng = make_stream(6, 1, StreamTag::Expression);
        const int reps = 10000;
        double sum = 0.0, sq = 0.0, resid = 0.0;
        for (int r = 0; r < reps; ++r) {
            const auto e = synthesize_expression(X, t, rng);
            const double v = X.col(2).dot(e.y);
            sum += v;
            sq += v * v;
            resid += (e.y - e.mu).mean();
        }
        const double mean = sum / reps;
        const double se = std::sqrt((sq / reps - mean * mean) / reps);
        CHECK(std::abs(mean - 3.0) <= 3.0 * se);
        CHECK(std::abs(resid / reps) <= 3.0 / std::sqrt(50.0 * reps));
    }
    SUBCASE("same stream gives identical draws") {
        SyntheticTruth t;
        t.causal_indices = {0};
        t.effects[0] = 3.0;
        Rng a = make_stream(9, 2, StreamTag::Expression, 4);
        Rng b = make_stream(9, 2, StreamTag::Expression, 4);
        CHECK(synthesize_expression(X, t, a).y == synthesize_expression(X, t, b).y);
    }
}

TEST_CASE("streams are keyed by seed, gene, stage and replicate") {
    auto draw = [](Rng r) { return r(); };
    CHECK(draw(make_stream(1, 2, StreamTag::Expression, 3)) == draw(make_stream(1, 2, StreamTag::Expression, 3)));
    CHECK(draw(make_stream(1, 2, StreamTag::Expression, 3)) != draw(make_stream(1, 3, StreamTag::Expression, 3)));
    CHECK(draw(make_stream(1, 2, StreamTag::Expression, 3)) != draw(make_stream(1, 2, StreamTag::LambdaDraws, 3)));
    CHECK(draw(make_stream(1, 2, StreamTag::Expression, 3)) != draw(make_stream(1, 2, StreamTag::Expression, 4)));
    CHECK(draw(make_stream(1, 2, StreamTag::Expression, 3)) != draw(make_stream(2, 2, StreamTag::Expression, 3)));
}

TEST_CASE("simulated genotypes are allele counts with no constant column") {
    Rng rng = make_stream(8, 0, StreamTag::Genotype);
    GenotypeDesign d;
    d.variants = 200;
    const Matrix G = simulate_genotypes(d, rng);
    CHECK(G.rows() == 100);
    CHECK(G.cols() == 200);
    for (Index j = 0; j < G.cols(); ++j) {
        CHECK(G.col(j).maxCoeff() > G.col(j).minCoeff());
        for (Index i = 0; i < G.rows(); ++i) CHECK((G(i, j) == 0.0 || G(i, j) == 1.0 || G(i, j) == 2.0));
    }
}
