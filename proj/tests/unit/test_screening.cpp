#include "seleqtl/error.hpp"
#include "seleqtl//data_model.hpp"
#include "seleqtl/normal.hpp"
#include "seleqtl/screening.hpp"

#include "../support/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace seleqtl;

namespace {

GenePanel random_panel(std::uint64_t seed, Index n, Index V) {
    Rng rng = make_stream(seed, 0, StreamTag::Genotype);
    std::vector<std::string> ids;
    for (Index j = 0; j < V; ++j) ids.push_back("v" + std::to_string(j));
    Matrix raw = testing::gaussian_matrix(n, V, rng);
    Vector y = testing::gaussian_vector(n, rng);
    return make_panel("g", raw, y, ids);
}

} // namespace

TEST_CASE("unrandomized statistics are the scaled inner products") {
    const GenePanel p = random_panel(31, 30, 6);
    Rng rng = make_stream(31, 0, StreamTag::StageOneRandomization);
    const auto out = randomized_t(p, NoiseScale{2.0, NoiseSource::Known}, 0.0, rng);
    for (Index j = 0; j < 6; ++j) CHECK(out.T[j] == doctest::Approx(p.X.col(j).dot(p.y) / 2.0).epsilon(1e-15));
}

TEST_CASE("zero statistic has p-value one") { CHECK(marginal_p_value(0.0, std::sqrt(0.5)) == 1.0); }

TEST_CASE("marginal p-values follow the randomized null") {
    const GenePanel p = random_panel(32, 40, 9);
    Rng rng = make_stream(32, 0, StreamTag::StageOneRandomization);
    const double gamma = std::sqrt(0.5);
    const auto out = randomized_t(p, NoiseScale{}, gamma, rng);
    for (Index j = 0; j < 9; ++j) {
        const double expected = 2.0 * (1.0 - oracle::normal_cdf(std::abs(out.T[j]) / std::sqrt(1.5)));
        CHECK(out.p[j] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(out.omega[j] == doctest::Approx(out.T[j] - p.X.col(j).dot(p.y)).epsilon(1e-12));
    }
    // j0, T0 and s_j0 against a direct scan
    std::vector<double> mags(9);
    for (Index j = 0; j < 9; ++j) mags[static_cast<std::size_t>(j)] = std::abs(out.T[j]);
    const auto top = static_cast<std::size_t>(std::max_element(mags.begin(), mags.end()) - mags.begin());
    CHECK(out.j0 == top);
    CHECK(out.s_j0 == (out.T[static_cast<Index>(top)] > 0 ? 1 : -1));
    std::sort(mags.begin(), mags.end());
    CHECK(out.T0 == mags[7]);
    CHECK(out.p_tilde == doctest::Approx(std::min(1.0, 9.0 * out.p.minCoeff())));
}

TEST_CASE("per-variant noise scales") {
    const GenePanel p = random_panel(33, 30, 4);
    Rng a = make_stream(33, 0, StreamTag::StageOneRandomization);
    std::vector<double> sig{1.0, 2.0, 0.5, 4.0};
    const auto out = randomized_t(p, sig, 0.0, a);
    for (Index j = 0; j < 4; ++j) CHECK(out.T[j] == doctest::Approx(p.X.col(j).dot(p.y) / sig[j]));
    CHECK(out.sigma_j0 == sig[out.j0]);
}

TEST_CASE("bonferroni") {
    std::vector<double> ones(5, 1.0);
    CHECK(bonferroni(ones, 5) == 1.0);
    std::vector<double> p{0.2, 0.001, 0.5, 0.3, 0.9, 0.4, 0.6, 0.7, 0.8, 0.05};
    CHECK(bonferroni(p, 10) == doctest::Approx(0.01));
    std::vector<double> half{0.5, 0.6, 0.7, 0.9};
    CHECK(bonferroni(half, 4) == 1.0);
}

TEST_CASE("BH step-up") {
    SUBCASE("no signal") {
        std::vector<double> p(4, 1.0);
        std::vector<std::string> ids{"a", "b", "c", "d"};
        const auto s = bh_select(p, ids, 0.1);
        CHECK(s.K0 == 0);
        CHECK(s.selected.empty());
    }
    SUBCASE("hand-worked three genes") {
        std::vector<double> p{0.02, 0.9, 0.01};
        std::vector<std::string> ids{"g1", "g2", "g3"};
        const auto s = bh_select(p, ids, 0.1);
        CHECK(s.K0 == 2);
        CHECK(s.selected == std::vector<std::size_t>{2, 0});
    }
    SUBCASE("step-up passes over a non-rejected middle value") {
        std::vector<double> p{0.001, 0.06, 0.07, 0.5};
        std::vector<std::string> ids{"a", "b", "c", "d"};
        CHECK(bh_select(p, ids, 0.1).K0 == 3);
    }
    SUBCASE("fixed point holds on random inputs") {
        Rng rng = make_stream(34, 0, StreamTag::StageOneRandomization);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int rep = 0; rep < 200; ++rep) {
            const std::size_t G = 1 + rep % 40;
            std::vector<double> p(G);
            std::vector<std::string> ids(G);
            for (std::size_t i = 0; i < G; ++i) {
                p[i] = std::pow(u(rng), 3.0);
                ids[i] = "g" + std::to_string(i);
            }
            const auto s = bh_select(p, ids, 0.1);
            std::vector<double> sorted = p;
            std::sort(sorted.begin(), sorted.end());
            if (s.K0 > 0) CHECK(sorted[s.K0 - 1] <= s.K0 * 0.1 / G);
            for (std::size_t k = s.K0 + 1; k <= G; ++k) CHECK(sorted[k - 1] > k * 0.1 / G);
            CHECK(s.selected.size() == s.K0);
        }
    }
}

TEST_CASE("BH controls FDR under the global null") {
    Rng rng = make_stream(35, 0, StreamTag::StageOneRandomization);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int runs = 1000;
    const std::size_t G = 50;
    std::vector<std::string> ids(G);
    for (std::size_t i = 0; i < G; ++i) ids[i] = "g" + std::to_string(i);
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < runs; ++r) {
        std::vector<double> p(G);
        for (auto& v : p) v = u(rng);
        const double fdp = bh_select(p, ids, 0.1).K0 > 0 ? 1.0 : 0.0;
        sum += fdp;
        sq += fdp * fdp;
    }
    const double fdr = sum / runs;
    const double se = std::sqrt((sq / runs - fdr * fdr) / runs);
    CHECK(fdr <= 0.1 + 3.0 * se);
}

TEST_CASE("theoretical lambda") {
    SUBCASE("single unit column gives the half-normal mean") {
        Matrix X = Matrix::Zero(10, 1);
        X(0, 0) = 1.0;
        Rng rng = make_stream(36, 0, StreamTag::LambdaDraws);
        const double sigma = 1.7;
        const int draws = 10000;
        const double est = theoretical_lambda(X, sigma, rng, draws);
        const double mean = sigma * std::sqrt(2.0 / M_PI);
        const double se = sigma * std::sqrt((1.0 - 2.0 / M_PI) / draws);
        CHECK(std::abs(est - mean) <= 3.0 * se);
    }
    SUBCASE("zero noise") {
        Rng rng = make_stream(36, 1, StreamTag::LambdaDraws);
        CHECK(theoretical_lambda(Matrix::Identity(5, 3), 0.0, rng, 20) == 0.0);
    }
    SUBCASE("positive homogeneity on a shared stream") {
        const GenePanel p = random_panel(37, 30, 8);
        Rng a = make_stream(37, 0, StreamTag::LambdaDraws);
        Rng b = make_stream(37, 0, StreamTag::LambdaDraws);
        CHECK(theoretical_lambda(p.X, 2.0, a, 50) == doctest::Approx(2.0 * theoretical_lambda(p.X, 1.0, b, 50)).epsilon(1e-14));
    }
}
