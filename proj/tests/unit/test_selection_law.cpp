#include "seleqtl/data_model.hpp"
#include "seleqtl/error.hpp"
#include "seleqtl/lasso.hpp"
#include "seleqtl/screening.hpp"
#include "seleqtl/selection_law.hpp"

#include "../support/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace seleqtl;

namespace {

struct ObservedRun {
    GenePanel panel;
    ScreeningOutcome outcome;
    LassoSolution solution;
    Matrix XE;
    AdaptiveTarget target;
};

ObservedRun observed_run(std::uint64_t seed, double y_scale = 1.0) {
    Rng rng = make_stream(seed, 0, StreamTag::Genotype);
    const Index n = 80, p = 20;
    std::vector<std::string> ids;
    for (Index j = 0; j < p; ++j) ids.push_back("v" + std::to_string(j));
    Matrix raw = testing::gaussian_matrix(n, p, rng);
    raw.col(1) += raw.col(0);
    ObservedRun run;
    run.panel = make_panel("g", raw, Vector::Zero(n), ids);
    Vector y = 2.5 * run.panel.X.col(0) - 2.0 * run.panel.X.col(7) + 0.3 * testing::gaussian_vector(n, rng);
    run.panel.y = y_scale * y;

    Rng stage1 = make_stream(seed, 0, StreamTag::StageOneRandomization);
    run.outcome = randomized_t(run.panel, NoiseScale{0.3 * y_scale, NoiseSource::Known}, std::sqrt(0.5), stage1);
    Rng stage2 = make_stream(seed, 0, StreamTag::LassoRandomization);
    const Vector zeta = draw_lasso_randomization(p, y_scale * 0.3 * std::sqrt(0.5), stage2);
    run.solution = randomized_lasso_solve(run.panel.X, run.panel.y, 0.6 * y_scale, default_ridge(n), zeta);
    run.XE = select_columns(run.panel.X, run.solution.active);
    run.target = adaptive_target(run.XE, run.panel.y, 0.3 * y_scale);
    return run;
}

} // namespace

TEST_CASE("adaptive target") {
    SUBCASE("single unit column") {
        Vector x = Vector::Zero(6);
        x[2] = 1.0;
        const Vector y = (Vector(6) << 1, 2, 3, 4, 5, 6).finished();
        const auto t = adaptive_target(Matrix(x), y);
        CHECK(t.b_hat[0] == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(t.sigma[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("orthonormal columns") {
        Rng rng = make_stream(51, 0, StreamTag::Genotype);
        const Matrix Q = testing::gaussian_matrix(15, 4, rng).householderQr().householderQ() * Matrix::Identity(15, 4);
        const auto t = adaptive_target(Q, testing::gaussian_vector(15, rng));
        for (Index j = 0; j < 4; ++j) CHECK(t.sigma[j] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("random instances match an independent QR solve") {
        Rng rng = make_stream(52, 0, StreamTag::Genotype);
        for (int rep = 0; rep < 20; ++rep) {
            const Matrix X = testing::gaussian_matrix(40, 1 + rep % 6, rng);
            const Vector y = testing::gaussian_vector(40, rng);
            const auto t = adaptive_target(X, y, 1.3);
            const Vector ref = oracle::qr_least_squares(X, y);
            CHECK((t.b_hat - ref).cwiseAbs().maxCoeff() <= 1e-9);
            const Matrix inv = (X.transpose() * X).inverse();
            for (Index j = 0; j < X.cols(); ++j) {
                CHECK(t.sigma[j] == doctest::Approx(std::sqrt(inv(j, j))).epsilon(1e-9));
                CHECK(t.scale(static_cast<std::size_t>(j)) == doctest::Approx(1.3 * std::sqrt(inv(j, j))).epsilon(1e-9));
            }
        }
    }
    SUBCASE("rank deficiency") {
        Matrix X(10, 2);
        X.col(0).setLinSpaced(10, 0.0, 1.0);
        X.col(1) = 2.0 * X.col(0);
        CHECK_THROWS_AS(adaptive_target(X, Vector::Ones(10)), Error);
        CHECK_THROWS_AS(adaptive_target(Matrix::Identity(2, 2), Vector::Ones(2)), Error);
    }
    SUBCASE("population version") {
        Rng rng = make_stream(53, 0, StreamTag::Genotype);
        const Matrix X = testing::gaussian_matrix(30, 3, rng);
        const Vector mu = X * Vector::LinSpaced(3, 1.0, 3.0);
        CHECK((adaptive_truth(X, mu) - Vector::LinSpaced(3, 1.0, 3.0)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("eGene threshold") {
    SUBCASE("enormous T0 dominates") { CHECK(egene_threshold(1, 10, 10, 0.1, std::sqrt(0.5), -1e6) == 1e6); }
    SUBCASE("default randomization") {
        const double L = egene_threshold(1, 10, 10, 0.1, std::sqrt(0.5), 0.0);
        CHECK(std::abs(L - std::sqrt(1.5) * oracle::upper_quantile(0.0005)) <= 1e-9);
    }
    SUBCASE("no randomization") {
        // K0 q / (2 V G) = 0.025
        const double L = egene_threshold(1, 2, 1, 0.1, 0.0, 0.0);
        CHECK(std::abs(L - oracle::upper_quantile(0.025)) <= 1e-9);
        CHECK(L == doctest::Approx(1.959964).epsilon(1e-6));
    }
    SUBCASE("invalid quantile arguments") {
        CHECK_THROWS_AS(egene_threshold(0, 10, 10, 0.1, 0.7, 0.0), Error);
        CHECK_THROWS_AS(egene_threshold(10, 1, 1, 0.1, 0.7, 0.0), Error);
        try {
            egene_threshold(0, 10, 10, 0.1, 0.7, 0.0);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidQuantileArgument);
        }
    }
}

TEST_CASE("eGene map") {
    SUBCASE("top variant orthogonal to the selected design and the data") {
        Matrix XE = Matrix::Zero(6, 1);
        XE(0, 0) = std::sqrt(0.5);
        XE(1, 0) = -std::sqrt(0.5);
        Vector y = Vector::Zero(6);
        y[0] = 2.0;
        y[1] = -2.0;
        y[2] = 1.0;
        Vector x = Vector::Zero(6);
        x[4] = 1.0;
        const auto target = adaptive_target(XE, y);
        ScreeningOutcome out;
        out.T = Vector::Constant(1, 3.2);
        out.omega = Vector::Constant(1, 3.2);
        out.s_j0 = 1;
        out.gamma = 0.7;
        const auto map = build_egene_map(x, y, XE, target, 0, out, 1.0);
        CHECK(map.P == 0.0);
        CHECK(map.q == 0.0);
        CHECK(map.omega(target.b_hat[0], 3.2) == 3.2);
        CHECK(egene_reconstruction_residual(map, target.b_hat[0], out) == 0.0);
    }
    SUBCASE("observed runs reconstruct the perturbation") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const ObservedRun run = observed_run(60 + seed);
            REQUIRE(!run.solution.active.empty());
            const Vector x = run.panel.X.col(static_cast<Index>(run.outcome.j0));
            for (std::size_t j = 0; j < run.target.size(); ++j) {
                const auto map = build_egene_map(x, run.panel.y, run.XE, run.target, j, run.outcome, 0.0);
                CHECK(egene_reconstruction_residual(map, run.target.estimate(j), run.outcome) <= 1e-8);
                // independent evaluation of P through the normal equations
                Vector e = Vector::Zero(run.XE.cols());
                e[static_cast<Index>(j)] = 1.0;
                const Matrix gram = run.XE.transpose() * run.XE;
                const Vector v = gram.llt().solve(e);
                CHECK(map.P == doctest::Approx(-x.dot(run.XE * v) / v[static_cast<Index>(j)]).epsilon(1e-9));
            }
        }
    }
    SUBCASE("joint scaling of y and sigma") {
        const ObservedRun a = observed_run(70, 1.0);
        const ObservedRun b = observed_run(70, 3.5);
        REQUIRE(a.solution.active == b.solution.active);
        const Vector xa = a.panel.X.col(static_cast<Index>(a.outcome.j0));
        const auto ma = build_egene_map(xa, a.panel.y, a.XE, a.target, 0, a.outcome, 0.0);
        const auto mb = build_egene_map(xa, b.panel.y, b.XE, b.target, 0, b.outcome, 0.0);
        CHECK(mb.P == doctest::Approx(ma.P).epsilon(1e-12));
        CHECK(mb.q == doctest::Approx(3.5 * ma.q).epsilon(1e-10));
        CHECK(egene_reconstruction_residual(mb, b.target.estimate(0), b.outcome) <= 1e-8);
        CHECK(b.outcome.T_j0() == doctest::Approx(a.outcome.T_j0()).epsilon(1e-12));
    }
}

TEST_CASE("LASSO map") {
    SUBCASE("observed runs reconstruct the randomization") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const ObservedRun run = observed_run(80 + seed);
            for (std::size_t j = 0; j < run.target.size(); ++j) {
                const auto map = build_lasso_map(run.panel.X, run.panel.y, run.solution, run.target, j, 0.5);
                const auto r = lasso_reconstruction_residual(map, run.target.estimate(j), run.solution);
                CHECK(r.active <= 1e-6);
                CHECK(r.inactive <= 1e-6);
                CHECK(map.active_size() == run.solution.active.size());
                CHECK(map.inactive_size() == run.solution.inactive.size());
                Matrix expected = run.XE.transpose() * run.XE;
                expected.diagonal().array() += run.solution.epsilon;
                CHECK((map.B_E - expected).cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
    }
    SUBCASE("single active column of an orthonormal design") {
        Rng rng = make_stream(54, 0, StreamTag::Genotype);
        const Matrix Q = testing::gaussian_matrix(20, 5, rng).householderQr().householderQ() * Matrix::Identity(20, 5);
        const Vector y = 4.0 * Q.col(2) + 0.1 * testing::gaussian_vector(20, rng);
        const auto sol = randomized_lasso_solve(Q, y, 1.0, 0.25, Vector::Zero(5));
        REQUIRE(sol.active == std::vector<std::size_t>{2});
        const auto target = adaptive_target(select_columns(Q, sol.active), y);
        const auto map = build_lasso_map(Q, y, sol, target, 0, 1.0);
        CHECK(map.B_E(0, 0) == doctest::Approx(1.25).epsilon(1e-12));
        CHECK(map.A_E[0] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(map.A_I.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("observed constraints hold") {
        const ObservedRun run = observed_run(90);
        const Vector x = run.panel.X.col(static_cast<Index>(run.outcome.j0));
        const double eta = run.outcome.s_j0 * run.outcome.T_j0();
        const auto ok = build_egene_map(x, run.panel.y, run.XE, run.target, 0, run.outcome, eta - 1e-9);
        CHECK(observed_constraints_hold(ok, run.outcome, run.solution));
        const auto bad = build_egene_map(x, run.panel.y, run.XE, run.target, 0, run.outcome, eta + 1.0);
        CHECK_FALSE(observed_constraints_hold(bad, run.outcome, run.solution));
    }
}
