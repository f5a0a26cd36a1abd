#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fatra/metrics.hpp"
#include "fatra/rng.hpp"
#include "oracles.hpp"

using namespace fatra;

namespace {

GroupIndex groups_of(const std::vector<std::uint8_t>& f,
                     const std::vector<std::uint8_t>& y) {
    GroupIndex gi;
    for (std::size_t i = 0; i < f.size(); ++i) {
        gi.sensitive[f[i]].push_back(i);
        gi.eo[f[i]][y[i]].push_back(i);
    }
    for (int a = 0; a < 2; ++a) {
        gi.sensitive_empty[a] = gi.sensitive[a].empty();
        for (int b = 0; b < 2; ++b) gi.eo_empty[a][b] = gi.eo[a][b].empty();
    }
    return gi;
}

Matrix random_rows(Rng& rng, std::size_t n, std::size_t d) {
    Matrix m(n, d);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("delta_eo hand cases") {
    // perfect predictions are perfectly fair
    Predictions p = Predictions::from_scores({0.9, 0.1, 0.8, 0.2});
    CHECK(delta_eo(p, {1, 0, 1, 0}, {1, 1, 0, 0}).value == doctest::Approx(0.0));

    // y=0 side absent: that term is skipped, not zero-filled
    Predictions p2 = Predictions::from_scores({1.0, 0.0, 1.0, 1.0});
    const DeltaEoResult r = delta_eo(p2, {1, 1, 1, 1}, {1, 1, 0, 0});
    CHECK(r.value == doctest::Approx(0.25));
    CHECK(r.skipped_y[0]);
    CHECK(!r.skipped_y[1]);

    CHECK_THROWS_AS(delta_eo(Predictions::from_scores({}), {}, {}),
                    UndefinedMetricError);
}

TEST_CASE("delta_dp hand cases and empty-group error") {
    Predictions all_pos = Predictions::from_scores({1.0, 1.0, 1.0, 1.0});
    CHECK(delta_dp(all_pos, {1, 1, 0, 0}) == doctest::Approx(0.0));

    Predictions p = Predictions::from_scores({1.0, 1.0, 1.0, 0.0});
    CHECK(delta_dp(p, {1, 1, 0, 0}) == doctest::Approx(0.5));

    CHECK_THROWS_AS(delta_dp(p, {1, 1, 1, 1}), UndefinedMetricError);
}

TEST_CASE("roc_auc rank statistic") {
    CHECK(roc_auc({0.9, 0.8, 0.3, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), UndefinedMetricError);
}

TEST_CASE("metrics equal brute-force oracles on random instances") {
    Rng rng(61);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = rng.uniform_index(4, 12);
        std::vector<double> scores(n);
        std::vector<std::uint8_t> y(n);
        std::vector<std::uint8_t> f(n);
        bool has[2] = {false, false};
        bool cls[2] = {false, false};
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.bernoulli(0.2) ? 0.5 : rng.uniform(0.0, 1.0);  // force ties
            y[i] = rng.bernoulli(0.5) ? 1 : 0;
            f[i] = rng.bernoulli(0.5) ? 1 : 0;
            has[f[i]] = true;
            cls[y[i]] = true;
        }
        if (!has[0] || !has[1] || !cls[0] || !cls[1]) continue;

        const Predictions pred = Predictions::from_scores(scores);
        const auto hard = pred.hard_labels();
        CHECK(std::fabs(accuracy(pred, y) - oracle::brute_accuracy(hard, y)) < 1e-12);
        CHECK(std::fabs(delta_dp(pred, f) - oracle::brute_delta_dp(hard, f)) < 1e-12);
        CHECK(std::fabs(delta_eo(pred, y, f).value -
                        oracle::brute_delta_eo(hard, y, f)) < 1e-12);
        CHECK(std::fabs(roc_auc(scores, y) - oracle::brute_roc_auc(scores, y)) < 1e-12);

        // relabeling f -> 1-f leaves both fairness gaps unchanged
        std::vector<std::uint8_t> flipped(n);
        for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - f[i];
        CHECK(std::fabs(delta_dp(pred, f) - delta_dp(pred, flipped)) < 1e-12);
        CHECK(std::fabs(delta_eo(pred, y, f).value - delta_eo(pred, y, flipped).value) <
              1e-12);
    }
}

TEST_CASE("auc complement identity without ties") {
    Rng rng(67);
    std::vector<double> scores;
    std::vector<std::uint8_t> y;
    for (int i = 0; i < 20; ++i) {
        scores.push_back(rng.uniform(0.0, 1.0));
        y.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }
    y[0] = 1;
    y[1] = 0;
    std::vector<double> inv;
    for (double s : scores) inv.push_back(1.0 - s);
    CHECK(roc_auc(inv, y) == doctest::Approx(1.0 - roc_auc(scores, y)).epsilon(1e-12));
}

TEST_CASE("eta hand cases and oracle equality") {
    // singleton groups: the one pairwise distance
    Matrix h = Matrix::from_rows({{0.0, 0.0}, {3.0, 4.0}});
    GroupIndex gi = groups_of({0, 1}, {1, 1});
    CHECK(eta(h, gi, 1) == doctest::Approx(5.0));
    CHECK_THROWS_AS(eta(h, gi, 0), UndefinedMetricError);

    // identical rows: all distances zero
    Matrix same(4, 3, 1.0);
    GroupIndex gi2 = groups_of({0, 0, 1, 1}, {1, 1, 1, 1});
    CHECK(eta(same, gi2, 1) == doctest::Approx(0.0));

    Rng rng(71);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10;
        Matrix z = random_rows(rng, n, 3);
        std::vector<std::uint8_t> f(n);
        std::vector<std::uint8_t> y(n, 1);
        for (std::size_t i = 0; i < n; ++i) f[i] = i < n / 2 ? 0 : 1;
        GroupIndex g = groups_of(f, y);
        const double ref = oracle::brute_max_min(z, g.eo[0][1], z, g.eo[1][1]);
        CHECK(eta(z, g, 1) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("epsilon: coinciding rows give zero, single pair gives its distance") {
    Rng rng(73);
    Matrix zj = random_rows(rng, 8, 3);
    std::vector<std::uint8_t> f = {0, 0, 1, 1, 0, 0, 1, 1};
    std::vector<std::uint8_t> y = {0, 1, 0, 1, 0, 1, 0, 1};
    GroupIndex gj = groups_of(f, y);
    const EoDistances zero = epsilon(zj, zj, gj, gj);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(*zero.value[a][b] == doctest::Approx(0.0));

    Matrix a = Matrix::from_rows({{1.0, 2.0}});
    Matrix b = Matrix::from_rows({{1.0, 2.5}});
    GroupIndex one = groups_of({1}, {1});
    const EoDistances d = epsilon(a, b, one, one);
    CHECK(*d.value[1][1] == doctest::Approx(0.5));
    CHECK(!d.value[0][0].has_value());  // empty groups flagged skipped
}

TEST_CASE("epsilon and gamma equal brute force; gamma bounded by eps max") {
    Rng rng(79);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t nj = 10;
        const std::size_t nk = 9;
        Matrix zj = random_rows(rng, nj, 4);
        Matrix zk = random_rows(rng, nk, 4);
        std::vector<std::uint8_t> fj(nj);
        std::vector<std::uint8_t> yj(nj);
        std::vector<std::uint8_t> fk(nk);
        std::vector<std::uint8_t> yk(nk);
        for (std::size_t i = 0; i < nj; ++i) {
            fj[i] = (i / 2) % 2;
            yj[i] = i % 2;
        }
        for (std::size_t i = 0; i < nk; ++i) {
            fk[i] = i % 2;
            yk[i] = (i / 2) % 2;
        }
        GroupIndex gj = groups_of(fj, yj);
        GroupIndex gk = groups_of(fk, yk);

        const EoDistances eps = epsilon(zj, zk, gj, gk);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (eps.value[a][b])
                    CHECK(*eps.value[a][b] ==
                          doctest::Approx(oracle::brute_max_min(zj, gj.eo[a][b], zk,
                                                                gk.eo[a][b]))
                              .epsilon(1e-12));

        const SensDistances gm = gamma(zj, zk, gj, gk);
        for (int a = 0; a < 2; ++a) {
            CHECK(*gm.value[a] ==
                  doctest::Approx(
                      oracle::brute_max_min(zj, gj.sensitive[a], zk, gk.sensitive[a]))
                      .epsilon(1e-12));
            // labels refine sensitive groups: the sensitive max-min cannot
            // exceed the worse of its two EO refinements
            if (eps.value[a][0] && eps.value[a][1])
                CHECK(*gm.value[a] <=
                      std::max(*eps.value[a][0], *eps.value[a][1]) + 1e-12);
        }
    }
}

TEST_CASE("lambda hand cases") {
    // all rows the same unit vector: similarity exactly 1
    Matrix unit(3, 2, 0.0);
    for (std::size_t i = 0; i < 3; ++i) unit(i, 0) = 1.0;
    GroupIndex g = groups_of({1, 1, 1}, {1, 1, 1});
    const EoSimilarities s = lambda_sim(unit, unit, g, g);
    CHECK(*s.value[1][1] == doctest::Approx(1.0));

    // self-similarity is the mean pairwise cosine, at most 1
    Rng rng(83);
    Matrix z = random_rows(rng, 6, 3);
    GroupIndex g2 = groups_of({1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1});
    const EoSimilarities s2 = lambda_sim(z, z, g2, g2);
    CHECK(*s2.value[1][1] <= 1.0 + 1e-12);
    CHECK(*s2.value[1][1] ==
          doctest::Approx(oracle::brute_mean_cosine(z, g2.eo[1][1], z, g2.eo[1][1]))
              .epsilon(1e-12));
}

TEST_CASE("lambda normalized-mean factorization equals the pairwise mean") {
    Rng rng(89);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix zj = random_rows(rng, 6, 3);
        Matrix zk = random_rows(rng, 6, 3);
        std::vector<std::uint8_t> f = {0, 0, 1, 1, 0, 1};
        std::vector<std::uint8_t> y = {0, 1, 0, 1, 1, 0};
        GroupIndex g = groups_of(f, y);
        const EoSimilarities s = lambda_sim(zj, zk, g, g);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                if (!s.value[a][b]) continue;
                const double ref =
                    oracle::brute_mean_cosine(zj, g.eo[a][b], zk, g.eo[a][b]);
                CHECK(std::fabs(*s.value[a][b] - ref) < 1e-12);
                CHECK(*s.value[a][b] >= -1.0 - 1e-12);
                CHECK(*s.value[a][b] <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("lambda zero rows contribute zero and are flagged") {
    Matrix zj(2, 2, 0.0);
    zj(0, 0) = 1.0;  // row 1 is all-zero
    Matrix zk(2, 2, 0.0);
    zk(0, 0) = 1.0;
    zk(1, 0) = 1.0;
    GroupIndex g = groups_of({1, 1}, {1, 1});
    const EoSimilarities s = lambda_sim(zj, zk, g, g);
    CHECK(s.had_zero_rows);
    CHECK(*s.value[1][1] ==
          doctest::Approx(oracle::brute_mean_cosine(zj, g.eo[1][1], zk, g.eo[1][1])));
}

TEST_CASE("metrics record composite identity") {
    Rng rng(97);
    std::vector<double> scores;
    std::vector<std::uint8_t> y;
    std::vector<std::uint8_t> f;
    for (int i = 0; i < 30; ++i) {
        scores.push_back(rng.uniform(0.0, 1.0));
        y.push_back(rng.bernoulli(0.5) ? 1 : 0);
        f.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }
    y[0] = 0;
    y[1] = 1;
    f[0] = 0;
    f[1] = 1;
    const MetricsRecord r = MetricsRecord::from_scores(scores, y, f);
    CHECK(std::fabs(r.composite_s - (r.acc + r.roc_auc - r.delta_dp - r.delta_eo)) <
          1e-9);
    CHECK(r.acc >= 0.0);
    CHECK(r.acc <= 100.0);
}
