#include "fatra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fatra {

Predictions Predictions::from_scores(std::vector<double> s) {
    for (double v : s) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ContractError("Predictions: scores must lie in [0,1]");
    }
    return Predictions{std::move(s)};
}

std::vector<std::uint8_t> Predictions::hard_labels() const {
    std::vector<std::uint8_t> h(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) h[i] = scores[i] >= 0.5 ? 1 : 0;
    return h;
}

namespace {

void check_lengths(std::size_t n, const std::vector<std::uint8_t>& v, const char* name) {
    if (v.size() != n)
        throw ContractError(std::string(name) + " length mismatch");
}

double sq_dist(const Matrix& A, std::size_t i, const Matrix& B, std::size_t j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < A.cols(); ++c) {
        const double d = A(i, c) - B(j, c);
        acc += d * d;
    }
    return acc;
}

// max over rows_b of min over rows_a of ||a - b||
std::optional<double> max_min_distance(const Matrix& Za,
                                       const std::vector<std::size_t>& rows_a,
                                       const Matrix& Zb,
                                       const std::vector<std::size_t>& rows_b) {
    if (rows_a.empty() || rows_b.empty()) return std::nullopt;
    double worst = 0.0;
    for (std::size_t b : rows_b) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a : rows_a) {
            const double d = sq_dist(Za, a, Zb, b);
            if (d < best) best = d;
        }
        if (best > worst) worst = best;
    }
    return std::sqrt(worst);
}

}  // namespace

DeltaEoResult delta_eo(const Predictions& pred, const std::vector<std::uint8_t>& Y,
                       const std::vector<std::uint8_t>& F) {
    const std::size_t n = pred.scores.size();
    check_lengths(n, Y, "Y");
    check_lengths(n, F, "F");
    const auto hard = pred.hard_labels();

    std::size_t count[2][2] = {{0, 0}, {0, 0}};  // [f][y]
    std::size_t match[2][2] = {{0, 0}, {0, 0}};  // predicted == y within group
    bool f_present[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
        f_present[F[i]] = true;
        count[F[i]][Y[i]] += 1;
        if (hard[i] == Y[i]) match[F[i]][Y[i]] += 1;
    }
    if (!f_present[0] && !f_present[1])
        throw UndefinedMetricError("delta_eo: both sensitive groups empty");

    DeltaEoResult res;
    double acc = 0.0;
    for (int y = 0; y < 2; ++y) {
        if (count[0][y] == 0 || count[1][y] == 0) {
            res.skipped_y[y] = true;
            continue;
        }
        const double r1 = static_cast<double>(match[1][y]) / static_cast<double>(count[1][y]);
        const double r0 = static_cast<double>(match[0][y]) / static_cast<double>(count[0][y]);
        acc += std::fabs(r1 - r0);
    }
    res.value = 0.5 * acc;
    return res;
}

double delta_dp(const Predictions& pred, const std::vector<std::uint8_t>& F) {
    const std::size_t n = pred.scores.size();
    check_lengths(n, F, "F");
    const auto hard = pred.hard_labels();
    std::size_t count[2] = {0, 0};
    std::size_t pos[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        count[F[i]] += 1;
        if (hard[i] == 1) pos[F[i]] += 1;
    }
    if (count[0] == 0 || count[1] == 0)
        throw UndefinedMetricError("delta_dp: a sensitive group is empty");
    const double r1 = static_cast<double>(pos[1]) / static_cast<double>(count[1]);
    const double r0 = static_cast<double>(pos[0]) / static_cast<double>(count[0]);
    return std::fabs(r1 - r0);
}

double accuracy(const Predictions& pred, const std::vector<std::uint8_t>& Y) {
    const std::size_t n = pred.scores.size();
    check_lengths(n, Y, "Y");
    if (n == 0) throw ContractError("accuracy: empty predictions");
    const auto hard = pred.hard_labels();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (hard[i] == Y[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(n);
}

double roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& Y) {
    const std::size_t n = scores.size();
    check_lengths(n, Y, "Y");
    std::size_t n_pos = 0;
    for (auto y : Y) n_pos += y;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw UndefinedMetricError("roc_auc: needs both classes");

    // midrank assignment over sorted scores
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (Y[k] == 1) rank_sum_pos += rank[k];
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double eta(const Matrix& H, const GroupIndex& groups, int y) {
    if (y < 0 || y > 1) throw ContractError("eta: y must be 0 or 1");
    const auto& v1 = groups.eo[1][y];
    const auto& v0 = groups.eo[0][y];
    if (v1.empty() || v0.empty())
        throw UndefinedMetricError("eta: empty EO group for y=" + std::to_string(y));
    // max over a in V_1^y of min over b in V_0^y
    auto r = max_min_distance(H, v0, H, v1);
    return *r;
}

EoDistances epsilon(const Matrix& Z_train, const Matrix& Z_test,
                    const GroupIndex& groups_train, const GroupIndex& groups_test) {
    if (Z_train.cols() != Z_test.cols())
        throw DimensionError("epsilon: representation widths " + Z_train.shape_str() +
                             " vs " + Z_test.shape_str());
    EoDistances out;
    for (int f = 0; f < 2; ++f)
        for (int y = 0; y < 2; ++y)
            out.value[f][y] = max_min_distance(Z_train, groups_train.eo[f][y],
                                               Z_test, groups_test.eo[f][y]);
    return out;
}

EoSimilarities lambda_sim(const Matrix& Z_J, const Matrix& Z_K,
                          const GroupIndex& groups_J, const GroupIndex& groups_K) {
    if (Z_J.cols() != Z_K.cols())
        throw DimensionError("lambda_sim: representation widths " + Z_J.shape_str() +
                             " vs " + Z_K.shape_str());
    EoSimilarities out;
    const std::size_t d = Z_J.cols();

    auto group_mean_normalized = [&](const Matrix& Z, const std::vector<std::size_t>& rows,
                                     std::vector<double>& mean, bool& zero_seen) {
        mean.assign(d, 0.0);
        for (std::size_t r : rows) {
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) sq += Z(r, c) * Z(r, c);
            const double norm = std::sqrt(sq);
            if (norm == 0.0) {
                zero_seen = true;  // contributes a zero vector
                continue;
            }
            for (std::size_t c = 0; c < d; ++c) mean[c] += Z(r, c) / norm;
        }
        for (double& v : mean) v /= static_cast<double>(rows.size());
    };

    for (int f = 0; f < 2; ++f) {
        for (int y = 0; y < 2; ++y) {
            const auto& rj = groups_J.eo[f][y];
            const auto& rk = groups_K.eo[f][y];
            if (rj.empty() || rk.empty()) {
                out.value[f][y] = std::nullopt;
                continue;
            }
            std::vector<double> mj, mk;
            group_mean_normalized(Z_J, rj, mj, out.had_zero_rows);
            group_mean_normalized(Z_K, rk, mk, out.had_zero_rows);
            double dot = 0.0;
            for (std::size_t c = 0; c < d; ++c) dot += mj[c] * mk[c];
            out.value[f][y] = dot;
        }
    }
    return out;
}

SensDistances gamma(const Matrix& Z_train, const Matrix& Z_test,
                    const GroupIndex& groups_train, const GroupIndex& groups_test) {
    if (Z_train.cols() != Z_test.cols())
        throw DimensionError("gamma: representation widths " + Z_train.shape_str() +
                             " vs " + Z_test.shape_str());
    SensDistances out;
    for (int f = 0; f < 2; ++f)
        out.value[f] = max_min_distance(Z_train, groups_train.sensitive[f],
                                        Z_test, groups_test.sensitive[f]);
    return out;
}

MetricsRecord MetricsRecord::from_scores(const std::vector<double>& scores,
                                         const std::vector<std::uint8_t>& Y,
                                         const std::vector<std::uint8_t>& F) {
    const Predictions pred = Predictions::from_scores(scores);
    MetricsRecord r;
    r.acc = 100.0 * accuracy(pred, Y);
    r.roc_auc = 100.0 * fatra::roc_auc(scores, Y);
    r.delta_dp = 100.0 * fatra::delta_dp(pred, F);
    const DeltaEoResult eo = fatra::delta_eo(pred, Y, F);
    r.delta_eo = 100.0 * eo.value;
    r.eo_term_skipped = eo.any_skipped();
    r.composite_s = r.acc + r.roc_auc - r.delta_dp - r.delta_eo;
    return r;
}

}  // namespace fatra
