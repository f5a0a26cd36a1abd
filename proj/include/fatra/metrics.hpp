#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fatra/graph.hpp"
#include "fatra/matrix.hpp"

namespace fatra {

// Scores in [0,1]; hard labels are score >= 0.5.
struct Predictions {
    std::vector<double> scores;

    static Predictions from_scores(std::vector<double> s);
    std::vector<std::uint8_t> hard_labels() const;
};

// Equalized odds with explicit skip accounting: a y-term is skipped when
// either sensitive side of that EO group is empty (it is not zero-filled).
struct DeltaEoResult {
    double value = 0.0;        // in [0,1]
    bool skipped_y[2] = {false, false};
    bool any_skipped() const { return skipped_y[0] || skipped_y[1]; }
};

DeltaEoResult delta_eo(const Predictions& pred, const std::vector<std::uint8_t>& Y,
                       const std::vector<std::uint8_t>& F);

double delta_dp(const Predictions& pred, const std::vector<std::uint8_t>& F);

double accuracy(const Predictions& pred, const std::vector<std::uint8_t>& Y);

// Rank statistic; ties contribute 1/2 (Mann-Whitney convention).
double roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& Y);

// eta_y = max over a in V_1^y of min over b in V_0^y of ||h_a - h_b||_2.
double eta(const Matrix& H, const GroupIndex& groups, int y);

// Per-EO-group max-min representation distance between two graphs;
// entries are empty when either side of the group pair is empty.
struct EoDistances {
    std::optional<double> value[2][2];  // [f][y]
    double sum_present() const {
        double s = 0.0;
        for (int f = 0; f < 2; ++f)
            for (int y = 0; y < 2; ++y)
                if (value[f][y]) s += *value[f][y];
        return s;
    }
    bool complete() const {
        for (int f = 0; f < 2; ++f)
            for (int y = 0; y < 2; ++y)
                if (!value[f][y]) return false;
        return true;
    }
};

EoDistances epsilon(const Matrix& Z_train, const Matrix& Z_test,
                    const GroupIndex& groups_train, const GroupIndex& groups_test);

// Mean pairwise cosine per EO group, computed as the inner product of the two
// groupwise means of row-normalized representations. Zero rows contribute 0.
struct EoSimilarities {
    std::optional<double> value[2][2];
    bool had_zero_rows = false;
    double sum_present() const {
        double s = 0.0;
        for (int f = 0; f < 2; ++f)
            for (int y = 0; y < 2; ++y)
                if (value[f][y]) s += *value[f][y];
        return s;
    }
};

EoSimilarities lambda_sim(const Matrix& Z_J, const Matrix& Z_K,
                          const GroupIndex& groups_J, const GroupIndex& groups_K);

// Sensitive-group analogue of epsilon.
struct SensDistances {
    std::optional<double> value[2];
    double sum_present() const {
        double s = 0.0;
        for (int f = 0; f < 2; ++f)
            if (value[f]) s += *value[f];
        return s;
    }
};

SensDistances gamma(const Matrix& Z_train, const Matrix& Z_test,
                    const GroupIndex& groups_train, const GroupIndex& groups_test);

// One evaluation, all values in percent. composite == acc + auc - dp - eo.
struct MetricsRecord {
    double acc = 0.0;
    double roc_auc = 0.0;
    double delta_dp = 0.0;
    double delta_eo = 0.0;
    double composite_s = 0.0;
    bool eo_term_skipped = false;

    static MetricsRecord from_scores(const std::vector<double>& scores,
                                     const std::vector<std::uint8_t>& Y,
                                     const std::vector<std::uint8_t>& F);
};

}  // namespace fatra
