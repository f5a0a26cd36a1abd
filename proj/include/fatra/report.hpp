#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fatra/pipeline.hpp"

namespace fatra {

// Result emission. All numbers are printed with 4 decimals in percent units;
// files contain no timestamps so identical runs produce identical bytes.

std::string format4(double v);

void write_text_file(const std::string& path, const std::string& content);

struct MeanStd {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation
};
MeanStd mean_std(const std::vector<double>& v);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& name, const MetricsRecord& r);

// Comparison table: one row per variant, ACC/ROC-AUC/DP/EO columns as
// "mean±std" cells. format is "csv" or "md".
struct TableRow {
    std::string name;
    MeanStd acc;
    MeanStd auc;
    MeanStd dp;
    MeanStd eo;
    MeanStd s;
};
std::string comparison_table(const std::vector<TableRow>& rows, const std::string& format);

// One JSON object per run: config echo, seed, epoch history, selection, and
// final per-test-graph metrics.
std::string run_record_json(const RunRecord& rec, const TrainConfig& cfg,
                            const std::vector<std::pair<std::string, MetricsRecord>>& tests);

}  // namespace fatra
