#include "fatra/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fatra/config.hpp"

namespace fatra {

using json = nlohmann::ordered_json;

std::string format4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw ContractError("cannot write " + path);
    f << content;
    if (!f) throw ContractError("write failed: " + path);
}

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    if (v.empty()) return r;
    double acc = 0.0;
    for (double x : v) acc += x;
    r.mean = acc / static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(sq / static_cast<double>(v.size()));
    return r;
}

std::string metrics_csv_header() {
    return "name,acc,roc_auc,delta_dp,delta_eo,composite_s\n";
}

std::string metrics_csv_row(const std::string& name, const MetricsRecord& r) {
    return name + "," + format4(r.acc) + "," + format4(r.roc_auc) + "," +
           format4(r.delta_dp) + "," + format4(r.delta_eo) + "," +
           format4(r.composite_s) + "\n";
}

namespace {

std::string cell(const MeanStd& m) { return format4(m.mean) + "±" + format4(m.sd); }

}  // namespace

std::string comparison_table(const std::vector<TableRow>& rows, const std::string& format) {
    std::string out;
    if (format == "md") {
        out += "| variant | ACC | ROC-AUC | dDP | dEO | s |\n";
        out += "|---|---|---|---|---|---|\n";
        for (const TableRow& r : rows)
            out += "| " + r.name + " | " + cell(r.acc) + " | " + cell(r.auc) + " | " +
                   cell(r.dp) + " | " + cell(r.eo) + " | " + cell(r.s) + " |\n";
        return out;
    }
    out += "variant,acc,acc_std,roc_auc,roc_auc_std,delta_dp,delta_dp_std,"
           "delta_eo,delta_eo_std,s,s_std\n";
    for (const TableRow& r : rows)
        out += r.name + "," + format4(r.acc.mean) + "," + format4(r.acc.sd) + "," +
               format4(r.auc.mean) + "," + format4(r.auc.sd) + "," + format4(r.dp.mean) +
               "," + format4(r.dp.sd) + "," + format4(r.eo.mean) + "," +
               format4(r.eo.sd) + "," + format4(r.s.mean) + "," + format4(r.s.sd) + "\n";
    return out;
}

namespace {

json metrics_json(const MetricsRecord& r) {
    json j;
    j["acc"] = r.acc;
    j["roc_auc"] = r.roc_auc;
    j["delta_dp"] = r.delta_dp;
    j["delta_eo"] = r.delta_eo;
    j["composite_s"] = r.composite_s;
    if (r.eo_term_skipped) j["eo_term_skipped"] = true;
    return j;
}

}  // namespace

std::string run_record_json(const RunRecord& rec, const TrainConfig& cfg,
                            const std::vector<std::pair<std::string, MetricsRecord>>& tests) {
    json j;
    j["seed"] = rec.seed;
    j["config"] = json::parse(train_config_json(cfg));
    j["selected_epoch"] = rec.selected_epoch;
    j["best_val_s"] = rec.best_val_s;
    if (rec.loss_term_skipped) j["loss_term_skipped"] = true;
    json hist = json::array();
    for (const EpochRecord& e : rec.epochs) {
        json h;
        h["l_adv"] = e.l_adv;
        h["l_cls"] = e.l_cls;
        h["l_gen"] = e.l_gen;
        h["l_align"] = e.l_align;
        h["val"] = metrics_json(e.val);
        h["active_slot"] = e.active_slot;
        h["steps"] = {e.steps[0], e.steps[1], e.steps[2], e.steps[3], e.steps[4]};
        h["train_acc"] = e.train_acc;
        h["gen_mu_gap"] = e.gen_mu_gap;
        h["gen_acc"] = e.gen_acc;
        hist.push_back(h);
    }
    j["epochs"] = hist;
    json t = json::array();
    for (const auto& [name, m] : tests) {
        json item;
        item["graph"] = name;
        item["metrics"] = metrics_json(m);
        t.push_back(item);
    }
    j["tests"] = t;
    return j.dump(2) + "\n";
}

}  // namespace fatra
