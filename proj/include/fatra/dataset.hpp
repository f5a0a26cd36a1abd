#pragma once

#include <string>

#include "fatra/graph.hpp"

namespace fatra {

// Feature file: delimited text (comma or whitespace), header row, one row per
// node in index order. Edge file: whitespace-separated 0-based index pairs,
// one per line. Sensitive/label columns are named or given as 0-based indices.
struct DatasetManifest {
    std::string features_path;
    std::string edges_path;
    std::string sensitive_column;
    std::string label_column;
    bool drop_sensitive = false;  // remove the sensitive column from X
};

struct IngestSummary {
    std::size_t n = 0;
    std::size_t num_edges = 0;
    std::size_t zeta = 0;
    std::size_t dropped_self_loops = 0;
    double u = 0.0;
    double u_signed = 0.0;
    double alpha = 0.0;
    double mu_gap = 0.0;

    std::string to_text() const;
};

AttributedGraph ingest(const DatasetManifest& manifest, IngestSummary* summary = nullptr);

// Writes <stem>.features.csv and <stem>.edges.txt under dir and returns a
// manifest that ingests back to the identical graph (masks are not
// persisted; they are derived from seeds). Doubles are written with 17
// significant digits, which round-trips exactly.
DatasetManifest save_graph(const AttributedGraph& g, const std::string& dir,
                           const std::string& stem);

IngestSummary summarize(const AttributedGraph& g);

}  // namespace fatra
