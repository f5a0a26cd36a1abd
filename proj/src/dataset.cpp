#include "fatra/dataset.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fatra {

namespace {

std::vector<std::string> split_fields(const std::string& line, bool comma) {
    std::vector<std::string> out;
    if (comma) {
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        out.push_back(cur);
        for (std::string& f : out) {
            while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
            while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
                f.pop_back();
        }
    } else {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || *end != '\0')
        throw IngestError(where + ": cannot parse number '" + s + "'");
    return v;
}

std::size_t resolve_column(const std::vector<std::string>& header, const std::string& key,
                           const char* what) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == key) return i;
    // fall back to a numeric index
    char* end = nullptr;
    const long idx = std::strtol(key.c_str(), &end, 10);
    if (end != key.c_str() && *end == '\0' && idx >= 0 &&
        static_cast<std::size_t>(idx) < header.size())
        return static_cast<std::size_t>(idx);
    throw IngestError(std::string(what) + " column '" + key + "' not found in header");
}

std::uint8_t to_binary(double v, std::size_t row, const char* what) {
    if (v == 0.0) return 0;
    if (v == 1.0) return 1;
    throw IngestError(std::string(what) + " value must be binary (0/1), row " +
                      std::to_string(row) + " has " + std::to_string(v));
}

}  // namespace

std::string IngestSummary::to_text() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "n=%zu edges=%zu zeta=%zu dropped_self_loops=%zu u=%.6f u'=%.6f "
                  "alpha=%.6f mu_gap=%.6f",
                  n, num_edges, zeta, dropped_self_loops, u, u_signed, alpha, mu_gap);
    return buf;
}

IngestSummary summarize(const AttributedGraph& g) {
    IngestSummary s;
    s.n = g.n;
    s.num_edges = g.edges.size();
    s.zeta = g.feature_dim();
    const BalanceStats bal = sensitive_balance(g);
    s.u = bal.u_mean;
    s.u_signed = bal.signed_mean;
    s.alpha = sensitive_homophily(g);
    try {
        s.mu_gap = group_mean_gap(g.X, g.F);
    } catch (const UndefinedMetricError&) {
        s.mu_gap = 0.0;
    }
    return s;
}

AttributedGraph ingest(const DatasetManifest& manifest, IngestSummary* summary) {
    std::ifstream ff(manifest.features_path);
    if (!ff) throw IngestError("cannot open features file: " + manifest.features_path);

    std::string line;
    if (!std::getline(ff, line))
        throw IngestError("features file is empty: " + manifest.features_path);
    const bool comma = line.find(',') != std::string::npos;
    const std::vector<std::string> header = split_fields(line, comma);
    if (header.empty()) throw IngestError("features file has an empty header");

    const std::size_t sens_col =
        resolve_column(header, manifest.sensitive_column, "sensitive");
    const std::size_t label_col = resolve_column(header, manifest.label_column, "label");
    if (sens_col == label_col)
        throw IngestError("sensitive and label columns coincide");

    std::vector<std::size_t> x_cols;
    std::optional<std::size_t> sensitive_channel;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_col) continue;
        if (c == sens_col && manifest.drop_sensitive) continue;
        if (c == sens_col) sensitive_channel = x_cols.size();
        x_cols.push_back(c);
    }
    if (x_cols.empty()) throw IngestError("no feature columns left");

    std::vector<std::vector<double>> rows;
    std::vector<std::uint8_t> F;
    std::vector<std::uint8_t> Y;
    std::size_t line_no = 1;
    while (std::getline(ff, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line, comma);
        if (fields.size() != header.size())
            throw IngestError("features line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(header.size()));
        const std::string where = "features line " + std::to_string(line_no);
        std::vector<double> xr;
        xr.reserve(x_cols.size());
        for (std::size_t c : x_cols) xr.push_back(parse_double(fields[c], where));
        F.push_back(to_binary(parse_double(fields[sens_col], where), rows.size(), "sensitive"));
        Y.push_back(to_binary(parse_double(fields[label_col], where), rows.size(), "label"));
        rows.push_back(std::move(xr));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw IngestError("features file has no data rows");

    Matrix X(n, x_cols.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < x_cols.size(); ++j) X(i, j) = rows[i][j];

    std::ifstream ef(manifest.edges_path);
    if (!ef) throw IngestError("cannot open edges file: " + manifest.edges_path);
    std::vector<Edge> edges;
    std::size_t eline = 0;
    std::size_t self_loops = 0;
    while (std::getline(ef, line)) {
        ++eline;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        long a = -1;
        long b = -1;
        if (!(ss >> a >> b))
            throw IngestError("edges line " + std::to_string(eline) + ": expected two indices");
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n ||
            static_cast<std::size_t>(b) >= n)
            throw IngestError("edges line " + std::to_string(eline) + ": index out of range");
        if (a == b) {
            ++self_loops;  // dropped with a warning in the summary
            continue;
        }
        edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
    }

    AttributedGraph g = AttributedGraph::create(n, std::move(edges), std::move(X),
                                                std::move(F), std::move(Y),
                                                sensitive_channel);
    if (summary) {
        *summary = summarize(g);
        summary->dropped_self_loops = self_loops;
    }
    return g;
}

DatasetManifest save_graph(const AttributedGraph& g, const std::string& dir,
                           const std::string& stem) {
    std::filesystem::create_directories(dir);
    const std::string fpath = dir + "/" + stem + ".features.csv";
    const std::string epath = dir + "/" + stem + ".edges.txt";

    std::ofstream ff(fpath);
    if (!ff) throw IngestError("cannot write " + fpath);
    const std::size_t zeta = g.feature_dim();
    const bool embedded = g.sensitive_channel.has_value();
    for (std::size_t j = 0; j < zeta; ++j) ff << "x" << j << ",";
    if (!embedded) ff << "sens,";
    ff << "label\n";
    char buf[64];
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < zeta; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.X(i, j));
            ff << buf << ",";
        }
        if (!embedded) ff << static_cast<int>(g.F[i]) << ",";
        ff << static_cast<int>(g.Y[i]) << "\n";
    }
    ff.close();

    std::ofstream ef(epath);
    if (!ef) throw IngestError("cannot write " + epath);
    for (const Edge& e : g.edges) ef << e.first << " " << e.second << "\n";
    ef.close();

    DatasetManifest m;
    m.features_path = fpath;
    m.edges_path = epath;
    m.sensitive_column = embedded ? "x" + std::to_string(*g.sensitive_channel) : "sens";
    m.label_column = "label";
    m.drop_sensitive = !embedded;
    return m;
}

}  // namespace fatra
