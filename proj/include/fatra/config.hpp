#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fatra/dataset.hpp"
#include "fatra/pipeline.hpp"
#include "fatra/synthetic.hpp"

namespace fatra {

// A graph source: dataset files or a synthetic sampling spec.
struct SourceSpec {
    std::optional<DatasetManifest> manifest;
    std::optional<SyntheticSpec> synthetic;

    AttributedGraph load(IngestSummary* summary = nullptr) const;
};

struct TheoryConfig {
    double delta = 0.1;
    std::size_t trials = 1000;
    std::size_t random_instances = 50;
    std::vector<SyntheticSpec> specs;
};

struct ExperimentConfig {
    std::optional<SourceSpec> train;
    std::vector<SourceSpec> tests;
    TrainConfig tc;
    std::string model_kind = "fatragnn";  // fatragnn | gcn | mlp
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    std::string out_dir = "out";
    std::vector<double> synth_targets;
    std::map<std::string, std::vector<double>> sweep;
    TheoryConfig theory;
};

// Parses and validates; an unknown or ill-typed key raises ConfigError naming
// the first offending key.
ExperimentConfig load_config(const std::string& path);

// JSON echo of a train config (embedded into run records).
std::string train_config_json(const TrainConfig& tc);

}  // namespace fatra
