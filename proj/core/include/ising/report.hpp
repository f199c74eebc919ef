#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ising/cluster.hpp"
#include "ising/graph.hpp"
#include "ising/mcmc.hpp"
#include "ising/params.hpp"
#include "ising/sampler.hpp"

namespace ising {

// Everything needed to reproduce a run, written next to each artifact as
// <artifact>.manifest.json. No timestamps: identical inputs give identical
// bytes.
struct RunManifest {
  std::string subcommand;
  std::string graph;
  std::string lambda;
  std::string q;
  std::string mode;
  std::optional<uint64_t> seed;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> extra;
};

void write_manifest(const RunManifest& manifest, const std::string& artifact_path);

void write_text_file(const std::string& path, const std::string& content);

// CSV with header "t,tv"
std::string tv_curve_csv(const std::vector<TvPoint<double>>& curve);
std::string tv_curve_csv(const std::vector<TvPoint<Rational>>& curve);

// JSON bodies (stable field order, schema_version field)
std::string class_report_json(const BipartiteGraph& g, const ClassReport& rep);
std::string mixing_report_json(const MixingReport<Rational>& rep);
std::string mixing_report_json(const MixingReport<double>& rep);
std::string cluster_truncation_json(const ClusterTruncation<Rational>& trunc, size_t polymers,
                                    const std::optional<Rational>& xi);
std::string cluster_truncation_json(const ClusterTruncation<double>& trunc, size_t polymers,
                                    const std::optional<double>& xi);
std::string approx_z_json(const ApproxZReport& rep);

// one sample per line: sorted vertex array as a JSON array
std::string sample_jsonl_line(const VertexSet& s);

}  // namespace ising
