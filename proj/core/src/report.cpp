#include "ising/report.hpp"

#include <fstream>

#include <json.hpp>

#include "ising/version.hpp"

namespace ising {

namespace {

using Json = nlohmann::ordered_json;

Json rational_json(const Rational& r) { return num::to_string(r); }

template <class S>
Json weight_json(const S& w) {
  if constexpr (std::is_same_v<S, Rational>)
    return rational_json(w);
  else
    return num::to_double(w);
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write output file: " + path);
  out << content;
  if (!out) throw ValidationError("write failed: " + path);
}

void write_manifest(const RunManifest& manifest, const std::string& artifact_path) {
  Json j;
  j["schema_version"] = 1;
  j["tool"] = "expander-ising";
  j["version"] = kVersion;
  j["subcommand"] = manifest.subcommand;
  j["graph"] = manifest.graph;
  j["lambda"] = manifest.lambda;
  j["q"] = manifest.q;
  j["mode"] = manifest.mode;
  if (manifest.seed) j["seed"] = *manifest.seed;
  j["outputs"] = manifest.outputs;
  for (const auto& [key, value] : manifest.extra) j[key] = value;
  write_text_file(artifact_path + ".manifest.json", j.dump(2) + "\n");
}

std::string tv_curve_csv(const std::vector<TvPoint<double>>& curve) {
  std::string out = "t,tv\n";
  for (const auto& pt : curve) {
    out += std::to_string(pt.t);
    out += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", pt.tv);
    out += buf;
    out += '\n';
  }
  return out;
}

std::string tv_curve_csv(const std::vector<TvPoint<Rational>>& curve) {
  std::string out = "t,tv\n";
  for (const auto& pt : curve)
    out += std::to_string(pt.t) + "," + num::to_string(pt.tv) + "\n";
  return out;
}

std::string class_report_json(const BipartiteGraph& g, const ClassReport& rep) {
  Json j;
  j["schema_version"] = 1;
  j["graph"] = g.name;
  j["n"] = g.n;
  j["d"] = g.d;
  j["max_codegree"] = rep.max_codegree;
  j["expansion_ok"] = tri_state_name(rep.expansion_ok);
  if (rep.expansion_witness) j["expansion_witness"] = set_to_indices(*rep.expansion_witness);
  j["expansion_ratio_min"] = rational_json(rep.expansion_ratio_min);
  j["expansion_margin_min"] = rep.expansion_margin_min;
  j["expansion_checked_max"] = rep.expansion_checked_max;
  j["h_prime_ok"] = tri_state_name(rep.h_prime_ok);
  if (rep.h_prime_witness) j["h_prime_witness"] = set_to_indices(*rep.h_prime_witness);
  j["h_prime_checked_max"] = rep.h_prime_checked_max;
  j["n_over_d6_logd"] = rep.n_over_d6_logd;
  return j.dump(2) + "\n";
}

namespace {

template <class S>
std::string mixing_report_json_impl(const MixingReport<S>& rep) {
  Json j;
  j["schema_version"] = 1;
  j["partition"] = weight_json(rep.partition);
  j["weight_majority_even"] = weight_json(rep.weight_se);
  j["weight_majority_odd"] = weight_json(rep.weight_so);
  j["weight_balanced"] = weight_json(rep.weight_balanced);
  j["q_cut_times_z"] = weight_json(rep.q_cut_z);
  j["mu_majority_even"] = weight_json(rep.mu_se);
  j["phi_majority_even"] = weight_json(rep.phi_se);
  j["bound_rhs"] = weight_json(rep.bound_rhs);
  return j.dump(2) + "\n";
}

template <class S>
std::string cluster_truncation_json_impl(const ClusterTruncation<S>& trunc, size_t polymers,
                                         const std::optional<S>& xi) {
  Json j;
  j["schema_version"] = 1;
  j["side"] = side_name(trunc.side);
  j["k"] = trunc.k;
  j["value"] = weight_json(trunc.value);
  Json per_size = Json::array();
  for (int k = 1; k <= trunc.k; ++k) per_size.push_back(Json::array({k, weight_json(trunc.per_size[k])}));
  j["per_size"] = per_size;
  j["polymer_count"] = polymers;
  j["cluster_count"] = trunc.ledger_count;
  if (xi) {
    j["xi_exact"] = weight_json(*xi);
    j["exp_value_minus_xi"] =
        std::exp(num::to_double(trunc.value)) - num::to_double(*xi);
  }
  return j.dump(2) + "\n";
}

}  // namespace

std::string mixing_report_json(const MixingReport<Rational>& rep) {
  return mixing_report_json_impl(rep);
}
std::string mixing_report_json(const MixingReport<double>& rep) {
  return mixing_report_json_impl(rep);
}
std::string cluster_truncation_json(const ClusterTruncation<Rational>& trunc, size_t polymers,
                                    const std::optional<Rational>& xi) {
  return cluster_truncation_json_impl(trunc, polymers, xi);
}
std::string cluster_truncation_json(const ClusterTruncation<double>& trunc, size_t polymers,
                                    const std::optional<double>& xi) {
  return cluster_truncation_json_impl(trunc, polymers, xi);
}

std::string approx_z_json(const ApproxZReport& rep) {
  Json j;
  j["schema_version"] = 1;
  j["z_hat"] = rep.z_hat;
  j["log_z_hat"] = rep.log_z_hat;
  j["z_hat_direct"] = rep.z_hat_direct;
  j["l_even"] = rep.l_even;
  j["l_odd"] = rep.l_odd;
  j["k0"] = rep.k0;
  Json flags = Json::array();
  if (rep.k0_certified) flags.push_back("k0-certified");
  if (rep.k0_overridden) flags.push_back("k0-overridden");
  j["flags"] = flags;
  if (rep.exact_z) j["exact_z"] = *rep.exact_z;
  if (rep.rel_err) j["rel_err"] = *rep.rel_err;
  if (rep.rel_err_direct) j["rel_err_direct"] = *rep.rel_err_direct;
  return j.dump(2) + "\n";
}

std::string sample_jsonl_line(const VertexSet& s) {
  Json arr = Json::array();
  for (int v : set_to_indices(s)) arr.push_back(v);
  return arr.dump() + "\n";
}

}  // namespace ising
