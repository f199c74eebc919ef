// expander-ising: antiferromagnetic Ising model on bipartite regular graphs.
// Exact desk-scale oracles, Glauber dynamics diagnostics, and the polymer
// model / cluster expansion sampler and partition-function approximator.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "ising/model.hpp"
#include "ising/report.hpp"
#include "ising/sampler.hpp"
#include "ising/version.hpp"

using namespace ising;

namespace {

struct CommonOpts {
  std::string graph;
  std::string lambda_text = "1";
  std::string q_text;
  std::optional<double> beta;
  std::string mode = "exact";
  int threads = 0;
};

void add_params(CLI::App* cmd, CommonOpts& opts, bool with_params = true) {
  cmd->add_option("--graph", opts.graph,
                  "graph spec (hypercube:d, cycle:m, torus:m^t, middle-layer:d, "
                  "cartesian:<a>x<b>, file:<path>)")
      ->required();
  if (with_params) {
    cmd->add_option("--lambda", opts.lambda_text, "fugacity (rational: 1, 1/2, 0.25)");
    cmd->add_option("--q", opts.q_text, "edge factor q = e^{-beta} (rational)");
    cmd->add_option("--beta", opts.beta, "inverse temperature (float mode only)");
    cmd->add_option("--mode", opts.mode, "numeric mode: exact | float")
        ->check(CLI::IsMember({"exact", "float"}));
  }
  cmd->add_option("--threads", opts.threads,
                  "worker threads (default: cores; exact mode forces 1)");
}

IsingParams make_params(const CommonOpts& opts) {
  const NumericMode mode =
      opts.mode == "float" ? NumericMode::FloatLog : NumericMode::ExactRational;
  if (opts.beta && !opts.q_text.empty())
    throw ValidationError("pass either --q or --beta, not both");
  if (opts.beta)
    return IsingParams::from_beta(num::to_double(num::parse_rational(opts.lambda_text)),
                                  *opts.beta, mode);
  const std::string q = opts.q_text.empty() ? "0" : opts.q_text;
  return IsingParams(num::parse_rational(opts.lambda_text), num::parse_rational(q), mode);
}

int resolve_threads(const CommonOpts& opts, const IsingParams& p) {
  if (p.mode == NumericMode::ExactRational) return 1;  // deterministic golden runs
  if (opts.threads > 0) return opts.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

RunManifest base_manifest(const std::string& subcommand, const CommonOpts& opts,
                          const IsingParams& p) {
  RunManifest m;
  m.subcommand = subcommand;
  m.graph = opts.graph;
  m.lambda = num::to_string(p.lambda);
  m.q = num::to_string(p.q);
  m.mode = p.mode == NumericMode::ExactRational ? "exact" : "float";
  return m;
}

VertexSet parse_start_state(const BipartiteGraph& g, const std::string& text) {
  if (text.empty() || text == "empty") return VertexSet(g.n);
  if (text == "even") return g.even;
  if (text == "odd") return g.odd;
  VertexSet s(g.n);
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const int v = std::stoi(text.substr(pos, next - pos));
    if (v < 0 || v >= g.n) throw ValidationError("start state vertex out of range");
    s.set(v);
    pos = next + 1;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antiferromagnetic Ising model on bipartite expanders"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Budgets budgets;
  try {
    budgets = Budgets::from_env();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  // ---- gen ----
  CommonOpts gen_opts;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a graph and write its edge file");
  add_params(gen, gen_opts, false);
  gen->add_option("--out", gen_out, "output edge file")->required();

  // ---- validate ----
  CommonOpts val_opts;
  int val_delta2 = 2;
  std::string val_kappa = "1/2";
  int val_budget = 12;
  std::string val_out;
  auto* val = app.add_subcommand("validate", "check codegree and expansion conditions");
  add_params(val, val_opts, false);
  val->add_option("--delta2", val_delta2, "codegree bound to report against");
  val->add_option("--kappa", val_kappa, "expansion exponent (rational)");
  val->add_option("--budget", val_budget, "max subset size checked exhaustively");
  val->add_option("--out", val_out, "write the JSON report here");

  // ---- exact-z ----
  CommonOpts zopts;
  std::string z_out;
  auto* zexact = app.add_subcommand("exact-z", "exact partition function");
  add_params(zexact, zopts);
  zexact->add_option("--out", z_out, "optional output file for the value");

  // ---- percolation-check ----
  CommonOpts perc_opts;
  std::string perc_p = "1/2";
  auto* perc = app.add_subcommand("percolation-check",
                                  "verify E[Z_{G_p}(lambda)] = Z_G(lambda, 1-p) exactly");
  add_params(perc, perc_opts, false);
  perc->add_option("--lambda", perc_opts.lambda_text, "fugacity (rational)");
  perc->add_option("--p", perc_p, "edge retention probability (rational)");

  // ---- approx-z ----
  CommonOpts az_opts;
  double az_epsilon = 0.1;
  long az_k0 = 0;
  double az_kappa = 0.5;
  int az_delta2 = 2;
  std::string az_out;
  auto* az = app.add_subcommand("approx-z", "cluster-expansion partition approximation");
  add_params(az, az_opts);
  az->add_option("--epsilon", az_epsilon, "target accuracy");
  az->add_option("--k0", az_k0, "override the truncation order");
  az->add_option("--kappa", az_kappa, "expansion exponent of the graph family");
  az->add_option("--delta2", az_delta2, "codegree bound of the graph family");
  az->add_option("--out", az_out, "write the JSON report here");

  // ---- sample ----
  CommonOpts s_opts;
  uint64_t s_seed = 0;
  int s_count = 1;
  double s_epsilon = 0.1;
  long s_k0 = 0;
  double s_kappa = 0.5;
  int s_delta2 = 2;
  std::string s_mode = "exact";
  bool s_force_polymer = false;
  bool s_l_direct = false;
  std::string s_out;
  auto* sample = app.add_subcommand("sample", "draw approximate Ising samples");
  add_params(sample, s_opts);
  sample->add_option("--seed", s_seed, "RNG seed (required for reproducibility)")->required();
  sample->add_option("--count", s_count, "number of samples");
  sample->add_option("--epsilon", s_epsilon, "sampler accuracy target");
  sample->add_option("--k0", s_k0, "override the polymer size cap");
  sample->add_option("--kappa", s_kappa, "expansion exponent of the graph family");
  sample->add_option("--delta2", s_delta2, "codegree bound of the graph family");
  sample->add_option("--sampler-mode", s_mode, "restricted-Z mode: exact | truncated")
      ->check(CLI::IsMember({"exact", "truncated"}));
  sample->add_flag("--force-polymer-path", s_force_polymer,
                   "skip the brute-force branch even when epsilon allows it");
  sample->add_flag("--l-direct-side", s_l_direct,
                   "defect-side coin on raw truncation values (literal algorithm reading)");
  sample->add_option("--out", s_out, "output JSONL file")->required();

  // ---- mix ----
  CommonOpts m_opts;
  std::string m_chain = "glauber";
  int m_tmax = 100;
  std::string m_s0 = "empty";
  std::string m_auto_file;
  std::string m_out;
  auto* mix = app.add_subcommand("mix", "exact total-variation mixing curve");
  add_params(mix, m_opts);
  mix->add_option("--chain", m_chain, "glauber | flips")
      ->check(CLI::IsMember({"glauber", "flips"}));
  mix->add_option("--t-max", m_tmax, "number of steps");
  mix->add_option("--s0", m_s0, "start state: empty | even | odd | v1,v2,...");
  mix->add_option("--automorphism", m_auto_file,
                  "flip automorphism file (one 'i -> j' per line)");
  mix->add_option("--out", m_out, "output CSV (t,tv)")->required();

  // ---- conductance ----
  CommonOpts c_opts;
  std::string c_out;
  auto* cond = app.add_subcommand("conductance", "exact even/odd bottleneck report");
  add_params(cond, c_opts);
  cond->add_option("--out", c_out, "write the JSON report here");

  // ---- cluster-report ----
  CommonOpts cl_opts;
  std::string cl_side = "even";
  int cl_k = 4;
  std::string cl_out;
  auto* clr = app.add_subcommand("cluster-report", "truncated cluster expansion of one side");
  add_params(clr, cl_opts);
  clr->add_option("--side", cl_side, "even | odd")->check(CLI::IsMember({"even", "odd"}));
  clr->add_option("--k", cl_k, "truncation order");
  clr->add_option("--out", cl_out, "write the JSON report here")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const auto g = generate_graph(gen_opts.graph);
      write_graph_file(g, gen_out);
      auto manifest = base_manifest("gen", gen_opts, IsingParams());
      manifest.outputs = {gen_out};
      write_manifest(manifest, gen_out);
      std::printf("wrote %s: n=%d d=%d\n", gen_out.c_str(), g.n, g.d);
    } else if (*val) {
      const auto g = generate_graph(val_opts.graph);
      const auto rep = validate_class(g, val_delta2, num::parse_rational(val_kappa), val_budget);
      const std::string body = class_report_json(g, rep);
      if (!val_out.empty()) {
        write_text_file(val_out, body);
        auto manifest = base_manifest("validate", val_opts, IsingParams());
        manifest.outputs = {val_out};
        manifest.extra["kappa"] = val_kappa;
        manifest.extra["budget"] = std::to_string(val_budget);
        write_manifest(manifest, val_out);
      }
      std::fputs(body.c_str(), stdout);
    } else if (*zexact) {
      const auto g = generate_graph(zopts.graph);
      const auto p = make_params(zopts);
      const int threads = resolve_threads(zopts, p);
      std::string value;
      if (p.mode == NumericMode::ExactRational) {
        value = num::to_string(partition_exact<Rational>(g, p, budgets, threads));
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g",
                      num::to_double(partition_exact<LogWeight>(g, p, budgets, threads)));
        value = buf;
      }
      std::printf("%s\n", value.c_str());
      if (!z_out.empty()) {
        write_text_file(z_out, value + "\n");
        auto manifest = base_manifest("exact-z", zopts, p);
        manifest.outputs = {z_out};
        write_manifest(manifest, z_out);
      }
    } else if (*perc) {
      const auto g = generate_graph(perc_opts.graph);
      const Rational lam = num::parse_rational(perc_opts.lambda_text);
      const Rational pe = num::parse_rational(perc_p);
      const Rational lhs = percolation_expectation<Rational>(g, lam, pe, budgets);
      const IsingParams ip(lam, 1 - pe);
      const Rational rhs = partition_exact<Rational>(g, ip, budgets);
      std::printf("percolation expectation: %s\n", num::to_string(lhs).c_str());
      std::printf("partition at q=1-p:      %s\n", num::to_string(rhs).c_str());
      std::printf("identity holds: %s\n", lhs == rhs ? "true" : "false");
    } else if (*az) {
      const auto g = generate_graph(az_opts.graph);
      const auto p = make_params(az_opts);
      SamplerConfig cfg;
      cfg.epsilon = az_epsilon;
      cfg.kappa = az_kappa;
      cfg.delta2 = az_delta2;
      if (az_k0 > 0) cfg.k_override = az_k0;
      const auto rep = approx_Z(g, p, cfg, budgets);
      const std::string body = approx_z_json(rep);
      if (!az_out.empty()) {
        write_text_file(az_out, body);
        auto manifest = base_manifest("approx-z", az_opts, p);
        manifest.outputs = {az_out};
        manifest.extra["epsilon"] = std::to_string(az_epsilon);
        manifest.extra["k0"] = std::to_string(rep.k0);
        write_manifest(manifest, az_out);
      }
      std::fputs(body.c_str(), stdout);
    } else if (*sample) {
      const auto g = generate_graph(s_opts.graph);
      const auto p = make_params(s_opts);
      SamplerConfig cfg;
      cfg.epsilon = s_epsilon;
      cfg.kappa = s_kappa;
      cfg.delta2 = s_delta2;
      cfg.seed = s_seed;
      cfg.mode = s_mode == "truncated" ? SamplerConfig::Mode::TruncatedRestrictedZ
                                       : SamplerConfig::Mode::ExactRestrictedZ;
      cfg.force_polymer_path = s_force_polymer;
      cfg.l_direct_side = s_l_direct;
      if (s_k0 > 0) cfg.k_override = s_k0;
      std::string body;
      for (int i = 0; i < s_count; ++i) {
        CounterRng rng(s_seed, static_cast<uint64_t>(i));  // one stream per replica
        body += sample_jsonl_line(sample_ising(g, p, cfg, rng, budgets));
      }
      write_text_file(s_out, body);
      auto manifest = base_manifest("sample", s_opts, p);
      manifest.seed = s_seed;
      manifest.outputs = {s_out};
      manifest.extra["count"] = std::to_string(s_count);
      manifest.extra["epsilon"] = std::to_string(s_epsilon);
      manifest.extra["sampler_mode"] = s_mode;
      write_manifest(manifest, s_out);
      std::printf("wrote %d samples to %s\n", s_count, s_out.c_str());
    } else if (*mix) {
      const auto g = generate_graph(m_opts.graph);
      const auto p = make_params(m_opts);
      ChainSpec spec;
      spec.kind = m_chain == "flips" ? ChainKind::GlauberWithFlips : ChainKind::Glauber;
      spec.params = p;
      if (!m_auto_file.empty()) spec.flip_automorphism = load_automorphism_file(g, m_auto_file);
      const VertexSet s0 = parse_start_state(g, m_s0);
      std::string body;
      if (p.mode == NumericMode::ExactRational) {
        body = tv_curve_csv(exact_tv_curve<Rational>(g, spec, s0, m_tmax, budgets));
      } else {
        body = tv_curve_csv(exact_tv_curve<double>(g, spec, s0, m_tmax, budgets));
      }
      write_text_file(m_out, body);
      auto manifest = base_manifest("mix", m_opts, p);
      manifest.outputs = {m_out};
      manifest.extra["chain"] = m_chain;
      manifest.extra["t_max"] = std::to_string(m_tmax);
      manifest.extra["s0"] = m_s0;
      write_manifest(manifest, m_out);
      std::printf("wrote %s\n", m_out.c_str());
    } else if (*cond) {
      const auto g = generate_graph(c_opts.graph);
      const auto p = make_params(c_opts);
      std::string body;
      if (p.mode == NumericMode::ExactRational)
        body = mixing_report_json(conductance_exact<Rational>(g, p, budgets));
      else
        body = mixing_report_json(conductance_exact<double>(g, p, budgets));
      if (!c_out.empty()) {
        write_text_file(c_out, body);
        auto manifest = base_manifest("conductance", c_opts, p);
        manifest.outputs = {c_out};
        write_manifest(manifest, c_out);
      }
      std::fputs(body.c_str(), stdout);
    } else if (*clr) {
      const auto g = generate_graph(cl_opts.graph);
      const auto p = make_params(cl_opts);
      const Side side = cl_side == "even" ? Side::Even : Side::Odd;
      const auto sys = PolymerSystem::build(g, side, cl_k);
      std::string body;
      if (p.mode == NumericMode::ExactRational) {
        const auto trunc = compute_L<Rational>(sys, p, cl_k, budgets);
        std::optional<Rational> xi;
        try {
          xi = xi_exact<Rational>(sys, p, budgets);
        } catch (const BudgetError&) {
        }
        body = cluster_truncation_json(trunc, sys.count(), xi);
      } else {
        const auto trunc = compute_L<double>(sys, p, cl_k, budgets);
        std::optional<double> xi;
        try {
          xi = xi_exact<double>(sys, p, budgets);
        } catch (const BudgetError&) {
        }
        body = cluster_truncation_json(trunc, sys.count(), xi);
      }
      write_text_file(cl_out, body);
      auto manifest = base_manifest("cluster-report", cl_opts, p);
      manifest.outputs = {cl_out};
      manifest.extra["side"] = cl_side;
      manifest.extra["k"] = std::to_string(cl_k);
      write_manifest(manifest, cl_out);
      std::fputs(body.c_str(), stdout);
    }
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
