// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
//
// dcal: calibration metrics and DP-noise post-processing toolkit.
// Subcommands: metrics, postprocess, adversary, experiment, verify.
// Stdout is byte-identical for identical invocation and seed; human
// progress goes to stderr.  Exit codes: 0 success, 1 verification failure
// or FAILED report row, 2 input error, 3 internal numeric error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcal/adversary.hpp"
#include "dcal/csv.hpp"
#include "dcal/emit.hpp"
#include "dcal/error.hpp"
#include "dcal/experiments.hpp"
#include "dcal/lp.hpp"
#include "dcal/metrics.hpp"
#include "dcal/model.hpp"
#include "dcal/noise.hpp"
#include "dcal/postprocess.hpp"
#include "dcal/rng.hpp"
#include "dcal/verify.hpp"

namespace {

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string format = "json";
  bool quiet = false;
};

// Whole input as a string; "-" reads stdin.
std::string slurp(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw dcal::InputError("cannot open " + path);
    ss << f.rdbuf();
  }
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw dcal::InputError("cannot open " + path + " for writing");
  f << content;
  if (!f) throw dcal::InputError("cannot write " + path);
}

// ---- metrics ---------------------------------------------------------

int cmd_metrics(const GlobalFlags& g, const std::string& input, int grid_m,
                bool coupling) {
  std::istringstream in(slurp(input));
  std::vector<std::pair<std::string, std::string>> fields;
  auto push = [&fields](const std::string& k, double v) {
    fields.emplace_back(k, dcal::format_g12(v));
  };
  dcal::MetricsReport rep;
  double dist_v = 0.0, dl_v = 0.0;
  if (coupling) {
    dcal::Coupling c = dcal::build_coupling(dcal::read_coupling_csv(in));
    rep = dcal::compute_metrics(
        dcal::coupling_marginal(c, dcal::CouplingSide::kQ), grid_m);
    dist_v = dcal::dist(c);
    dl_v = dcal::decision_loss(c);
  } else {
    rep = dcal::compute_metrics(dcal::build_joint(dcal::read_samples_csv(in)),
                                grid_m);
  }
  push("ece", rep.ece);
  push("smcal", rep.smcal);
  push("dtc_primal", rep.dtc_primal);
  push("dtc_dual", rep.dtc_dual);
  fields.emplace_back("dtc_grid_m", std::to_string(rep.dtc_grid_m));
  push("cdl_vshape", rep.cdl_vshape);
  push("cdl_vshape_mu", rep.cdl_vshape_mu);
  push("cdl_lp", rep.cdl_lp);
  if (coupling) {
    push("dist", dist_v);
    push("decision_loss", dl_v);
  }
  if (g.format == "csv") {
    std::cout << "metric,value\n";
    for (const auto& [k, v] : fields) std::cout << k << ',' << v << '\n';
  } else {
    dcal::JsonObject obj;
    for (const auto& [k, v] : fields) obj.raw(k, v);
    std::cout << obj.str() << '\n';
  }
  return 0;
}

// ---- postprocess -----------------------------------------------------

int cmd_postprocess(const GlobalFlags& g, const std::string& input,
                    const std::string& mech_spec, const std::string& mode,
                    bool online, long long horizon) {
  dcal::NoiseMechanism mech = dcal::parse_mech_spec(mech_spec);
  std::istringstream in(slurp(input));
  std::vector<dcal::Sample> rows = dcal::read_samples_csv(in);
  if (online) {
    std::vector<double> qs;
    std::vector<int> thetas;
    for (const dcal::Sample& s : rows) {
      if (s.weight != 1.0) {
        throw dcal::InputError("online rows cannot carry weights");
      }
      qs.push_back(s.prediction);
      thetas.push_back(s.state);
    }
    if (horizon > 0) {
      if (static_cast<long long>(qs.size()) < horizon) {
        throw dcal::InputError("input has fewer rows than --horizon");
      }
      qs.resize(static_cast<std::size_t>(horizon));
      thetas.resize(static_cast<std::size_t>(horizon));
    }
    std::unique_ptr<dcal::PostProcessor> pp =
        dcal::make_privacy_online_pp(mech, g.seed);
    dcal::OnlineRunResult out = dcal::run_online(*pp, qs, thetas);
    std::cout << "q,state,p\n";
    for (std::size_t t = 0; t < qs.size(); ++t) {
      std::cout << dcal::format_g12(qs[t]) << ',' << thetas[t] << ','
                << dcal::format_g12(out.ps[t]) << '\n';
    }
    if (!g.quiet) {
      std::cerr << "online report: ece " << dcal::format_g12(out.report.ece)
                << ", cdl_vshape " << dcal::format_g12(out.report.cdl_vshape)
                << ", cdl_lp " << dcal::format_g12(out.report.cdl_lp) << '\n';
    }
    return 0;
  }
  if (mode == "mc") {
    // Row-wise draws: one unbinned mechanism sample per input row.
    dcal::Rng rng(g.seed);
    std::cout << "prediction,state,weight,p\n";
    for (const dcal::Sample& s : rows) {
      std::cout << dcal::format_g12(s.prediction) << ',' << s.state << ','
                << dcal::format_g12(s.weight) << ','
                << dcal::format_g12(dcal::sample(mech, s.prediction, rng))
                << '\n';
    }
    return 0;
  }
  // Analytic mode maps every prediction to a distribution over output
  // cells, so the result is the pushforward joint, not per-row values.
  dcal::EmpiricalJoint out = dcal::batch_apply(mech, dcal::build_joint(rows),
                                               dcal::BatchMode::analytic());
  dcal::write_joint_csv(std::cout, out);
  return 0;
}

// ---- adversary -------------------------------------------------------

int cmd_adversary(const GlobalFlags& g, double eps, long long horizon,
                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  dcal::BatchLbInstance inst = dcal::make_batch_lb(eps);
  {
    std::ostringstream ss;
    dcal::write_coupling_csv(ss, inst.coupling.atoms());
    files.push_back(out_dir + "/batch_coupling.csv");
    write_file(files.back(), ss.str());
  }
  if (horizon > 0) {
    if (horizon % 2 != 0) throw dcal::InputError("--horizon must be even");
    dcal::OnlineLbPair pair =
        dcal::make_online_lb(horizon / 2, eps, g.seed);
    auto dump = [&files, &out_dir](const std::string& name,
                                   const std::vector<double>& qs,
                                   const std::vector<int>& thetas) {
      std::ostringstream ss;
      ss << "q,state\n";
      for (std::size_t t = 0; t < qs.size(); ++t) {
        ss << dcal::format_g12(qs[t]) << ',' << thetas[t] << '\n';
      }
      files.push_back(out_dir + "/" + name);
      write_file(files.back(), ss.str());
    };
    dump("online_seq1.csv", pair.seq_q, pair.seq_theta);
    dump("online_seq2.csv", pair.seq_q2, pair.seq_theta2);
  }
  if (g.quiet) return 0;
  if (g.format == "csv") {
    std::cout << "file\n";
    for (const std::string& f : files) std::cout << f << '\n';
  } else {
    std::string arr = "[";
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (i > 0) arr += ",";
      arr += "\"" + dcal::json_escape(files[i]) + "\"";
    }
    arr += "]";
    dcal::JsonObject obj;
    obj.number("eps", eps);
    obj.integer("horizon", horizon);
    obj.text("out_dir", out_dir);
    obj.raw("files", arr);
    std::cout << obj.str() << '\n';
  }
  return 0;
}

// ---- experiment ------------------------------------------------------

void load_config(const std::string& path, dcal::ExperimentConfig* cfg,
                 std::string* sweep) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw dcal::InputError(std::string("config parse: ") + e.what());
  }
  if (!j.is_object()) throw dcal::InputError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "eps_list") {
        cfg->eps_list = value.get<std::vector<double>>();
      } else if (key == "mech_family") {
        cfg->mech_family = value.get<std::string>();
      } else if (key == "mode") {
        std::string m = value.get<std::string>();
        if (m != "analytic" && m != "mc") {
          throw dcal::InputError("config mode must be analytic or mc");
        }
        cfg->mode = m == "mc" ? dcal::BatchMode::Kind::kMonteCarlo
                              : dcal::BatchMode::Kind::kAnalytic;
      } else if (key == "trials") {
        cfg->trials = value.get<int>();
      } else if (key == "seed") {
        cfg->seed = value.get<std::uint64_t>();
      } else if (key == "horizon") {
        cfg->horizon = value.get<long long>();
      } else if (key == "grid_m") {
        cfg->grid_m = value.get<int>();
      } else if (key == "ece_bins") {
        cfg->ece_bins = value.get<int>();
      } else if (key == "mc_draws") {
        cfg->mc_draws = value.get<long long>();
      } else if (key == "sweep") {
        *sweep = value.get<std::string>();
      } else {
        throw dcal::InputError("unknown config key: " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw dcal::InputError(std::string("config value: ") + e.what());
  }
}

int cmd_experiment(const GlobalFlags& g, const dcal::ExperimentConfig& cfg,
                   const std::string& sweep, const std::string& out_dir) {
  if (sweep != "batch" && sweep != "online") {
    throw dcal::InputError("sweep must be batch or online");
  }
  if (sweep == "online") {
    if (cfg.horizon <= 0) {
      throw dcal::InputError("online sweep requires a positive horizon");
    }
    if (cfg.horizon % 2 != 0) {
      throw dcal::InputError("online horizon must be even");
    }
  }
  dcal::BoundReport rep = sweep == "online" ? dcal::run_online_sweep(cfg)
                                            : dcal::run_batch_sweep(cfg);
  std::string csv = dcal::report_to_csv(rep);
  std::string json = dcal::report_to_json(rep);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/report.csv", csv);
  write_file(out_dir + "/report.json", json + "\n");
  if (!g.quiet) {
    std::cout << (g.format == "csv" ? csv : json + "\n");
  }
  return rep.failed ? 1 : 0;
}

// ---- verify ----------------------------------------------------------

int cmd_verify(const GlobalFlags& g, const std::string& suite, bool inject) {
  dcal::VerifyOptions opts;
  opts.seed = g.seed;
  opts.inject_dp_violation = inject;
  bool all_pass = true;
  std::string arr = "[";
  std::string csv = "check,pass\n";
  if (suite == "quick") {
    std::vector<dcal::InvariantResult> inv = dcal::run_quick_suite(opts);
    for (std::size_t i = 0; i < inv.size(); ++i) {
      const dcal::InvariantResult& r = inv[i];
      all_pass = all_pass && r.pass;
      if (!g.quiet) {
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << ": "
                  << r.detail << '\n';
      }
      dcal::JsonObject obj;
      obj.text("name", r.name);
      obj.boolean("pass", r.pass);
      obj.text("detail", r.detail);
      if (i > 0) arr += ",";
      arr += obj.str();
      csv += r.name + "," + (r.pass ? "1" : "0") + "\n";
    }
  } else {
    std::vector<dcal::CriterionResult> res = dcal::run_all_criteria(opts);
    for (std::size_t i = 0; i < res.size(); ++i) {
      const dcal::CriterionResult& r = res[i];
      all_pass = all_pass && r.pass;
      if (!g.quiet) {
        std::cerr << (r.pass ? "PASS " : "FAIL ") << "criterion " << r.id
                  << " (" << r.title << "): " << r.detail << '\n';
      }
      dcal::JsonObject obj;
      obj.integer("id", r.id);
      obj.text("title", r.title);
      obj.boolean("pass", r.pass);
      obj.text("detail", r.detail);
      if (i > 0) arr += ",";
      arr += obj.str();
      csv += "criterion_" + std::to_string(r.id) + "," +
             (r.pass ? "1" : "0") + "\n";
    }
  }
  arr += "]";
  if (g.format == "csv") {
    std::cout << csv;
  } else {
    dcal::JsonObject root;
    root.text("suite", suite);
    root.boolean("pass", all_pass);
    root.raw("results", arr);
    std::cout << root.str() << '\n';
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dcal: calibration metrics and differentially-private noise "
      "post-processing toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Formats:\n"
      "  prediction CSV  rows `prediction,state[,weight]`; one optional\n"
      "                  header line; UTF-8 with '.' decimal separator;\n"
      "                  every file argument accepts `-` for stdin.\n"
      "  coupling CSV    rows `q,b,state,mass`, same conventions.\n"
      "  JSON            single line, every number with 12 significant\n"
      "                  digits, fixed field order; stdout is\n"
      "                  byte-identical for identical invocation and seed.\n"
      "Exit codes: 0 success, 1 verification failure or FAILED report row,\n"
      "2 input error, 3 internal numeric error.");

  GlobalFlags g;
  bool lp_trace = false;
  app.add_option("--seed", g.seed, "Seed for all randomness")
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format for stdout")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress informational output");
  app.add_flag("--lp-trace", lp_trace)->group("");

  // metrics
  std::string m_input;
  int m_grid = 200;
  bool m_coupling = false;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Calibration metrics of a prediction CSV (or, with "
                 "--coupling, of the q-marginal of a coupling CSV, adding "
                 "dist and decision_loss)");
  metrics->fallthrough();
  metrics->add_option("input", m_input, "prediction CSV (`-` for stdin)")
      ->required();
  metrics->add_option("--grid", m_grid, "DTC grid cells")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  metrics->add_flag("--coupling", m_coupling,
                    "Input is a coupling CSV `q,b,state,mass`");

  // postprocess
  std::string p_input, p_mech, p_mode = "analytic";
  bool p_online = false;
  long long p_horizon = 0;
  CLI::App* post = app.add_subcommand(
      "postprocess",
      "Push predictions through a noise mechanism.  Analytic mode prints "
      "the pushforward joint (prediction,state,weight); mc mode appends "
      "one sampled column p per row; --online runs the sequential "
      "privacy post-processor and prints q,state,p rows");
  post->fallthrough();
  post->add_option("input", p_input, "prediction CSV (`-` for stdin)")
      ->required();
  post->add_option("--mech", p_mech,
                   "Mechanism spec, e.g. laplace:eps=0.01, "
                   "gauss:eps=0.01:variant=improved, laplace:tau=0.9, "
                   "gauss:sigma=0.1, point")
      ->required();
  post->add_option("--mode", p_mode, "Batch pushforward mode")
      ->check(CLI::IsMember({"analytic", "mc"}))
      ->capture_default_str();
  CLI::Option* online_flag =
      post->add_flag("--online", p_online, "Sequential (round-by-round) run");
  post->add_option("--horizon", p_horizon,
                   "Use only the first T input rows (0 = all)")
      ->needs(online_flag);

  // adversary
  double a_eps = 0.0;
  long long a_horizon = 0;
  std::string a_out = ".";
  CLI::App* adv = app.add_subcommand(
      "adversary",
      "Write the hard batch instance (batch_coupling.csv) and, with "
      "--horizon, the online sequence pair (online_seq1.csv, "
      "online_seq2.csv)");
  adv->fallthrough();
  adv->add_option("--eps", a_eps, "Privacy budget epsilon")->required();
  adv->add_option("--horizon", a_horizon,
                  "Total online rounds (even); 0 skips the online pair");
  adv->add_option("--out-dir", a_out, "Output directory")
      ->capture_default_str();

  // experiment
  std::string e_config, e_sweep = "batch", e_out = ".";
  std::vector<double> e_eps;
  std::string e_family, e_mode;
  int e_trials = 0, e_grid = 0, e_bins = 0;
  long long e_horizon = 0, e_draws = 0;
  CLI::App* exp = app.add_subcommand(
      "experiment",
      "Bound-report sweep over epsilon; writes report.csv and report.json "
      "into --out-dir and prints the report; exits 1 if any row FAILED");
  exp->fallthrough();
  exp->add_option("--config", e_config,
                  "JSON config (keys eps_list, mech_family, mode, trials, "
                  "seed, horizon, grid_m, ece_bins, mc_draws, sweep); "
                  "inline flags override it");
  CLI::Option* o_eps = exp->add_option("--eps", e_eps, "Epsilon grid")
                           ->delimiter(',');
  CLI::Option* o_family = exp->add_option(
      "--mech-family", e_family,
      "laplace, gauss, gauss:variant=improved, or point");
  CLI::Option* o_mode = exp->add_option("--mode", e_mode, "analytic or mc")
                            ->check(CLI::IsMember({"analytic", "mc"}));
  CLI::Option* o_trials =
      exp->add_option("--trials", e_trials, "Repetitions per row")
          ->check(CLI::PositiveNumber);
  CLI::Option* o_horizon =
      exp->add_option("--horizon", e_horizon, "Online rounds (even)");
  CLI::Option* o_grid =
      exp->add_option("--grid-m", e_grid, "Decision-loss grid cells")
          ->check(CLI::PositiveNumber);
  CLI::Option* o_bins =
      exp->add_option("--ece-bins", e_bins, "Pushforward cells for ece")
          ->check(CLI::PositiveNumber);
  CLI::Option* o_draws =
      exp->add_option("--mc-draws", e_draws, "Draws per unit mass in mc mode")
          ->check(CLI::PositiveNumber);
  exp->add_option("--sweep", e_sweep, "batch or online")
      ->check(CLI::IsMember({"batch", "online"}))
      ->capture_default_str();
  exp->add_option("--out-dir", e_out, "Report directory")
      ->capture_default_str();

  // verify
  std::string v_suite = "quick";
  bool v_inject = false;
  CLI::App* verify = app.add_subcommand(
      "verify",
      "Run the invariant suite (quick) or the ten release criteria (full); "
      "per-check lines go to stderr, the summary to stdout; exits 0 only "
      "if every check passes");
  verify->fallthrough();
  verify->add_option("--suite", v_suite, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  verify->add_flag("--inject-dp-violation", v_inject)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  dcal::set_lp_trace(lp_trace);
  try {
    if (metrics->parsed()) return cmd_metrics(g, m_input, m_grid, m_coupling);
    if (post->parsed()) {
      return cmd_postprocess(g, p_input, p_mech, p_mode, p_online, p_horizon);
    }
    if (adv->parsed()) return cmd_adversary(g, a_eps, a_horizon, a_out);
    if (exp->parsed()) {
      dcal::ExperimentConfig cfg;
      cfg.seed = g.seed;
      if (!e_config.empty()) load_config(e_config, &cfg, &e_sweep);
      if (o_eps->count() > 0) cfg.eps_list = e_eps;
      if (o_family->count() > 0) cfg.mech_family = e_family;
      if (o_mode->count() > 0) {
        cfg.mode = e_mode == "mc" ? dcal::BatchMode::Kind::kMonteCarlo
                                  : dcal::BatchMode::Kind::kAnalytic;
      }
      if (o_trials->count() > 0) cfg.trials = e_trials;
      if (o_horizon->count() > 0) cfg.horizon = e_horizon;
      if (o_grid->count() > 0) cfg.grid_m = e_grid;
      if (o_bins->count() > 0) cfg.ece_bins = e_bins;
      if (o_draws->count() > 0) cfg.mc_draws = e_draws;
      if (app.count("--seed") > 0) cfg.seed = g.seed;
      return cmd_experiment(g, cfg, e_sweep, e_out);
    }
    return cmd_verify(g, v_suite, v_inject);
  } catch (const dcal::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dcal::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
