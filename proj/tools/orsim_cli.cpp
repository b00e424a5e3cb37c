#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orsim/orsim.hpp"

namespace fs = std::filesystem;
using namespace orsim;

namespace {

std::string cycle_or_none(const std::optional<std::int64_t>& c) {
  return c ? std::to_string(*c) : std::string("none");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

int cmd_simulate(const std::string& config_path, std::optional<std::int64_t> seed,
                 const std::string& out_dir) {
  SimConfig cfg = load_config(config_path);
  if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
  ensure_dir(out_dir);
  const SimResult res = run(cfg);

  const std::string trace_path = out_dir + "/trace.csv";
  const std::string base_path = out_dir + "/casebase.jsonl";
  const std::string pending_path = out_dir + "/pending.jsonl";
  write_trace(res.trace, trace_path);
  save_casebase(res.casebase, base_path);
  save_pending(res.pending, pending_path);

  std::cout << "RESULT seed=" << cfg.seed << "\n";
  std::cout << "RESULT first_individual_alert=" << cycle_or_none(res.first_individual_alert)
            << "\n";
  std::cout << "RESULT first_collective_alert=" << cycle_or_none(res.first_collective_alert)
            << "\n";
  std::cout << "RESULT cases_retained=" << res.casebase.cases.size() << "\n";
  std::cout << "RESULT trace=" << trace_path << "\n";
  std::cout << "RESULT casebase=" << base_path << "\n";
  std::cout << "RESULT pending=" << pending_path << "\n";
  return 0;
}

int cmd_batch(const std::string& config_path, int runs, std::int64_t base_seed,
              const std::string& out_dir) {
  const SimConfig cfg = load_config(config_path);
  ensure_dir(out_dir);
  const BatchResult result =
      batch(cfg, runs, static_cast<std::uint64_t>(base_seed), [&](int i, const SimResult& res) {
        write_trace(res.trace, out_dir + "/trace_run" + std::to_string(i) + ".csv");
      });
  const std::string summary_path = out_dir + "/batch_summary.csv";
  write_batch_summary(result, summary_path);

  int triggered = 0;
  for (const auto& r : result.runs) {
    if (r.first_collective_alert) ++triggered;
  }
  std::cout << "RESULT runs=" << result.runs.size() << "\n";
  std::cout << "RESULT triggered=" << triggered << "\n";
  std::cout << "RESULT reference_cycle=" << result.reference_cycle << "\n";
  std::cout << "RESULT mean_score=" << fmt4(result.mean_score) << "\n";
  std::cout << "RESULT stddev_score=" << fmt4(result.stddev_score) << "\n";
  std::cout << "RESULT summary=" << summary_path << "\n";
  return 0;
}

int cmd_casebase_list(const std::string& base_path) {
  const CaseBase cb = load_casebase(base_path);
  for (const auto& c : cb.cases) {
    std::cout << "case " << c.id << " " << to_string(c.provenance) << " "
              << to_code(c.solution.state) << "/" << c.solution.recommendation << " quadruplets="
              << c.problem.size();
    if (c.retrieval_distance) std::cout << " distance=" << fmt4(*c.retrieval_distance);
    if (c.retrieved_from) std::cout << " from=" << *c.retrieved_from;
    std::cout << "\n";
  }
  std::cout << "RESULT cases=" << cb.cases.size() << "\n";
  return 0;
}

int cmd_casebase_show(const std::string& base_path, std::int64_t id) {
  const CaseBase cb = load_casebase(base_path);
  const Case* c = cb.find(id);
  if (c == nullptr) {
    std::cerr << "error: no case with id " << id << "\n";
    return 1;
  }
  std::cout << detail::case_to_json(*c).dump(2) << "\n";
  return 0;
}

Verdict prompt_verdict(const Case& c) {
  for (;;) {
    std::cout << "case " << c.id << " " << to_code(c.solution.state) << "/"
              << c.solution.recommendation << " [a]ccept / [e]dit / [r]eject? " << std::flush;
    std::string token;
    if (!std::getline(std::cin, token)) {
      std::cout << "\n";
      return {Verdict::Kind::Accept, {}};
    }
    if (token == "a" || token == "accept") return {Verdict::Kind::Accept, {}};
    if (token == "r" || token == "reject") return {Verdict::Kind::Reject, {}};
    if (token == "e" || token == "edit") {
      Verdict v{Verdict::Kind::Edit, c.solution};
      std::cout << "state (N/O): " << std::flush;
      std::string state;
      std::getline(std::cin, state);
      try {
        v.edited.state = alert_state_from_code(state);
      } catch (const Error&) {
        std::cout << "unknown state, keeping " << to_code(c.solution.state) << "\n";
      }
      std::cout << "recommendation: " << std::flush;
      std::string rec;
      std::getline(std::cin, rec);
      if (!rec.empty()) v.edited.recommendation = rec;
      return v;
    }
    std::cout << "unrecognized verdict \"" << token << "\"\n";
  }
}

int cmd_casebase_review(const std::string& base_path, const std::string& pending_path,
                        bool accept_all, bool reject_all) {
  CaseBase cb = load_casebase(base_path);
  std::vector<PendingCase> pending = load_pending(pending_path);

  std::size_t open = 0;
  for (const auto& p : pending) {
    if (!p.resolved) ++open;
  }
  if (open == 0) {
    std::cout << "nothing to review\n";
    return 0;
  }

  std::size_t reviewed = 0;
  for (auto& p : pending) {
    if (p.resolved) continue;
    Verdict verdict;
    if (accept_all) {
      verdict.kind = Verdict::Kind::Accept;
    } else if (reject_all) {
      verdict.kind = Verdict::Kind::Reject;
    } else {
      verdict = prompt_verdict(p.c);
    }
    const std::string action = apply_review(cb, p, verdict);
    std::cout << "case " << p.c.id << ": " << action << "\n";
    ++reviewed;
  }

  std::erase_if(pending, [](const PendingCase& p) { return p.resolved; });
  save_casebase(cb, base_path);
  save_pending(pending, pending_path);
  std::cout << "RESULT reviewed=" << reviewed << "\n";
  std::cout << "RESULT cases=" << cb.cases.size() << "\n";
  return 0;
}

int cmd_distance(const std::string& target_path, const std::string& source_path,
                 const std::string& encoding, double sigma,
                 const std::optional<std::string>& config_path) {
  const Problem target = load_problem(target_path);
  const Problem source = load_problem(source_path);
  if (target.size() != source.size()) {
    std::cerr << "error: quadruplet count mismatch: " << target.size() << " vs " << source.size()
              << "\n";
    return 1;
  }
  Taxonomy tax = Taxonomy::default_taxonomy();
  if (config_path) tax = load_config(*config_path).taxonomy;
  CategoricalEncoding enc;
  enc.policy = encoding_policy_from_string(encoding);
  enc.sigma = sigma;

  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t j = 0; j < source.size(); ++j) {
      const double term = pair_term(target[i], source[j], enc, tax);
      std::cout << "pair (" << i << "," << j << ") " << target[i].entity << "."
                << target[i].attribute << " vs " << source[j].entity << "." << source[j].attribute
                << " term=" << fmt4(term) << "\n";
    }
  }
  const double d = distance(target, source, enc, tax);
  std::cout << "RESULT distance=" << fmt4(d) << "\n";
  return 0;
}

int cmd_plot_data(const std::string& config_path, const std::string& out_dir, int runs,
                  std::int64_t base_seed) {
  const SimConfig cfg = load_config(config_path);
  ensure_dir(out_dir);

  // Fatigue curves straight from the closed form, one column per dynamic
  // agent.
  {
    std::ofstream out(out_dir + "/fatigue_curve.csv", std::ios::trunc);
    if (!out) throw Error("cannot write " + out_dir + "/fatigue_curve.csv");
    out << "cycle";
    std::vector<const AgentState*> dyn;
    for (const auto& a : cfg.agents) {
      if (a.dynamics) {
        dyn.push_back(&a);
        out << "," << a.entity + "." + a.dynamic_attribute;
      }
    }
    out << "\n";
    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
      out << t;
      for (const AgentState* a : dyn) out << "," << detail::fmt_f6(fatigue_at(*a->dynamics, t));
      out << "\n";
    }
  }

  // Per-cycle particle counts from a dedicated world.
  {
    std::ofstream out(out_dir + "/infection_counts.csv", std::ios::trunc);
    if (!out) throw Error("cannot write " + out_dir + "/infection_counts.csv");
    out << "cycle,susceptible,infected,resistant\n";
    ParticleWorld world = init_population(cfg.infection, cfg.seed);
    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
      step_infection(world);
      const InfectionMetrics m = infection_metrics(world);
      out << t << "," << m.susceptible << "," << m.infected << "," << m.resistant << "\n";
    }
  }

  // Collective score and alert flag for the configured seed.
  {
    const SimResult res = run(cfg);
    std::ofstream out(out_dir + "/collective_series.csv", std::ios::trunc);
    if (!out) throw Error("cannot write " + out_dir + "/collective_series.csv");
    out << "cycle,collective_score,collective_alert\n";
    for (const auto& row : res.trace.rows) {
      out << row.cycle << "," << detail::fmt_f6(row.collective_score) << ","
          << (row.collective_alert ? 1 : 0) << "\n";
    }
  }

  // Trigger-cycle scatter across seeded runs.
  {
    const BatchResult result = batch(cfg, runs, static_cast<std::uint64_t>(base_seed));
    std::ofstream out(out_dir + "/batch_scatter.csv", std::ios::trunc);
    if (!out) throw Error("cannot write " + out_dir + "/batch_scatter.csv");
    out << "run,seed,first_collective_alert\n";
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      out << i << "," << result.runs[i].seed << ","
          << cycle_or_none(result.runs[i].first_collective_alert) << "\n";
    }
  }

  std::cout << "RESULT out=" << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operating-room risk simulator with case-based reasoning"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::int64_t> seed;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation");
  simulate->add_option("--config", config_path, "Config file")->required();
  simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--out", out_dir, "Output directory");

  std::string b_config;
  std::string b_out = "out";
  int b_runs = 25;
  std::int64_t b_base_seed = 1;
  auto* batch_cmd = app.add_subcommand("batch", "Run seeded simulations and report dispersion");
  batch_cmd->add_option("--config", b_config, "Config file")->required();
  batch_cmd->add_option("--runs", b_runs, "Number of runs")->check(CLI::PositiveNumber);
  batch_cmd->add_option("--base-seed", b_base_seed, "First seed");
  batch_cmd->add_option("--out", b_out, "Output directory");

  std::string l_base;
  auto* list_cmd = app.add_subcommand("casebase-list", "List the cases in a base");
  list_cmd->add_option("--base", l_base, "Case base file")->required();

  std::string s_base;
  std::int64_t s_id = 0;
  auto* show_cmd = app.add_subcommand("casebase-show", "Print one case as JSON");
  show_cmd->add_option("--base", s_base, "Case base file")->required();
  show_cmd->add_option("--id", s_id, "Case id")->required();

  std::string r_base;
  std::string r_pending;
  bool r_accept_all = false;
  bool r_reject_all = false;
  auto* review_cmd = app.add_subcommand("casebase-review", "Review pending cases");
  review_cmd->add_option("--base", r_base, "Case base file")->required();
  review_cmd->add_option("--pending", r_pending, "Pending queue file")->required();
  review_cmd->add_flag("--accept-all", r_accept_all, "Accept every pending case");
  review_cmd->add_flag("--reject-all", r_reject_all, "Reject every pending case");

  std::string d_target;
  std::string d_source;
  std::string d_encoding = "strict";
  double d_sigma = 0.5;
  std::optional<std::string> d_config;
  auto* dist_cmd = app.add_subcommand("distance", "Distance between two case problems");
  dist_cmd->add_option("--target", d_target, "Target case file")->required();
  dist_cmd->add_option("--source", d_source, "Source case file")->required();
  dist_cmd->add_option("--encoding", d_encoding, "strict or taxonomy")
      ->check(CLI::IsMember({"strict", "taxonomy"}));
  dist_cmd->add_option("--sigma", d_sigma, "Same-parent quotient for taxonomy encoding");
  dist_cmd->add_option("--config", d_config, "Config supplying the taxonomy");

  std::string p_config;
  std::string p_out = "plot";
  int p_runs = 25;
  std::int64_t p_base_seed = 1;
  auto* plot_cmd = app.add_subcommand("plot-data", "Emit tidy CSV series for plotting");
  plot_cmd->add_option("--config", p_config, "Config file")->required();
  plot_cmd->add_option("--out", p_out, "Output directory");
  plot_cmd->add_option("--runs", p_runs, "Runs for the scatter series")
      ->check(CLI::PositiveNumber);
  plot_cmd->add_option("--base-seed", p_base_seed, "First seed for the scatter series");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed, out_dir);
    if (batch_cmd->parsed()) return cmd_batch(b_config, b_runs, b_base_seed, b_out);
    if (list_cmd->parsed()) return cmd_casebase_list(l_base);
    if (show_cmd->parsed()) return cmd_casebase_show(s_base, s_id);
    if (review_cmd->parsed()) {
      if (r_accept_all && r_reject_all) {
        std::cerr << "error: --accept-all and --reject-all are mutually exclusive\n";
        return 1;
      }
      return cmd_casebase_review(r_base, r_pending, r_accept_all, r_reject_all);
    }
    if (dist_cmd->parsed()) return cmd_distance(d_target, d_source, d_encoding, d_sigma, d_config);
    if (plot_cmd->parsed()) return cmd_plot_data(p_config, p_out, p_runs, p_base_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
