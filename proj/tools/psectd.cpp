#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psectd/config.hpp"
#include "psectd/empirical.hpp"
#include "psectd/errors.hpp"
#include "psectd/experiment.hpp"
#include "psectd/gridworld.hpp"
#include "psectd/learners.hpp"
#include "psectd/lstd.hpp"
#include "psectd/metrics.hpp"
#include "psectd/oracles.hpp"
#include "psectd/plots.hpp"
#include "psectd/sampling.hpp"
#include "psectd/serialization.hpp"

namespace {

using namespace psectd;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;

TabularPolicy load_policy(const std::string& path) {
  return policy_from_json(load_json(path));
}

TabularMDP load_mdp(const std::string& path) { return mdp_from_json(load_json(path)); }

// Infers the state/action space of a batch when no environment file is given.
std::pair<int, int> batch_dims(const Batch& batch) {
  int n_states = 0;
  int n_actions = 0;
  for (const auto& e : batch.episodes) {
    for (const auto& t : e.steps) {
      n_states = std::max(n_states, std::max(t.state, t.next_state) + 1);
      n_actions = std::max(n_actions, t.action + 1);
    }
  }
  return {n_states, n_actions};
}

WeightMode parse_weight_mode(const std::string& mode) {
  if (mode == "none") return WeightMode::None;
  if (mode == "is-true-behavior") return WeightMode::IsTrueBehavior;
  if (mode == "psec-td-error") return WeightMode::PsecTdError;
  if (mode == "psec-estimate") return WeightMode::PsecEstimate;
  throw ConfigError("unknown weight mode '" + mode + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"Batch value prediction toolkit: TD(0) and sampling-error-corrected "
               "variants, LSTD, certainty-equivalence oracles, and experiment runner"};
  app.require_subcommand(1);

  // --- env ---
  auto* env = app.add_subcommand("env", "construct an environment model");
  auto* env_grid = env->add_subcommand("gridworld", "4x4 gridworld");
  double slip_p = 1.0, env_discount = 1.0;
  std::string env_out = "gridworld.json";
  env_grid->add_option("--slip-p", slip_p, "intended-action probability");
  env_grid->add_option("--discount", env_discount, "discount factor");
  env_grid->add_option("--out", env_out, "output model JSON")->required();
  env->require_subcommand(1);

  // --- policy ---
  auto* policy = app.add_subcommand("policy", "construct evaluation/behavior policies");
  auto* policy_grid = policy->add_subcommand("gridworld", "gridworld policy pair");
  std::string p_mode = "on-policy", p_out_eval = "eval_policy.json",
              p_out_behavior = "behavior_policy.json";
  std::uint64_t p_seed = 1234;
  policy_grid->add_option("--mode", p_mode, "on-policy | off-policy");
  policy_grid->add_option("--seed", p_seed, "softmax preference seed (off-policy)");
  policy_grid->add_option("--out-eval", p_out_eval, "evaluation policy JSON");
  policy_grid->add_option("--out-behavior", p_out_behavior, "behavior policy JSON");
  policy->require_subcommand(1);

  // --- sample ---
  auto* sample = app.add_subcommand("sample", "sample a batch of episodes");
  std::string s_env, s_policy, s_out = "batch.jsonl";
  int s_episodes = 1, s_max_steps = 1000;
  std::uint64_t s_seed = 0;
  sample->add_option("--env", s_env, "model JSON")->required();
  sample->add_option("--policy", s_policy, "behavior policy JSON")->required();
  sample->add_option("--episodes", s_episodes, "episode count")->required();
  sample->add_option("--seed", s_seed, "batch seed")->required();
  sample->add_option("--max-steps", s_max_steps, "episode step cap");
  sample->add_option("--out", s_out, "output batch JSONL");

  // --- fit ---
  auto* fit = app.add_subcommand("fit", "batch TD(0) with repeated presentations");
  std::string f_batch, f_mode = "none", f_eval, f_behavior, f_out, f_features = "tabular";
  double f_alpha = 0.05, f_delta = 1e-10, f_gamma = 1.0;
  long f_maxpres = 1000000;
  fit->add_option("--batch", f_batch, "batch JSONL")->required();
  fit->add_option("--mode", f_mode,
                  "none | is-true-behavior | psec-td-error | psec-estimate");
  fit->add_option("--alpha", f_alpha, "step size");
  fit->add_option("--delta", f_delta, "convergence threshold");
  fit->add_option("--gamma", f_gamma, "discount");
  fit->add_option("--max-presentations", f_maxpres, "presentation cap");
  fit->add_option("--eval-policy", f_eval, "evaluation policy JSON");
  fit->add_option("--behavior-policy", f_behavior, "behavior policy JSON");
  fit->add_option("--features", f_features, "feature map (tabular)");
  fit->add_option("--out", f_out, "output prefix (<out>.estimate.json, <out>.report.json)");

  // --- lstd ---
  auto* lstd_cmd = app.add_subcommand("lstd", "least-squares TD(0)");
  std::string l_batch, l_mode = "none", l_eval, l_behavior, l_out;
  std::string l_placement = "update";
  double l_epsilon = 0.0, l_gamma = 1.0;
  bool l_weight_reward = false;
  lstd_cmd->add_option("--batch", l_batch, "batch JSONL")->required();
  lstd_cmd->add_option("--mode", l_mode, "none | is-true-behavior | psec");
  lstd_cmd->add_option("--epsilon", l_epsilon, "ridge term added to A");
  lstd_cmd->add_option("--gamma", l_gamma, "discount");
  lstd_cmd->add_option("--placement", l_placement,
                       "update (weight the whole term) | target (weight the bootstrap)");
  lstd_cmd->add_flag("--weight-reward", l_weight_reward,
                     "also apply the importance weight to the reward vector");
  lstd_cmd->add_option("--eval-policy", l_eval, "evaluation policy JSON");
  lstd_cmd->add_option("--behavior-policy", l_behavior, "behavior policy JSON");
  lstd_cmd->add_option("--out", l_out, "output estimate JSON");

  // --- counts ---
  auto* counts = app.add_subcommand("counts", "maximum-likelihood model of a batch");
  std::string c_batch, c_env, c_out;
  counts->add_option("--batch", c_batch, "batch JSONL")->required();
  counts->add_option("--env", c_env, "model JSON (fixes the state space)");
  counts->add_option("--out", c_out, "output JSON");

  // --- oracle ---
  auto* oracle = app.add_subcommand("oracle", "certainty-equivalence / true values");
  std::string o_batch, o_which = "mdp", o_eval, o_env, o_out;
  double o_gamma = 1.0;
  oracle->add_option("--batch", o_batch, "batch JSONL (mrp/mdp/psec)");
  oracle->add_option("--which", o_which, "mrp | mdp | psec | true")->required();
  oracle->add_option("--eval-policy", o_eval, "evaluation policy JSON");
  oracle->add_option("--env", o_env, "model JSON (required for 'true')");
  oracle->add_option("--gamma", o_gamma, "discount (batch oracles)");
  oracle->add_option("--out", o_out, "output JSON");

  // --- analyze ---
  auto* analyze = app.add_subcommand("analyze", "spectral convergence report");
  std::string a_batch, a_eval, a_out;
  double a_gamma = 1.0, a_alpha = 0.05;
  analyze->add_option("--batch", a_batch, "batch JSONL")->required();
  analyze->add_option("--eval-policy", a_eval, "evaluation policy JSON");
  analyze->add_option("--gamma", a_gamma, "discount");
  analyze->add_option("--alpha", a_alpha, "step size to test");
  analyze->add_option("--out", a_out, "output JSON");

  // --- experiment ---
  auto* experiment = app.add_subcommand("experiment", "config-driven studies");
  auto* exp_run = experiment->add_subcommand("run", "run a study from a config file");
  std::string e_config;
  exp_run->add_option("config", e_config, "key = value config file")->required();
  auto* exp_plot = experiment->add_subcommand("plot", "render SVGs from a results dir");
  std::string e_dir;
  exp_plot->add_option("dir", e_dir, "directory holding aggregates.csv")->required();
  experiment->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  if (env_grid->parsed()) {
    GridworldConfig cfg{slip_p, env_discount};
    save_json(mdp_to_json(build_gridworld(cfg)), env_out);
    std::cout << "wrote " << env_out << "\n";
    return kExitOk;
  }

  if (policy_grid->parsed()) {
    if (p_mode != "on-policy" && p_mode != "off-policy") {
      throw ConfigError("policy mode must be on-policy or off-policy");
    }
    const PolicyPair pair = gridworld_policies(
        p_mode == "off-policy" ? PolicyMode::OffPolicy : PolicyMode::OnPolicy, p_seed);
    save_json(policy_to_json(pair.eval), p_out_eval);
    save_json(policy_to_json(pair.behavior), p_out_behavior);
    std::cout << "wrote " << p_out_eval << " and " << p_out_behavior << "\n";
    return kExitOk;
  }

  if (sample->parsed()) {
    const TabularMDP model = load_mdp(s_env);
    const TabularPolicy policy = load_policy(s_policy);
    Batch batch = sample_batch(model, policy, s_episodes, s_seed, s_max_steps);
    batch.behavior_policy_id = s_policy;
    save_batch(batch, s_out);
    std::cout << "wrote " << s_out << " (" << batch.total_transitions()
              << " transitions)\n";
    return kExitOk;
  }

  if (fit->parsed()) {
    if (f_features != "tabular") throw ConfigError("only tabular features are wired up");
    const Batch batch = load_batch(f_batch);
    const auto [n_states, n_actions] = batch_dims(batch);
    LearnerConfig cfg;
    cfg.step_size = f_alpha;
    cfg.threshold = f_delta;
    cfg.gamma = f_gamma;
    cfg.max_presentations = f_maxpres;
    cfg.weight_mode = parse_weight_mode(f_mode);
    TabularPolicy eval = f_eval.empty() ? TabularPolicy::uniform(n_states, n_actions)
                                        : load_policy(f_eval);
    if (cfg.weight_mode != WeightMode::None && f_eval.empty()) {
      throw ConfigError("--eval-policy is required for weighted modes");
    }
    TabularPolicy behavior;
    const TabularPolicy* behavior_ptr = nullptr;
    if (!f_behavior.empty()) {
      behavior = load_policy(f_behavior);
      behavior_ptr = &behavior;
    }
    const FeatureMap features = FeatureMap::tabular(std::max(n_states, eval.n_states));
    const FitResult result = fit_td0(batch, features, eval, behavior_ptr, cfg);
    if (f_out.empty()) {
      std::cout << value_estimate_to_json(result.estimate).dump(2) << "\n";
    } else {
      save_json(value_estimate_to_json(result.estimate), f_out + ".estimate.json");
      save_json(fit_report_to_json(result.report), f_out + ".report.json");
      std::cout << "wrote " << f_out << ".estimate.json and " << f_out
                << ".report.json\n";
    }
    return kExitOk;
  }

  if (lstd_cmd->parsed()) {
    const Batch batch = load_batch(l_batch);
    const auto [n_states, n_actions] = batch_dims(batch);
    LstdOptions options;
    options.epsilon = l_epsilon;
    options.gamma = l_gamma;
    options.weight_reward = l_weight_reward;
    if (l_placement == "update") options.placement = LstdPlacement::Update;
    else if (l_placement == "target") options.placement = LstdPlacement::Target;
    else throw ConfigError("unknown lstd placement '" + l_placement + "'");
    if (l_mode == "none") options.mode = LstdWeightMode::None;
    else if (l_mode == "is-true-behavior") options.mode = LstdWeightMode::IsTrueBehavior;
    else if (l_mode == "psec") options.mode = LstdWeightMode::Psec;
    else throw ConfigError("unknown lstd mode '" + l_mode + "'");
    TabularPolicy eval = l_eval.empty() ? TabularPolicy::uniform(n_states, n_actions)
                                        : load_policy(l_eval);
    if (options.mode != LstdWeightMode::None && l_eval.empty()) {
      throw ConfigError("--eval-policy is required for weighted modes");
    }
    TabularPolicy behavior;
    const TabularPolicy* behavior_ptr = nullptr;
    if (!l_behavior.empty()) {
      behavior = load_policy(l_behavior);
      behavior_ptr = &behavior;
    }
    const FeatureMap features = FeatureMap::tabular(std::max(n_states, eval.n_states));
    const ValueEstimate estimate = fit_lstd(batch, features, eval, behavior_ptr, options);
    if (l_out.empty()) {
      std::cout << value_estimate_to_json(estimate).dump(2) << "\n";
    } else {
      save_json(value_estimate_to_json(estimate), l_out);
      std::cout << "wrote " << l_out << "\n";
    }
    return kExitOk;
  }

  if (counts->parsed()) {
    const Batch batch = load_batch(c_batch);
    auto [n_states, n_actions] = batch_dims(batch);
    if (!c_env.empty()) {
      const TabularMDP model = load_mdp(c_env);
      n_states = model.n_states;
      n_actions = model.n_actions;
    }
    const nlohmann::json out = empirical_to_json(estimate(batch, n_states, n_actions));
    if (c_out.empty()) {
      std::cout << out.dump(2) << "\n";
    } else {
      save_json(out, c_out);
      std::cout << "wrote " << c_out << "\n";
    }
    return kExitOk;
  }

  if (oracle->parsed()) {
    nlohmann::json out;
    if (o_which == "true") {
      if (o_env.empty()) throw ConfigError("oracle --which true needs --env");
      const TabularMDP model = load_mdp(o_env);
      const TabularPolicy eval = o_eval.empty()
                                     ? TabularPolicy::uniform(model.n_states, model.n_actions)
                                     : load_policy(o_eval);
      out["values"] = solve_true_values(model, eval);
      out["which"] = "true";
    } else {
      if (o_batch.empty()) throw ConfigError("oracle needs --batch for " + o_which);
      const Batch batch = load_batch(o_batch);
      auto [n_states, n_actions] = batch_dims(batch);
      if (!o_env.empty()) {
        const TabularMDP model = load_mdp(o_env);
        n_states = model.n_states;
        n_actions = model.n_actions;
        o_gamma = model.discount;
      }
      const EmpiricalModel em = estimate(batch, n_states, n_actions);
      if (o_which == "mrp") {
        out["values"] = solve_mrp_cee(em, o_gamma);
      } else if (o_which == "mdp") {
        out["values"] = solve_mdp_cee(em, o_gamma);
      } else if (o_which == "psec") {
        if (o_eval.empty()) throw ConfigError("oracle --which psec needs --eval-policy");
        out["values"] = solve_psec_cee(em, load_policy(o_eval), o_gamma);
      } else {
        throw ConfigError("unknown oracle '" + o_which + "'");
      }
      out["which"] = o_which;
      out["gamma"] = o_gamma;
    }
    if (o_out.empty()) {
      std::cout << out.dump(2) << "\n";
    } else {
      save_json(out, o_out);
      std::cout << "wrote " << o_out << "\n";
    }
    return kExitOk;
  }

  if (analyze->parsed()) {
    const Batch batch = load_batch(a_batch);
    const auto [n_states, n_actions] = batch_dims(batch);
    const EmpiricalModel em = estimate(batch, n_states, n_actions);
    const TabularPolicy eval = a_eval.empty()
                                   ? TabularPolicy::uniform(n_states, n_actions)
                                   : load_policy(a_eval);
    const FeatureMap features = FeatureMap::tabular(n_states);
    const CEMatrixForm mf = matrix_form(em, eval, features);
    const ConvergenceReport report = check_convergence_conditions(mf, a_gamma);
    const StabilityReport stability = alpha_stability(mf, a_gamma, a_alpha);

    auto verdict = [](Verdict v) {
      switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::PremisesUnmet: return "premises-unmet";
      }
      return "?";
    };
    nlohmann::json out;
    out["diagonal_dominance"] = verdict(report.diagonal_dominance);
    out["positive_definite"] = verdict(report.positive_definite);
    out["min_symmetric_eigenvalue"] = report.min_symmetric_eigenvalue;
    out["td_real_parts_positive"] = report.td_real_parts_positive;
    out["psec_real_parts_positive"] = report.psec_real_parts_positive;
    out["premises_met"] = report.premises_met;
    out["premises_note"] = report.premises_note;
    auto eigen_list = [](const std::vector<std::complex<double>>& eigs) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& e : eigs) arr.push_back({e.real(), e.imag()});
      return arr;
    };
    out["td_eigenvalues"] = eigen_list(report.td_eigenvalues);
    out["psec_eigenvalues"] = eigen_list(report.psec_eigenvalues);
    out["alpha"] = a_alpha;
    out["stable"] = stability.stable;
    out["spectral_radius"] = stability.spectral_radius;
    out["alpha_ceiling"] = stability.alpha_ceiling;
    if (a_out.empty()) {
      std::cout << out.dump(2) << "\n";
    } else {
      save_json(out, a_out);
      std::cout << "wrote " << a_out << "\n";
    }
    return kExitOk;
  }

  if (exp_run->parsed()) {
    const ExperimentConfig cfg = load_experiment_config(e_config);
    const ExperimentTables tables = run_experiment(cfg);
    write_tables_csv(tables, cfg.out_dir);
    const auto plots = emit_plots(tables.aggregates, cfg.out_dir);
    std::cout << "wrote " << tables.trials.size() << " trial rows and "
              << tables.aggregates.size() << " aggregate rows to " << cfg.out_dir
              << " (" << plots.size() << " plots)\n";
    return kExitOk;
  }

  if (exp_plot->parsed()) {
    const auto aggregates = read_aggregates_csv(e_dir + "/aggregates.csv");
    const auto plots = emit_plots(aggregates, e_dir);
    std::cout << "wrote " << plots.size() << " plots to " << e_dir << "\n";
    return kExitOk;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const psectd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const psectd::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitDivergence;
  } catch (const psectd::SingularSystemError& e) {
    std::cerr << "singular system: " << e.what() << " (condition estimate "
              << e.condition_estimate() << ")\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
