#include "psectd/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "psectd/empirical.hpp"
#include "psectd/errors.hpp"
#include "psectd/gridworld.hpp"
#include "psectd/learners.hpp"
#include "psectd/lstd.hpp"
#include "psectd/metrics.hpp"
#include "psectd/oracles.hpp"
#include "psectd/rng.hpp"
#include "psectd/sampling.hpp"

namespace psectd {

namespace {

enum class AlgorithmKind { Td, PsecTd, PsecTdEstimate, IsTd, Lstd, PsecLstd };

struct Algorithm {
  std::string label;
  AlgorithmKind kind;
  bool is_lstd() const {
    return kind == AlgorithmKind::Lstd || kind == AlgorithmKind::PsecLstd;
  }
};

Algorithm algorithm_from_label(const std::string& label) {
  if (label == "td") return {label, AlgorithmKind::Td};
  if (label == "psec-td") return {label, AlgorithmKind::PsecTd};
  if (label == "psec-td-estimate") return {label, AlgorithmKind::PsecTdEstimate};
  if (label == "is-td") return {label, AlgorithmKind::IsTd};
  if (label == "lstd") return {label, AlgorithmKind::Lstd};
  if (label == "psec-lstd") return {label, AlgorithmKind::PsecLstd};
  throw ConfigError("unknown algorithm '" + label + "'");
}

WeightMode td_mode(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Td: return WeightMode::None;
    case AlgorithmKind::PsecTd: return WeightMode::PsecTdError;
    case AlgorithmKind::PsecTdEstimate: return WeightMode::PsecEstimate;
    case AlgorithmKind::IsTd: return WeightMode::IsTrueBehavior;
    default: throw std::logic_error("td_mode on an LSTD algorithm");
  }
}

struct Outcome {
  double msve = std::numeric_limits<double>::quiet_NaN();
  long presentations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

struct CellResult {
  double unvisited = 0.0;
  // outcomes[alg][candidate]
  std::vector<std::vector<Outcome>> outcomes;
};

struct Study {
  std::string experiment_id;
  TabularMDP model;
  TabularPolicy eval;
  TabularPolicy behavior;
  std::vector<double> truth;  // unused for CeeConvergence (per-batch truth)
  StateWeighting weighting;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

std::vector<double> candidates_for(const Algorithm& alg, const ExperimentConfig& cfg) {
  if (alg.is_lstd()) {
    return cfg.epsilon_grid.empty() ? std::vector<double>{cfg.lstd_epsilon}
                                    : cfg.epsilon_grid;
  }
  return cfg.alpha_grid.empty() ? std::vector<double>{cfg.alpha} : cfg.alpha_grid;
}

CellResult run_cell(const Study& study, const ExperimentConfig& cfg,
                    const std::vector<Algorithm>& algorithms, int batch_size,
                    int trial) {
  const std::uint64_t seed = trial_seed(cfg.base_seed, batch_size, trial);
  const Batch batch =
      sample_batch(study.model, study.behavior, batch_size, seed, cfg.max_steps);
  const EmpiricalModel em =
      estimate(batch, study.model.n_states, study.model.n_actions);

  CellResult cell;
  cell.unvisited = unvisited_fraction(em, study.model, study.behavior);

  std::vector<double> truth = study.truth;
  if (cfg.kind == ExperimentKind::CeeConvergence) {
    truth = solve_psec_cee(em, study.eval, cfg.discount);
  }
  const FeatureMap features = FeatureMap::tabular(study.model.n_states);

  cell.outcomes.resize(algorithms.size());
  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    const Algorithm& alg = algorithms[ai];
    const auto candidates = candidates_for(alg, cfg);
    cell.outcomes[ai].resize(candidates.size());
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      Outcome& out = cell.outcomes[ai][ci];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (alg.is_lstd()) {
          LstdOptions options;
          options.mode = alg.kind == AlgorithmKind::Lstd ? LstdWeightMode::None
                                                         : LstdWeightMode::Psec;
          options.epsilon = candidates[ci];
          options.gamma = cfg.discount;
          options.weight_reward = cfg.lstd_weight_reward;
          options.placement = cfg.lstd_placement == "target" ? LstdPlacement::Target
                                                             : LstdPlacement::Update;
          const ValueEstimate estimate =
              fit_lstd(batch, features, study.eval, &study.behavior, options);
          out.msve = msve(estimate, truth, study.weighting);
          out.converged = true;
        } else {
          LearnerConfig lc;
          lc.step_size = candidates[ci];
          lc.threshold = cfg.delta;
          lc.gamma = cfg.discount;
          lc.max_presentations = cfg.max_presentations;
          lc.weight_mode = td_mode(alg.kind);
          lc.record_trace = false;
          const FitResult fit =
              fit_td0(batch, features, study.eval, &study.behavior, lc);
          out.msve = msve(fit.estimate, truth, study.weighting);
          out.presentations = fit.report.presentations;
          out.converged = fit.report.converged;
        }
      } catch (const DivergenceError&) {
        out.msve = std::numeric_limits<double>::quiet_NaN();
        out.converged = false;
      } catch (const SingularSystemError&) {
        out.msve = std::numeric_limits<double>::quiet_NaN();
        out.converged = false;
      }
      const auto t1 = std::chrono::steady_clock::now();
      out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
  }
  return cell;
}

// Aggregate over trial order; NaNs count as divergent and are excluded from
// the mean.
AggregateRecord aggregate_rows(const std::string& experiment, const std::string& alg,
                               int batch_size, const std::vector<double>& msves) {
  AggregateRecord agg;
  agg.experiment = experiment;
  agg.algorithm = alg;
  agg.batch_size = batch_size;
  agg.trials = static_cast<int>(msves.size());
  std::vector<double> valid;
  for (double m : msves) {
    if (std::isnan(m)) {
      ++agg.divergent_count;
    } else {
      valid.push_back(m);
    }
  }
  if (valid.empty()) {
    agg.mean_msve = agg.ci_low = agg.ci_high = std::numeric_limits<double>::quiet_NaN();
  } else if (valid.size() == 1) {
    agg.mean_msve = agg.ci_low = agg.ci_high = valid.front();
  } else {
    const TrialAggregate t = aggregate_trials(valid, 0.95);
    agg.mean_msve = t.mean;
    agg.ci_low = t.ci_low;
    agg.ci_high = t.ci_high;
  }
  return agg;
}

ExperimentTables run_study(const Study& study, const ExperimentConfig& cfg) {
  std::vector<Algorithm> algorithms;
  for (const auto& label : cfg.algorithms) algorithms.push_back(algorithm_from_label(label));

  const int n_sizes = static_cast<int>(cfg.batch_sizes.size());
  const int n_trials = cfg.trials;
  std::vector<CellResult> cells(static_cast<std::size_t>(n_sizes) * n_trials);

  // Work items are independent; the pool size never changes the results.
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  const int workers =
      std::max(1, std::min<int>(worker_count(), n_sizes * n_trials));
  auto work = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= cells.size() || failed.load()) break;
      const int size_idx = static_cast<int>(i) / n_trials;
      const int trial = static_cast<int>(i) % n_trials;
      try {
        cells[i] = run_cell(study, cfg, algorithms, cfg.batch_sizes[size_idx], trial);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
      }
    }
  };
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("experiment trial failed: " + failure);

  // Hyperparameter selection per (algorithm, batch size): fewest divergences,
  // then lowest mean MSVE, then the smaller candidate.
  ExperimentTables tables;
  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    const Algorithm& alg = algorithms[ai];
    const auto candidates = candidates_for(alg, cfg);
    for (int si = 0; si < n_sizes; ++si) {
      std::size_t best = 0;
      double best_mean = std::numeric_limits<double>::infinity();
      int best_divergent = std::numeric_limits<int>::max();
      std::vector<AggregateRecord> cand_aggs(candidates.size());
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        std::vector<double> msves;
        for (int trial = 0; trial < n_trials; ++trial) {
          msves.push_back(
              cells[static_cast<std::size_t>(si) * n_trials + trial].outcomes[ai][ci].msve);
        }
        cand_aggs[ci] =
            aggregate_rows(study.experiment_id, alg.label, cfg.batch_sizes[si], msves);
        const double mean = std::isnan(cand_aggs[ci].mean_msve)
                                ? std::numeric_limits<double>::infinity()
                                : cand_aggs[ci].mean_msve;
        const int div = cand_aggs[ci].divergent_count;
        if (div < best_divergent ||
            (div == best_divergent && mean < best_mean)) {
          best = ci;
          best_mean = mean;
          best_divergent = div;
        }
      }
      if (candidates.size() > 1) {
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
          tables.selections.push_back({study.experiment_id, alg.label,
                                       cfg.batch_sizes[si], candidates[ci],
                                       cand_aggs[ci].mean_msve,
                                       cand_aggs[ci].divergent_count, ci == best});
        }
      }
      for (int trial = 0; trial < n_trials; ++trial) {
        const CellResult& cell = cells[static_cast<std::size_t>(si) * n_trials + trial];
        const Outcome& out = cell.outcomes[ai][best];
        TrialRecord rec;
        rec.experiment = study.experiment_id;
        rec.algorithm = alg.label;
        rec.batch_size = cfg.batch_sizes[si];
        rec.trial = trial;
        rec.seed = trial_seed(cfg.base_seed, cfg.batch_sizes[si], trial);
        rec.msve = out.msve;
        rec.presentations = out.presentations;
        rec.converged = out.converged;
        rec.unvisited_fraction = cell.unvisited;
        rec.wall_time_ms = out.wall_ms;
        tables.trials.push_back(std::move(rec));
      }
      tables.aggregates.push_back(cand_aggs[best]);
    }
  }
  return tables;
}

Study make_study(const ExperimentConfig& cfg, double slip_p,
                 const std::string& experiment_id) {
  Study study;
  study.experiment_id = experiment_id;
  GridworldConfig gw;
  gw.slip_p = slip_p;
  gw.discount = cfg.discount;
  study.model = build_gridworld(gw);
  const PolicyPair policies = gridworld_policies(
      cfg.policy_mode == "off-policy" ? PolicyMode::OffPolicy : PolicyMode::OnPolicy,
      cfg.policy_seed);
  study.eval = policies.eval;
  study.behavior = policies.behavior;
  study.weighting = StateWeighting::uniform_nonterminal(study.model);
  if (cfg.kind != ExperimentKind::CeeConvergence) {
    study.truth = solve_true_values(study.model, study.eval);
  }
  return study;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, int batch_size, int trial) {
  return hash64({base_seed, static_cast<std::uint64_t>(batch_size),
                 static_cast<std::uint64_t>(trial)});
}

ExperimentTables run_experiment(const ExperimentConfig& config) {
  if (config.kind == ExperimentKind::StochasticitySweep) {
    return run_stochasticity_sweep(config);
  }
  const Study study = make_study(config, config.slip_p, to_string(config.kind));
  return run_study(study, config);
}

ExperimentTables run_stochasticity_sweep(const ExperimentConfig& config) {
  bool has_td = false;
  for (const auto& label : config.algorithms) has_td = has_td || label == "td";
  if (!has_td) {
    throw ConfigError("stochasticity-sweep needs 'td' among the algorithms (ratio base)");
  }

  ExperimentTables tables;
  for (double p : config.slip_grid) {
    const std::string id =
        std::string(to_string(config.kind)) + "/p=" + format_p(p);
    const Study study = make_study(config, p, id);
    ExperimentTables part = run_study(study, config);

    double td_mean = std::numeric_limits<double>::quiet_NaN();
    for (const auto& agg : part.aggregates) {
      if (agg.algorithm == "td") td_mean = agg.mean_msve;
    }
    for (const auto& agg : part.aggregates) {
      if (agg.algorithm == "td") continue;
      tables.ratios.push_back({id, agg.algorithm, p, agg.mean_msve, td_mean,
                               agg.mean_msve / td_mean});
    }
    tables.trials.insert(tables.trials.end(), part.trials.begin(), part.trials.end());
    tables.aggregates.insert(tables.aggregates.end(), part.aggregates.begin(),
                             part.aggregates.end());
    tables.selections.insert(tables.selections.end(), part.selections.begin(),
                             part.selections.end());
  }
  return tables;
}

int worker_count() {
  if (const char* env = std::getenv("PSECTD_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_tables_csv(const ExperimentTables& tables, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir + "/trials.csv");
    os << "experiment,algorithm,batch_size,trial,seed,msve,presentations,converged,"
          "unvisited_fraction,wall_time_ms\n";
    for (const auto& r : tables.trials) {
      char wall[32];
      std::snprintf(wall, sizeof(wall), "%.3f", r.wall_time_ms);
      os << r.experiment << ',' << r.algorithm << ',' << r.batch_size << ','
         << r.trial << ',' << r.seed << ',' << format_double(r.msve) << ','
         << r.presentations << ',' << (r.converged ? 1 : 0) << ','
         << format_double(r.unvisited_fraction) << ',' << wall << '\n';
    }
  }
  {
    std::ofstream os(dir + "/aggregates.csv");
    os << "experiment,algorithm,batch_size,trials,mean_msve,ci_low,ci_high,"
          "divergent_count\n";
    for (const auto& a : tables.aggregates) {
      os << a.experiment << ',' << a.algorithm << ',' << a.batch_size << ','
         << a.trials << ',' << format_double(a.mean_msve) << ','
         << format_double(a.ci_low) << ',' << format_double(a.ci_high) << ','
         << a.divergent_count << '\n';
    }
  }
  if (!tables.selections.empty()) {
    std::ofstream os(dir + "/hyperparameter_selection.csv");
    os << "experiment,algorithm,batch_size,value,mean_msve,divergent_count,selected\n";
    for (const auto& s : tables.selections) {
      os << s.experiment << ',' << s.algorithm << ',' << s.batch_size << ','
         << format_double(s.value) << ',' << format_double(s.mean_msve) << ','
         << s.divergent_count << ',' << (s.selected ? 1 : 0) << '\n';
    }
  }
  if (!tables.ratios.empty()) {
    std::ofstream os(dir + "/ratios.csv");
    os << "experiment,algorithm,slip_p,algorithm_mean,td_mean,ratio\n";
    for (const auto& r : tables.ratios) {
      os << r.experiment << ',' << r.algorithm << ',' << format_double(r.slip_p)
         << ',' << format_double(r.algorithm_mean) << ',' << format_double(r.td_mean)
         << ',' << format_double(r.ratio) << '\n';
    }
  }
}

std::vector<AggregateRecord> read_aggregates_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty aggregates csv");
  std::vector<AggregateRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    AggregateRecord a;
    std::getline(ss, a.experiment, ',');
    std::getline(ss, a.algorithm, ',');
    std::getline(ss, field, ',');
    a.batch_size = std::stoi(field);
    std::getline(ss, field, ',');
    a.trials = std::stoi(field);
    std::getline(ss, field, ',');
    a.mean_msve = std::stod(field);
    std::getline(ss, field, ',');
    a.ci_low = std::stod(field);
    std::getline(ss, field, ',');
    a.ci_high = std::stod(field);
    std::getline(ss, field, ',');
    a.divergent_count = std::stoi(field);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace psectd
