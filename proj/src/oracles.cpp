#include "psectd/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psectd/errors.hpp"

namespace psectd {

namespace {

// Shared sweep loop for the three DP fixed points. `backup` computes the new
// value of one state given the current dense value vector.
template <typename Backup>
std::vector<double> sweep_to_fixed_point(const EmpiricalModel& em, Backup backup,
                                         double tol, long max_iterations,
                                         const char* name) {
  const auto states = em.visited_nonterminal();
  if (states.empty()) {
    throw std::invalid_argument(std::string(name) + ": no visited non-terminal states");
  }
  std::vector<double> v(em.n_states, 0.0);
  std::vector<double> next(v);
  double residual = 0.0;
  for (long it = 0; it < max_iterations; ++it) {
    residual = 0.0;
    for (int s : states) {
      next[s] = backup(s, v);
      residual = std::max(residual, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (residual < tol) return v;
    if (!std::isfinite(residual)) break;
  }
  throw DivergenceError(std::string(name) + ": no convergence within iteration cap",
                        residual);
}

double condition_estimate(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

constexpr double kConditionLimit = 1e12;

}  // namespace

std::vector<double> solve_mrp_cee(const EmpiricalModel& em, double gamma, double tol,
                                  long max_iterations) {
  return sweep_to_fixed_point(
      em,
      [&](int s, const std::vector<double>& v) {
        // Marginal chain: Phat(j|s) = c_{sj} / d_s, Rbar(s) = reward sum / d_s.
        const double ds = static_cast<double>(em.d(s));
        if (ds == 0.0) return 0.0;  // visited only as a truncation tail
        double acc = 0.0;
        for (int a = 0; a < em.n_actions; ++a) {
          if (em.count_sa(s, a) == 0) continue;
          acc += em.sa_reward_sum[static_cast<std::size_t>(s) * em.n_actions + a];
          for (int j = 0; j < em.n_states; ++j) {
            const long c = em.count_sas(s, a, j);
            if (c == 0 || em.is_visited_terminal(j)) continue;
            acc += gamma * static_cast<double>(c) * v[j];
          }
        }
        return acc / ds;
      },
      tol, max_iterations, "solve_mrp_cee");
}

std::vector<double> solve_mdp_cee(const EmpiricalModel& em, double gamma, double tol,
                                  long max_iterations) {
  return sweep_to_fixed_point(
      em,
      [&](int s, const std::vector<double>& v) {
        double acc = 0.0;
        for (int a = 0; a < em.n_actions; ++a) {
          if (em.count_sa(s, a) == 0) continue;
          double inner = em.mean_reward_sa(s, a);
          for (int j = 0; j < em.n_states; ++j) {
            if (em.count_sas(s, a, j) == 0 || em.is_visited_terminal(j)) continue;
            inner += gamma * em.p_hat(s, a, j) * v[j];
          }
          acc += em.pi_hat(s, a) * inner;
        }
        return acc;
      },
      tol, max_iterations, "solve_mdp_cee");
}

std::vector<double> solve_psec_cee(const EmpiricalModel& em,
                                   const TabularPolicy& eval_policy, double gamma,
                                   double tol, long max_iterations) {
  for (int s : em.visited_nonterminal()) {
    if (s >= eval_policy.n_states) {
      throw std::invalid_argument(
          "solve_psec_cee: evaluation policy does not cover visited state " +
          std::to_string(s));
    }
  }
  return sweep_to_fixed_point(
      em,
      [&](int s, const std::vector<double>& v) {
        double acc = 0.0;
        for (int a = 0; a < em.n_actions; ++a) {
          if (em.count_sa(s, a) == 0) continue;  // unobserved actions contribute 0
          double inner = em.mean_reward_sa(s, a);
          for (int j = 0; j < em.n_states; ++j) {
            if (em.count_sas(s, a, j) == 0 || em.is_visited_terminal(j)) continue;
            inner += gamma * em.p_hat(s, a, j) * v[j];
          }
          acc += eval_policy.prob(s, a) * inner;
        }
        return acc;
      },
      tol, max_iterations, "solve_psec_cee");
}

Eigen::VectorXd closed_form_values(const CEMatrixForm& mf, WhichPolicy which,
                                   double gamma) {
  const auto& trans = which == WhichPolicy::MlePolicy ? mf.Q : mf.U;
  const Eigen::VectorXd rhs = which == WhichPolicy::MlePolicy
                                  ? (mf.m + mf.h).eval()
                                  : (mf.o + mf.l).eval();
  const int n = static_cast<int>(mf.states.size());
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - gamma * trans;
  const double cond = condition_estimate(system);
  if (!(cond < kConditionLimit)) {
    throw SingularSystemError("closed_form_values: singular system", cond);
  }
  return system.partialPivLu().solve(rhs);
}

std::vector<double> closed_form_true_values(const TabularMDP& model,
                                            const TabularPolicy& policy,
                                            double gamma) {
  std::vector<int> states;
  for (int s = 0; s < model.n_states; ++s) {
    if (!model.is_terminal(s)) states.push_back(s);
  }
  const int n = static_cast<int>(states.size());
  std::vector<int> dense(model.n_states, -1);
  for (int k = 0; k < n; ++k) dense[states[k]] = k;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const int s = states[k];
    for (int a = 0; a < model.n_actions; ++a) {
      const double pa = policy.prob(s, a);
      if (pa == 0.0) continue;
      for (int j = 0; j < model.n_states; ++j) {
        const double p = model.p(s, a, j);
        if (p == 0.0) continue;
        rhs(k) += pa * p * model.r(s, a, j);
        if (!model.is_terminal(j)) q(k, dense[j]) += pa * p;
      }
    }
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - gamma * q;
  const double cond = condition_estimate(system);
  if (!(cond < kConditionLimit)) {
    throw SingularSystemError("closed_form_true_values: singular system", cond);
  }
  const Eigen::VectorXd sol = system.partialPivLu().solve(rhs);
  std::vector<double> out(model.n_states, 0.0);
  for (int k = 0; k < n; ++k) out[states[k]] = sol(k);
  return out;
}

ConvergenceReport check_convergence_conditions(const CEMatrixForm& mf, double gamma) {
  const int n = static_cast<int>(mf.states.size());
  if (n == 0) throw std::invalid_argument("check_convergence_conditions: empty batch");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mf.X);
  if (qr.rank() < n) {
    throw std::invalid_argument(
        "check_convergence_conditions: feature columns on visited states are rank "
        "deficient");
  }

  ConvergenceReport report;
  if (mf.has_truncated) {
    report.premises_met = false;
    report.premises_note =
        "batch contains truncated episodes; the completed-episode flow identity "
        "behind the diagonal-dominance argument does not apply";
  }

  const Eigen::MatrixXd dq =
      mf.d.asDiagonal() * (Eigen::MatrixXd::Identity(n, n) - gamma * mf.Q);
  const Eigen::MatrixXd s = dq + dq.transpose();

  bool dominant = true;
  bool strict_somewhere = false;
  const double row_tol = 1e-9 * std::max(1.0, s.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) off += std::abs(s(i, j));
    }
    if (s(i, i) <= 0.0 || s(i, i) < off - row_tol) dominant = false;
    if (s(i, i) > off + row_tol) strict_somewhere = true;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(s);
  report.min_symmetric_eigenvalue = sym.eigenvalues().minCoeff();

  const bool pd = report.min_symmetric_eigenvalue > -1e-10;
  if (report.premises_met) {
    report.diagonal_dominance =
        (dominant && strict_somewhere) ? Verdict::Satisfied : Verdict::Violated;
    report.positive_definite = pd ? Verdict::Satisfied : Verdict::Violated;
  } else {
    report.diagonal_dominance = Verdict::PremisesUnmet;
    report.positive_definite = Verdict::PremisesUnmet;
  }

  const Eigen::MatrixXd gram = mf.X.transpose() * mf.X;
  auto spectrum = [&](const Eigen::MatrixXd& trans,
                      std::vector<std::complex<double>>* out) {
    const Eigen::MatrixXd m =
        gram * mf.d.asDiagonal() *
        (Eigen::MatrixXd::Identity(n, n) - gamma * trans);
    Eigen::EigenSolver<Eigen::MatrixXd> eig(m);
    double max_mag = 0.0;
    for (int i = 0; i < n; ++i) max_mag = std::max(max_mag, std::abs(eig.eigenvalues()(i)));
    const double tol = 1e-12 * std::max(1.0, max_mag);
    bool positive = true;
    for (int i = 0; i < n; ++i) {
      out->push_back(eig.eigenvalues()(i));
      if (eig.eigenvalues()(i).real() <= tol) positive = false;
    }
    return positive;
  };
  report.td_real_parts_positive = spectrum(mf.Q, &report.td_eigenvalues);
  report.psec_real_parts_positive = spectrum(mf.U, &report.psec_eigenvalues);
  return report;
}

StabilityReport alpha_stability(const CEMatrixForm& mf, double gamma, double alpha) {
  const int n = static_cast<int>(mf.states.size());
  if (n == 0) throw std::invalid_argument("alpha_stability: empty batch");
  if (mf.episodes <= 0) throw std::invalid_argument("alpha_stability: no episodes");
  // Matches the learner's convention: the step is applied to the
  // episode-averaged accumulation.
  const Eigen::MatrixXd m = (mf.X.transpose() * mf.X) * mf.d.asDiagonal() *
                            (Eigen::MatrixXd::Identity(n, n) - gamma * mf.Q) /
                            static_cast<double>(mf.episodes);
  Eigen::EigenSolver<Eigen::MatrixXd> eig(m);

  StabilityReport report;
  report.spectral_radius = 0.0;
  report.alpha_ceiling = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lambda = eig.eigenvalues()(i);
    report.spectral_radius =
        std::max(report.spectral_radius, std::abs(1.0 - alpha * lambda));
    const double a = lambda.real();
    const double mag2 = std::norm(lambda);
    if (a <= 0.0 || mag2 == 0.0) {
      report.alpha_ceiling = 0.0;
    } else {
      report.alpha_ceiling = std::min(report.alpha_ceiling, 2.0 * a / mag2);
    }
  }
  report.stable = report.spectral_radius < 1.0;
  return report;
}

}  // namespace psectd
