#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psectd/core.hpp"
#include "psectd/empirical.hpp"

namespace psectd {

/// Value function of the MLE reward process: v(s) = Rbar(s) +
/// gamma sum_j Phat(j|s) v(j), solved by fixed-point sweeps over the visited
/// non-terminal states. Returns a dense vector over all states with zeros at
/// terminals and unvisited states.
std::vector<double> solve_mrp_cee(const EmpiricalModel& em, double gamma,
                                  double tol = 1e-12, long max_iterations = 1000000);

/// Same fixed point with the action sum explicit:
/// v(s) = sum_a pi_hat(a|s) [Rbar(s,a) + gamma sum_j Phat(j|s,a) v(j)].
std::vector<double> solve_mdp_cee(const EmpiricalModel& em, double gamma,
                                  double tol = 1e-12, long max_iterations = 1000000);

/// The corrected fixed point: the evaluation policy replaces the MLE policy,
/// with the action sum restricted to observed actions (unobserved actions
/// contribute 0, as do unvisited successors).
std::vector<double> solve_psec_cee(const EmpiricalModel& em,
                                   const TabularPolicy& eval_policy, double gamma,
                                   double tol = 1e-12, long max_iterations = 1000000);

enum class WhichPolicy { MlePolicy, EvalPolicy };

/// Direct linear solve of the same fixed points: (I - gamma Q)^-1 (m + h) for
/// the MLE weighting, (I - gamma U)^-1 (o + l) for the evaluation weighting.
/// Indexed like mf.states. Throws SingularSystemError when the system is
/// numerically singular.
Eigen::VectorXd closed_form_values(const CEMatrixForm& mf, WhichPolicy which,
                                   double gamma);

/// Independent route to solve_true_values: builds the true-model Q/m/h over
/// non-terminal states and solves the linear system directly. Dense over all
/// states, zeros at terminals.
std::vector<double> closed_form_true_values(const TabularMDP& model,
                                            const TabularPolicy& policy,
                                            double gamma);

enum class Verdict { Satisfied, Violated, PremisesUnmet };

/// Everything the convergence argument needs, computed on the batch matrices:
/// the symmetrized D(I - gamma Q), its diagonal dominance and definiteness,
/// and the spectra of the TD and corrected iteration matrices.
struct ConvergenceReport {
  Verdict diagonal_dominance = Verdict::Violated;
  Verdict positive_definite = Verdict::Violated;
  double min_symmetric_eigenvalue = 0.0;
  std::vector<std::complex<double>> td_eigenvalues;    // X^T X D(I - gamma Q)
  std::vector<std::complex<double>> psec_eigenvalues;  // X^T X D(I - gamma U)
  bool td_real_parts_positive = false;
  bool psec_real_parts_positive = false;
  bool premises_met = true;
  std::string premises_note;
};

/// Throws std::invalid_argument when the feature columns on visited states
/// are rank deficient. Batches containing truncated episodes get
/// premises-unmet verdicts (the start-count row-sum argument needs completed
/// episodes); the numeric fields are still filled in.
ConvergenceReport check_convergence_conditions(const CEMatrixForm& mf, double gamma);

struct StabilityReport {
  bool stable = false;
  double spectral_radius = 0.0;
  /// Largest step size guaranteed stable: min over eigenvalues a+bi of the
  /// per-transition-normalized iteration matrix of 2a / (a^2 + b^2). Zero when
  /// some eigenvalue has a non-positive real part.
  double alpha_ceiling = 0.0;
};

/// Spectral radius of I - (alpha/m) X^T X D(I - gamma Q) where m is the
/// episode count (the learner applies its step size to the episode-averaged
/// accumulation). Stable iff radius < 1.
StabilityReport alpha_stability(const CEMatrixForm& mf, double gamma, double alpha);

}  // namespace psectd
