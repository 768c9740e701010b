#include "mixpl/estimation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mixpl/errors.hpp"
#include "mixpl/probability.hpp"
#include "mixpl/sampling.hpp"

namespace mixpl {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void add_event(MomentSet& set, PartialOrder o) {
  for (const MomentEvent& e : set.events)
    if (e.event == o) return;
  StructureId s = o.structure();
  set.events.push_back({std::move(o), std::move(s), 0, 1.0});
}

void require_m(int m, const char* what) {
  if (m < 4) throw DimensionError(std::string(what) + " needs m >= 4, got m=" + std::to_string(m));
}

LinearOrder as_linear(const PartialOrder& o, int m) {
  const auto items = o.items();
  if (o.kind() == StructureKind::Top && o.size() == m - 1) {
    std::vector<int> ranking(items.begin(), items.end());
    std::vector<char> seen(m, 0);
    for (int a : ranking) seen[a] = 1;
    for (int a = 0; a < m; ++a)
      if (!seen[a]) ranking.push_back(a);
    return LinearOrder(std::move(ranking));
  }
  if (o.kind() == StructureKind::Way && o.size() == m) {
    return LinearOrder(std::vector<int>(items.begin(), items.end()));
  }
  throw InvariantError("linear-order fitting received a partial order: " + to_string(o));
}

// extends() with the positions of r precomputed.
bool extends_at(const LinearOrder& r, const std::vector<int>& pos, const PartialOrder& o) {
  const auto items = o.items();
  switch (o.kind()) {
    case StructureKind::Top:
      for (int p = 0; p < o.size(); ++p)
        if (r[p] != items[p]) return false;
      return true;
    case StructureKind::Way:
      for (int p = 1; p < o.size(); ++p)
        if (pos[items[p - 1]] > pos[items[p]]) return false;
      return true;
    case StructureKind::Choice:
      for (int a : items)
        if (pos[a] < pos[o.chosen()]) return false;
      return true;
  }
  return false;
}

// Maps an unconstrained vector onto {alpha, theta^(r)} with every entry at
// least epsilon:  v = epsilon + (1 - d * epsilon) * softmax(z).
class SimplexMap {
 public:
  SimplexMap(int m, int k, double epsilon) : m_(m), k_(k), epsilon_(epsilon) {}

  int dimension() const { return k_ * (m_ + 1); }

  void decode(const Eigen::VectorXd& x, Eigen::VectorXd& alpha_soft, Eigen::MatrixXd& theta_soft,
              MixtureParams& params) const {
    alpha_soft = softmax(x.head(k_));
    params.alpha = Eigen::VectorXd::Constant(k_, epsilon_) + (1.0 - k_ * epsilon_) * alpha_soft;
    theta_soft.resize(m_, k_);
    params.components.resize(m_, k_);
    for (int r = 0; r < k_; ++r) {
      theta_soft.col(r) = softmax(x.segment(k_ + r * m_, m_));
      params.components.col(r) =
          Eigen::VectorXd::Constant(m_, epsilon_) + (1.0 - m_ * epsilon_) * theta_soft.col(r);
    }
  }

  Eigen::VectorXd encode(const MixtureParams& params) const {
    Eigen::VectorXd x(dimension());
    x.head(k_) = params.alpha.array().log();
    for (int r = 0; r < k_; ++r) x.segment(k_ + r * m_, m_) = params.components.col(r).array().log();
    return x;
  }

  double alpha_scale() const { return 1.0 - k_ * epsilon_; }
  double theta_scale() const { return 1.0 - m_ * epsilon_; }

 private:
  static Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    const Eigen::VectorXd shifted = (z.array() - z.maxCoeff()).exp();
    return shifted / shifted.sum();
  }

  int m_;
  int k_;
  double epsilon_;
};

// Residuals r_t = Pr_kPL(E_t) - target_t and their Jacobian in x.
class MomentResiduals {
 public:
  MomentResiduals(const MomentData& data, const SimplexMap& map, int k)
      : data_(data), map_(map), k_(k), m_(data.m) {
    targets_.resize(data.moments.size());
    for (int t = 0; t < data.moments.size(); ++t) {
      const MomentEvent& e = data.moments.events[t];
      targets_[t] = static_cast<double>(e.empirical_count) * e.weight / static_cast<double>(data.n);
    }
  }

  int size() const { return static_cast<int>(targets_.size()); }

  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& residual,
                  Eigen::MatrixXd* jacobian) const {
    Eigen::VectorXd alpha_soft;
    Eigen::MatrixXd theta_soft;
    MixtureParams params;
    map_.decode(x, alpha_soft, theta_soft, params);
    const int q = size();
    residual.resize(q);
    if (jacobian) jacobian->resize(q, map_.dimension());
    Eigen::VectorXd grad(m_);
    Eigen::VectorXd comp_prob(k_);
    for (int t = 0; t < q; ++t) {
      const PartialOrder& o = data_.moments.events[t].event;
      double prob = 0.0;
      for (int r = 0; r < k_; ++r) {
        if (jacobian) {
          comp_prob[r] = pl_partial_prob_with_gradient(params.components.col(r), o, grad);
          // chain through the softmax: d theta_i / d z_j = s_i (delta_ij - s_j) * scale
          const auto s = theta_soft.col(r);
          const double sg = s.dot(grad);
          jacobian->row(t).segment(k_ + r * m_, m_) =
              (params.alpha[r] * map_.theta_scale()) * (s.array() * (grad.array() - sg)).matrix().transpose();
        } else {
          comp_prob[r] = detail::partial_prob_unchecked(params.components.col(r), o);
        }
        prob += params.alpha[r] * comp_prob[r];
      }
      if (jacobian) {
        const double mean = alpha_soft.dot(comp_prob);
        jacobian->row(t).head(k_) =
            map_.alpha_scale() * (alpha_soft.array() * (comp_prob.array() - mean)).matrix().transpose();
      }
      residual[t] = prob - targets_[t];
    }
    return residual.squaredNorm();
  }

  MixtureParams decode(const Eigen::VectorXd& x) const {
    Eigen::VectorXd alpha_soft;
    Eigen::MatrixXd theta_soft;
    MixtureParams params;
    map_.decode(x, alpha_soft, theta_soft, params);
    return params;
  }

 private:
  const MomentData& data_;
  const SimplexMap& map_;
  int k_;
  int m_;
  std::vector<double> targets_;
};

struct LocalResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and Nielsen's damping
// update.
LocalResult levenberg_marquardt(const MomentResiduals& residuals, Eigen::VectorXd x,
                                const FitConfig& config) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double f = residuals.evaluate(x, r, &jac);
  LocalResult out;

  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::VectorXd g = jac.transpose() * r;
  double lambda = 1e-3;
  double nu = 2.0;
  Eigen::VectorXd r_new;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    out.iterations = iter + 1;
    if (g.lpNorm<Eigen::Infinity>() < 1e-15) {
      out.converged = true;
      break;
    }
    const double diag_floor = 1e-9 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
    const Eigen::VectorXd scale = jtj.diagonal().cwiseMax(diag_floor);
    Eigen::MatrixXd system = jtj;
    system.diagonal() += lambda * scale;
    const Eigen::VectorXd step = system.ldlt().solve(-g);
    if (!step.allFinite()) {
      lambda *= nu;
      nu *= 2.0;
      continue;
    }
    const Eigen::VectorXd candidate = x + step;
    const double f_new = residuals.evaluate(candidate, r_new, nullptr);
    // Model decrease of 0.5 * ||r||^2.
    const double predicted = 0.5 * step.dot(lambda * scale.cwiseProduct(step) - g);
    const double actual = 0.5 * (f - f_new);
    if (f_new < f && predicted > 0.0) {
      const double improvement = f - f_new;
      x = candidate;
      f = residuals.evaluate(x, r, &jac);
      jtj.noalias() = jac.transpose() * jac;
      g.noalias() = jac.transpose() * r;
      const double rho = actual / predicted;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (improvement < config.tolerance) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e20) {
        out.converged = true;
        break;
      }
    }
  }
  out.x = std::move(x);
  out.objective = f;
  return out;
}

}  // namespace

std::string to_string(Selector selector) {
  switch (selector) {
    case Selector::Top2Way2:
      return "top2_2way";
    case Selector::Choice4:
      return "choice4";
    case Selector::Top3:
      return "top3";
  }
  return "?";
}

Selector selector_from_string(const std::string& name) {
  if (name == "top2_2way") return Selector::Top2Way2;
  if (name == "choice4") return Selector::Choice4;
  if (name == "top3") return Selector::Top3;
  throw PreconditionError("unknown moment selector '" + name + "'");
}

MomentSet select_moments_top2_2way(int m) {
  require_m(m, "top-2 and 2-way selector");
  MomentSet set;
  set.selector = Selector::Top2Way2;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && !(i == m - 1 && j == m - 2)) add_event(set, PartialOrder::top({i, j}));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) add_event(set, PartialOrder::way({i, j}));
  return set;
}

MomentSet select_moments_choice4(int m) {
  require_m(m, "choice-4 selector");
  MomentSet set;
  set.selector = Selector::Choice4;
  for (const Group& g : choice_groups(m)) {
    const int a = g[0], b = g[1], c = g[2], d = g[3];
    const std::vector<int> all = {a, b, c, d};
    add_event(set, PartialOrder::choice(all, a));
    add_event(set, PartialOrder::choice(all, b));
    add_event(set, PartialOrder::choice(all, c));
    add_event(set, PartialOrder::choice({a, b, c}, a));
    add_event(set, PartialOrder::choice({a, b, c}, b));
    add_event(set, PartialOrder::choice({a, b, d}, a));
    add_event(set, PartialOrder::choice({a, b, d}, b));
    add_event(set, PartialOrder::choice({a, c, d}, a));
    add_event(set, PartialOrder::choice({a, c, d}, c));
    add_event(set, PartialOrder::choice({b, c, d}, b));
    add_event(set, PartialOrder::choice({b, c, d}, c));
    add_event(set, PartialOrder::choice({a, b}, a));
    add_event(set, PartialOrder::choice({a, c}, a));
    add_event(set, PartialOrder::choice({a, d}, a));
    add_event(set, PartialOrder::choice({b, c}, b));
    add_event(set, PartialOrder::choice({b, d}, b));
    add_event(set, PartialOrder::choice({c, d}, c));
  }
  return set;
}

MomentSet select_moments_top3(int m) {
  require_m(m, "top-3 selector");
  MomentSet set;
  set.selector = Selector::Top3;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        if (i != j && j != l && i != l && !(i == m - 1 && j == m - 2 && l == m - 3)) {
          set.events.push_back({PartialOrder::top({i, j, l}), StructureId::top(3), 0, 1.0});
        }
  return set;
}

MomentSet select_moments(Selector selector, int m) {
  switch (selector) {
    case Selector::Top2Way2:
      return select_moments_top2_2way(m);
    case Selector::Choice4:
      return select_moments_choice4(m);
    case Selector::Top3:
      return select_moments_top3(m);
  }
  throw PreconditionError("unknown selector");
}

StructureDistribution estimate_phi(OrderSource& source) {
  std::map<StructureId, std::int64_t> counts;
  std::int64_t n = 0;
  while (auto o = source.next()) {
    ++counts[o->structure()];
    ++n;
  }
  if (n == 0) throw EmptyProfileError("cannot estimate phi from an empty profile");
  StructureDistribution phi;
  for (const auto& [s, c] : counts) phi.add(s, static_cast<double>(c) / static_cast<double>(n));
  return phi;
}

StructureDistribution estimate_phi(const Profile& profile) {
  ProfileSource source(profile);
  return estimate_phi(source);
}

MomentData count_moments(OrderSource& source, MomentSet moments, DataMode mode) {
  MomentData data;
  data.m = source.m();
  data.mode = mode;
  for (MomentEvent& e : moments.events) e.empirical_count = 0;

  std::map<StructureId, std::int64_t> structure_counts;
  std::map<PartialOrder, std::size_t> index;
  for (std::size_t t = 0; t < moments.events.size(); ++t) index.emplace(moments.events[t].event, t);

  while (auto o = source.next()) {
    ++data.n;
    if (mode == DataMode::Partial) {
      ++structure_counts[o->structure()];
      const auto it = index.find(*o);
      if (it != index.end()) ++moments.events[it->second].empirical_count;
    } else {
      const LinearOrder r = as_linear(*o, data.m);
      const std::vector<int> pos = r.positions();
      for (MomentEvent& e : moments.events)
        if (extends_at(r, pos, e.event)) ++e.empirical_count;
    }
  }
  if (data.n == 0) throw EmptyProfileError("profile contains no orders");

  if (mode == DataMode::Linear) {
    data.moments = std::move(moments);
    return data;
  }

  const double n = static_cast<double>(data.n);
  for (const auto& [s, c] : structure_counts) data.phi_hat.add(s, static_cast<double>(c) / n);

  data.moments.selector = moments.selector;
  for (MomentEvent& e : moments.events) {
    const double phi = data.phi_hat.probability(e.structure);
    if (phi <= 0.0) {
      ++data.dropped_events;
      continue;
    }
    e.weight = 1.0 / phi;
    data.moments.events.push_back(std::move(e));
  }
  if (data.dropped_events > 0) {
    data.warnings.push_back(std::to_string(data.dropped_events) +
                            " moment events dropped: their structures were never observed; "
                            "the consistency guarantee does not apply");
  }
  if (data.moments.events.empty()) {
    throw NoMomentDataError("no selected moment event has an observed structure");
  }
  return data;
}

double gmm_objective(const MixtureParams& candidate, const MomentSet& moments, std::int64_t n) {
  if (n <= 0) throw EmptyProfileError("objective needs n >= 1");
  candidate.validate();
  double total = 0.0;
  for (const MomentEvent& e : moments.events) {
    if (!std::isfinite(e.weight) || e.weight <= 0.0) {
      throw DivisionError("moment event " + to_string(e.event) + " has unobserved structure");
    }
    const double empirical = static_cast<double>(e.empirical_count) * e.weight / static_cast<double>(n);
    const double diff = mixture_partial_prob(candidate, e.event) - empirical;
    total += diff * diff;
  }
  return total;
}

FitReport fit_moments(const MomentData& data, const FitConfig& config) {
  const auto start = Clock::now();
  if (config.k != 2 && !config.allow_unsupported_k) {
    throw PreconditionError("fit supports k = 2 only; k = " + std::to_string(config.k) +
                            " has no identifiability guarantee");
  }
  if (config.k < 1) throw PreconditionError("k must be positive");
  if (config.starts < 1) throw PreconditionError("at least one start is required");
  if (!(config.epsilon > 0.0) || config.epsilon * std::max(data.m, config.k) >= 1.0) {
    throw PreconditionError("epsilon must lie in (0, 1/max(m, k))");
  }
  require_m(data.m, "fit");

  const SimplexMap map(data.m, config.k, config.epsilon);
  const MomentResiduals residuals(data, map, config.k);

  FitReport report;
  report.seed = config.seed;
  report.n = data.n;
  report.moments_used = data.moments.size();
  report.warnings = data.warnings;
  report.guarantee_applies = config.k == 2 && data.dropped_events == 0;
  if (config.k != 2) report.warnings.push_back("k != 2 is unsupported: no identifiability guarantee");

  LocalResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int s = 0; s < config.starts; ++s) {
    Rng rng(split_seed(config.seed, static_cast<std::uint64_t>(s)));
    const Eigen::VectorXd x0 = map.encode(random_truth(data.m, config.k, rng));
    LocalResult local = levenberg_marquardt(residuals, x0, config);
    report.starts.push_back({s, local.objective, local.iterations, local.converged});
    // strict < keeps the lowest start index among ties
    if (local.objective < best.objective) {
      best = std::move(local);
      report.best_start = s;
    }
  }
  report.estimate = residuals.decode(best.x);
  report.objective = best.objective;
  if (data.mode == DataMode::Partial) report.estimate.phi = data.phi_hat;
  report.runtime_ms = elapsed_ms(start);
  return report;
}

FitReport fit(OrderSource& source, Selector selector, const FitConfig& config) {
  const auto start = Clock::now();
  const int m = source.m();
  require_m(m, "fit");
  MomentData data = count_moments(source, select_moments(selector, m), config.mode);
  const double stage1 = elapsed_ms(start);
  FitReport report = fit_moments(data, config);
  report.stage1_ms = stage1;
  report.runtime_ms = elapsed_ms(start);
  return report;
}

FitReport fit(const Profile& profile, Selector selector, const FitConfig& config) {
  ProfileSource source(profile);
  return fit(source, selector, config);
}

double mse(const MixtureParams& estimate, const MixtureParams& truth) {
  if (estimate.k() != truth.k() || estimate.m() != truth.m() ||
      estimate.components.cols() != estimate.k() || truth.components.cols() != truth.k()) {
    throw DimensionError("mse needs estimate and truth with equal m and k");
  }
  const int k = truth.k();
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double err = 0.0;
    for (int r = 0; r < k; ++r) {
      const double da = estimate.alpha[perm[r]] - truth.alpha[r];
      err += da * da + (estimate.components.col(perm[r]) - truth.components.col(r)).squaredNorm();
    }
    best = std::min(best, err);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace mixpl
