#include "invcog/finite_inverse_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "invcog/errors.hpp"

namespace invcog {

namespace {

constexpr double kStochasticTol = 1e-12;

void check_stochastic(const Matrix& m, const char* name) {
  if (m.rows() == 0 || m.cols() == 0) throw ConfigError(std::string(name) + " is empty");
  if ((m.array() < 0.0).any()) throw ConfigError(std::string(name) + " has negative entries");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (std::abs(m.row(i).sum() - 1.0) > kStochasticTol)
      throw ConfigError(std::string(name) + " row " + std::to_string(i) + " does not sum to 1");
}

// Greedy L1 merge. Children are visited in order of their first coordinate,
// so only anchors within `tol` in that coordinate need checking.
std::vector<BeliefAtom> merge_atoms(std::vector<BeliefAtom> atoms, double tol) {
  if (tol <= 0.0 || atoms.size() < 2) return atoms;
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const BeliefAtom& a, const BeliefAtom& b) { return a.belief(0) < b.belief(0); });
  struct Cluster {
    Vector anchor;
    Vector weighted_sum;
    double weight;
  };
  std::vector<Cluster> clusters;
  std::size_t window_start = 0;
  for (auto& atom : atoms) {
    while (window_start < clusters.size() &&
           clusters[window_start].anchor(0) < atom.belief(0) - tol)
      ++window_start;
    bool merged = false;
    for (std::size_t c = window_start; c < clusters.size(); ++c) {
      if ((clusters[c].anchor - atom.belief).lpNorm<1>() < tol) {
        clusters[c].weighted_sum += atom.weight * atom.belief;
        clusters[c].weight += atom.weight;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back({atom.belief, atom.weight * atom.belief, atom.weight});
  }
  std::vector<BeliefAtom> out;
  out.reserve(clusters.size());
  for (auto& c : clusters) {
    Vector b = c.weight > 0.0 ? Vector(c.weighted_sum / c.weight) : c.anchor;
    out.push_back({std::move(b), c.weight});
  }
  return out;
}

}  // namespace

int FiniteAdversaryModel::map_policy(const Vector& belief) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < belief.size(); ++i)
    if (belief(i) > belief(best)) best = i;
  return static_cast<int>(best);
}

void FiniteAdversaryModel::validate() const {
  check_stochastic(P, "P");
  check_stochastic(B, "B");
  check_stochastic(G, "G");
  if (P.rows() != P.cols()) throw ConfigError("P must be square");
  if (B.rows() != P.rows()) throw ConfigError("B must have one row per state");
  if (!policy && G.rows() != P.rows())
    throw ConfigError("the default MAP policy needs one row of G per state");
}

Vector hmm_update(const FiniteAdversaryModel& model, const Vector& belief, int y) {
  Vector unnorm = (model.P.transpose() * belief).cwiseProduct(model.B.col(y));
  const double z = unnorm.sum();
  if (!(z > 0.0)) return {};
  return unnorm / z;
}

Vector BeliefMixture::mean() const {
  if (atoms.empty()) return {};
  Vector m = Vector::Zero(atoms.front().belief.size());
  for (const auto& a : atoms) m += a.weight * a.belief;
  return m;
}

double BeliefMixture::total_weight() const {
  double w = 0.0;
  for (const auto& a : atoms) w += a.weight;
  return w;
}

FiniteFilterResult inverse_filter_finite(const FiniteAdversaryModel& model,
                                         const BeliefMixture& prior, const std::vector<int>& states,
                                         const std::vector<int>& actions,
                                         const FiniteFilterOptions& opts) {
  model.validate();
  if (states.size() != actions.size() + 1)
    throw ConfigError("inverse_filter_finite: need |states| = |actions| + 1");
  if (prior.atoms.empty()) throw ConfigError("inverse_filter_finite: empty prior mixture");
  const auto nx = model.P.rows();
  const auto ny = model.B.cols();
  const auto na = model.G.cols();
  for (int x : states)
    if (x < 0 || x >= nx) throw ConfigError("inverse_filter_finite: state index out of range");
  for (int a : actions)
    if (a < 0 || a >= na) throw ConfigError("inverse_filter_finite: action index out of range");

  FiniteFilterResult res;
  BeliefMixture current = prior;
  const double w0 = current.total_weight();
  if (!(w0 > 0.0)) throw ConfigError("inverse_filter_finite: prior weights sum to zero");
  for (auto& atom : current.atoms) atom.weight /= w0;
  res.mixtures.push_back(current);
  res.mean_beliefs.push_back(current.mean());

  for (std::size_t k = 0; k < actions.size(); ++k) {
    const int x_next = states[k + 1];
    const int a_next = actions[k];
    std::vector<BeliefAtom> children;
    children.reserve(current.atoms.size() * ny);
    for (const auto& atom : current.atoms) {
      for (Eigen::Index y = 0; y < ny; ++y) {
        const double py = model.B(x_next, y);
        if (py == 0.0) continue;
        Vector child = hmm_update(model, atom.belief, static_cast<int>(y));
        if (child.size() == 0) continue;
        const int u = model.policy_of(child);
        if (u < 0 || u >= model.G.rows())
          throw ConfigError("inverse_filter_finite: policy returned an out-of-range action");
        const double w = atom.weight * py * model.G(u, a_next);
        if (w > 0.0) children.push_back({std::move(child), w});
      }
    }
    const double total = std::accumulate(children.begin(), children.end(), 0.0,
                                         [](double s, const BeliefAtom& a) { return s + a.weight; });
    if (!(total > 0.0))
      throw InconsistencyError("inverse_filter_finite: action at step " + std::to_string(k + 1) +
                               " has zero probability under the model");
    res.log_likelihood += std::log(total);

    children = merge_atoms(std::move(children), opts.prune_tol);
    if (children.size() > opts.max_atoms) {
      std::stable_sort(children.begin(), children.end(),
                       [](const BeliefAtom& a, const BeliefAtom& b) { return a.weight > b.weight; });
      children.resize(opts.max_atoms);
    }
    const double kept = std::accumulate(children.begin(), children.end(), 0.0,
                                        [](double s, const BeliefAtom& a) { return s + a.weight; });
    for (auto& atom : children) atom.weight /= kept;
    current.atoms = std::move(children);
    res.mixtures.push_back(current);
    res.mean_beliefs.push_back(current.mean());
  }
  return res;
}

}  // namespace invcog
