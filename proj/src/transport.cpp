#include "mzkit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "mzkit/errors.hpp"

namespace mzkit {

namespace {

double w1_cdf_1d(const DiscreteMeasure& sigma, const DiscreteMeasure& nu) {
  // signed mass deltas swept in position order; W1 = int |F_sigma - F_nu|
  std::vector<std::pair<double, double>> ev;
  ev.reserve(sigma.atoms.size() + nu.atoms.size());
  for (const auto& a : sigma.atoms) ev.push_back({a.x[0], a.mass});
  for (const auto& a : nu.atoms) ev.push_back({a.x[0], -a.mass});
  std::sort(ev.begin(), ev.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  double w = 0.0, f = 0.0, prev = ev.empty() ? 0.0 : ev.front().first;
  for (const auto& [x, dm] : ev) {
    w += std::abs(f) * (x - prev);
    f += dm;
    prev = x;
  }
  return w;
}

// Transportation simplex (u-v potentials on a spanning tree). Supplies are
// lexicographically perturbed to keep the basis nondegenerate; the
// perturbation is removed from the optimal cost by evaluating the final
// plan on the unperturbed data.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   std::vector<double> cost)
      : m_(supply.size()), n_(demand.size()), supply_(supply), demand_(demand),
        orig_supply_(std::move(supply)), orig_demand_(std::move(demand)),
        cost_(std::move(cost)) {
    // lexicographic perturbation keeps the basis nondegenerate; the final
    // flows are recomputed on the optimal tree from the unperturbed data
    double total = std::accumulate(supply_.begin(), supply_.end(), 0.0);
    double eps = 1e-11 * std::max(total, 1.0) / static_cast<double>(m_ + 1);
    for (std::size_t i = 0; i < m_; ++i) supply_[i] += eps * static_cast<double>(i + 1);
    demand_.back() += eps * static_cast<double>(m_ * (m_ + 1)) / 2.0;
  }

  // returns the optimal plan as (i, j, mass) triples
  std::vector<std::tuple<std::size_t, std::size_t, double>> solve() {
    northwest_corner();
    for (int iter = 0; iter < 100000; ++iter) {
      compute_potentials();
      std::size_t bi = m_, bj = n_;
      double best = -1e-12 * (1.0 + max_abs_cost());
      for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          if (basic_(i, j)) continue;
          double rc = cost_[i * n_ + j] - u_[i] - v_[j];
          if (rc < best) {
            best = rc;
            bi = i;
            bj = j;
          }
        }
      if (bi == m_) return tree_flows();
      pivot(bi, bj);
    }
    throw std::runtime_error("vaserstein1: transport simplex did not converge");
  }

  // flows on the optimal spanning tree for the unperturbed masses, by
  // stripping leaves; unique since the basis graph is a tree
  std::vector<std::tuple<std::size_t, std::size_t, double>> tree_flows() {
    std::vector<double> s = orig_supply_, d = orig_demand_;
    std::vector<std::vector<std::size_t>> row_arcs(m_), col_arcs(n_);
    std::vector<std::tuple<std::size_t, std::size_t, double>> plan;
    std::vector<char> done;
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (basic_(i, j)) {
          row_arcs[i].push_back(arcs.size());
          col_arcs[j].push_back(arcs.size());
          arcs.push_back({i, j});
        }
    done.assign(arcs.size(), 0);
    std::vector<int> row_deg(m_), col_deg(n_);
    for (std::size_t i = 0; i < m_; ++i) row_deg[i] = static_cast<int>(row_arcs[i].size());
    for (std::size_t j = 0; j < n_; ++j) col_deg[j] = static_cast<int>(col_arcs[j].size());
    for (std::size_t step = 0; step < arcs.size(); ++step) {
      std::size_t pick = arcs.size();
      for (std::size_t t = 0; t < arcs.size() && pick == arcs.size(); ++t) {
        if (done[t]) continue;
        auto [i, j] = arcs[t];
        if (row_deg[i] == 1 || col_deg[j] == 1) pick = t;
      }
      if (pick == arcs.size()) break;  // only possible on the last arc
      auto [i, j] = arcs[pick];
      double f = row_deg[i] == 1 ? s[i] : d[j];
      f = std::max(0.0, f);
      plan.push_back({i, j, f});
      s[i] -= f;
      d[j] -= f;
      done[pick] = 1;
      --row_deg[i];
      --col_deg[j];
    }
    return plan;
  }

 private:
  char& basic_(std::size_t i, std::size_t j) { return basis_[i * n_ + j]; }

  double max_abs_cost() const {
    double m = 0.0;
    for (double c : cost_) m = std::max(m, std::abs(c));
    return m;
  }

  void northwest_corner() {
    flow_.assign(m_ * n_, 0.0);
    basis_.assign(m_ * n_, 0);
    std::vector<double> s = supply_, d = demand_;
    std::size_t i = 0, j = 0;
    while (i < m_ && j < n_) {
      double f = std::min(s[i], d[j]);
      flow_[i * n_ + j] = f;
      basic_(i, j) = true;
      s[i] -= f;
      d[j] -= f;
      if (i + 1 == m_ && j + 1 == n_) break;
      if (s[i] <= d[j])
        ++i;
      else
        ++j;
    }
  }

  void compute_potentials() {
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<bool> su(m_, false), sv(n_, false);
    su[0] = true;
    // BFS over the basis tree
    std::vector<std::size_t> queue = {0};  // encoded: rows are [0, m), cols are m + j
    queue.reserve(m_ + n_);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::size_t node = queue[qi];
      if (node < m_) {
        std::size_t i = node;
        for (std::size_t j = 0; j < n_; ++j)
          if (basic_(i, j) && !sv[j]) {
            v_[j] = cost_[i * n_ + j] - u_[i];
            sv[j] = true;
            queue.push_back(m_ + j);
          }
      } else {
        std::size_t j = node - m_;
        for (std::size_t i = 0; i < m_; ++i)
          if (basic_(i, j) && !su[i]) {
            u_[i] = cost_[i * n_ + j] - v_[j];
            su[i] = true;
            queue.push_back(i);
          }
      }
    }
  }

  // find the unique cycle created by the entering arc (bi, bj) and shift
  // flow around it
  void pivot(std::size_t bi, std::size_t bj) {
    // alternating path: rows to columns through basic arcs; DFS
    std::vector<std::pair<std::size_t, std::size_t>> stackpath;
    std::vector<bool> vis_row(m_, false), vis_col(n_, false);
    std::vector<std::pair<std::size_t, std::size_t>> cycle;
    std::function<bool(std::size_t)> dfs_row = [&](std::size_t i) -> bool {
      vis_row[i] = true;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!basic_(i, j) || vis_col[j]) continue;
        stackpath.push_back({i, j});
        if (j == bj) return true;
        vis_col[j] = true;
        for (std::size_t i2 = 0; i2 < m_; ++i2) {
          if (!basic_(i2, j) || vis_row[i2] || i2 == i) continue;
          stackpath.push_back({i2, j});
          if (dfs_row(i2)) return true;
          stackpath.pop_back();
        }
        stackpath.pop_back();
      }
      return false;
    };
    if (!dfs_row(bi)) throw std::runtime_error("vaserstein1: degenerate transport basis");
    // cycle: entering arc + alternating path back; odd positions give up,
    // even give down
    cycle.push_back({bi, bj});
    for (auto it = stackpath.rbegin(); it != stackpath.rend(); ++it) cycle.push_back(*it);
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = 1;
    for (std::size_t t = 1; t < cycle.size(); t += 2) {
      auto [i, j] = cycle[t];
      if (flow_[i * n_ + j] < theta) {
        theta = flow_[i * n_ + j];
        leave = t;
      }
    }
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      auto [i, j] = cycle[t];
      flow_[i * n_ + j] += (t % 2 == 0) ? theta : -theta;
    }
    auto [li, lj] = cycle[leave];
    basic_(li, lj) = false;
    basic_(bi, bj) = true;
  }

  std::size_t m_, n_;
  std::vector<double> supply_, demand_, orig_supply_, orig_demand_, cost_;
  std::vector<double> flow_;
  std::vector<char> basis_;
  std::vector<double> u_, v_;
};

}  // namespace

double vaserstein1(const DiscreteMeasure& sigma, const DiscreteMeasure& nu,
                   std::size_t atom_cap) {
  if (sigma.atoms.empty() || nu.atoms.empty())
    throw std::invalid_argument("vaserstein1: empty measure");
  double ms = sigma.total(), mn = nu.total();
  if (std::abs(ms - mn) > 1e-10 * std::max({ms, mn, 1.0}))
    throw std::invalid_argument("vaserstein1: mass mismatch");
  if (sigma.atoms.size() + nu.atoms.size() > atom_cap)
    throw CapError("vaserstein1: LP size cap exceeded");
  const int n = static_cast<int>(sigma.atoms[0].x.size());
  if (n == 1) return w1_cdf_1d(sigma, nu);

  std::vector<double> supply, demand, cost;
  supply.reserve(sigma.atoms.size());
  demand.reserve(nu.atoms.size());
  for (const auto& a : sigma.atoms) supply.push_back(a.mass);
  for (const auto& a : nu.atoms) demand.push_back(a.mass);
  cost.resize(supply.size() * demand.size());
  for (std::size_t i = 0; i < supply.size(); ++i)
    for (std::size_t j = 0; j < demand.size(); ++j) {
      double d2 = 0.0;
      for (int t = 0; t < n; ++t) {
        double d = sigma.atoms[i].x[t] - nu.atoms[j].x[t];
        d2 += d * d;
      }
      cost[i * demand.size() + j] = std::sqrt(d2);
    }
  TransportSimplex simplex(supply, demand, cost);
  double w = 0.0;
  for (auto [i, j, f] : simplex.solve()) w += f * cost[i * demand.size() + j];
  return w;
}

TransportGap interpolation_transport_gap(const std::vector<Point>& points, const PolySpace& ps,
                                         int quad_order) {
  if (points.empty()) throw std::invalid_argument("interpolation_transport_gap: empty level");
  const double dim = ps.dim();
  DualBasis dual(points, ps);

  DiscreteMeasure sigma;
  for (const auto& p : points) sigma.atoms.push_back({p, 1.0 / dim});

  QuadratureRule q = ps.measure().quadrature(std::max(quad_order, 2 * ps.degree()));
  DiscreteMeasure nu;
  nu.atoms.reserve(q.points.rows());
  Point y(ps.measure().dim());
  for (Eigen::Index i = 0; i < q.points.rows(); ++i) {
    for (int t = 0; t < ps.measure().dim(); ++t) y[t] = q.points(i, t);
    nu.atoms.push_back({y, q.weights[i] * dual.subspace_diag(y) / dim});
  }
  TransportGap out;
  out.sigma_mass = sigma.total();
  out.nu_mass = nu.total();
  out.mesh = q.mesh();
  out.w1 = vaserstein1(sigma, nu, 40000);
  return out;
}

double offdiag_second_moment(const PolySpace& ps, int quad_order) {
  if (quad_order < 2 * ps.degree() + 2)
    throw std::invalid_argument("offdiag_second_moment: quad_order must be >= 2k+2");
  QuadratureRule q = ps.measure().quadrature(quad_order);
  const Eigen::Index npts = q.points.rows();
  std::vector<Point> pts(npts, Point(ps.measure().dim()));
  for (Eigen::Index i = 0; i < npts; ++i)
    for (int t = 0; t < ps.measure().dim(); ++t) pts[i][t] = q.points(i, t);
  Eigen::MatrixXd b = ps.basis_matrix(pts);
  Eigen::MatrixXd kern = b.transpose() * b;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < npts; ++i)
    for (Eigen::Index j = 0; j < npts; ++j) {
      double d2 = (q.points.row(i) - q.points.row(j)).squaredNorm();
      acc += q.weights[i] * q.weights[j] * d2 * kern(i, j) * kern(i, j);
    }
  return acc / ps.dim();
}

}  // namespace mzkit
