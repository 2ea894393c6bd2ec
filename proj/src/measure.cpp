#include "mzkit/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mzkit/errors.hpp"

namespace mzkit {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::vector<MultiIndex> enumerate_multiindices(int n, int k) {
  if (n < 1) throw std::invalid_argument("enumerate_multiindices: n must be >= 1");
  if (k < 0) throw std::invalid_argument("enumerate_multiindices: k must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(binomial(n + k, n)));
  std::vector<int> cur(n, 0);
  // within a degree: descending lex <=> first coordinate carries as much as possible
  std::function<void(int, int, int)> rec = [&](int pos, int remaining, int) {
    if (pos == n - 1) {
      cur[pos] = remaining;
      out.push_back(MultiIndex{cur});
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e, 0);
    }
  };
  for (int d = 0; d <= k; ++d) rec(0, d, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Gauss rules
// ---------------------------------------------------------------------------

namespace {

// Three-term recurrence for the Jacobi weight (1-x)^alpha (1+x)^beta:
// diagonal entries aa[0..m-1], and bb[0] = total mass, bb[k] = off-diagonal
// squares for k >= 1 (Gautschi's normal form).
void jacobi_recurrence(int m, double alpha, double beta, std::vector<double>& aa,
                       std::vector<double>& bb) {
  aa.assign(m, 0.0);
  bb.assign(m, 0.0);
  double ab = alpha + beta;
  bb[0] = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                   std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  for (int k = 0; k < m; ++k) {
    if (k == 0)
      aa[k] = (beta - alpha) / (ab + 2.0);
    else
      aa[k] = (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
  }
  for (int k = 1; k < m; ++k) {
    if (k == 1)
      bb[k] = 4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    else
      bb[k] = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
              ((2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0));
  }
}

}  // namespace

Rule1D gauss_jacobi(int m, double alpha, double beta) {
  if (m < 1) throw std::invalid_argument("gauss_jacobi: m must be >= 1");
  if (alpha <= -1.0 || beta <= -1.0)
    throw std::invalid_argument("gauss_jacobi: Jacobi parameters must exceed -1");
  std::vector<double> aa, bb;
  jacobi_recurrence(m, alpha, beta, aa, bb);
  Rule1D rule;
  if (m == 1) {
    rule.nodes = Eigen::VectorXd::Constant(1, aa[0]);
    rule.weights = Eigen::VectorXd::Constant(1, bb[0]);
    return rule;
  }
  Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(aa.data(), m);
  Eigen::VectorXd sub(m - 1);
  for (int k = 1; k < m; ++k) sub[k - 1] = std::sqrt(bb[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: node computation failed");
  rule.nodes = es.eigenvalues();
  rule.weights = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) {
    double v = es.eigenvectors()(0, i);
    rule.weights[i] = bb[0] * v * v;
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Measure construction
// ---------------------------------------------------------------------------

Measure Measure::ball(int n, double a) {
  if (n < 1) throw std::invalid_argument("Measure::ball: n must be >= 1");
  if (a < 0.0) throw std::invalid_argument("Measure::ball: weight exponent a must be >= 0");
  Measure m;
  m.kind_ = MeasureKind::Ball;
  m.n_ = n;
  m.a_ = a;
  return m;
}

Measure Measure::box(int n, std::vector<std::array<double, 2>> bounds) {
  if (n < 1) throw std::invalid_argument("Measure::box: n must be >= 1");
  if (static_cast<int>(bounds.size()) != n)
    throw std::invalid_argument("Measure::box: bounds size must equal n");
  for (auto& b : bounds)
    if (!(b[0] < b[1])) throw std::invalid_argument("Measure::box: empty interval in bounds");
  Measure m;
  m.kind_ = MeasureKind::Box;
  m.n_ = n;
  m.a_ = 0.5;
  m.bounds_ = std::move(bounds);
  return m;
}

Measure Measure::ellipsoid(int n, std::vector<double> semiaxes) {
  if (n < 1) throw std::invalid_argument("Measure::ellipsoid: n must be >= 1");
  if (static_cast<int>(semiaxes.size()) != n)
    throw std::invalid_argument("Measure::ellipsoid: semiaxes size must equal n");
  for (double s : semiaxes)
    if (!(s > 0.0)) throw std::invalid_argument("Measure::ellipsoid: semiaxes must be positive");
  Measure m;
  m.kind_ = MeasureKind::Ellipsoid;
  m.n_ = n;
  m.a_ = 0.5;
  m.semiaxes_ = std::move(semiaxes);
  return m;
}

bool Measure::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != n_) return false;
  switch (kind_) {
    case MeasureKind::Ball: {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return r2 <= 1.0 + tol;
    }
    case MeasureKind::Box: {
      for (int i = 0; i < n_; ++i)
        if (x[i] < bounds_[i][0] - tol || x[i] > bounds_[i][1] + tol) return false;
      return true;
    }
    case MeasureKind::Ellipsoid: {
      double r2 = 0.0;
      for (int i = 0; i < n_; ++i) {
        double t = x[i] / semiaxes_[i];
        r2 += t * t;
      }
      return r2 <= 1.0 + tol;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

namespace {

// int_B x^alpha (1-|x|^2)^(a-1/2) dV  =
//   prod_i Gamma((alpha_i+1)/2) * Gamma(a+1/2) / Gamma(n/2 + |alpha|/2 + a + 1/2)
// for even alpha, zero otherwise.
double ball_moment(const std::vector<int>& e, double a) {
  int total = 0;
  for (int p : e) {
    if (p % 2 != 0) return 0.0;
    total += p;
  }
  double lg = std::lgamma(a + 0.5);
  for (int p : e) lg += std::lgamma((p + 1) * 0.5);
  lg -= std::lgamma(0.5 * e.size() + 0.5 * total + a + 0.5);
  double v = std::exp(lg);
  if (!std::isfinite(v)) throw CapError("moment: degree too large");
  return v;
}

}  // namespace

double Measure::mass() const {
  switch (kind_) {
    case MeasureKind::Ball:
      return ball_moment(std::vector<int>(n_, 0), a_);
    case MeasureKind::Box: {
      double v = 1.0;
      for (auto& b : bounds_) v *= b[1] - b[0];
      return v;
    }
    case MeasureKind::Ellipsoid: {
      double v = ball_moment(std::vector<int>(n_, 0), 0.5);
      for (double s : semiaxes_) v *= s;
      return v;
    }
  }
  return 0.0;
}

double Measure::moment(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.exponents.size()) != n_)
    throw std::invalid_argument("moment: multi-index length does not match dimension");
  switch (kind_) {
    case MeasureKind::Ball:
      return ball_moment(alpha.exponents, a_);
    case MeasureKind::Box: {
      double v = 1.0;
      for (int i = 0; i < n_; ++i) {
        int p = alpha.exponents[i];
        double hi = std::pow(bounds_[i][1], p + 1), lo = std::pow(bounds_[i][0], p + 1);
        v *= (hi - lo) / (p + 1);
      }
      if (!std::isfinite(v)) throw CapError("moment: degree too large");
      return v;
    }
    case MeasureKind::Ellipsoid: {
      double v = ball_moment(alpha.exponents, 0.5);
      for (int i = 0; i < n_; ++i) v *= std::pow(semiaxes_[i], alpha.exponents[i] + 1);
      if (!std::isfinite(v)) throw CapError("moment: degree too large");
      return v;
    }
  }
  return 0.0;
}

namespace {

DD dd_pow(DD base, int p) {
  DD r(1.0);
  while (p > 0) {
    if (p & 1) r = r * base;
    base = base * base;
    p >>= 1;
  }
  return r;
}

// moment(alpha)/moment(0) as an exact product:
//   prod_i prod_{j<alpha_i/2} (1/2 + j)  /  prod_{j<|alpha|/2} (n/2 + a + 1/2 + j)
DD ball_moment_dd(const std::vector<int>& e, double a, double mass) {
  int total = 0;
  for (int p : e) {
    if (p % 2 != 0) return DD(0.0);
    total += p;
  }
  DD num(1.0);
  for (int p : e)
    for (int j = 0; j < p / 2; ++j) num = num * DD(0.5 + j);
  DD den(1.0);
  double base = 0.5 * e.size() + a + 0.5;
  for (int j = 0; j < total / 2; ++j) den = den * (DD(base) + DD(static_cast<double>(j)));
  return DD(mass) * num / den;
}

}  // namespace

DD Measure::moment_dd(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.exponents.size()) != n_)
    throw std::invalid_argument("moment: multi-index length does not match dimension");
  switch (kind_) {
    case MeasureKind::Ball:
      return ball_moment_dd(alpha.exponents, a_, mass());
    case MeasureKind::Box: {
      DD v(1.0);
      for (int i = 0; i < n_; ++i) {
        int p = alpha.exponents[i];
        DD hi = dd_pow(DD(bounds_[i][1]), p + 1), lo = dd_pow(DD(bounds_[i][0]), p + 1);
        v = v * (hi - lo) / DD(static_cast<double>(p + 1));
      }
      return v;
    }
    case MeasureKind::Ellipsoid: {
      DD v = ball_moment_dd(alpha.exponents, 0.5, ball_moment(std::vector<int>(n_, 0), 0.5));
      for (int i = 0; i < n_; ++i) v = v * dd_pow(DD(semiaxes_[i]), alpha.exponents[i] + 1);
      return v;
    }
  }
  return DD(0.0);
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

struct SphereRule {
  std::vector<std::vector<double>> points;  // unit vectors in R^(m+1)
  std::vector<double> weights;              // sum = |S^m|
};

// Product rule on S^m exact for polynomials of degree <= d restricted to the
// sphere: equispaced azimuth at the base, Gauss-Gegenbauer in each polar
// level. Antipodal symmetry makes odd monomials vanish identically.
SphereRule sphere_rule(int m, int d) {
  SphereRule out;
  if (m == 1) {
    int N = d + 1;
    if (N % 2 == 1) ++N;
    N = std::max(N, 4);
    out.points.reserve(N);
    for (int l = 0; l < N; ++l) {
      double th = 2.0 * M_PI * l / N;
      out.points.push_back({std::cos(th), std::sin(th)});
      out.weights.push_back(2.0 * M_PI / N);
    }
    return out;
  }
  SphereRule inner = sphere_rule(m - 1, d);
  int q = (d + 2) / 2;
  Rule1D polar = gauss_jacobi(q, 0.5 * (m - 2), 0.5 * (m - 2));
  for (int i = 0; i < polar.nodes.size(); ++i) {
    double z = polar.nodes[i];
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (std::size_t j = 0; j < inner.points.size(); ++j) {
      std::vector<double> p(m + 1);
      for (int t = 0; t < m; ++t) p[t] = s * inner.points[j][t];
      p[m] = z;
      out.points.push_back(std::move(p));
      out.weights.push_back(polar.weights[i] * inner.weights[j]);
    }
  }
  return out;
}

QuadratureRule ball_rule(int n, double a, int order, std::size_t cap) {
  QuadratureRule rule;
  rule.exactness = order;
  if (n == 1) {
    int q = (order + 2) / 2;
    if (static_cast<std::size_t>(q) > cap) throw CapError("quadrature: order too large");
    Rule1D r = gauss_jacobi(q, a - 0.5, a - 0.5);
    rule.points = r.nodes;
    rule.weights = r.weights;
    return rule;
  }
  // radial part: t = 2r^2 - 1 turns r^(n-1)(1-r^2)^(a-1/2) dr on [0,1] into a
  // Jacobi(a-1/2, (n-2)/2) weight on [-1,1]
  int qr = (order / 2 + 2) / 2;
  double alpha = a - 0.5, beta = 0.5 * (n - 2);
  Rule1D rad = gauss_jacobi(qr, alpha, beta);
  SphereRule sph = sphere_rule(n - 1, order);
  std::size_t total = static_cast<std::size_t>(qr) * sph.points.size();
  if (total > cap) throw CapError("quadrature: order too large");
  rule.points.resize(total, n);
  rule.weights.resize(total);
  double scale = 0.5 * std::pow(2.0, -(alpha + beta + 1.0));
  std::size_t idx = 0;
  for (int i = 0; i < rad.nodes.size(); ++i) {
    double r = std::sqrt(0.5 * (1.0 + rad.nodes[i]));
    double wr = scale * rad.weights[i];
    for (std::size_t j = 0; j < sph.points.size(); ++j, ++idx) {
      for (int t = 0; t < n; ++t) rule.points(idx, t) = r * sph.points[j][t];
      rule.weights[idx] = wr * sph.weights[j];
    }
  }
  return rule;
}

QuadratureRule box_rule(const std::vector<std::array<double, 2>>& bounds, int order,
                        std::size_t cap) {
  int n = static_cast<int>(bounds.size());
  int q = (order + 2) / 2;
  double count = std::pow(static_cast<double>(q), n);
  if (count > static_cast<double>(cap)) throw CapError("quadrature: order too large");
  Rule1D gl = gauss_jacobi(q, 0.0, 0.0);
  std::size_t total = static_cast<std::size_t>(count);
  QuadratureRule rule;
  rule.exactness = order;
  rule.points.resize(total, n);
  rule.weights.resize(total);
  std::vector<int> ix(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    double w = 1.0;
    for (int t = 0; t < n; ++t) {
      double mid = 0.5 * (bounds[t][0] + bounds[t][1]);
      double half = 0.5 * (bounds[t][1] - bounds[t][0]);
      rule.points(idx, t) = mid + half * gl.nodes[ix[t]];
      w *= half * gl.weights[ix[t]];
    }
    rule.weights[idx] = w;
    for (int t = n - 1; t >= 0; --t) {
      if (++ix[t] < q) break;
      ix[t] = 0;
    }
  }
  return rule;
}

}  // namespace

namespace {

// node tables are deterministic in (measure, order); build each once,
// lazily, and share across concurrent readers
std::mutex g_rule_mutex;
std::map<std::string, std::shared_ptr<const QuadratureRule>> g_rule_cache;

std::string rule_key(const Measure& m, int order) {
  std::ostringstream ss;
  ss << static_cast<int>(m.kind()) << '|' << m.dim() << '|' << order << '|';
  ss.precision(17);
  ss << m.exponent();
  for (const auto& b : m.bounds()) ss << '|' << b[0] << ',' << b[1];
  for (double s : m.semiaxes()) ss << '|' << s;
  return ss.str();
}

}  // namespace

QuadratureRule Measure::quadrature(int order, std::size_t node_cap) const {
  if (order < 1) throw std::invalid_argument("quadrature: order must be >= 1");
  std::string key = rule_key(*this, order);
  {
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto it = g_rule_cache.find(key);
    if (it != g_rule_cache.end()) {
      if (static_cast<std::size_t>(it->second->points.rows()) > node_cap)
        throw CapError("quadrature: order too large");
      return *it->second;
    }
  }
  QuadratureRule rule;
  switch (kind_) {
    case MeasureKind::Ball:
      rule = ball_rule(n_, a_, order, node_cap);
      break;
    case MeasureKind::Box:
      rule = box_rule(bounds_, order, node_cap);
      break;
    case MeasureKind::Ellipsoid: {
      rule = ball_rule(n_, 0.5, order, node_cap);
      double jac = 1.0;
      for (double s : semiaxes_) jac *= s;
      for (int i = 0; i < rule.points.rows(); ++i)
        for (int t = 0; t < n_; ++t) rule.points(i, t) *= semiaxes_[t];
      rule.weights *= jac;
      break;
    }
  }
  auto shared = std::make_shared<const QuadratureRule>(std::move(rule));
  {
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    if (g_rule_cache.size() > 512) g_rule_cache.clear();  // bound the footprint
    g_rule_cache.try_emplace(key, shared);
  }
  return *shared;
}

double Measure::integrate(const std::function<double(std::span<const double>)>& f, int order,
                          std::size_t node_cap) const {
  QuadratureRule rule = quadrature(order, node_cap);
  double acc = 0.0;
  std::vector<double> x(n_);
  for (int i = 0; i < rule.points.rows(); ++i) {
    for (int t = 0; t < n_; ++t) x[t] = rule.points(i, t);
    acc += rule.weights[i] * f(x);
  }
  return acc;
}

double QuadratureRule::mesh() const {
  const auto npts = points.rows();
  if (npts < 2) return 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < npts; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < npts; ++j) {
      if (i == j) continue;
      best = std::min(best, (points.row(i) - points.row(j)).norm());
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace mzkit
