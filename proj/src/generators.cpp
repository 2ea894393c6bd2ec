#include "mzkit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mzkit/geometry.hpp"
#include "mzkit/rng.hpp"

namespace mzkit {

namespace {

std::vector<Point> gauss_1d_level(int k, double a) {
  Rule1D r = gauss_nodes_1d(k + 1, a);
  std::vector<Point> pts;
  pts.reserve(k + 1);
  for (int i = 0; i < r.nodes.size(); ++i) pts.push_back({r.nodes[i]});
  return pts;
}

std::vector<Point> tensor_gauss_level(int n, int k, double a) {
  Rule1D r = gauss_nodes_1d(k + 1, a);
  std::vector<Point> pts;
  std::vector<int> ix(n, 0);
  while (true) {
    Point p(n);
    double norm2 = 0.0;
    for (int t = 0; t < n; ++t) {
      p[t] = r.nodes[ix[t]];
      norm2 += p[t] * p[t];
    }
    if (norm2 <= 1.0) pts.push_back(std::move(p));
    int t = n - 1;
    for (; t >= 0; --t) {
      if (++ix[t] <= k) break;
      ix[t] = 0;
    }
    if (t < 0) break;
  }
  return pts;
}

std::vector<Point> random_separated_level(int n, int k, double eps, int count, Rng& rng,
                                          bool& saturated) {
  std::vector<Point> pts;
  const double min_rho = eps / k;
  int failures = 0;
  const int max_failures = 200 * std::max(count, 1);
  while (static_cast<int>(pts.size()) < count && failures < max_failures) {
    Point cand = rng.in_ball(n);
    bool ok = true;
    for (const auto& p : pts)
      if (rho(p, cand) < min_rho) {
        ok = false;
        break;
      }
    if (ok) {
      pts.push_back(std::move(cand));
      failures = 0;
    } else {
      ++failures;
    }
  }
  saturated = static_cast<int>(pts.size()) < count;
  return pts;
}

// radial CDF of the ball equilibrium measure: F(r) ~ int_0^r t^(n-1)(1-t^2)^(-1/2) dt,
// tabulated once via t = sin(s) (which removes the endpoint singularity) and
// inverted by interpolation
std::vector<Point> equilibrium_random_level(int n, int count, Rng& rng) {
  std::vector<Point> pts;
  pts.reserve(count);
  if (n == 1) {
    // arcsine law: x = sin(pi (u - 1/2))
    for (int i = 0; i < count; ++i)
      pts.push_back({std::sin(M_PI * (rng.uniform() - 0.5))});
    return pts;
  }
  const int grid = 4096;
  std::vector<double> cdf(grid + 1, 0.0);
  double acc = 0.0;
  for (int i = 1; i <= grid; ++i) {
    double s0 = 0.5 * M_PI * (i - 1) / grid, s1 = 0.5 * M_PI * i / grid;
    double sm = 0.5 * (s0 + s1);
    acc += (s1 - s0) / 6.0 *
           (std::pow(std::sin(s0), n - 1) + 4.0 * std::pow(std::sin(sm), n - 1) +
            std::pow(std::sin(s1), n - 1));
    cdf[i] = acc;
  }
  for (auto& v : cdf) v /= acc;
  for (int i = 0; i < count; ++i) {
    double u = rng.uniform();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(1, it - cdf.begin()), grid);
    double f0 = cdf[hi - 1], f1 = cdf[hi];
    double frac = f1 > f0 ? (u - f0) / (f1 - f0) : 0.0;
    double s = 0.5 * M_PI * (hi - 1 + frac) / grid;
    double r = std::sin(s);
    auto dir = rng.unit_vector(n);
    Point p(n);
    for (int t = 0; t < n; ++t) p[t] = r * dir[t];
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

GeneratedFamily generate_family(FamilyKind kind, int n, const GeneratorParams& params,
                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_family: n must be >= 1");
  if (params.ks.empty()) throw std::invalid_argument("generate_family: empty degree list");
  if ((kind == FamilyKind::Gauss1d) && n != 1)
    throw std::invalid_argument("generate_family: gauss_1d requires n = 1");
  if ((kind == FamilyKind::RandomSeparated || kind == FamilyKind::EquilibriumRandom) &&
      params.count < 1)
    throw std::invalid_argument("generate_family: count must be >= 1");
  if (kind == FamilyKind::RandomSeparated && !(params.eps > 0.0))
    throw std::invalid_argument("generate_family: eps must be > 0");
  if (params.a < 0.0) throw std::invalid_argument("generate_family: a must be >= 0");
  int prev = -1;
  for (int k : params.ks) {
    if (k <= prev) throw std::invalid_argument("generate_family: degrees must be strictly increasing");
    prev = k;
  }

  GeneratedFamily out;
  out.family.n = n;
  for (std::size_t li = 0; li < params.ks.size(); ++li) {
    int k = params.ks[li];
    PointFamily::Level lvl;
    lvl.k = k;
    bool saturated = false;
    Rng rng = Rng::substream(seed, li);
    switch (kind) {
      case FamilyKind::Gauss1d:
        lvl.points = gauss_1d_level(k, params.a);
        break;
      case FamilyKind::TensorGauss:
        lvl.points = tensor_gauss_level(n, k, params.a);
        break;
      case FamilyKind::RandomSeparated:
        lvl.points = random_separated_level(n, std::max(1, k), params.eps, params.count, rng,
                                            saturated);
        break;
      case FamilyKind::EquilibriumRandom:
        lvl.points = equilibrium_random_level(n, params.count, rng);
        break;
    }
    out.family.levels.push_back(std::move(lvl));
    out.saturated.push_back(saturated);
  }
  return out;
}

}  // namespace mzkit
