// mzkit: weighted polynomial kernels on model convex domains and
// sampling/interpolation diagnostics for point families.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mzkit/diagnostics.hpp"
#include "mzkit/errors.hpp"
#include "mzkit/generators.hpp"
#include "mzkit/geometry.hpp"
#include "mzkit/io.hpp"
#include "mzkit/localized.hpp"
#include "mzkit/parallel.hpp"
#include "mzkit/polyspace.hpp"
#include "mzkit/scaling.hpp"
#include "mzkit/transport.hpp"
#include "mzkit/version.hpp"

using namespace mzkit;
using nlohmann::ordered_json;

namespace {

struct MeasureFlags {
  std::string kind = "ball";
  int n = 1;
  double a = 0.5;
  std::string bounds;    // "lo,hi;lo,hi"
  std::string semiaxes;  // "2,1"
};

std::vector<double> parse_doubles(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

Measure make_measure(const MeasureFlags& mf) {
  if (mf.kind == "ball") return Measure::ball(mf.n, mf.a);
  if (mf.kind == "box") {
    std::vector<std::array<double, 2>> bounds;
    std::stringstream ss(mf.bounds);
    std::string axis;
    while (std::getline(ss, axis, ';')) {
      auto v = parse_doubles(axis);
      if (v.size() != 2) throw std::invalid_argument("--bounds: expected 'lo,hi;lo,hi;...'");
      bounds.push_back({v[0], v[1]});
    }
    if (bounds.empty()) {
      for (int i = 0; i < mf.n; ++i) bounds.push_back({-1.0, 1.0});
    }
    return Measure::box(mf.n, std::move(bounds));
  }
  if (mf.kind == "ellipsoid") {
    auto s = parse_doubles(mf.semiaxes);
    if (s.empty()) throw std::invalid_argument("--semiaxes required for ellipsoid measures");
    return Measure::ellipsoid(mf.n, std::move(s));
  }
  throw std::invalid_argument("unknown measure kind '" + mf.kind + "'");
}

void add_measure_flags(CLI::App* cmd, MeasureFlags& mf) {
  cmd->add_option("--measure", mf.kind, "measure kind: ball|box|ellipsoid");
  cmd->add_option("--n", mf.n, "dimension");
  cmd->add_option("--a", mf.a, "ball weight exponent a >= 0");
  cmd->add_option("--bounds", mf.bounds, "box bounds 'lo,hi;lo,hi;...'");
  cmd->add_option("--semiaxes", mf.semiaxes, "ellipsoid semiaxes 's1,s2,...'");
}

// "5,10,20" or "1..40"
std::vector<int> parse_klist(const std::string& s) {
  std::vector<int> ks;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    int lo = std::stoi(s.substr(0, dots));
    int hi = std::stoi(s.substr(dots + 2));
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
  }
  for (double v : parse_doubles(s)) ks.push_back(static_cast<int>(v));
  return ks;
}

Precision env_precision() {
  const char* env = std::getenv("MZKIT_PRECISION");
  if (env && std::string(env) == "extended") return Precision::Extended;
  if (env && std::string(env) == "double") return Precision::Double;
  return Precision::Double;
}

PointFamily load_family(const std::string& path, const Measure& m) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open family file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
  }
  auto fam = family_from_json(j);
  fam.validate(m);
  return fam;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  out << content;
}

ordered_json config_header(const std::string& command, const ordered_json& flags) {
  ordered_json j;
  j["tool"] = kVersion;
  j["command"] = command;
  j["config"] = flags;
  return j;
}

std::string csv_header_comment(const std::string& command, const ordered_json& flags) {
  std::ostringstream ss;
  ss << "# " << kVersion << " " << command << " ";
  ss << flags.dump();
  ss << "\n";
  return ss.str();
}

// per-level kernel spaces built through the backend dispatcher
PolySpace level_space(const Measure& m, int k, Precision p) {
  return PolySpace::auto_basis(m, k, p);
}

int run_generate(const std::string& kind, int n, const std::string& klist, double a,
                 double eps, int count, std::uint64_t seed, const std::string& out) {
  GeneratorParams params;
  params.ks = parse_klist(klist);
  params.a = a;
  params.eps = eps;
  params.count = count;
  FamilyKind fk;
  if (kind == "gauss_1d") fk = FamilyKind::Gauss1d;
  else if (kind == "tensor_gauss") fk = FamilyKind::TensorGauss;
  else if (kind == "random_separated") fk = FamilyKind::RandomSeparated;
  else if (kind == "equilibrium_random") fk = FamilyKind::EquilibriumRandom;
  else throw std::invalid_argument("unknown generator kind '" + kind + "'");

  auto gen = generate_family(fk, n, params, seed);
  ordered_json flags{{"kind", kind}, {"n", n},     {"k", klist},
                     {"a", a},       {"eps", eps}, {"count", count},
                     {"seed", seed}};
  ordered_json j = config_header("generate", flags);
  auto fam = family_to_json(gen.family);
  j["n"] = fam["n"];
  j["families"] = fam["families"];
  ordered_json sat = ordered_json::array();
  for (bool s : gen.saturated) sat.push_back(s);
  j["saturated"] = sat;
  write_output(out, dump_json17(j));
  for (bool s : gen.saturated)
    if (s) std::cerr << "warning: saturation before target count\n";
  return 0;
}

int run_separation(const std::string& family_path, const MeasureFlags& mf,
                   const std::string& out, int threads) {
  Measure m = make_measure(mf);
  auto fam = load_family(family_path, m);
  std::vector<double> seps(fam.levels.size());
  parallel_for(fam.levels.size(), threads, [&](std::size_t i) {
    seps[i] = separation_constant(fam, fam.levels[i].k, m);
  });
  ordered_json flags{{"family", family_path}, {"measure", measure_to_json(m)}};
  ordered_json j = config_header("separation", flags);
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < fam.levels.size(); ++i) {
    ordered_json r;
    r["k"] = fam.levels[i].k;
    r["count"] = fam.levels[i].points.size();
    if (std::isinf(seps[i]))
      r["k_min_rho"] = "inf";
    else
      r["k_min_rho"] = seps[i];
    rows.push_back(std::move(r));
  }
  j["separation"] = rows;
  write_output(out, dump_json17(j));
  return 0;
}

int run_carleson(const std::string& family_path, const MeasureFlags& mf,
                 const std::string& reference, const std::string& out, int threads,
                 Precision prec) {
  Measure m = make_measure(mf);
  auto fam = load_family(family_path, m);
  CarlesonReference ref =
      reference == "weighted" ? CarlesonReference::Weighted : CarlesonReference::Lebesgue;
  struct Row {
    int k;
    CarlesonResult res;
  };
  std::vector<Row> rows(fam.levels.size());
  parallel_for(fam.levels.size(), threads, [&](std::size_t i) {
    int k = fam.levels[i].k;
    auto ps = level_space(m, k, prec);
    auto mu = christoffel_weighted(fam.levels[i].points, ps);
    rows[i] = {k, carleson_ratio(mu, std::max(1, k), m, ref)};
  });
  ordered_json flags{{"family", family_path},
                     {"measure", measure_to_json(m)},
                     {"reference", reference}};
  ordered_json j = config_header("carleson", flags);
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json e;
    e["k"] = r.k;
    e["sup_ratio"] = r.res.sup_ratio;
    e["witness"] = r.res.witness;
    e["net_size"] = r.res.net_size;
    e["net_spacing"] = r.res.net_spacing;
    arr.push_back(std::move(e));
  }
  j["carleson"] = arr;
  write_output(out, dump_json17(j));
  return 0;
}

std::vector<Region> parse_regions(const std::vector<std::string>& specs, int n,
                                  const std::string& metric) {
  std::vector<Region> regions;
  for (const auto& s : specs) {
    auto semi = s.find(';');
    if (semi == std::string::npos)
      throw std::invalid_argument("--region: expected 'c1,c2,...;radius'");
    Region r;
    r.center = parse_doubles(s.substr(0, semi));
    if (static_cast<int>(r.center.size()) != n)
      throw std::invalid_argument("--region: center dimension mismatch");
    r.radius = std::stod(s.substr(semi + 1));
    r.metric = metric == "rho" ? MetricKind::RhoBall : MetricKind::Euclidean;
    regions.push_back(std::move(r));
  }
  if (regions.empty()) {
    Region r;
    r.center = Point(n, 0.0);
    r.radius = 0.5;
    r.metric = MetricKind::Euclidean;
    regions.push_back(std::move(r));
  }
  return regions;
}

ordered_json density_rows_json(const std::vector<DensityRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json e;
    e["k"] = r.k;
    e["center"] = r.region.center;
    e["radius"] = r.region.radius;
    e["metric"] = r.region.metric == MetricKind::Euclidean ? "euclidean" : "rho";
    e["count"] = r.count;
    e["dim"] = r.dim;
    e["count_over_dim"] = r.count_over_dim;
    e["eq_mass"] = r.eq_mass;
    e["ratio"] = r.ratio;
    arr.push_back(std::move(e));
  }
  return arr;
}

int run_density(const std::string& family_path, const MeasureFlags& mf,
                const std::vector<std::string>& region_specs, const std::string& metric,
                const std::string& out) {
  Measure m = make_measure(mf);
  auto fam = load_family(family_path, m);
  auto regions = parse_regions(region_specs, m.dim(), metric);
  auto rows = density_report(fam, m, regions);
  ordered_json flags{{"family", family_path},
                     {"measure", measure_to_json(m)},
                     {"metric", metric}};
  ordered_json j = config_header("density", flags);
  j["density"] = density_rows_json(rows);
  write_output(out, dump_json17(j));
  return 0;
}

int run_diag(const std::string& family_path, const MeasureFlags& mf,
             const std::vector<std::string>& region_specs, const std::string& out,
             int threads, Precision prec) {
  Measure m = make_measure(mf);
  auto fam = load_family(family_path, m);
  auto regions = parse_regions(region_specs, m.dim(), "euclidean");

  struct LevelOut {
    int k = 0;
    std::size_t count = 0;
    double separation = 0.0;
    double carleson = 0.0;
    std::size_t net_size = 0;
    double eigmin = 0.0, eigmax = 0.0;
    double frame_lower = 0.0, frame_upper = 0.0;
    int frame_rank = 0;
    bool spectra = false;
  };
  std::vector<LevelOut> levels(fam.levels.size());
  CarlesonReference ref = m.kind() == MeasureKind::Ball ? CarlesonReference::Weighted
                                                        : CarlesonReference::Lebesgue;
  parallel_for(fam.levels.size(), threads, [&](std::size_t i) {
    const auto& lvl = fam.levels[i];
    LevelOut o;
    o.k = lvl.k;
    o.count = lvl.points.size();
    o.separation = separation_constant(fam, lvl.k, m);
    if (!lvl.points.empty()) {
      auto ps = level_space(m, lvl.k, prec);
      auto mu = christoffel_weighted(lvl.points, ps);
      auto car = carleson_ratio(mu, std::max(1, lvl.k), m, ref);
      o.carleson = car.sup_ratio;
      o.net_size = car.net_size;
      auto gram = gram_matrix(lvl.points, ps);
      std::tie(o.eigmin, o.eigmax) = riesz_bounds(gram);
      auto fb = frame_bounds(lvl.points, ps);
      o.frame_lower = fb.lower;
      o.frame_upper = fb.upper;
      o.frame_rank = fb.rank;
      o.spectra = true;
    }
    levels[i] = o;
  });
  auto density_rows = density_report(fam, m, regions);

  ordered_json flags{{"family", family_path},
                     {"measure", measure_to_json(m)},
                     {"reference", ref == CarlesonReference::Weighted ? "weighted" : "lebesgue"},
                     {"net_spacing", "1/(2k)"},
                     {"precision", prec == Precision::Extended ? "extended" : "double"}};
  ordered_json j = config_header("diag", flags);
  ordered_json arr = ordered_json::array();
  for (const auto& o : levels) {
    ordered_json e;
    e["k"] = o.k;
    e["count"] = o.count;
    if (std::isinf(o.separation))
      e["separation"] = "inf";
    else
      e["separation"] = o.separation;
    if (o.spectra) {
      e["carleson_sup_ratio"] = o.carleson;
      e["carleson_net_size"] = o.net_size;
      e["riesz_eigmin"] = o.eigmin;
      e["riesz_eigmax"] = o.eigmax;
      e["frame_lower"] = o.frame_lower;
      e["frame_upper"] = o.frame_upper;
      e["frame_rank"] = o.frame_rank;
    }
    arr.push_back(std::move(e));
  }
  j["levels"] = arr;
  j["density"] = density_rows_json(density_rows);
  write_output(out, dump_json17(j));
  return 0;
}

int run_basis(const MeasureFlags& mf, int k, const std::string& precision,
              const std::string& out) {
  Measure m = make_measure(mf);
  Precision p = precision == "extended" ? Precision::Extended
              : precision == "double"   ? Precision::Double
                                        : env_precision();
  auto ps = PolySpace::orthonormal_basis(m, k, p);
  std::ostringstream ss;
  ordered_json flags{{"measure", measure_to_json(m)},
                     {"k", k},
                     {"precision", p == Precision::Extended ? "extended" : "double"}};
  ss << csv_header_comment("basis", flags);
  ps.export_coefficients_csv(ss);
  write_output(out, ss.str());
  return 0;
}

int run_kernel(const MeasureFlags& mf, int k, const std::string& xs, const std::string& ys,
               const std::string& out, Precision prec) {
  Measure m = make_measure(mf);
  auto ps = level_space(m, k, prec);
  auto parse_points = [&](const std::string& s) {
    std::vector<Point> pts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (item.empty()) continue;
      auto p = parse_doubles(item);
      if (static_cast<int>(p.size()) != m.dim())
        throw std::invalid_argument("--x/--y: point dimension mismatch");
      if (!m.contains(p)) throw std::invalid_argument("--x/--y: point outside the domain");
      pts.push_back(std::move(p));
    }
    return pts;
  };
  auto px = parse_points(xs), py = parse_points(ys);
  if (px.empty() || py.empty()) throw std::invalid_argument("kernel: need --x and --y points");
  Eigen::MatrixXd kern = ps.kernel_matrix(px, py);
  ordered_json flags{{"measure", measure_to_json(m)}, {"k", k}};
  ordered_json j = config_header("kernel", flags);
  ordered_json values = ordered_json::array();
  for (std::size_t i = 0; i < px.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t jj = 0; jj < py.size(); ++jj) row.push_back(kern(i, jj));
    values.push_back(std::move(row));
  }
  j["kernel"] = values;
  ordered_json bx = ordered_json::array(), by = ordered_json::array();
  for (const auto& p : px) bx.push_back(ps.christoffel(p).beta);
  for (const auto& p : py) by.push_back(ps.christoffel(p).beta);
  j["beta_x"] = bx;
  j["beta_y"] = by;
  write_output(out, dump_json17(j));
  return 0;
}

int run_localized(const MeasureFlags& mf, int k, const std::string& mode,
                  const std::string& x0s, const std::string& rays, int samples, double alpha,
                  double gamma, const std::string& klist, const std::string& out,
                  Precision prec, int threads) {
  Measure m = make_measure(mf);
  std::ostringstream ss;
  if (mode == "decay") {
    auto lk = LocalizedKernel::build(m, k, prec);
    Point x0 = x0s.empty() ? Point(m.dim(), 0.0) : parse_doubles(x0s);
    Point ray = rays.empty() ? [&] { Point r(m.dim(), 0.0); r[0] = 1.0; return r; }()
                             : parse_doubles(rays);
    auto prof = decay_profile(lk, x0, ray, samples);
    ordered_json flags{{"measure", measure_to_json(m)}, {"k", k},       {"x0", x0},
                       {"ray", ray},                    {"samples", samples},
                       {"fit_window", {prof.fit_lo, prof.fit_hi}}};
    ss << csv_header_comment("localized decay", flags);
    ss << "# empirical_decay_exponent," << format17(prof.exponent) << "\n";
    ss << "# plateau_k_rho," << format17(prof.plateau_k_rho) << "\n";
    ss << "k_rho,normalized\n";
    CsvWriter csv(ss);
    for (const auto& row : prof.table) {
      csv.field(row.k_rho).field(row.normalized);
      csv.endrow();
    }
  } else if (mode == "integral") {
    auto ks = parse_klist(klist.empty() ? std::to_string(k) : klist);
    std::vector<Point> grid;
    for (int i = 0; i < 9; ++i) {
      Point p(m.dim(), 0.0);
      p[0] = -0.9 + 1.8 * i / 8.0;
      grid.push_back(std::move(p));
    }
    std::vector<std::vector<IntegralEstimateRow>> tables(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) {
      tables[i] = integral_estimate_check(m, ks[i], alpha, gamma, grid, prec);
    });
    ordered_json flags{{"measure", measure_to_json(m)},
                       {"alpha", alpha},
                       {"gamma", gamma},
                       {"grid", "x1 in [-0.9, 0.9], 9 points"}};
    ss << csv_header_comment("localized integral", flags);
    ss << "k,x1,value,converged\n";
    CsvWriter csv(ss);
    for (const auto& table : tables)
      for (const auto& r : table) {
        csv.field(r.k).field(r.x[0]).field(r.value).field(r.converged ? 1 : 0);
        csv.endrow();
      }
  } else {
    throw std::invalid_argument("localized: --mode must be decay|integral");
  }
  write_output(out, ss.str());
  return 0;
}

int run_transport(const MeasureFlags& mf, const std::string& klist,
                  const std::string& family_path, int quad_margin, const std::string& out,
                  Precision prec, int threads) {
  Measure m = make_measure(mf);
  PointFamily fam;
  if (!family_path.empty()) {
    fam = load_family(family_path, m);
  } else {
    if (m.dim() != 1 || m.kind() != MeasureKind::Ball)
      throw std::invalid_argument("transport: default gauss families need a 1-d ball measure");
    GeneratorParams params;
    params.ks = parse_klist(klist);
    params.a = m.exponent();
    fam = generate_family(FamilyKind::Gauss1d, 1, params, 0).family;
  }
  struct Row {
    int k;
    TransportGap gap;
    double k_moment;
  };
  std::vector<Row> rows(fam.levels.size());
  parallel_for(fam.levels.size(), threads, [&](std::size_t i) {
    const auto& lvl = fam.levels[i];
    auto ps = level_space(m, lvl.k, prec);
    Row r;
    r.k = lvl.k;
    r.gap = interpolation_transport_gap(lvl.points, ps, 2 * lvl.k + 2 + quad_margin);
    r.k_moment = lvl.k * offdiag_second_moment(ps, 2 * lvl.k + 2);
    rows[i] = r;
  });
  ordered_json flags{{"measure", measure_to_json(m)},
                     {"family", family_path.empty() ? "gauss_1d" : family_path}};
  std::ostringstream ss;
  ss << csv_header_comment("transport", flags);
  ss << "k,w1,mesh,k_offdiag_second_moment\n";
  CsvWriter csv(ss);
  for (const auto& r : rows) {
    csv.field(r.k).field(r.gap.w1).field(r.gap.mesh).field(r.k_moment);
    csv.endrow();
  }
  write_output(out, ss.str());
  return 0;
}

int run_scaling(const MeasureFlags& mf, const std::string& mode, const std::string& klist,
                double R, int grid, int m_points, std::uint64_t seed, int restarts,
                double nu, double tmax, const std::string& out, Precision prec) {
  Measure m = make_measure(mf);
  std::ostringstream ss;
  if (mode == "limit") {
    auto ks = parse_klist(klist);
    auto rows = scaling_error(m, ks, R, grid);
    ordered_json flags{{"measure", measure_to_json(m)}, {"k", klist}, {"R", R},
                       {"grid", grid}};
    ss << csv_header_comment("scaling limit", flags);
    ss << "k,sup_error\n";
    CsvWriter csv(ss);
    for (const auto& r : rows) {
      csv.field(r.k).field(r.sup_error);
      csv.endrow();
    }
    write_output(out, ss.str());
    return 0;
  }
  if (mode == "search") {
    auto ks = parse_klist(klist);
    if (ks.size() != 1) throw std::invalid_argument("scaling search: give exactly one k");
    auto res = orthogonality_residual_search(m, ks[0], m_points, seed, restarts, nullptr,
                                             4000, prec);
    ordered_json flags{{"measure", measure_to_json(m)}, {"k", ks[0]}, {"m", m_points},
                       {"seed", seed},                  {"restarts", restarts}};
    ordered_json j = config_header("scaling search", flags);
    ordered_json rs = ordered_json::array();
    for (const auto& st : res.restarts) {
      ordered_json e;
      e["restart"] = st.restart;
      e["iterations"] = st.iterations;
      e["residual"] = st.residual;
      e["converged"] = st.converged;
      rs.push_back(std::move(e));
    }
    j["restarts"] = rs;
    j["best_residual"] = res.best_residual;
    j["best_restart"] = res.best_restart;
    ordered_json cfg = ordered_json::array();
    for (const auto& p : res.configuration) cfg.push_back(p);
    j["configuration"] = cfg;
    write_output(out, dump_json17(j));
    return 0;
  }
  if (mode == "zeros") {
    auto zeros = bessel_zeros(nu, tmax);
    ordered_json flags{{"nu", nu}, {"tmax", tmax}};
    ordered_json j = config_header("scaling zeros", flags);
    j["zeros"] = zeros;
    write_output(out, dump_json17(j));
    return 0;
  }
  throw std::invalid_argument("scaling: --mode must be limit|search|zeros");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted polynomial kernels and sampling diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (determinism holds for any value)");

  Precision prec = env_precision();
  // composite commands default to the robust backends; the env toggles the
  // assembly precision for Cholesky-backed spaces
  if (std::getenv("MZKIT_PRECISION") == nullptr) prec = Precision::Extended;

  MeasureFlags mf_basis, mf_kernel, mf_sep, mf_car, mf_den, mf_diag, mf_loc, mf_tra, mf_sca;

  auto* c_basis = app.add_subcommand("basis", "export the ONB coefficient matrix as CSV");
  int basis_k = 5;
  std::string basis_prec, basis_out;
  add_measure_flags(c_basis, mf_basis);
  c_basis->add_option("--k", basis_k, "degree");
  c_basis->add_option("--precision", basis_prec, "double|extended (default: MZKIT_PRECISION)");
  c_basis->add_option("--out", basis_out, "output path (default stdout)");

  auto* c_kernel = app.add_subcommand("kernel", "evaluate K_k on point lists");
  int kernel_k = 5;
  std::string kernel_x, kernel_y, kernel_out;
  add_measure_flags(c_kernel, mf_kernel);
  c_kernel->add_option("--k", kernel_k, "degree");
  c_kernel->add_option("--x", kernel_x, "points 'x1,x2;x1,x2;...'")->required();
  c_kernel->add_option("--y", kernel_y, "points")->required();
  c_kernel->add_option("--out", kernel_out, "output path");

  auto* c_gen = app.add_subcommand("generate", "produce candidate point families");
  std::string gen_kind = "gauss_1d", gen_k = "1..10", gen_out;
  int gen_n = 1, gen_count = 32;
  double gen_a = 0.5, gen_eps = 1.0;
  std::uint64_t gen_seed = 0;
  c_gen->add_option("--kind", gen_kind,
                    "gauss_1d|tensor_gauss|random_separated|equilibrium_random");
  c_gen->add_option("--n", gen_n, "dimension");
  c_gen->add_option("--k", gen_k, "degrees '5,10,20' or '1..40'");
  c_gen->add_option("--a", gen_a, "weight exponent");
  c_gen->add_option("--eps", gen_eps, "target separation (random_separated)");
  c_gen->add_option("--count", gen_count, "target count per level");
  c_gen->add_option("--seed", gen_seed, "RNG seed");
  c_gen->add_option("--out", gen_out, "output path");

  auto* c_sep = app.add_subcommand("separation", "per-level separation constants");
  std::string sep_family, sep_out;
  add_measure_flags(c_sep, mf_sep);
  c_sep->add_option("--family", sep_family, "PointFamily JSON")->required();
  c_sep->add_option("--out", sep_out, "output path");

  auto* c_car = app.add_subcommand("carleson", "Carleson sup ratios over a rho-net");
  std::string car_family, car_ref = "weighted", car_out;
  add_measure_flags(c_car, mf_car);
  c_car->add_option("--family", car_family, "PointFamily JSON")->required();
  c_car->add_option("--reference", car_ref, "lebesgue|weighted");
  c_car->add_option("--out", car_out, "output path");

  auto* c_den = app.add_subcommand("density", "counting density vs equilibrium mass");
  std::string den_family, den_metric = "euclidean", den_out;
  std::vector<std::string> den_regions;
  add_measure_flags(c_den, mf_den);
  c_den->add_option("--family", den_family, "PointFamily JSON")->required();
  c_den->add_option("--region", den_regions, "region 'c1,c2;radius' (repeatable)");
  c_den->add_option("--metric", den_metric, "euclidean|rho");
  c_den->add_option("--out", den_out, "output path");

  auto* c_diag = app.add_subcommand("diag", "full diagnostics report");
  std::string diag_family, diag_out;
  std::vector<std::string> diag_regions;
  add_measure_flags(c_diag, mf_diag);
  c_diag->add_option("--family", diag_family, "PointFamily JSON")->required();
  c_diag->add_option("--region", diag_regions, "density region (repeatable)");
  c_diag->add_option("--out", diag_out, "output path");

  auto* c_loc = app.add_subcommand("localized", "localized kernel tables");
  std::string loc_mode = "decay", loc_x0, loc_ray, loc_ks, loc_out;
  int loc_k = 12, loc_samples = 128;
  double loc_alpha = 1.0, loc_gamma = 4.0;
  add_measure_flags(c_loc, mf_loc);
  c_loc->add_option("--mode", loc_mode, "decay|integral");
  c_loc->add_option("--k", loc_k, "degree");
  c_loc->add_option("--x0", loc_x0, "profile center");
  c_loc->add_option("--ray", loc_ray, "profile direction");
  c_loc->add_option("--samples", loc_samples, "profile samples");
  c_loc->add_option("--alpha", loc_alpha, "integral estimate alpha");
  c_loc->add_option("--gamma", loc_gamma, "integral estimate gamma");
  c_loc->add_option("--klist", loc_ks, "degrees for the integral table");
  c_loc->add_option("--out", loc_out, "output path");

  auto* c_tra = app.add_subcommand("transport", "W1 trend tables");
  std::string tra_k = "10,20,40", tra_family, tra_out;
  int tra_margin = 0;
  add_measure_flags(c_tra, mf_tra);
  c_tra->add_option("--k", tra_k, "degrees");
  c_tra->add_option("--family", tra_family, "PointFamily JSON (default: gauss_1d)");
  c_tra->add_option("--quad-margin", tra_margin, "extra quadrature order");
  c_tra->add_option("--out", tra_out, "output path");

  auto* c_sca = app.add_subcommand("scaling", "Bessel scaling limit and searches");
  std::string sca_mode = "limit", sca_k = "20,40,80", sca_out;
  double sca_R = 5.0, sca_nu = 0.5, sca_tmax = 40.0;
  int sca_grid = 41, sca_m = 3, sca_restarts = 8;
  std::uint64_t sca_seed = 0;
  add_measure_flags(c_sca, mf_sca);
  c_sca->add_option("--mode", sca_mode, "limit|search|zeros");
  c_sca->add_option("--k", sca_k, "degrees");
  c_sca->add_option("--R", sca_R, "grid half-width");
  c_sca->add_option("--grid", sca_grid, "grid points per axis");
  c_sca->add_option("--m", sca_m, "search configuration size");
  c_sca->add_option("--seed", sca_seed, "search seed");
  c_sca->add_option("--restarts", sca_restarts, "search restarts");
  c_sca->add_option("--nu", sca_nu, "Bessel order for zeros");
  c_sca->add_option("--tmax", sca_tmax, "zero search range");
  c_sca->add_option("--out", sca_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_basis->parsed())
      return run_basis(mf_basis, basis_k, basis_prec, basis_out);
    if (c_kernel->parsed())
      return run_kernel(mf_kernel, kernel_k, kernel_x, kernel_y, kernel_out, prec);
    if (c_gen->parsed())
      return run_generate(gen_kind, gen_n, gen_k, gen_a, gen_eps, gen_count, gen_seed,
                          gen_out);
    if (c_sep->parsed()) return run_separation(sep_family, mf_sep, sep_out, threads);
    if (c_car->parsed())
      return run_carleson(car_family, mf_car, car_ref, car_out, threads, prec);
    if (c_den->parsed())
      return run_density(den_family, mf_den, den_regions, den_metric, den_out);
    if (c_diag->parsed())
      return run_diag(diag_family, mf_diag, diag_regions, diag_out, threads, prec);
    if (c_loc->parsed())
      return run_localized(mf_loc, loc_k, loc_mode, loc_x0, loc_ray, loc_samples, loc_alpha,
                           loc_gamma, loc_ks, loc_out, prec, threads);
    if (c_tra->parsed())
      return run_transport(mf_tra, tra_k, tra_family, tra_margin, tra_out, prec, threads);
    if (c_sca->parsed())
      return run_scaling(mf_sca, sca_mode, sca_k, sca_R, sca_grid, sca_m, sca_seed,
                         sca_restarts, sca_nu, sca_tmax, sca_out, prec);
  } catch (const CapError& e) {
    std::cerr << "numerical cap: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
