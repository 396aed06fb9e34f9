// Command-line front end: exponent algebra, weight characteristics, the
// reproducing-formula and off-diagonal probes, the stopping-time domination
// run, and the asymptotic sweeps. Every subcommand emits JSON (default) or
// CSV and exits nonzero when its built-in tolerance checks fail.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparsedom/sparsedom.hpp"

using json = nlohmann::ordered_json;
using namespace sparsedom;

namespace {

json num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return kInf;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw std::invalid_argument("bad exponent '" + s +
                                "' (use a decimal or 'inf')");
  }
  return v;
}

json cube_json(const DyadicCube& q) {
  return json{{"system", q.system},
              {"level", q.level},
              {"index", q.index},
              {"left", q.left()},
              {"right", q.right()}};
}

json interval_json(const Interval& I) {
  return json{{"left", I.left}, {"right", I.right}};
}

Weight parse_weight(const std::string& spec) {
  if (spec.rfind("power:", 0) == 0) {
    return Weight::power(std::stod(spec.substr(6)));
  }
  if (spec.rfind("flat", 0) == 0) return Weight::power(0.0);
  throw CLI::ValidationError("--weight", "expected power:<exponent> or flat");
}

MultiplierOperator parse_operator(const std::string& name) {
  if (name == "hilbert") return hilbert_op();
  if (name == "identity") return identity_op();
  if (name == "zero") return zero_op();
  throw CLI::ValidationError("--operator",
                             "expected hilbert, identity or zero");
}

GridFunction random_input(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  GridFunction f(n);
  for (auto& x : f.v) x = 0.3 * U(rng);
  for (int b = 0; b < 3; ++b) {
    const double c = U01(rng), w = 0.01 + 0.1 * U01(rng), a = 2.0 * U(rng);
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::fabs((i + 0.5) / static_cast<double>(n) - c);
      d = std::min(d, 1.0 - d);
      f.v[i] += a * std::exp(-d * d / (2.0 * w * w));
    }
  }
  std::uniform_int_distribution<std::size_t> cell(0, n - 1);
  for (int s = 0; s < 8; ++s) {
    const double amp = std::pow(U01(rng), -0.7) - 1.0;
    f.v[cell(rng)] += (U(rng) > 0.0 ? amp : -amp);
  }
  f.subtract_mean();
  return f;
}

std::vector<double> eps_grid_from(double eps_min, double eps_max) {
  std::vector<double> eps;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e /= 2.0) {
    eps.push_back(e);
  }
  return eps;
}

void emit(const json& j, const std::string& out) {
  if (out == "json") std::printf("%s\n", j.dump(2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-domination laboratory on the unit interval"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_format = "json";
  unsigned jobs = 0;
  app.add_option("--out", out_format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", jobs, "worker threads for corpus loops");

  // ---- exponents -------------------------------------------------------
  auto* cmd_exp = app.add_subcommand("exponents", "derived exponent tuple");
  std::string e_p0 = "1", e_q0 = "inf", e_p = "2";
  cmd_exp->add_option("--p0", e_p0)->required();
  cmd_exp->add_option("--q0", e_q0)->required();
  cmd_exp->add_option("--p", e_p)->required();

  // ---- characteristic ----------------------------------------------------
  auto* cmd_chr = app.add_subcommand("characteristic",
                                     "weight characteristic with witness");
  std::string c_weight = "power:0";
  double c_p = 2.0, c_rh = 0.0;
  int c_depth = 12, c_geric = 60;
  cmd_chr->add_option("--weight", c_weight, "power:<a> or flat")->required();
  cmd_chr->add_option("--p", c_p, "Muckenhoupt exponent");
  cmd_chr->add_option("--rh", c_rh, "also report the reverse-Hoelder class");
  cmd_chr->add_option("--depth", c_depth, "exhaustive family depth");
  cmd_chr->add_option("--geometric-depth", c_geric);

  // ---- calderon ----------------------------------------------------------
  auto* cmd_cal = app.add_subcommand("calderon",
                                     "reproducing-formula residual");
  int k_modes = 8, k_quad = 501, k_grid = 10;
  double k_N = 3.0, k_tmin = 1e-8, k_tmax = 1e2, k_tol = 1e-6;
  unsigned k_seed = 7;
  cmd_cal->add_option("--modes", k_modes, "band limit of the test input");
  cmd_cal->add_option("--N", k_N, "order of the band blocks");
  cmd_cal->add_option("--tmin", k_tmin);
  cmd_cal->add_option("--tmax", k_tmax);
  cmd_cal->add_option("--quad", k_quad, "log-quadrature points");
  cmd_cal->add_option("--grid", k_grid, "log2 grid size");
  cmd_cal->add_option("--tol", k_tol, "pass threshold");
  cmd_cal->add_option("--seed", k_seed);
  std::string k_dump;
  cmd_cal->add_option("--dump", k_dump,
                      "write the pointwise defect as x,value CSV");

  // ---- odprobe -------------------------------------------------------------
  auto* cmd_od = app.add_subcommand("odprobe", "off-diagonal decay fit");
  std::string od_op = "heat";
  double od_t = 1e-4, od_xmin = 1.0, od_xmax = 25.0;
  int od_points = 9, od_grid = 12;
  double od_N = 3.0;
  cmd_od->add_option("--op", od_op, "heat or highpass")
      ->check(CLI::IsMember({"heat", "highpass"}));
  cmd_od->add_option("--t", od_t, "time scale");
  cmd_od->add_option("--N", od_N, "order for the highpass block");
  cmd_od->add_option("--xmin", od_xmin, "smallest d^2/t");
  cmd_od->add_option("--xmax", od_xmax, "largest d^2/t");
  cmd_od->add_option("--points", od_points);
  cmd_od->add_option("--grid", od_grid, "log2 grid size");

  // ---- dominate --------------------------------------------------------------
  auto* cmd_dom = app.add_subcommand("dominate",
                                     "stopping-time sparse certificate");
  std::string d_operator = "hilbert";
  int d_grid = 12, d_pairs = 1;
  double d_eta = 64.0, d_N = 3.0;
  std::string d_p0 = "1", d_q0 = "8", d_p = "2";
  unsigned d_seed = 42;
  bool d_cubes = false;
  cmd_dom->add_option("--operator", d_operator, "hilbert, identity or zero");
  cmd_dom->add_option("--grid", d_grid, "log2 grid size");
  cmd_dom->add_option("--eta", d_eta, "stopping threshold");
  cmd_dom->add_option("--p0", d_p0);
  cmd_dom->add_option("--q0", d_q0);
  cmd_dom->add_option("--p", d_p);
  cmd_dom->add_option("--pairs", d_pairs, "number of random input pairs");
  cmd_dom->add_option("--seed", d_seed);
  cmd_dom->add_option("--N", d_N);
  cmd_dom->add_flag("--cubes", d_cubes, "include the cube list");

  // ---- sharpness ---------------------------------------------------------------
  auto* cmd_shp = app.add_subcommand("sharpness", "asymptotic slope sweep");
  std::string s_range = "lower", s_p0 = "1", s_q0 = "4", s_p = "1.5";
  double s_eps_min = std::ldexp(1.0, -14), s_eps_max = std::ldexp(1.0, -4);
  cmd_shp->add_option("--range", s_range)
      ->check(CLI::IsMember({"lower", "upper"}));
  cmd_shp->add_option("--p0", s_p0)->required();
  cmd_shp->add_option("--q0", s_q0)->required();
  cmd_shp->add_option("--p", s_p)->required();
  cmd_shp->add_option("--eps-min", s_eps_min);
  cmd_shp->add_option("--eps-max", s_eps_max);

  // ---- scan-bound -----------------------------------------------------------------
  auto* cmd_scan = app.add_subcommand("scan-bound",
                                      "sparse-bound optimality scan");
  std::string b_p0 = "1", b_q0 = "4", b_p = "1.5";
  double b_offset = 0.0;
  double b_eps_min = std::ldexp(1.0, -14), b_eps_max = std::ldexp(1.0, -4);
  cmd_scan->add_option("--p0", b_p0)->required();
  cmd_scan->add_option("--q0", b_q0)->required();
  cmd_scan->add_option("--p", b_p)->required();
  cmd_scan->add_option("--alpha-offset", b_offset,
                       "added to the sharp power (negative undershoots)");
  cmd_scan->add_option("--eps-min", b_eps_min);
  cmd_scan->add_option("--eps-max", b_eps_max);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_exp) {
      const auto c =
          make_config(parse_exponent(e_p0), parse_exponent(e_q0),
                      parse_exponent(e_p));
      json j{{"p0", num(c.p0)},
             {"q0", num(c.q0)},
             {"p", num(c.p)},
             {"p0_conj", num(c.p0_conj)},
             {"q0_conj", num(c.q0_conj)},
             {"p_conj", num(c.p_conj)},
             {"critical_p", num(c.frak_p)},
             {"q0_over_p_conj", num(c.q0_over_p_conj)},
             {"r", num(c.r)},
             {"delta", num(c.delta)},
             {"alpha", num(c.alpha)},
             {"beta", num(c.beta)},
             {"beta_bar", num(c.beta_bar)},
             {"gamma", num(c.gamma)}};
      if (out_format == "csv") {
        std::printf("field,value\n");
        for (auto& [k, v] : j.items()) {
          std::printf("%s,%s\n", k.c_str(), v.dump().c_str());
        }
      } else {
        emit(j, out_format);
      }
      return 0;
    }

    if (*cmd_chr) {
      const Weight w = parse_weight(c_weight);
      const auto fam = default_interval_family(c_depth, c_geric);
      const auto ap = ap_characteristic(w, c_p, fam);
      json j{{"weight", c_weight},
             {"family_size", fam.size()},
             {"ap",
              {{"p", c_p},
               {"value", num(ap.value)},
               {"witness", interval_json(ap.witness)}}}};
      bool finite = std::isfinite(ap.value);
      if (c_rh > 0.0) {
        const auto rh = rh_characteristic(w, c_rh, fam);
        j["rh"] = {{"q", c_rh},
                   {"value", num(rh.value)},
                   {"witness", interval_json(rh.witness)}};
        j["combined"] = num(ap.value * rh.value);
        finite = finite && std::isfinite(rh.value);
      }
      if (out_format == "csv") {
        std::printf("quantity,value,witness_left,witness_right\n");
        std::printf("ap,%.17g,%.17g,%.17g\n", ap.value, ap.witness.left,
                    ap.witness.right);
      } else {
        emit(j, out_format);
      }
      return finite ? 0 : 1;
    }

    if (*cmd_cal) {
      const std::size_t n = std::size_t{1} << k_grid;
      std::mt19937_64 rng(k_seed);
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      GridFunction f(n);
      const int band = std::min<int>(k_modes, static_cast<int>(n / 2) - 1);
      for (int k = 1; k <= band; ++k) {
        const double a = U(rng), b = U(rng);
        for (std::size_t i = 0; i < n; ++i) {
          const double x = 2.0 * M_PI * k * static_cast<double>(i) / n;
          f.v[i] += a * std::cos(x) + b * std::sin(x);
        }
      }
      const double res = calderon_residual(f, k_N, k_tmin, k_tmax, k_quad);
      if (!k_dump.empty()) {
        const GridFunction err =
            calderon_error_field(f, k_N, k_tmin, k_tmax, k_quad);
        std::FILE* fh = std::fopen(k_dump.c_str(), "w");
        if (!fh) throw std::runtime_error("cannot open " + k_dump);
        std::fprintf(fh, "x,value\n");
        for (std::size_t i = 0; i < err.size(); ++i) {
          std::fprintf(fh, "%.17g,%.17g\n",
                       static_cast<double>(i) / err.size(), err.v[i]);
        }
        std::fclose(fh);
      }
      if (out_format == "csv") {
        std::printf("modes,N,tmin,tmax,quad,residual\n");
        std::printf("%d,%g,%g,%g,%d,%.17g\n", band, k_N, k_tmin, k_tmax,
                    k_quad, res);
      } else {
        emit(json{{"modes", band},
                  {"N", k_N},
                  {"tmin", k_tmin},
                  {"tmax", k_tmax},
                  {"quad", k_quad},
                  {"residual", res},
                  {"tolerance", k_tol}},
             out_format);
      }
      return res <= k_tol ? 0 : 1;
    }

    if (*cmd_od) {
      const std::size_t n = std::size_t{1} << od_grid;
      const MultiplierOperator op =
          (od_op == "heat") ? heat_op(od_t) : q_op(od_N, od_t);
      const auto fit = off_diagonal_sweep(op, od_t, n, od_xmin, od_xmax,
                                          od_points);
      if (out_format == "csv") {
        std::printf("d2_over_t,ratio\n");
        for (const auto& pt : fit.points) {
          std::printf("%.17g,%.17g\n", pt.d2_over_t, pt.ratio);
        }
      } else {
        json pts = json::array();
        for (const auto& pt : fit.points) {
          pts.push_back({{"d2_over_t", pt.d2_over_t}, {"ratio", pt.ratio}});
        }
        emit(json{{"operator", od_op},
                  {"t", od_t},
                  {"fitted_c", fit.c},
                  {"log_prefactor", fit.intercept},
                  {"r2", fit.r2},
                  {"points", pts}},
             out_format);
      }
      return fit.r2 >= 0.9 ? 0 : 1;
    }

    if (*cmd_dom) {
      const std::size_t n = std::size_t{1} << d_grid;
      const auto cfg =
          make_config(parse_exponent(d_p0), parse_exponent(d_q0),
                      parse_exponent(d_p));
      const auto T = parse_operator(d_operator);
      const DyadicCube root{0, 0, 0};
      std::mt19937_64 rng(d_seed);
      std::vector<std::pair<GridFunction, GridFunction>> pairs;
      for (int i = 0; i < d_pairs; ++i) {
        GridFunction f = random_input(rng, n);
        GridFunction tf = apply(T, f);
        std::uniform_real_distribution<double> U01(0.0, 1.0);
        GridFunction g(n);
        for (std::size_t j = 0; j < n; ++j) {
          g.v[j] = U01(rng) * (tf.v[j] >= 0.0 ? 1.0 : -1.0);
        }
        pairs.emplace_back(std::move(f), std::move(g));
      }
      std::vector<DominationResult> results(pairs.size());
      std::vector<std::string> errors(pairs.size());
      parallel_for(
          pairs.size(),
          [&](std::size_t i) {
            try {
              results[i] = sparse_dominate(T, pairs[i].first, pairs[i].second,
                                           root, cfg, d_N, d_eta);
            } catch (const std::exception& e) {
              errors[i] = e.what();
            }
          },
          jobs == 0 ? 1 : jobs);
      json runs = json::array();
      bool all_ok = true;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!errors[i].empty()) {
          runs.push_back({{"error", errors[i]}});
          all_ok = false;
          continue;
        }
        const auto& res = results[i];
        const auto rep = is_sparse(res.collection);
        all_ok = all_ok && rep.sparse && std::isfinite(res.constant);
        json levels = json::array();
        for (const auto& lvl : res.levels) {
          levels.push_back({{"depth", lvl.depth},
                            {"selected", lvl.selected},
                            {"selected_measure", lvl.selected_measure},
                            {"max_child_ratio", lvl.max_child_ratio},
                            {"remainder_mass", lvl.remainder_mass}});
        }
        json run{{"eta", res.eta},
                 {"lhs", res.lhs},
                 {"rhs_form", res.rhs_form},
                 {"constant", res.constant},
                 {"cube_count", res.collection.cubes.size()},
                 {"sparse", rep.sparse},
                 {"worst_packing_ratio", rep.worst_ratio},
                 {"resolution_warning", res.resolution_warning},
                 {"levels", levels}};
        if (d_cubes) {
          json cubes = json::array();
          for (const auto& q : res.collection.cubes) {
            cubes.push_back(cube_json(q));
          }
          run["cubes"] = cubes;
        }
        runs.push_back(run);
      }
      if (out_format == "csv") {
        std::printf("pair,lhs,rhs_form,constant,cubes,sparse\n");
        for (std::size_t i = 0; i < results.size(); ++i) {
          const auto& res = results[i];
          std::printf("%zu,%.17g,%.17g,%.17g,%zu,%d\n", i, res.lhs,
                      res.rhs_form, res.constant,
                      res.collection.cubes.size(),
                      int(is_sparse(res.collection).sparse));
        }
      } else {
        emit(json{{"operator", d_operator},
                  {"grid", d_grid},
                  {"eta", d_eta},
                  {"runs", runs}},
             out_format);
      }
      return all_ok ? 0 : 1;
    }

    if (*cmd_shp) {
      const auto cfg = make_config(parse_exponent(s_p0), parse_exponent(s_q0),
                                   parse_exponent(s_p));
      const auto eps = eps_grid_from(s_eps_min, s_eps_max);
      const SharpnessResult res = (s_range == "lower")
                                      ? sharpness_lower(cfg, eps)
                                      : sharpness_upper(cfg, eps);
      if (out_format == "csv") {
        std::printf("# eps lhs rhs ratio\n");
        for (std::size_t i = 0; i < res.lhs.eps.size(); ++i) {
          std::printf("%.17g %.17g %.17g %.17g\n", res.lhs.eps[i],
                      res.lhs.values[i], res.rhs.values[i],
                      res.lhs.values[i] / res.rhs.values[i]);
        }
      } else {
        emit(json{{"range", s_range},
                  {"alpha", cfg.alpha},
                  {"lhs_slope", res.lhs.slope},
                  {"lhs_r2", res.lhs.r2},
                  {"rhs_slope", res.rhs.slope},
                  {"rhs_r2", res.rhs.r2},
                  {"ratio_min", res.ratio_min},
                  {"ratio_max", res.ratio_max}},
             out_format);
      }
      return (res.lhs.r2 >= 0.99 && res.rhs.r2 >= 0.99) ? 0 : 1;
    }

    if (*cmd_scan) {
      const auto cfg = make_config(parse_exponent(b_p0), parse_exponent(b_q0),
                                   parse_exponent(b_p));
      const auto eps = eps_grid_from(b_eps_min, b_eps_max);
      const auto rows = weighted_bound_scan(cfg, eps, cfg.alpha + b_offset);
      bool finite = true;
      if (out_format == "csv") {
        std::printf("# eps bound characteristic normalized excluded\n");
      }
      json jr = json::array();
      for (const auto& r : rows) {
        finite = finite && std::isfinite(r.bound);
        if (out_format == "csv") {
          std::printf("%.17g %.17g %.17g %.17g %d\n", r.eps, r.bound,
                      r.characteristic, r.normalized, r.excluded_pairs);
        } else {
          jr.push_back({{"eps", r.eps},
                        {"bound", r.bound},
                        {"characteristic", r.characteristic},
                        {"normalized", r.normalized},
                        {"excluded_pairs", r.excluded_pairs}});
        }
      }
      if (out_format == "json") {
        emit(json{{"alpha_used", cfg.alpha + b_offset}, {"rows", jr}},
             out_format);
      }
      return finite ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
