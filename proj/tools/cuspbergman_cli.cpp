// Command-line front end: evaluates the cusp Bergman density series and the
// sup / localization / expansion reports with reproducible CSV or JSON
// output. Values are emitted as (sign, log10 magnitude) pairs alongside
// best-effort floats so quantities outside double range survive
// serialization.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cuspbergman/cusp_series.hpp"
#include "cuspbergman/estimates.hpp"
#include "cuspbergman/expansion.hpp"
#include "cuspbergman/kernel_config.hpp"
#include "cuspbergman/parallel.hpp"

using namespace cuspbergman;

namespace {

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::string command;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json footer = nlohmann::json::object();
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << t.header[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_double(v);
            else out << v;
          },
          row[i]);
    }
    out << "\n";
  }
  for (const auto& [key, value] : t.footer.items())
    out << "# " << key << " = " << value.dump() << "\n";
}

void write_json(const Table& t, std::ostream& out) {
  nlohmann::json doc;
  doc["command"] = t.command;
  doc["header"] = t.header;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row)
      std::visit([&](const auto& v) { r.push_back(v); }, cell);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  doc["footer"] = t.footer;
  out << doc.dump(2) << "\n";
}

void emit(const Table& t, const std::string& format, const std::string& path) {
  std::ostringstream buf;
  if (format == "json") write_json(t, buf);
  else write_csv(t, buf);
  if (path.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::domain_error("cannot open output file " + path);
    out << buf.str();
  }
}

// "4", "4,6,8", "4..12", "4..64:s4" (step), "64..4096:x2" (factor).
std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    auto dots = piece.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoll(piece));
      continue;
    }
    std::int64_t lo = std::stoll(piece.substr(0, dots));
    std::string rest = piece.substr(dots + 2);
    std::int64_t step = 1, factor = 1;
    auto colon = rest.find(':');
    std::int64_t hi;
    if (colon == std::string::npos) {
      hi = std::stoll(rest);
    } else {
      hi = std::stoll(rest.substr(0, colon));
      std::string mod = rest.substr(colon + 1);
      if (mod.size() < 2 || (mod[0] != 's' && mod[0] != 'x'))
        throw std::domain_error("bad range modifier in '" + piece + "'");
      if (mod[0] == 's') step = std::stoll(mod.substr(1));
      else factor = std::stoll(mod.substr(1));
      if (step < 1 || factor < 2) throw std::domain_error("bad range step in '" + piece + "'");
    }
    for (std::int64_t v = lo; v <= hi; v = (factor > 1 ? v * factor : v + step)) out.push_back(v);
  }
  if (out.empty()) throw std::domain_error("empty integer list '" + text + "'");
  return out;
}

// "1.5", "0.1,1,10", "lo..hi:gN" (geometric), "lo..hi:lN" (linear).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    auto dots = piece.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stod(piece));
      continue;
    }
    double lo = std::stod(piece.substr(0, dots));
    std::string rest = piece.substr(dots + 2);
    auto colon = rest.find(':');
    if (colon == std::string::npos || rest.size() < colon + 3)
      throw std::domain_error("range needs a :gN or :lN modifier in '" + piece + "'");
    double hi = std::stod(rest.substr(0, colon));
    char kind = rest[colon + 1];
    int count = std::stoi(rest.substr(colon + 2));
    if (count < 2 || hi <= lo) throw std::domain_error("bad grid range '" + piece + "'");
    for (int i = 0; i < count; ++i) {
      double u = static_cast<double>(i) / (count - 1);
      if (kind == 'g') out.push_back(lo * std::pow(hi / lo, u));
      else if (kind == 'l') out.push_back(lo + (hi - lo) * u);
      else throw std::domain_error("bad grid kind in '" + piece + "'");
    }
  }
  if (out.empty()) throw std::domain_error("empty grid '" + text + "'");
  for (double v : out)
    if (!(v > 0.0)) throw std::domain_error("grid values must be positive");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw std::domain_error("grid must be strictly increasing");
  return out;
}

std::string poly_to_string(const PolyInM& p) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t d = p.size(); d-- > 0;) {
    if (d >= p.size() || p[d] == 0) continue;
    Rational c = p[d];
    bool neg = c < 0;
    if (neg) c = -c;
    if (!first) os << (neg ? " - " : " + ");
    else if (neg) os << "-";
    first = false;
    auto num = numerator(c), den = denominator(c);
    std::string mono = d == 0 ? "" : (d == 1 ? "m" : "m^" + std::to_string(d));
    if (mono.empty()) {
      os << num;
      if (den != 1) os << "/" << den;
    } else {
      if (num != 1) os << num << " ";
      os << mono;
      if (den != 1) os << "/" << den;
    }
  }
  if (first) os << "0";
  return os.str();
}

struct CommonOpts {
  std::string base = "point";
  double tau_re = 0.0, tau_im = 1.0;
  std::int64_t group_order = 1, character = 0;
  std::int64_t n = 0;  // 0 = derive from base
  std::string config_path;
  std::string unitaries_path;
  std::string format = "csv";
  std::string out_path;
  int agrid = 16;
};

BaseKernel make_kernel(const CommonOpts& o, const CLI::App* cmd) {
  KernelSpec spec;
  if (!o.config_path.empty()) spec = parse_kernel_config_file(o.config_path);
  auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (given("--base")) spec.base = o.base;
  if (given("--tau-re")) spec.tau_re = o.tau_re;
  if (given("--tau-im")) spec.tau_im = o.tau_im;
  if (given("--group-order")) spec.group_order = o.group_order;
  if (given("--character")) spec.character_index = o.character;
  if (given("--unitaries")) spec.unitaries_path = o.unitaries_path;
  BaseKernel k = spec.build();
  if (o.n != 0 && o.n != k.cusp_dim())
    throw std::domain_error("--n does not match the base (point: n=1, theta: n=2)");
  return k;
}

std::vector<BasePoint> default_base_grid(const BaseKernel& k, int g) {
  std::vector<BasePoint> grid;
  if (k.cusp_dim() == 1) {
    grid.push_back(BasePoint{});
    return grid;
  }
  double tau2 = k.tau().imag();
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      grid.push_back(BasePoint{{static_cast<double>(i) / g, j * tau2 / g}});
  return grid;
}

void add_kernel_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--base", o.base, "base manifold: point | theta");
  cmd->add_option("--tau-re", o.tau_re, "Re tau for the theta base");
  cmd->add_option("--tau-im", o.tau_im, "Im tau for the theta base (positive)");
  cmd->add_option("--group-order", o.group_order, "finite group order |Gamma|");
  cmd->add_option("--character", o.character, "character index in [0, order)");
  cmd->add_option("--unitaries", o.unitaries_path, "projector unitaries JSON file");
  cmd->add_option("--n", o.n, "cusp dimension (validated against the base)");
  cmd->add_option("--config", o.config_path, "kernel key=value config file");
  cmd->add_option("--format", o.format, "output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out_path, "output path (default stdout)");
  cmd->add_option("--agrid", o.agrid, "base-grid resolution per side for theta");
}

int run_rho(const CommonOpts& o, const CLI::App* cmd, const std::vector<std::int64_t>& ms,
            std::vector<double> ts, const std::string& hd_text, std::int64_t twist) {
  if (!hd_text.empty()) {
    std::vector<double> hds = parse_grid(hd_text);
    ts.clear();
    for (auto it = hds.rbegin(); it != hds.rend(); ++it) {
      if (!(*it > 0.0) || !(*it < 1.0))
        throw std::domain_error("--hd values must lie in (0,1)");
      ts.push_back(-std::log(*it));
    }
  }
  if (ts.empty()) ts = parse_grid("0.01..1000:g321");
  BaseKernel kernel = make_kernel(o, cmd);

  Table t;
  t.command = "rho";
  t.header = {"m", "t", "sign", "value_log10", "value", "tail_rel", "q_lo", "q_hi"};
  std::vector<std::vector<Cell>> slots(ms.size() * ts.size());
  parallel_for(slots.size(), [&](std::size_t i) {
    std::int64_t m = ms[i / ts.size()];
    double tv = ts[i % ts.size()];
    SeriesResult r = rho_cusp(kernel, m, CuspPoint{tv, {}}, twist);
    double tail_rel = (r.tail_bound / r.value).value();
    slots[i] = {Cell(m),
                Cell(tv),
                Cell(static_cast<std::int64_t>(r.value.sign())),
                Cell(r.value.log10_abs()),
                Cell(r.value.value()),
                Cell(tail_rel),
                Cell(r.q_first),
                Cell(r.q_last)};
  });
  t.rows = std::move(slots);
  emit(t, o.format, o.out_path);
  return 0;
}

int run_sup(const CommonOpts& o, const CLI::App* cmd, const std::vector<std::int64_t>& ms,
            std::int64_t twist, double t_max, std::int64_t q_max) {
  BaseKernel kernel = make_kernel(o, cmd);
  std::vector<BasePoint> grid = default_base_grid(kernel, o.agrid);
  Table t;
  t.command = "sup";
  t.header = {"m", "sign", "sup_log10", "sup", "t_star", "normalized", "alpha", "gap"};
  std::vector<std::vector<Cell>> slots(ms.size());
  parallel_for(slots.size(), [&](std::size_t i) {
    std::int64_t m = ms[i];
    double tm = t_max > 0.0 ? t_max : 8.0 * static_cast<double>(m * (twist + 1));
    SupResult s = sup_rho(kernel, m, twist, tm, grid, q_max);
    double galpha = static_cast<double>(kernel.group_order()) * s.alpha.value;
    slots[i] = {Cell(m),
                Cell(static_cast<std::int64_t>(s.sup.sign())),
                Cell(s.sup.log10_abs()),
                Cell(s.sup.value()),
                Cell(s.t_star),
                Cell(s.normalized),
                Cell(s.alpha.value),
                Cell(std::abs(s.normalized - galpha))};
  });
  t.rows = std::move(slots);
  if (ms.size() >= 4) {
    std::vector<std::pair<double, double>> gaps;
    bool positive = true;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      double g = std::get<double>(t.rows[i][7]);
      positive = positive && g > 0.0;
      gaps.emplace_back(static_cast<double>(ms[i]), g);
    }
    if (positive) {
      RateFit fit = rate_fit(std::span<const std::pair<double, double>>(gaps));
      t.footer["gap_fit_exponent"] = fit.exponent;
      t.footer["gap_fit_log_constant"] = fit.log_constant;
      t.footer["gap_fit_residual"] = fit.residual;
    }
  }
  emit(t, o.format, o.out_path);
  return 0;
}

int run_localize(const CommonOpts& o, const CLI::App* cmd, const std::vector<std::int64_t>& ms,
                 double gamma, double sigma, double xi, double kappa, double r,
                 const std::string& t_text) {
  BaseKernel kernel = make_kernel(o, cmd);
  Table t;
  t.command = "localize";
  t.header = {"m",          "t",      "sign",       "dev_log10", "ratio_minus_1",
              "admissible", "cond_r", "cond_gamma", "cond_sigma"};
  for (std::int64_t m : ms) {
    double g = gamma > 0.0
                   ? gamma
                   : std::exp(-std::sqrt(static_cast<double>(m)) / std::log(static_cast<double>(m)));
    std::vector<double> grid;
    if (!t_text.empty()) grid = parse_grid(t_text);
    else {
      double t0 = -std::log(g);
      for (int i = 0; i < 16; ++i) grid.push_back(t0 * std::pow(4.0, i / 15.0));
    }
    LocalizationReport rep = localization_report(kernel, m, g, sigma, grid, xi, kappa, r);
    for (const auto& [tv, dev] : rep.profile)
      t.rows.push_back({Cell(m),
                        Cell(tv),
                        Cell(static_cast<std::int64_t>(dev.sign())),
                        Cell(dev.log10_abs()),
                        Cell(dev.value()),
                        Cell(static_cast<std::int64_t>(rep.pair.admissible() ? 1 : 0)),
                        Cell(static_cast<std::int64_t>(rep.pair.cond_r ? 1 : 0)),
                        Cell(static_cast<std::int64_t>(rep.pair.cond_gamma ? 1 : 0)),
                        Cell(static_cast<std::int64_t>(rep.pair.cond_sigma ? 1 : 0))});
  }
  emit(t, o.format, o.out_path);
  return 0;
}

int run_expand(const CommonOpts& o, const std::vector<std::int64_t>& ms, int order,
               const std::string& t_text) {
  ExpansionPoly polys = lambda_polys(order);
  std::vector<double> grid = t_text.empty() ? default_expansion_grid() : parse_grid(t_text);
  Table t;
  t.command = "expand";
  t.header = {"row", "m", "N", "l", "sign", "value_log10", "value", "argmax_t", "lambda_poly"};
  std::vector<WeightedErrorSup> sups(ms.size());
  parallel_for(ms.size(), [&](std::size_t i) { sups[i] = expansion_error(ms[i], polys, grid); });
  for (std::size_t i = 0; i < ms.size(); ++i)
    t.rows.push_back({Cell(std::string("error")), Cell(ms[i]),
                      Cell(static_cast<std::int64_t>(order)), Cell(std::string("")),
                      Cell(static_cast<std::int64_t>(sups[i].sup.sign())),
                      Cell(sups[i].sup.log10_abs()), Cell(sups[i].sup.value()),
                      Cell(sups[i].argmax_t), Cell(std::string(""))});
  if (order <= 8)
    for (int l = 3; l <= order; ++l)
      t.rows.push_back({Cell(std::string("lambda")), Cell(std::string("")),
                        Cell(static_cast<std::int64_t>(order)), Cell(static_cast<std::int64_t>(l)),
                        Cell(std::string("")), Cell(std::string("")), Cell(std::string("")),
                        Cell(std::string("")), Cell(poly_to_string(polys.coeff(l)))});
  if (ms.size() >= 4) {
    std::vector<std::pair<double, LogReal>> samples;
    for (std::size_t i = 0; i < ms.size(); ++i)
      samples.emplace_back(static_cast<double>(ms[i]), sups[i].sup);
    RateFit fit = rate_fit(std::span<const std::pair<double, LogReal>>(samples));
    t.footer["error_fit_exponent"] = fit.exponent;
    t.footer["error_fit_log_constant"] = fit.log_constant;
    t.footer["error_fit_residual"] = fit.residual;
  }
  emit(t, o.format, o.out_path);
  return 0;
}

int run_normcheck(const CommonOpts& o, const std::vector<std::int64_t>& ms,
                  const std::vector<std::int64_t>& qs) {
  Table t;
  t.command = "normcheck";
  t.header = {"m", "q", "abs_error"};
  std::vector<std::vector<Cell>> slots(ms.size() * qs.size());
  parallel_for(slots.size(), [&](std::size_t i) {
    std::int64_t m = ms[i / qs.size()];
    std::int64_t q = qs[i % qs.size()];
    slots[i] = {Cell(m), Cell(q), Cell(quad_norm_check(m, q))};
  });
  t.rows = std::move(slots);
  emit(t, o.format, o.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman kernel densities on model complex hyperbolic cusps"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string m_text = "2", t_text, hd_text, q_text = "1..12";
  std::int64_t twist = 0, q_max = 0;
  double t_max = 0.0, sigma = 0.5, gamma = 0.0, xi = 1.0, kappa = 1.0, rr = 1.0;
  int order = 3;

  CLI::App* rho = app.add_subcommand("rho", "evaluate the cusp density series");
  add_kernel_flags(rho, o);
  rho->add_option("--m", m_text, "bundle powers (list or range)");
  rho->add_option("--t", t_text, "t grid (list or lo..hi:gN / lo..hi:lN)");
  rho->add_option("--hd", hd_text, "h_D grid in (0,1); converted to t = -ln h_D");
  rho->add_option("--k", twist, "metric twist exponent k >= 0");

  CLI::App* sup = app.add_subcommand("sup", "maximize the density over the cusp");
  add_kernel_flags(sup, o);
  sup->add_option("--m", m_text, "bundle powers (list or range)");
  sup->add_option("--k", twist, "metric twist exponent k >= 0");
  sup->add_option("--tmax", t_max, "t scan upper bound (default 8 m (k+1))");
  sup->add_option("--qmax", q_max, "mode cap for the alpha search (default 10 m)");

  CLI::App* loc = app.add_subcommand("localize", "full vs truncated density deviation");
  add_kernel_flags(loc, o);
  loc->add_option("--m", m_text, "bundle powers (list or range)");
  loc->add_option("--sigma", sigma, "truncation parameter in (0,1)");
  loc->add_option("--gamma", gamma, "observation depth (default e^{-sqrt m / log m})");
  loc->add_option("--xi", xi, "admissibility exponent xi");
  loc->add_option("--kappa", kappa, "admissibility exponent kappa");
  loc->add_option("--r", rr, "cusp neighborhood size r");
  loc->add_option("--t", t_text, "t grid inside V_gamma (default geometric)");

  CLI::App* exp_cmd = app.add_subcommand("expand", "Gaussian expansion error report");
  add_kernel_flags(exp_cmd, o);
  exp_cmd->add_option("--m", m_text, "bundle powers (list or range)");
  exp_cmd->add_option("--N", order, "expansion order N >= 3");
  exp_cmd->add_option("--t", t_text, "t grid override");

  CLI::App* nc = app.add_subcommand("normcheck", "quadrature check of mode normalization");
  add_kernel_flags(nc, o);
  nc->add_option("--m", m_text, "bundle powers (list or range)");
  nc->add_option("--q", q_text, "mode levels (list or range)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::vector<std::int64_t> ms = parse_int_list(m_text);
    if (rho->parsed())
      return run_rho(o, rho, ms, t_text.empty() ? std::vector<double>{} : parse_grid(t_text),
                     hd_text, twist);
    if (sup->parsed()) return run_sup(o, sup, ms, twist, t_max, q_max);
    if (loc->parsed()) return run_localize(o, loc, ms, gamma, sigma, xi, kappa, rr, t_text);
    if (exp_cmd->parsed()) return run_expand(o, ms, order, t_text);
    if (nc->parsed()) return run_normcheck(o, ms, parse_int_list(q_text));
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
