#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "reflectionless/analysis.hpp"
#include "reflectionless/config.hpp"
#include "reflectionless/dynamics.hpp"
#include "reflectionless/error.hpp"
#include "reflectionless/herglotz.hpp"
#include "reflectionless/jost.hpp"
#include "reflectionless/scattering.hpp"

namespace refl::cli {

namespace {

struct Options {
  std::string config;
  std::string grid;
  std::optional<double> lambda;
  long n = 0;
  std::optional<long> m;
  double eta = 0.0;
  std::string cuts = "-3:3";
  std::string out;
  std::string format = "csv";
  double tol = kCriterionTolerance;
  std::optional<std::uint64_t> seed;
  std::size_t random_window = 8;
  double dlambda = 0.05;
  long N = 2000;
  Reservoirs reservoirs;
};

/// Usage problems detected after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-point failures that drop the point instead of aborting the command.
bool skippable(ErrorCode code) {
  switch (code) {
    case ErrorCode::BandEdge:
    case ErrorCode::SpectralGap:
    case ErrorCode::NoOpenChannel:
    case ErrorCode::NormalizationPole:
    case ErrorCode::DegenerateBasis:
    case ErrorCode::HorizonExceeded:
      return true;
    default:
      return false;
  }
}

JacobiSpec load_spec(const Options& o) {
  JacobiSpec spec = o.config.empty() ? JacobiSpec(Background::free()) : load_config(o.config);
  if (o.seed) spec = random_perturbation(spec.background(), *o.seed, o.random_window);
  return spec;
}

std::vector<double> energies(const Options& o, const Background& bg, std::ostream& err) {
  if (!o.grid.empty() && o.lambda) throw UsageError("--grid and --lambda are mutually exclusive");
  if (o.lambda) return {*o.lambda};
  if (o.grid.empty()) throw UsageError("one of --grid or --lambda is required");
  const GridSpec g = parse_grid(o.grid);
  const EnergyGrid grid = make_grid(bg, g.start, g.stop, g.step);
  for (double x : grid.dropped) err << "note: λ = " << format_number(x) << " dropped (within edge margin)\n";
  return grid.points;
}

std::pair<long, long> parse_cuts(const std::string& text) {
  const auto colon = text.find(':');
  long lo = 0, hi = 0;
  auto parse = [](std::string_view s, long& v) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
  };
  const std::string_view sv(text);
  if (colon == std::string::npos || !parse(sv.substr(0, colon), lo) || !parse(sv.substr(colon + 1), hi) || hi < lo)
    throw Error(ErrorCode::InvalidArgument, "--cuts expects \"first:last\" with first <= last");
  return {lo, hi};
}

/// Evaluates `row` per energy, reporting skipped points; all skipped is a
/// numerical failure.
void per_energy(const std::vector<double>& lambdas, Table& table, std::ostream& err,
                const std::function<std::vector<Cell>(double)>& row) {
  std::size_t skipped = 0;
  for (double l : lambdas) {
    try {
      table.rows.push_back(row(l));
    } catch (const Error& e) {
      if (!skippable(e.code())) throw;
      ++skipped;
      err << "note: λ = " << format_number(l) << " skipped: " << e.what() << "\n";
    }
  }
  if (!lambdas.empty() && skipped == lambdas.size())
    throw Error(ErrorCode::NoOpenChannel, "no grid point could be evaluated");
}

Table describe(const Options& o) {
  const JacobiSpec spec = load_spec(o);
  const Background& bg = spec.background();
  Table t{{"band", "lower", "upper", "discriminant_lower", "discriminant_upper"}, {}};
  long i = 0;
  for (const Band& b : bg.bands())
    t.rows.push_back({i++, b.lower, b.upper, bg.floquet_discriminant(b.lower), bg.floquet_discriminant(b.upper)});
  return t;
}

Table mfunc(const Options& o, std::ostream& err) {
  const JacobiSpec spec = load_spec(o);
  Table t{{"lambda", "eta", "n", "re_m_left", "im_m_left", "re_m_right", "im_m_right", "density_left",
           "density_right"},
          {}};
  per_energy(energies(o, spec.background(), err), t, err, [&](double l) -> std::vector<Cell> {
    const auto pt = o.eta > 0.0 ? BoundaryPoint::upper(cplx(l, o.eta)) : BoundaryPoint::real_limit(l);
    const HerglotzValue ml = m_left(spec, o.n, pt);
    const HerglotzValue mr = m_right(spec, o.n, pt);
    return {l, o.eta, o.n, ml.value.real(), ml.value.imag(), mr.value.real(), mr.value.imag(),
            ml.value.imag() / std::numbers::pi, mr.value.imag() / std::numbers::pi};
  });
  return t;
}

Table green(const Options& o, std::ostream& err) {
  const JacobiSpec spec = load_spec(o);
  const long m = o.m.value_or(o.n);
  if (m != o.n && o.eta > 0.0) throw UsageError("off-diagonal elements are available at real energies only");
  Table t{{"lambda", "eta", "n", "m", "re_G", "im_G"}, {}};
  per_energy(energies(o, spec.background(), err), t, err, [&](double l) -> std::vector<Cell> {
    cplx g;
    if (m == o.n) {
      const auto pt = o.eta > 0.0 ? BoundaryPoint::upper(cplx(l, o.eta)) : BoundaryPoint::real_limit(l);
      g = green_diag(spec, o.n, pt).value;
    } else {
      g = green_offdiag(spec, o.n, m, l);
    }
    return {l, o.eta, o.n, m, g.real(), g.imag()};
  });
  return t;
}

Table scatter(const Options& o, std::ostream& err) {
  const JacobiSpec spec = load_spec(o);
  Table t{{"lambda", "re_sll", "im_sll", "re_slr", "im_slr", "re_srr", "im_srr", "R", "T", "defect"}, {}};
  per_energy(energies(o, spec.background(), err), t, err, [&](double l) -> std::vector<Cell> {
    const ScatteringMatrix s = scattering_matrix(spec, o.n, l);
    const ReflectionTransmission rt = reflection_transmission(s);
    return {l, s.s_ll.real(), s.s_ll.imag(), s.s_lr.real(), s.s_lr.imag(), s.s_rr.real(), s.s_rr.imag(),
            rt.R_l, rt.T, unitarity_defect(s)};
  });
  return t;
}

Table jost(const Options& o, std::ostream& err) {
  const JacobiSpec spec = load_spec(o);
  Table t{{"lambda", "re_alpha", "im_alpha", "re_beta", "im_beta", "R_spectral", "R_from_s", "residual"}, {}};
  per_energy(energies(o, spec.background(), err), t, err, [&](double l) -> std::vector<Cell> {
    const ReflectionDatum d = alpha_beta(spec, l);
    const double r_s = std::norm(scattering_matrix(spec, 0, l).s_rr);
    return {l, d.alpha.real(), d.alpha.imag(), d.beta.real(), d.beta.imag(), spectral_reflection_mratio(spec, l),
            r_s, d.residual};
  });
  return t;
}

std::string verdict(bool reflectionless) { return reflectionless ? "reflectionless" : "not reflectionless"; }

Table reflect_check(const Options& o, std::ostream& err, int& status) {
  const JacobiSpec spec = load_spec(o);
  const auto [first, last] = parse_cuts(o.cuts);
  const std::vector<double> pts = energies(o, spec.background(), err);
  const EnergyGrid grid = make_grid(spec.background(), pts);
  const CriteriaReport report = reflectionless_report(spec, grid, first, last, o.tol);
  for (const DroppedPoint& d : report.dropped)
    err << "note: λ = " << format_number(d.lambda) << " dropped: " << d.reason << "\n";
  if (report.points.empty() && !report.dropped.empty())
    throw Error(ErrorCode::NoOpenChannel, "no grid point lies in the a.c. spectrum");

  Table t{{"lambda", "n", "re_G", "specref_residual", "s_ll_mag", "verdict_mt", "verdict_spec", "verdict_stat",
           "agree"},
          {}};
  for (const PointReport& p : report.points)
    for (const CutSiteRow& r : p.rows)
      t.rows.push_back({p.lambda, r.n, r.re_G, r.specref_residual, r.s_ll_mag, verdict(p.verdict_mt && p.verdict_triple),
                        verdict(p.verdict_spec), verdict(p.verdict_stat), p.agree});

  const auto disagreeing = std::count_if(report.points.begin(), report.points.end(),
                                         [](const PointReport& p) { return !p.agree; });
  err << "points " << report.points.size() << ", dropped " << report.dropped.size() << ", disagreeing "
      << disagreeing << ", residual gap " << (report.residual_gap() ? "held" : "violated") << "\n";
  status = disagreeing > 0 ? kDisagreement : kSuccess;
  return t;
}

Table dynamics(const Options& o, std::ostream& err) {
  const JacobiSpec spec = load_spec(o);
  const std::vector<double> lambdas = energies(o, spec.background(), err);
  Table t{{"lambda0", "dlambda", "N", "t_star", "R_dyn", "T_dyn", "site0_mass", "R_stationary_avg", "abs_error"}, {}};
  for (const DynamicalResult& r : scattering_from_dynamics(spec, lambdas, o.dlambda, o.N))
    t.rows.push_back({r.lambda0, r.dlambda, r.N, r.t_star, r.R_dyn, r.T_dyn, r.site0_mass, r.R_stationary_avg,
                      r.abs_error});
  return t;
}

Table transport(const Options& o) {
  const JacobiSpec spec = load_spec(o);
  const Currents c = landauer_current(spec, o.reservoirs);
  const Reservoirs& r = o.reservoirs;
  return {{"beta_l", "mu_l", "beta_r", "mu_r", "I_charge", "I_energy"},
          {{r.beta_l, r.mu_l, r.beta_r, r.mu_r, c.charge, c.energy}}};
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string to_csv(const Table& table) {
  std::string s;
  for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
  s += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      std::visit(
          [&s](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) s += format_number(v);
            else if constexpr (std::is_same_v<T, long>) s += std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) s += v ? "true" : "false";
            else s += v;
          },
          row[i]);
    }
    s += '\n';
  }
  return s;
}

std::string to_json(const Table& table, std::string_view command) {
  nlohmann::ordered_json doc;
  doc["command"] = std::string(command);
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto& v) { obj[table.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

GridSpec parse_grid(std::string_view text) {
  GridSpec g;
  double* fields[] = {&g.start, &g.stop, &g.step};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument, "grid must be \"start:stop:step\"");
    const auto r = std::from_chars(text.data() + pos, text.data() + end, *fields[i]);
    if (r.ec != std::errc() || r.ptr != text.data() + end)
      throw Error(ErrorCode::InvalidArgument, "bad number in grid \"" + std::string(text) + "\"");
    pos = end + 1;
  }
  return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reflectionless Jacobi operators: m-functions, scattering, dynamics, transport", "reflectionless"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool energies) {
    sub->add_option("--config", o.config, "operator config (JSON); free chain if omitted");
    sub->add_option("--seed", o.seed, "replace the perturbation by a seeded random one");
    sub->add_option("--random-window", o.random_window, "max window length for --seed")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "write the table here (atomically) instead of stdout");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (energies) {
      sub->add_option("--grid", o.grid, "start:stop:step, stop included when within step/2");
      sub->add_option("--lambda", o.lambda, "single energy");
    }
  };

  auto* c_describe = app.add_subcommand("describe", "bands and Floquet discriminant at the edges");
  add_common(c_describe, false);
  auto* c_mfunc = app.add_subcommand("mfunc", "Weyl m-functions at cut site n");
  add_common(c_mfunc, true);
  c_mfunc->add_option("--n", o.n, "cut site");
  c_mfunc->add_option("--eta", o.eta, "evaluate at λ + iη (η > 0) instead of λ + i0");
  auto* c_green = app.add_subcommand("green", "Green's function G_nm(λ + i0)");
  add_common(c_green, true);
  c_green->add_option("--n", o.n, "row site");
  c_green->add_option("--m", o.m, "column site (defaults to n)");
  c_green->add_option("--eta", o.eta, "diagonal only: evaluate at λ + iη");
  auto* c_scatter = app.add_subcommand("scatter", "on-shell scattering matrix at cut site n");
  add_common(c_scatter, true);
  c_scatter->add_option("--n", o.n, "cut site");
  auto* c_jost = app.add_subcommand("jost", "Jost expansion coefficients and reflection probabilities");
  add_common(c_jost, true);
  auto* c_check = app.add_subcommand("reflect-check", "compare the reflectionless criteria on a grid");
  add_common(c_check, true);
  c_check->add_option("--cuts", o.cuts, "cut-site range first:last");
  c_check->add_option("--tol", o.tol, "verdict threshold τ")->check(CLI::PositiveNumber);
  auto* c_dyn = app.add_subcommand("dynamics", "wave-packet scattering on a truncation");
  add_common(c_dyn, true);
  c_dyn->add_option("--dlambda", o.dlambda, "packet energy width")->check(CLI::PositiveNumber);
  c_dyn->add_option("--N", o.N, "truncation sites -N..N")->check(CLI::PositiveNumber);
  auto* c_transport = app.add_subcommand("transport", "Landauer-Büttiker charge and energy currents");
  add_common(c_transport, false);
  c_transport->add_option("--beta-l", o.reservoirs.beta_l, "left inverse temperature");
  c_transport->add_option("--mu-l", o.reservoirs.mu_l, "left chemical potential");
  c_transport->add_option("--beta-r", o.reservoirs.beta_r, "right inverse temperature");
  c_transport->add_option("--mu-r", o.reservoirs.mu_r, "right chemical potential");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  int status = kSuccess;
  try {
    Table table;
    if (sub == c_describe) table = describe(o);
    else if (sub == c_mfunc) table = mfunc(o, err);
    else if (sub == c_green) table = green(o, err);
    else if (sub == c_scatter) table = scatter(o, err);
    else if (sub == c_jost) table = jost(o, err);
    else if (sub == c_check) table = reflect_check(o, err, status);
    else if (sub == c_dyn) table = dynamics(o, err);
    else table = transport(o);

    const std::string text = o.format == "json" ? to_json(table, command) : to_csv(table);
    if (o.out.empty()) out << text;
    else write_atomically(o.out, text);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kInputError : kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return status;
}

}  // namespace refl::cli
