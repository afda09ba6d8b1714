#include "multiport/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "multiport/resolvability.hpp"
#include "multiport/sim.hpp"
#include "multiport/tomography.hpp"
#include "multiport/ttf.hpp"

namespace multiport::cli {

namespace {

std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "";
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::get<std::string>(cell);
}

nlohmann::json cell_to_json(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return nullptr;
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  return std::get<std::string>(cell);
}

struct OutputOptions {
  std::string format = "csv";
  std::string path;  // empty = stdout
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", opts.path, "Write output to a file instead of stdout");
  static std::string config_doc_sink;
  cmd->add_option("--config", config_doc_sink,
                  "Read options from a flat key=value file (flags take precedence)");
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

// Merges a flat key=value config file into the argument list. Keys mirror
// the long flags without the leading dashes; flags given on the command
// line take precedence (config keys already present are skipped).
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot read config file: " + path);
  std::string line;
  while (std::getline(file, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config file line is not key=value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config file line has an empty key");
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) == args.end()) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

void emit(const Table& table, const OutputOptions& opts, std::ostream& out) {
  const auto write = [&](std::ostream& os) {
    if (opts.format == "json") {
      write_json(table, os);
    } else {
      write_csv(table, os);
    }
  };
  if (opts.path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(opts.path);
  if (!file) throw std::runtime_error("cannot open output file: " + opts.path);
  write(file);
}

PortCount parse_ports(const std::string& text) {
  if (text == "inf") return PortCount::infinite();
  return PortCount::finite(parse_int_range(text).at(0));
}

std::vector<PortCount> parse_port_range(const std::string& text) {
  if (text == "inf") return {PortCount::infinite()};
  std::vector<PortCount> out;
  for (long s : parse_int_range(text)) out.push_back(PortCount::finite(s));
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("malformed number: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const long long v = std::stoll(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("malformed integer: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

std::string port_text(const PortCount& s) {
  return s.is_infinite() ? "inf" : std::to_string(s.value());
}

// ---------------------------------------------------------------- ttf sweep

struct TtfArgs {
  std::string d_range;
  std::string s_range;
  std::string eps_range = "0";
  long long mc_samples = 0;
  std::optional<std::uint64_t> seed;
  OutputOptions out;
};

void run_ttf(const TtfArgs& a, std::ostream& os) {
  if (a.mc_samples > 0 && !a.seed) {
    throw CLI::ValidationError("--seed is required when --mc-samples is set "
                               "(stochastic runs take no wall-clock default)");
  }
  Table t;
  t.columns = {"d", "s", "eps", "ttf_closed", "ttf_mc", "mc_se"};
  for (long d : parse_int_range(a.d_range)) {
    for (const PortCount& s : parse_port_range(a.s_range)) {
      for (double eps : parse_real_range(a.eps_range)) {
        DeviceConfig cfg(s, static_cast<int>(d), eps);
        const TtfResult closed = ttf_closed_form(cfg);
        std::vector<Cell> row{static_cast<long long>(d), port_text(s), eps, closed.value,
                              std::monostate{}, std::monostate{}};
        if (a.mc_samples > 0) {
          const AmplitudeMatrix B = s.is_infinite()
                                        ? (eps == 0.0 ? amplitudes_fock(cfg.dim)
                                                      : amplitudes_binomial(cfg.dim, eps))
                                        : amplitudes_finite(cfg);
          const TtfResult mc = ttf_monte_carlo(B, a.mc_samples, *a.seed);
          row[4] = mc.value;
          row[5] = mc.mc->std_error;
        }
        t.rows.push_back(std::move(row));
      }
    }
  }
  emit(t, a.out, os);
}

// ------------------------------------------------------------ phase diagram

struct PhaseArgs {
  long d = 0;
  double mu = kDefaultMuThres;
  std::string eps_range = "0..0.95:0.01";
  OutputOptions out;
};

void run_phase_diagram(const PhaseArgs& a, std::ostream& os) {
  const auto rows = phase_diagram(static_cast<int>(a.d), a.mu,
                                  parse_real_range(a.eps_range));
  Table t;
  t.columns = {"eps", "d_res_numeric", "d_res_bound"};
  for (const auto& r : rows) {
    t.rows.push_back({r.eps, static_cast<long long>(r.d_res_numeric), r.d_res_bound});
  }
  emit(t, a.out, os);
}

// ------------------------------------------------------------- critical eps

struct CriticalArgs {
  std::string d_range;
  std::string s_range = "inf";
  double mu = kDefaultMuThres;
  OutputOptions out;
};

void run_critical_eps(const CriticalArgs& a, std::ostream& os) {
  Table t;
  t.columns = {"d", "s", "eps_crit_exact", "eps_crit_approx"};
  for (long d : parse_int_range(a.d_range)) {
    for (const PortCount& s : parse_port_range(a.s_range)) {
      const double approx = std::atanh(1.0 - 2.0 * a.mu) / static_cast<double>(d);
      Cell exact = std::monostate{};  // empty when no loss is tolerable
      if (s.is_infinite()) {
        exact = critical_eps_infinite(static_cast<int>(d), a.mu).exact;
      } else if (const auto ce = critical_eps_finite(s.value(), static_cast<int>(d), a.mu)) {
        exact = *ce;
      }
      t.rows.push_back({static_cast<long long>(d), port_text(s), exact, approx});
    }
  }
  emit(t, a.out, os);
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  long d = 0;
  std::string s;
  double eps = 0.0;
  std::string rho;
  std::string shots = "100,10000,1000000";
  int trials = 1000;
  std::optional<std::uint64_t> seed;
  OutputOptions out;
};

void run_simulate(const SimulateArgs& a, std::ostream& os) {
  if (!a.seed) {
    throw CLI::ValidationError("--seed is required (stochastic runs take no "
                               "wall-clock default)");
  }
  const PortCount s = parse_ports(a.s);
  DeviceConfig cfg(s, static_cast<int>(a.d), a.eps);
  const AmplitudeMatrix B = s.is_infinite()
                                ? (a.eps == 0.0 ? amplitudes_fock(cfg.dim)
                                                : amplitudes_binomial(cfg.dim, a.eps))
                                : amplitudes_finite(cfg);
  const std::vector<double> rho_vals = parse_real_list(a.rho);
  if (static_cast<long>(rho_vals.size()) != a.d) {
    throw CLI::ValidationError("--rho must list exactly d probabilities");
  }
  PhotonDistribution rho(Eigen::Map<const Vector>(rho_vals.data(), a.d));
  const std::vector<long long> shots = parse_int_list(a.shots);
  const auto rows = crb_saturation_report(B, rho, shots, a.trials, *a.seed);
  Table t;
  t.columns = {"N", "n_mse", "n_mse_se", "crb", "ratio"};
  for (const auto& r : rows) {
    t.rows.push_back({r.shots, r.n_mse, r.n_mse_se, r.crb, r.ratio});
  }
  emit(t, a.out, os);
}

// ---------------------------------------------------------------------- povm

struct PovmArgs {
  long d = 0;
  std::string s;
  double eps = 0.0;
  std::string show = "matrix";
  OutputOptions out;
};

void write_matrix_dump(const Matrix& m, bool column_sums, std::ostream& os) {
  os << "j\\n\n";
  const auto write_row = [&](const auto& row) {
    for (Eigen::Index n = 0; n < row.size(); ++n) {
      if (n > 0) os << ',';
      os << format_double(row(n));
    }
    os << '\n';
  };
  for (Eigen::Index j = 0; j < m.rows(); ++j) write_row(m.row(j));
  if (column_sums) write_row(m.colwise().sum());
}

void run_povm(const PovmArgs& a, std::ostream& os) {
  const PortCount s = parse_ports(a.s);
  DeviceConfig cfg(s, static_cast<int>(a.d), a.eps);
  const AmplitudeMatrix B = s.is_infinite()
                                ? (a.eps == 0.0 ? amplitudes_fock(cfg.dim)
                                                : amplitudes_binomial(cfg.dim, a.eps))
                                : amplitudes_finite(cfg);
  const auto dump_or_json = [&](const Matrix& m, bool sums, const char* key) {
    if (a.out.format == "json") {
      nlohmann::json obj;
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.rows(); ++j) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index n = 0; n < m.cols(); ++n) row.push_back(m(j, n));
        rows.push_back(std::move(row));
      }
      obj[key] = std::move(rows);
      if (sums) {
        nlohmann::json cs = nlohmann::json::array();
        for (Eigen::Index n = 0; n < m.cols(); ++n) cs.push_back(m.col(n).sum());
        obj["column_sums"] = std::move(cs);
      }
      std::ostringstream buf;
      buf << obj.dump(2) << '\n';
      if (a.out.path.empty()) {
        os << buf.str();
      } else {
        std::ofstream file(a.out.path);
        if (!file) throw std::runtime_error("cannot open output file: " + a.out.path);
        file << buf.str();
      }
      return;
    }
    if (a.out.path.empty()) {
      write_matrix_dump(m, sums, os);
    } else {
      std::ofstream file(a.out.path);
      if (!file) throw std::runtime_error("cannot open output file: " + a.out.path);
      write_matrix_dump(m, sums, file);
    }
  };

  if (a.show == "matrix") {
    dump_or_json(B.entries(), true, "matrix");
  } else if (a.show == "traces") {
    Table t;
    t.columns = {"j", "trace"};
    const Vector tr = outcome_traces(B);
    for (Eigen::Index j = 0; j < tr.size(); ++j) {
      t.rows.push_back({static_cast<long long>(j), tr(j)});
    }
    emit(t, a.out, os);
  } else if (a.show == "duals") {
    dump_or_json(canonical_duals(make_povm(B)), false, "duals");
  } else {  // gram-spectrum
    const Matrix gram = B.entries() * B.entries().transpose();
    const Vector evals =
        Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    Table t;
    t.columns = {"index", "eigenvalue", "near_zero"};
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
      t.rows.push_back({static_cast<long long>(i), evals(i),
                        static_cast<long long>(evals(i) < kSingularFrameFloor ? 1 : 0)});
    }
    emit(t, a.out, os);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format_cell(row[c]);
    }
    out << '\n';
  }
}

void write_json(const Table& table, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      obj[table.columns[c]] = cell_to_json(row[c]);
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

std::vector<long> parse_int_range(const std::string& text) {
  const auto dots = text.find("..");
  const auto parse_one = [](const std::string& part) {
    std::size_t pos = 0;
    const long v = std::stol(part, &pos);
    if (pos != part.size()) throw std::invalid_argument("malformed integer: " + part);
    return v;
  };
  if (dots == std::string::npos) return {parse_one(text)};
  const auto colon = text.find(':', dots + 2);
  const long a = parse_one(text.substr(0, dots));
  const long b = parse_one(colon == std::string::npos ? text.substr(dots + 2)
                                                      : text.substr(dots + 2, colon - dots - 2));
  const long step = colon == std::string::npos ? 1 : parse_one(text.substr(colon + 1));
  if (step < 1) throw std::invalid_argument("range step must be >= 1");
  if (b < a) throw std::invalid_argument("range end is below its start: " + text);
  std::vector<long> out;
  for (long v = a; v <= b; v += step) out.push_back(v);
  return out;
}

std::vector<double> parse_real_range(const std::string& text) {
  const auto dots = text.find("..");
  const auto parse_one = [](const std::string& part) {
    std::size_t pos = 0;
    const double v = std::stod(part, &pos);
    if (pos != part.size()) throw std::invalid_argument("malformed number: " + part);
    return v;
  };
  if (dots == std::string::npos) return {parse_one(text)};
  const auto colon = text.find(':', dots + 2);
  if (colon == std::string::npos) {
    throw std::invalid_argument("real range needs an explicit step: " + text);
  }
  const double a = parse_one(text.substr(0, dots));
  const double b = parse_one(text.substr(dots + 2, colon - dots - 2));
  const double step = parse_one(text.substr(colon + 1));
  if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
  if (b < a) throw std::invalid_argument("range end is below its start: " + text);
  std::vector<double> out;
  const long count = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiport photon-number-resolving detector toolkit"};
  app.require_subcommand(1);

  TtfArgs ttf_args;
  auto* ttf_cmd = app.add_subcommand(
      "ttf", "Tomographic transfer function sweep (closed form, optional Monte-Carlo)");
  ttf_cmd->add_option("--d", ttf_args.d_range, "Hilbert-space dimension (value or a..b[:step])")
      ->required();
  ttf_cmd->add_option("--s", ttf_args.s_range, "Output ports ('inf', value, or a..b[:step])")
      ->required();
  ttf_cmd->add_option("--eps", ttf_args.eps_range, "Loss rate (value or a..b:step)")
      ->capture_default_str();
  ttf_cmd->add_option("--mc-samples", ttf_args.mc_samples,
                      "Uniform-simplex Monte-Carlo samples (0 = closed form only)");
  ttf_cmd->add_option("--seed", ttf_args.seed, "Monte-Carlo seed");
  add_output_options(ttf_cmd, ttf_args.out);

  PhaseArgs phase_args;
  auto* phase_cmd = app.add_subcommand("phase-diagram",
                                       "Resolvable-dimension boundary against loss");
  phase_cmd->add_option("--d", phase_args.d, "Hilbert-space dimension")->required();
  phase_cmd->add_option("--mu", phase_args.mu, "Trace threshold")->capture_default_str();
  phase_cmd->add_option("--eps", phase_args.eps_range, "Loss grid (a..b:step)")
      ->capture_default_str();
  add_output_options(phase_cmd, phase_args.out);

  CriticalArgs crit_args;
  auto* crit_cmd = app.add_subcommand("critical-eps",
                                      "Largest tolerable loss rate per dimension");
  crit_cmd->add_option("--d", crit_args.d_range, "Dimension sweep (value or a..b[:step])")
      ->required();
  crit_cmd->add_option("--s", crit_args.s_range, "Output ports ('inf', value, or range)")
      ->capture_default_str();
  crit_cmd->add_option("--mu", crit_args.mu, "Trace threshold")->capture_default_str();
  add_output_options(crit_cmd, crit_args.out);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate",
                                     "Finite-N reconstruction error against the CRB");
  sim_cmd->add_option("--d", sim_args.d, "Hilbert-space dimension")->required();
  sim_cmd->add_option("--s", sim_args.s, "Output ports ('inf' or a value)")->required();
  sim_cmd->add_option("--eps", sim_args.eps, "Loss rate")->capture_default_str();
  sim_cmd->add_option("--rho", sim_args.rho, "True distribution, comma separated")->required();
  sim_cmd->add_option("--shots", sim_args.shots, "Shot counts N, comma separated")
      ->capture_default_str();
  sim_cmd->add_option("--trials", sim_args.trials, "Trials per shot count")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Sampling seed");
  add_output_options(sim_cmd, sim_args.out);

  PovmArgs povm_args;
  auto* povm_cmd = app.add_subcommand("povm", "Dump device objects");
  povm_cmd->add_option("--d", povm_args.d, "Hilbert-space dimension")->required();
  povm_cmd->add_option("--s", povm_args.s, "Output ports ('inf' or a value)")->required();
  povm_cmd->add_option("--eps", povm_args.eps, "Loss rate")->capture_default_str();
  povm_cmd->add_option("--show", povm_args.show, "Which object to dump")
      ->check(CLI::IsMember({"matrix", "traces", "duals", "gram-spectrum"}))
      ->capture_default_str();
  add_output_options(povm_cmd, povm_args.out);

  try {
    const std::vector<std::string> merged = apply_config_file(args);
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
    if (*ttf_cmd) run_ttf(ttf_args, out);
    if (*phase_cmd) run_phase_diagram(phase_args, out);
    if (*crit_cmd) run_critical_eps(crit_args, out);
    if (*sim_cmd) run_simulate(sim_args, out);
    if (*povm_cmd) run_povm(povm_args, out);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const NonIcError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const BoundaryError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << '\n';
    return kExitEnvelope;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace multiport::cli
