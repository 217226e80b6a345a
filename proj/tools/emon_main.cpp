#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "emon/berezin.hpp"
#include "emon/classical.hpp"
#include "emon/coherent.hpp"
#include "emon/errors.hpp"
#include "emon/fockspace.hpp"
#include "emon/hardware.hpp"
#include "emon/models.hpp"
#include "emon/noise.hpp"
#include "emon/report.hpp"
#include "emon/spectra.hpp"

namespace fs = std::filesystem;
using emon::ConfigError;
using emon::Json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ----- option registry: one declaration drives flag, config key, and echo -----

class Binder {
 public:
  explicit Binder(CLI::App* cmd) : cmd_(cmd) {}

  template <typename T>
  void add(const std::string& key, T* value, const std::string& help) {
    CLI::Option* opt = cmd_->add_option("--" + key, *value, help);
    entries_.push_back(
        {key, opt, [value](const Json& j) { *value = j.get<T>(); },
         [value] { return Json(*value); }});
  }

  void add_flag(const std::string& key, bool* value, const std::string& help) {
    CLI::Option* opt = cmd_->add_flag("--" + key, *value, help);
    entries_.push_back(
        {key, opt, [value](const Json& j) { *value = j.get<bool>(); },
         [value] { return Json(*value); }});
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  // Config values fill in options the command line left untouched.
  void apply_one(const std::string& key, const Json& value) const {
    const Entry* entry = find(key);
    if (!entry) throw ConfigError("unknown config key: " + key);
    if (entry->opt->count() > 0) return;
    try {
      entry->set(value);
    } catch (const Json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  void apply(const Json& section) const {
    for (const auto& item : section.items()) apply_one(item.key(), item.value());
  }

  Json resolved() const {
    Json out = Json::object();
    for (const auto& entry : entries_) out[entry.key] = entry.get();
    return out;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const Json&)> set;
    std::function<Json()> get;
  };

  const Entry* find(const std::string& key) const {
    for (const auto& entry : entries_)
      if (entry.key == key) return &entry;
    return nullptr;
  }

  CLI::App* cmd_;
  std::vector<Entry> entries_;
};

struct Common {
  std::string config_path;
  std::string output = ".";
  std::uint64_t seed = 1;
  int jobs = 0;
  bool dry_run = false;

  int effective_jobs() const {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
  }
  fs::path out_path(const std::string& file) const {
    return fs::path(output) / file;
  }
};

// ----- small parsers -----

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ','))
    if (!token.empty()) out.push_back(std::stoll(token));
  if (out.empty()) throw ConfigError("empty integer list: '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ','))
    if (!token.empty()) out.push_back(std::stod(token));
  if (out.empty()) throw ConfigError("empty number list: '" + text + "'");
  return out;
}

// "start:step:stop", a comma list, or a single value.
std::vector<std::int64_t> parse_d_range(const std::string& text) {
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) return parse_int_list(text);
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw ConfigError("d range needs start:step:stop, got '" + text + "'");
  const std::int64_t start = std::stoll(text.substr(0, c1));
  const std::int64_t step = std::stoll(text.substr(c1 + 1, c2 - c1 - 1));
  const std::int64_t stop = std::stoll(text.substr(c2 + 1));
  if (step <= 0) throw ConfigError("d range step must be positive");
  std::vector<std::int64_t> out;
  for (std::int64_t d = start; d <= stop; d += step) out.push_back(d);
  if (out.empty()) throw ConfigError("d range '" + text + "' is empty");
  return out;
}

Json spinor_json(const emon::Spinor& psi) {
  Json out = Json::array();
  for (int j = 0; j < 4; ++j)
    out.push_back({psi(j).real(), psi(j).imag()});
  return out;
}

Json chart_json(const emon::BlochCoordinates& c) {
  return Json{{"theta_s", c.theta_s}, {"phi_s", c.phi_s},
              {"theta_p", c.theta_p}, {"phi_p", c.phi_p},
              {"alpha", c.alpha},     {"beta", c.beta}};
}

Json bloch_json(const emon::Spinor& psi) {
  Eigen::Vector3d spin, pseudo;
  emon::bloch_vectors(psi, spin, pseudo);
  return Json{{"spin", {spin.x(), spin.y(), spin.z()}},
              {"pseudo", {pseudo.x(), pseudo.y(), pseudo.z()}}};
}

Json site_json(const emon::Spinor& raw) {
  const emon::Spinor snapped = emon::snap_spinor(raw);
  Json out;
  out["spinor"] = spinor_json(raw);
  out["chart"] = chart_json(emon::schmidt_decompose(snapped).angles);
  out["bloch"] = bloch_json(raw);
  return out;
}

double wrap_two_pi(double x) {
  x = std::fmod(x, 2.0 * kPi);
  return x < 0.0 ? x + 2.0 * kPi : x;
}

emon::ModelKind parse_model(const std::string& name) {
  if (name == "hq0") return emon::ModelKind::hq0;
  if (name == "hq1") return emon::ModelKind::hq1;
  throw ConfigError("model must be hq0 or hq1, got '" + name + "'");
}

// ----- command option structs -----

struct BasisOpts {
  std::int64_t d = 8;
  int modes = 4;
};

struct SpectrumOpts {
  std::string model = "hq0";
  double up = 2.0, uz = 0.7, delta = 1.0, v = 1.0;
  std::int64_t d = 8;
  int k = 4;
};

struct SemiclassicalOpts {
  double up = 2.0, uz = 0.7, delta = 1.0;
  std::int64_t d = 12;
  bool compare = false;
};

struct NoiseOpts {
  std::string model = "hq0";
  double up = 2.0, uz = 0.7, delta = 1.0, v = 1.0;
  std::int64_t d = 8;
  std::string policy = "auto";
};

struct SweepOpts {
  std::string model = "hq1";
  double up = 2.0, uz = 0.7, delta = 0.5, v = 0.5;
  std::string d_range = "4:2:10";
};

struct CoherentOpts {
  double up = 2.0, uz = 0.7, delta = 1.0;
  std::string d_list = "2,4,8,16";
  double theta_s = 0.9, phi_s = 0.4, theta_p = 1.3, phi_p = 2.1;
  double alpha = 0.8, beta = 0.6;
};

struct BerryOpts {
  double alpha = kPi / 3.0;
  std::int64_t d = 6;
  int steps = 256;
};

struct QuantizeOpts {
  int n = 3;
  std::string d_list = "4,8,16,32";
  int samples = 6;
};

struct ClassicalMinOpts {
  double up = 2.0, uz = 0.7, delta = 1.0, v = 1.0;
  std::string functional = "base";
  int restarts = 20;
};

struct TwoSiteOpts {
  double up = 2.0, uz = 0.7, delta_a = 0.5, lambda = 1.0;
  int restarts = 20;
};

struct SymplecticOpts {
  double theta_s = kPi / 4.0, phi_s = 0.3, theta_p = kPi / 4.0, phi_p = 1.1;
  double alpha = kPi / 3.0, beta = 0.7;
  double h = 1e-5;
};

struct SkyrmionOpts {
  std::string texture;
  std::string demo;
  int n = 96;
  double radius = 1.0;
};

struct HeffOpts {
  int n = 3;
  double e_flip = 1.0, e_phase = 1.0;
};

struct IonOpts {
  int n = 2;
  double gamma = 1.0, nu = 1.0;
};

struct NoiseOrderOpts {
  int n = 3;
  int k_max = 0;  // 0: twice the rung count
};

struct DephasingOpts {
  int n = 2;
  double e_flip = 1.0, e_phase = 1.0;
  std::string probe = "paired-z";
  std::string eps_list = "0.01,0.02,0.04";
};

// ----- command implementations -----

void run_basis(const BasisOpts& o, const Common& c, const Json& cfg) {
  const emon::FockBasis basis = emon::FockBasis::enumerate(o.modes, o.d);
  Json payload;
  payload["dimension"] = basis.dim();
  payload["closed_form"] = emon::FockBasis::dimension(o.modes, o.d);
  Json sample = Json::array();
  const std::size_t head = std::min<std::size_t>(3, basis.dim());
  for (std::size_t i = 0; i < head; ++i) sample.push_back(basis.state(i));
  if (basis.dim() > 6) sample.push_back("...");
  for (std::size_t i = basis.dim() > 6 ? basis.dim() - 3 : head;
       i < basis.dim(); ++i)
    sample.push_back(basis.state(i));
  payload["states_sample"] = sample;
  emon::write_json_report(payload, cfg, c.out_path("basis.json").string());
}

void run_spectrum(const SpectrumOpts& o, const Common& c, const Json& cfg) {
  const emon::ModelKind kind = parse_model(o.model);
  const emon::ModelParams p{o.up, o.uz, o.delta, o.v};
  const emon::FockBasis basis = emon::FockBasis::enumerate(4, o.d);
  emon::CsvTable table;
  Json payload;
  payload["dimension"] = basis.dim();
  double e0 = std::numeric_limits<double>::infinity();
  int sectors = 0;
  if (kind == emon::ModelKind::hq0) {
    const emon::CooMatrix h = emon::build_hq0(basis, p);
    const auto decomposition = emon::sector_decompose(
        h, basis,
        {{"q1", emon::charge_q1(basis)}, {"q2", emon::charge_q2(basis)}});
    table.columns = {"q1", "q2", "level", "energy"};
    for (const auto& sector : decomposition) {
      if (sector.labels[1] != 0) continue;  // qubit slice keeps n2 = n3
      ++sectors;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          emon::restrict_to(h, sector.indices));
      const int levels =
          std::min<int>(o.k, static_cast<int>(sector.indices.size()));
      for (int m = 0; m < levels; ++m) {
        const double e = es.eigenvalues()(m);
        e0 = std::min(e0, e);
        table.rows.push_back({std::to_string(sector.labels[0]),
                              std::to_string(sector.labels[1]),
                              std::to_string(m), emon::format_number(e)});
      }
    }
  } else {
    const emon::CooMatrix h = emon::build_hq1(basis, p);
    const auto decomposition = emon::sector_decompose(
        h, basis, {{"parity", emon::parity_pi(basis)}});
    table.columns = {"parity", "level", "energy"};
    for (const auto& sector : decomposition) {
      ++sectors;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          emon::restrict_to(h, sector.indices));
      const int levels =
          std::min<int>(o.k, static_cast<int>(sector.indices.size()));
      for (int m = 0; m < levels; ++m) {
        const double e = es.eigenvalues()(m);
        e0 = std::min(e0, e);
        table.rows.push_back({std::to_string(sector.labels[0]),
                              std::to_string(m), emon::format_number(e)});
      }
    }
  }
  emon::write_csv(table, c.out_path("spectrum.csv").string());
  payload["sectors"] = sectors;
  payload["ground_energy"] = e0;
  payload["rows"] = table.rows.size();
  emon::write_json_report(payload, cfg, c.out_path("spectrum.json").string());
}

void run_semiclassical(const SemiclassicalOpts& o, const Common& c,
                       const Json& cfg) {
  const emon::ModelParams p{o.up, o.uz, o.delta, 0.0};
  std::vector<std::int64_t> q1_list;
  for (std::int64_t q1 = -o.d; q1 <= o.d; ++q1)
    if ((o.d - q1) % 2 == 0) q1_list.push_back(q1);
  const auto rows = emon::semiclassical_spectrum(p, o.d, q1_list);

  emon::CsvTable table;
  if (o.compare) {
    const emon::FockBasis basis = emon::FockBasis::enumerate(4, o.d);
    std::map<std::int64_t, emon::BranchRow> branch;
    for (const auto& row : emon::charge_branch(basis, p)) branch[row.q1] = row;
    table.columns = {"q1", "omega_x", "omega_y", "e_top", "e_exact",
                     "sector_dim"};
    for (const auto& row : rows) {
      const auto& b = branch.at(row.q1);
      table.rows.push_back(
          {std::to_string(row.q1), emon::format_number(row.omega_x),
           emon::format_number(row.omega_y), emon::format_number(row.e_top),
           emon::format_number(b.e_exact), std::to_string(b.sector_dim)});
    }
  } else {
    table.columns = {"q1", "omega_x", "omega_y", "e_top"};
    for (const auto& row : rows)
      table.rows.push_back(
          {std::to_string(row.q1), emon::format_number(row.omega_x),
           emon::format_number(row.omega_y), emon::format_number(row.e_top)});
  }
  emon::write_csv(table, c.out_path("semiclassical.csv").string());
  Json payload;
  payload["continuum_min_q1"] = emon::semiclassical_minimum_q1(p, o.d);
  payload["rows"] = table.rows.size();
  emon::write_json_report(payload, cfg,
                          c.out_path("semiclassical.json").string());
}

emon::DoubletPolicy resolve_policy(const std::string& policy,
                                   emon::ModelKind kind) {
  if (policy == "auto")
    return kind == emon::ModelKind::hq0 ? emon::DoubletPolicy::charge_restricted
                                        : emon::DoubletPolicy::parity_resolved;
  if (policy == "plain") return emon::DoubletPolicy::plain;
  if (policy == "charge") return emon::DoubletPolicy::charge_restricted;
  if (policy == "parity") return emon::DoubletPolicy::parity_resolved;
  throw ConfigError("policy must be auto|plain|charge|parity, got '" + policy +
                    "'");
}

Json labels_json(const emon::DoubletLabels& l) {
  return Json{{"q1", l.q1}, {"q2", l.q2}, {"parity", l.parity}, {"g", l.g}};
}

void run_noise_report(const NoiseOpts& o, const Common& c, const Json& cfg) {
  const emon::ModelKind kind = parse_model(o.model);
  const emon::ModelParams p{o.up, o.uz, o.delta, o.v};
  const emon::FockBasis basis = emon::FockBasis::enumerate(4, o.d);
  const emon::CooMatrix h = kind == emon::ModelKind::hq0
                                ? emon::build_hq0(basis, p)
                                : emon::build_hq1(basis, p);
  const auto report =
      emon::noise_report(h, basis, p, resolve_policy(o.policy, kind));
  Json payload;
  payload["d"] = report.d;
  payload["e0"] = report.e0;
  payload["e1"] = report.e1;
  payload["gap01"] = report.gap01;
  payload["gap12"] = report.gap12;
  Json depol = Json::object(), deph = Json::object();
  for (std::size_t k = 0; k < emon::kNoiseOperatorNames.size(); ++k) {
    depol[emon::kNoiseOperatorNames[k]] = report.depolarization[k];
    deph[emon::kNoiseOperatorNames[k]] = report.dephasing[k];
  }
  payload["depolarization"] = depol;
  payload["dephasing"] = deph;
  payload["max_depolarization"] = emon::max_depolarization(report);
  payload["max_dephasing"] = emon::max_dephasing(report);
  payload["labels0"] = labels_json(report.labels0);
  payload["labels1"] = labels_json(report.labels1);
  emon::write_json_report(payload, cfg,
                          c.out_path("noise_report.json").string());
}

void run_sweep_d(const SweepOpts& o, const Common& c, const Json& cfg) {
  const emon::ModelKind kind = parse_model(o.model);
  const emon::ModelParams p{o.up, o.uz, o.delta, o.v};
  const auto d_values = parse_d_range(o.d_range);
  const auto table =
      emon::sweep_d(kind, p, d_values, c.effective_jobs());
  emon::CsvTable csv;
  csv.columns = {"d", "gap01", "gap12", "depol_max", "deph_max"};
  for (const auto& row : table.rows)
    csv.rows.push_back({std::to_string(row.d), emon::format_number(row.gap01),
                        emon::format_number(row.gap12),
                        emon::format_number(row.depol_max),
                        emon::format_number(row.deph_max)});
  emon::write_csv(csv, c.out_path("sweep_d.csv").string());
  Json payload;
  payload["rows"] = table.rows.size();
  try {
    const auto fit = emon::fit_log_gap(table);
    payload["fit"] = Json{{"slope", fit.slope},
                          {"intercept", fit.intercept},
                          {"r2", fit.r2},
                          {"used", fit.used},
                          {"skipped", fit.skipped}};
  } catch (const std::exception& e) {
    payload["fit"] = nullptr;
    payload["fit_error"] = e.what();
  }
  emon::write_json_report(payload, cfg, c.out_path("sweep_d.json").string());
}

void run_coherent_check(const CoherentOpts& o, const Common& c,
                        const Json& cfg) {
  const emon::ModelParams p{o.up, o.uz, o.delta, 0.0};
  const emon::Spinor psi = emon::compose(
      {o.theta_s, o.phi_s, o.theta_p, o.phi_p, o.alpha, o.beta});
  const auto rows = emon::covariant_symbol_check(p, psi, parse_int_list(o.d_list));
  emon::CsvTable table;
  table.columns = {"d", "quantum", "classical", "deviation"};
  for (const auto& row : rows)
    table.rows.push_back({std::to_string(row.d),
                          emon::format_number(row.quantum),
                          emon::format_number(row.classical),
                          emon::format_number(row.deviation)});
  emon::write_csv(table, c.out_path("coherent_check.csv").string());
  Json payload;
  payload["classical"] = rows.empty() ? 0.0 : rows.front().classical;
  payload["final_deviation"] = rows.empty() ? 0.0 : rows.back().deviation;
  emon::write_json_report(payload, cfg,
                          c.out_path("coherent_check.json").string());
}

void run_berry(const BerryOpts& o, const Common& c, const Json& cfg) {
  const auto result = emon::berry_phase_loop(o.alpha, o.d, o.steps);
  Json payload;
  payload["phase"] = result.phase;
  payload["expected"] = result.expected;
  payload["deviation"] = result.deviation;
  emon::write_json_report(payload, cfg, c.out_path("berry.json").string());
}

void run_quantize(const QuantizeOpts& o, const Common& c, const Json& cfg) {
  if (o.n < 2) throw ConfigError("quantize: need n >= 2 chart coordinates");
  const auto d_values = parse_int_list(o.d_list);
  const std::vector<std::pair<std::string, emon::MonomialSymbol>> rows = {
      {"v", emon::sym_v(1)},
      {"vbar", emon::sym_vbar(1)},
      {"v_vbar", emon::sym_v_vbar(1, 2)},
      {"vv", emon::sym_vv(1, 2)},
      {"vbar_vbar", emon::sym_vbar_vbar(1, 2)}};
  emon::CsvTable table;
  table.columns = {"symbol", "d", "max_deviation"};
  double final_worst = 0.0;
  for (const auto& [name, sym] : rows) {
    const auto checks =
        emon::validate_dictionary(sym, o.n, d_values, o.samples, c.seed);
    for (const auto& check : checks) {
      table.rows.push_back({name, std::to_string(check.d),
                            emon::format_number(check.max_deviation)});
      if (check.d == d_values.back())
        final_worst = std::max(final_worst, check.max_deviation);
    }
  }
  emon::write_csv(table, c.out_path("quantize.csv").string());
  Json payload;
  payload["final_worst_deviation"] = final_worst;
  payload["symbols"] = rows.size();
  emon::write_json_report(payload, cfg, c.out_path("quantize.json").string());
}

void run_classical_min(const ClassicalMinOpts& o, const Common& c,
                       const Json& cfg) {
  emon::ClassicalFunctional functional;
  if (o.functional == "base")
    functional = emon::ClassicalFunctional::base;
  else if (o.functional == "z2")
    functional = emon::ClassicalFunctional::z2;
  else
    throw ConfigError("functional must be base or z2, got '" + o.functional +
                      "'");
  const emon::ModelParams p{o.up, o.uz, o.delta, o.v};
  const auto result = emon::minimize_cp3(p, functional, o.restarts, c.seed);
  Json payload;
  payload["energy"] = result.energy;
  payload["gradient_norm"] = result.gradient_norm;
  payload["converged"] = result.converged;
  payload["zero_modes"] = result.zero_modes;
  Json eigs = Json::array();
  for (int m = 0; m < result.hessian_eigenvalues.size(); ++m)
    eigs.push_back(result.hessian_eigenvalues(m));
  payload["hessian_eigenvalues"] = eigs;
  payload["site"] = site_json(result.spinors[0]);
  payload["sxpx"] = emon::sxpx_expectation(result.spinors[0]);
  Json restart_energies = Json::array();
  for (const auto& r : result.restarts) restart_energies.push_back(r.energy);
  payload["restart_energies"] = restart_energies;
  emon::write_json_report(payload, cfg,
                          c.out_path("classical_min.json").string());
}

void run_two_site(const TwoSiteOpts& o, const Common& c, const Json& cfg) {
  const emon::TwoSiteParams p{o.up, o.uz, o.delta_a, o.lambda};
  const auto result = emon::two_site_minimize(p, o.restarts, c.seed);
  Json payload;
  payload["energy"] = result.energy;
  payload["gradient_norm"] = result.gradient_norm;
  payload["converged"] = result.converged;
  payload["zero_modes"] = result.zero_modes;
  Json eigs = Json::array();
  for (int m = 0; m < result.hessian_eigenvalues.size(); ++m)
    eigs.push_back(result.hessian_eigenvalues(m));
  payload["hessian_eigenvalues"] = eigs;
  payload["site_a"] = site_json(result.spinors[0]);
  payload["site_b"] = site_json(result.spinors[1]);
  const double beta_a =
      emon::schmidt_decompose(emon::snap_spinor(result.spinors[0])).angles.beta;
  const double beta_b =
      emon::schmidt_decompose(emon::snap_spinor(result.spinors[1])).angles.beta;
  payload["beta_sum_mod_2pi"] = wrap_two_pi(beta_a + beta_b);
  Eigen::Vector3d spin_a, pseudo_a, spin_b, pseudo_b;
  emon::bloch_vectors(result.spinors[0], spin_a, pseudo_a);
  emon::bloch_vectors(result.spinors[1], spin_b, pseudo_b);
  payload["anti_aligned"] = spin_a.z() * spin_b.z() < 0.0 &&
                            pseudo_a.z() * pseudo_b.z() < 0.0;
  Json restart_energies = Json::array();
  for (const auto& r : result.restarts) restart_energies.push_back(r.energy);
  payload["restart_energies"] = restart_energies;
  emon::write_json_report(payload, cfg, c.out_path("two_site.json").string());
}

void run_symplectic(const SymplecticOpts& o, const Common& c, const Json& cfg) {
  const emon::BlochCoordinates point{o.theta_s, o.phi_s, o.theta_p,
                                     o.phi_p,   o.alpha, o.beta};
  const auto check = emon::symplectic_generator_check(point, o.h);
  Json payload;
  payload["residual"] = check.residual;
  Json omega = Json::array();
  for (int i = 0; i < 6; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 6; ++j) row.push_back(check.omega(i, j));
    omega.push_back(row);
  }
  payload["omega"] = omega;
  Json contraction = Json::array(), dg = Json::array();
  for (int i = 0; i < 6; ++i) {
    contraction.push_back(check.contraction(i));
    dg.push_back(check.d_generator(i));
  }
  payload["contraction"] = contraction;
  payload["d_generator"] = dg;
  payload["omega_alpha_beta"] = check.omega(4, 5);
  payload["half_sin_alpha"] = 0.5 * std::sin(o.alpha);
  emon::write_json_report(payload, cfg,
                          c.out_path("symplectic_check.json").string());
}

emon::TextureField demo_field(const std::string& name, double radius) {
  const auto window = [radius](double r) {
    const double x = r / radius;
    return (1.0 - x * x) * (1.0 - x * x);
  };
  if (name == "hedgehog")
    return [radius](double r, double phi) {
      const double f = 2.0 * std::atan((radius / 6.0) / r);
      return std::array<double, 6>{f, phi, f, phi, f, 2.0 * phi + 0.8};
    };
  if (name == "radial")
    return [radius, window](double r, double) {
      const double x = r / radius, w = window(r);
      return std::array<double, 6>{kPi * w * x,  0.7 * w * x, 2.2 * w * x * x,
                                   1.3 * w * x, 2.0 * w * x, 2.0 * w * x};
    };
  if (name == "winding")
    return [radius, window](double r, double phi) {
      const double x = r / radius, w = window(r);
      return std::array<double, 6>{2.6 * w * x, 0.0, 1.9 * w * x,
                                   0.0,         1.2 * w * x, phi + 0.35};
    };
  if (name == "asymmetric")
    return [radius, window](double r, double phi) {
      const double x = r / radius, w = window(r);
      return std::array<double, 6>{kPi * w * x, 0.0, 2.0 * w * x, 0.0,
                                   1.5 * w * x, 0.6 + 0.4 * std::sin(phi)};
    };
  throw ConfigError(
      "demo must be hedgehog|radial|winding|asymmetric, got '" + name + "'");
}

void run_skyrmion(const SkyrmionOpts& o, const Common& c, const Json& cfg) {
  if (o.texture.empty() == o.demo.empty())
    throw ConfigError("skyrmion-check needs exactly one of --texture, --demo");
  emon::TextureGrid grid;
  if (!o.texture.empty()) {
    grid = emon::read_texture_csv(o.texture);
  } else {
    grid = emon::make_texture(o.n, o.n, o.radius, demo_field(o.demo, o.radius));
    emon::write_texture_csv(
        grid, c.out_path("texture_" + o.demo + ".csv").string());
  }
  const auto result = emon::skyrmion_z_integral(grid);
  Json payload;
  payload["re_z"] = result.re_z;
  payload["im_z"] = result.im_z;
  payload["error_estimate"] = result.error_estimate;
  payload["refined"] = result.refined;
  payload["boundary_ok"] = result.boundary_ok;
  payload["boundary_max"] = grid.boundary_max();
  payload["grid"] = Json{{"n_r", grid.n_r},
                         {"n_phi", grid.n_phi},
                         {"radius", grid.radius}};
  emon::write_json_report(payload, cfg,
                          c.out_path("skyrmion_check.json").string());
}

void run_hardware_heff(const HeffOpts& o, const Common& c, const Json& cfg) {
  const emon::LadderParams p{o.n, o.e_flip, o.e_phase};
  const emon::CooMatrix h = emon::build_ladder_heff(p);
  emon::EigOptions eig_opts;
  eig_opts.k = 4;
  eig_opts.seed = c.seed;
  const auto eig = emon::eig_hermitian(h, eig_opts);
  Json payload;
  payload["dim"] = h.dim();
  Json levels = Json::array();
  for (int m = 0; m < eig.values.size(); ++m) levels.push_back(eig.values(m));
  payload["levels"] = levels;
  payload["gap01"] = eig.values(1) - eig.values(0);
  payload["gap12"] = eig.values(2) - eig.values(1);
  payload["method"] = eig.method;
  const double closed = -o.n * o.e_flip - o.e_phase * o.n * (o.n - 1);
  payload["sector_ground_energy"] = closed;
  const Eigen::VectorXcd tp = emon::ladder_tplus(o.n);
  const Eigen::VectorXcd tm = emon::ladder_tminus(o.n);
  payload["tplus_energy"] = h.matrix_element(tp, tp).real();
  payload["tminus_energy"] = h.matrix_element(tm, tm).real();
  emon::write_json_report(payload, cfg,
                          c.out_path("hardware_heff.json").string());
}

void run_hardware_ion(const IonOpts& o, const Common& c, const Json& cfg) {
  const emon::IonModelParams p{o.n, o.gamma, o.nu};
  const emon::CooMatrix h = emon::build_ion_interaction(p);
  emon::EigOptions eig_opts;
  eig_opts.k = std::min<int>(6, static_cast<int>(h.dim()));
  eig_opts.seed = c.seed;
  const auto eig = emon::eig_hermitian(h, eig_opts);
  Json payload;
  payload["dim"] = h.dim();
  Json levels = Json::array();
  for (int m = 0; m < eig.values.size(); ++m) levels.push_back(eig.values(m));
  payload["levels"] = levels;
  int degeneracy = 0;
  for (int m = 0; m < eig.values.size(); ++m)
    if (eig.values(m) < eig.values(0) + 1e-9) ++degeneracy;
  payload["ground_degeneracy"] = degeneracy;
  payload["gap_above_doublet"] =
      degeneracy < eig.values.size() ? eig.values(degeneracy) - eig.values(0)
                                     : 0.0;
  emon::write_json_report(payload, cfg,
                          c.out_path("hardware_ion.json").string());
}

void run_hardware_noise_order(const NoiseOrderOpts& o, const Common& c,
                              const Json& cfg) {
  if (o.n < 2 || o.n > 7)
    throw ConfigError("hardware-noise-order: n must be in 2..7");
  const int slots = 2 * o.n;
  emon::CooMatrix v = emon::CooMatrix::zero(std::int64_t{1} << slots);
  for (int i = 0; i < o.n; ++i)
    v = v + emon::pauli_word_matrix(
                emon::pauli_letter(slots, emon::ladder_slot(i, false), 'X'));
  const int k_max = o.k_max > 0 ? o.k_max : 2 * o.n;
  const auto order = emon::noise_order_probe(v, emon::ladder_tplus(o.n),
                                             emon::ladder_tminus(o.n), k_max);
  Json payload;
  payload["k_max"] = k_max;
  payload["connects"] = order.has_value();
  payload["order"] = order ? Json(*order) : Json(nullptr);
  emon::write_json_report(payload, cfg,
                          c.out_path("hardware_noise_order.json").string());
}

void run_hardware_dephasing(const DephasingOpts& o, const Common& c,
                            const Json& cfg) {
  const emon::LadderParams p{o.n, o.e_flip, o.e_phase};
  const emon::CooMatrix probe = [&]() -> emon::CooMatrix {
    if (o.probe == "paired-z") {
      const int slots = 2 * o.n;
      return emon::pauli_word_matrix(
                 emon::pauli_letter(slots, emon::ladder_slot(0, false), 'Z')) +
             emon::pauli_word_matrix(
                 emon::pauli_letter(slots, emon::ladder_slot(0, true), 'Z'));
    }
    if (o.probe == "tau") return emon::tau_operator(o.n, 0);
    throw ConfigError("probe must be paired-z or tau, got '" + o.probe + "'");
  }();
  const auto fit =
      emon::dephasing_scaling_probe(p, parse_double_list(o.eps_list), probe);
  Json payload;
  payload["exponent"] = fit.exponent;
  payload["epsilons"] = fit.epsilons;
  payload["splittings"] = fit.splittings;
  payload["excluded"] = fit.excluded;
  emon::write_json_report(payload, cfg,
                          c.out_path("hardware_dephasing.json").string());
}

// ----- config plumbing -----

struct CommandEntry {
  CLI::App* cmd = nullptr;
  Binder* binder = nullptr;
  std::vector<std::string> artifacts;
  std::function<void(const Common&, const Json&)> run;
};

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json cfg;
  try {
    in >> cfg;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config root must be an object");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for constrained-boson qubit models: exact "
      "spectra, noise-protection reports, coherent-state checks, classical "
      "limits, and hardware-embedding probes."};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path,
                 "JSON config file; command-line flags take precedence");
  app.add_option("--output", common.output, "directory for report artifacts");
  app.add_option("--seed", common.seed, "random seed for stochastic steps");
  app.add_option("--jobs", common.jobs,
                 "worker threads for sweeps (0 = all processors)");
  app.add_flag("--dry-run", common.dry_run,
               "validate the config and print the resolved plan");

  std::vector<CommandEntry> commands;
  std::vector<std::unique_ptr<Binder>> binders;
  const auto register_command =
      [&](const std::string& name, const std::string& help,
          const std::vector<std::string>& artifacts,
          const std::function<void(Binder&)>& bind,
          std::function<void(const Common&, const Json&)> run) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->fallthrough();
        binders.push_back(std::make_unique<Binder>(cmd));
        bind(*binders.back());
        commands.push_back({cmd, binders.back().get(), artifacts, std::move(run)});
      };

  static BasisOpts basis_opts;
  register_command(
      "basis", "enumerate the fixed-total boson basis", {"basis.json"},
      [](Binder& b) {
        b.add("d", &basis_opts.d, "total boson number");
        b.add("modes", &basis_opts.modes, "mode count");
      },
      [](const Common& c, const Json& cfg) { run_basis(basis_opts, c, cfg); });

  static SpectrumOpts spectrum_opts;
  register_command(
      "spectrum", "sector-resolved low-lying spectrum",
      {"spectrum.csv", "spectrum.json"},
      [](Binder& b) {
        b.add("model", &spectrum_opts.model, "hq0 or hq1");
        b.add("up", &spectrum_opts.up, "pairing coupling u_p");
        b.add("uz", &spectrum_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta", &spectrum_opts.delta, "detuning delta");
        b.add("v", &spectrum_opts.v, "exchange-squared weight (hq1)");
        b.add("d", &spectrum_opts.d, "total boson number");
        b.add("k", &spectrum_opts.k, "levels per sector");
      },
      [](const Common& c, const Json& cfg) {
        run_spectrum(spectrum_opts, c, cfg);
      });

  static SemiclassicalOpts semiclassical_opts;
  register_command(
      "semiclassical", "well frequencies and bottoms per charge sector",
      {"semiclassical.csv", "semiclassical.json"},
      [](Binder& b) {
        b.add("up", &semiclassical_opts.up, "pairing coupling u_p");
        b.add("uz", &semiclassical_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta", &semiclassical_opts.delta, "detuning delta");
        b.add("d", &semiclassical_opts.d, "total boson number");
        b.add_flag("compare", &semiclassical_opts.compare,
                   "add exact sector minima");
      },
      [](const Common& c, const Json& cfg) {
        run_semiclassical(semiclassical_opts, c, cfg);
      });

  static NoiseOpts noise_opts;
  register_command(
      "noise-report", "doublet matrix elements of the collective operators",
      {"noise_report.json"},
      [](Binder& b) {
        b.add("model", &noise_opts.model, "hq0 or hq1");
        b.add("up", &noise_opts.up, "pairing coupling u_p");
        b.add("uz", &noise_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta", &noise_opts.delta, "detuning delta");
        b.add("v", &noise_opts.v, "exchange-squared weight (hq1)");
        b.add("d", &noise_opts.d, "total boson number");
        b.add("policy", &noise_opts.policy,
              "doublet identification: auto|plain|charge|parity");
      },
      [](const Common& c, const Json& cfg) {
        run_noise_report(noise_opts, c, cfg);
      });

  static SweepOpts sweep_opts;
  register_command(
      "sweep-d", "gaps and noise figures against the boson number",
      {"sweep_d.csv", "sweep_d.json"},
      [](Binder& b) {
        b.add("model", &sweep_opts.model, "hq0 or hq1");
        b.add("up", &sweep_opts.up, "pairing coupling u_p");
        b.add("uz", &sweep_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta", &sweep_opts.delta, "detuning delta");
        b.add("v", &sweep_opts.v, "exchange-squared weight (hq1)");
        b.add("d", &sweep_opts.d_range,
              "boson numbers: start:step:stop or a comma list");
      },
      [](const Common& c, const Json& cfg) { run_sweep_d(sweep_opts, c, cfg); });

  static CoherentOpts coherent_opts;
  register_command(
      "coherent-check",
      "condensate expectation against the classical energy surface",
      {"coherent_check.csv", "coherent_check.json"},
      [](Binder& b) {
        b.add("up", &coherent_opts.up, "pairing coupling u_p");
        b.add("uz", &coherent_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta", &coherent_opts.delta, "detuning delta");
        b.add("d-list", &coherent_opts.d_list, "boson numbers, comma list");
        b.add("theta-s", &coherent_opts.theta_s, "spin polar angle");
        b.add("phi-s", &coherent_opts.phi_s, "spin azimuth");
        b.add("theta-p", &coherent_opts.theta_p, "pseudospin polar angle");
        b.add("phi-p", &coherent_opts.phi_p, "pseudospin azimuth");
        b.add("alpha", &coherent_opts.alpha, "entanglement angle");
        b.add("beta", &coherent_opts.beta, "relative phase");
      },
      [](const Common& c, const Json& cfg) {
        run_coherent_check(coherent_opts, c, cfg);
      });

  static BerryOpts berry_opts;
  register_command(
      "berry", "discrete geometric phase around the relative-phase loop",
      {"berry.json"},
      [](Binder& b) {
        b.add("alpha", &berry_opts.alpha, "entanglement angle");
        b.add("d", &berry_opts.d, "total boson number");
        b.add("steps", &berry_opts.steps, "loop discretization steps");
      },
      [](const Common& c, const Json& cfg) { run_berry(berry_opts, c, cfg); });

  static QuantizeOpts quantize_opts;
  register_command(
      "quantize", "chart-monomial operator dictionary validation",
      {"quantize.csv", "quantize.json"},
      [](Binder& b) {
        b.add("n", &quantize_opts.n, "chart dimension (projective space)");
        b.add("d-list", &quantize_opts.d_list, "boson numbers, comma list");
        b.add("samples", &quantize_opts.samples, "random chart points");
      },
      [](const Common& c, const Json& cfg) {
        run_quantize(quantize_opts, c, cfg);
      });

  static ClassicalMinOpts classical_opts;
  register_command(
      "classical-min", "projective energy minimization on one site",
      {"classical_min.json"},
      [](Binder& b) {
        b.add("up", &classical_opts.up, "pairing coupling u_p");
        b.add("uz", &classical_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta", &classical_opts.delta, "detuning delta");
        b.add("v", &classical_opts.v, "double-well weight (z2)");
        b.add("functional", &classical_opts.functional, "base or z2");
        b.add("restarts", &classical_opts.restarts, "random restarts");
      },
      [](const Common& c, const Json& cfg) {
        run_classical_min(classical_opts, c, cfg);
      });

  static TwoSiteOpts two_site_opts;
  register_command(
      "two-site", "coupled-pair minimization with opposite detunings",
      {"two_site.json"},
      [](Binder& b) {
        b.add("up", &two_site_opts.up, "pairing coupling u_p");
        b.add("uz", &two_site_opts.uz, "pseudospin-z coupling u_z");
        b.add("delta-a", &two_site_opts.delta_a, "site-a detuning");
        b.add("lambda", &two_site_opts.lambda, "overlap-squared coupling");
        b.add("restarts", &two_site_opts.restarts, "random restarts");
      },
      [](const Common& c, const Json& cfg) {
        run_two_site(two_site_opts, c, cfg);
      });

  static SymplecticOpts symplectic_opts;
  register_command(
      "symplectic-check",
      "curvature of the chart connection against the phase generator",
      {"symplectic_check.json"},
      [](Binder& b) {
        b.add("theta-s", &symplectic_opts.theta_s, "spin polar angle");
        b.add("phi-s", &symplectic_opts.phi_s, "spin azimuth");
        b.add("theta-p", &symplectic_opts.theta_p, "pseudospin polar angle");
        b.add("phi-p", &symplectic_opts.phi_p, "pseudospin azimuth");
        b.add("alpha", &symplectic_opts.alpha, "entanglement angle");
        b.add("beta", &symplectic_opts.beta, "relative phase");
        b.add("step", &symplectic_opts.h, "finite-difference step");
      },
      [](const Common& c, const Json& cfg) {
        run_symplectic(symplectic_opts, c, cfg);
      });

  static SkyrmionOpts skyrmion_opts;
  register_command(
      "skyrmion-check", "phase-obstruction integrals of a disc texture",
      {"skyrmion_check.json"},
      [](Binder& b) {
        b.add("texture", &skyrmion_opts.texture, "texture CSV file");
        b.add("demo", &skyrmion_opts.demo,
              "built-in texture: hedgehog|radial|winding|asymmetric");
        b.add("n", &skyrmion_opts.n, "demo grid nodes per direction");
        b.add("radius", &skyrmion_opts.radius, "demo disc radius");
      },
      [](const Common& c, const Json& cfg) {
        run_skyrmion(skyrmion_opts, c, cfg);
      });

  static HeffOpts heff_opts;
  register_command(
      "hardware-heff", "island-ladder effective model spectrum",
      {"hardware_heff.json"},
      [](Binder& b) {
        b.add("n", &heff_opts.n, "rung count");
        b.add("e-flip", &heff_opts.e_flip, "intra-rung flip coupling");
        b.add("e-phase", &heff_opts.e_phase, "inter-rung phase coupling");
      },
      [](const Common& c, const Json& cfg) {
        run_hardware_heff(heff_opts, c, cfg);
      });

  static IonOpts ion_opts;
  register_command(
      "hardware-ion", "trapped-ion exchange model ground structure",
      {"hardware_ion.json"},
      [](Binder& b) {
        b.add("n", &ion_opts.n, "site count");
        b.add("gamma", &ion_opts.gamma, "overall coupling");
        b.add("nu", &ion_opts.nu, "antisymmetric penalty weight");
      },
      [](const Common& c, const Json& cfg) {
        run_hardware_ion(ion_opts, c, cfg);
      });

  static NoiseOrderOpts noise_order_opts;
  register_command(
      "hardware-noise-order",
      "perturbation order connecting the ladder qubit pair",
      {"hardware_noise_order.json"},
      [](Binder& b) {
        b.add("n", &noise_order_opts.n, "rung count");
        b.add("k-max", &noise_order_opts.k_max,
              "highest power probed (0 = twice the rung count)");
      },
      [](const Common& c, const Json& cfg) {
        run_hardware_noise_order(noise_order_opts, c, cfg);
      });

  static DephasingOpts dephasing_opts;
  register_command(
      "hardware-dephasing", "qubit splitting scaling under sector noise",
      {"hardware_dephasing.json"},
      [](Binder& b) {
        b.add("n", &dephasing_opts.n, "rung count");
        b.add("e-flip", &dephasing_opts.e_flip, "intra-rung flip coupling");
        b.add("e-phase", &dephasing_opts.e_phase, "inter-rung phase coupling");
        b.add("probe", &dephasing_opts.probe, "paired-z or tau");
        b.add("eps", &dephasing_opts.eps_list, "noise strengths, comma list");
      },
      [](const Common& c, const Json& cfg) {
        run_hardware_dephasing(dephasing_opts, c, cfg);
      });

  try {
    app.parse(argc, argv);

    const CommandEntry* active = nullptr;
    for (const auto& entry : commands)
      if (entry.cmd->parsed()) active = &entry;
    if (!active) throw ConfigError("no command selected");
    const std::string name = active->cmd->get_name();

    if (!common.config_path.empty()) {
      const Json cfg = load_config_file(common.config_path);
      const auto is_command = [&](const std::string& key) {
        for (const auto& entry : commands)
          if (entry.cmd->get_name() == key) return true;
        return false;
      };
      for (const auto& item : cfg.items()) {
        const std::string& key = item.key();
        if (key == name) {
          if (!item.value().is_object())
            throw ConfigError("config section '" + key + "' must be an object");
          active->binder->apply(item.value());
        } else if (is_command(key)) {
          if (!item.value().is_object())
            throw ConfigError("config section '" + key + "' must be an object");
        } else if (key == "output") {
          if (app.count("--output") == 0) common.output = item.value().get<std::string>();
        } else if (key == "seed") {
          if (app.count("--seed") == 0) common.seed = item.value().get<std::uint64_t>();
        } else if (key == "jobs") {
          if (app.count("--jobs") == 0) common.jobs = item.value().get<int>();
        } else {
          active->binder->apply_one(key, item.value());
        }
      }
    }

    Json resolved = active->binder->resolved();
    resolved["command"] = name;
    resolved["seed"] = common.seed;
    resolved["output"] = common.output;
    resolved["jobs"] = common.effective_jobs();

    if (common.dry_run) {
      Json plan;
      plan["config"] = resolved;
      Json artifacts = Json::array();
      for (const auto& artifact : active->artifacts)
        artifacts.push_back(common.out_path(artifact).string());
      plan["artifacts"] = artifacts;
      plan["dry_run"] = true;
      std::cout << plan.dump(2) << "\n";
      return 0;
    }

    fs::create_directories(common.output);
    active->run(common, resolved);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const emon::NonConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const emon::DoubletAmbiguityError& e) {
    std::cerr << "doublet ambiguity: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
