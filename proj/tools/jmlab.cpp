// Copyright 2026 The jmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// jmlab command-line tool. Reports go to stdout as JSON (or CSV with
// --format csv); diagnostics go to stderr. Exit codes: 0 success, 1 domain
// failure, 2 usage or parse failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "jmlab/jmlab.hpp"
#include "jmlab/json_io.hpp"

namespace fs = std::filesystem;
using jmlab::Json;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  std::string format = "json";
  std::string out;
  std::optional<double> tol;

  jmlab::Tolerances tolerances() const {
    jmlab::Tolerances t;
    if (tol) t.holds = *tol;
    return t;
  }
  // --seed / JMLAB_SEED, then the config file, then 1.
  std::uint64_t resolve_seed(std::optional<std::uint64_t> from_config = std::nullopt) const {
    if (seed) return *seed;
    if (from_config) return *from_config;
    return 1;
  }
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw jmlab::ParseError(path + ": " + e.what());
  }
}

void write_file(const Globals& g, const std::string& name, const std::string& content) {
  fs::create_directories(g.out);
  const fs::path p = fs::path(g.out) / name;
  std::ofstream os(p);
  if (!os) throw UsageError("cannot write '" + p.string() + "'");
  os << content;
  std::cerr << "wrote " << p.string() << '\n';
}

// JSON (or CSV) to stdout, and to <out>/<stem>.<ext> when --out is given.
void emit(const Globals& g, const std::string& stem, const Json& j, const std::string& csv = {}) {
  const bool as_csv = g.format == "csv" && !csv.empty();
  const std::string text = as_csv ? csv : j.dump(2) + "\n";
  std::cout << text;
  if (!g.out.empty()) {
    write_file(g, stem + ".json", j.dump(2) + "\n");
    if (!csv.empty()) write_file(g, stem + ".csv", csv);
  }
}

jmlab::io::ScenarioFile load_scenario(const std::string& path, const jmlab::Tolerances& tol) {
  return jmlab::io::scenario_from_json(read_json(path), tol);
}

// ---------------------------------------------------------------------------
// validate

Json povm_defects(const jmlab::JointPovm& p, const jmlab::Tolerances& tol) {
  const auto v = jmlab::validate(p, tol);
  return {{"valid", v.valid},
          {"completeness_defect", v.completeness_defect},
          {"hermitian_defect", v.hermitian_defect},
          {"worst_min_eigenvalue", v.worst_min_eigenvalue},
          {"worst_max_eigenvalue", v.worst_max_eigenvalue}};
}

int cmd_validate(const Globals& g, const std::string& path) {
  const auto tol = g.tolerances();
  const auto s = load_scenario(path, tol);
  Json rep = {{"path", path}, {"dim", s.dim}};
  bool ok = true;
  const double ha = jmlab::hermitian_defect(s.a), hb = jmlab::hermitian_defect(s.b);
  rep["A_hermitian_defect"] = ha;
  rep["B_hermitian_defect"] = hb;
  ok = ok && ha <= tol.hermitian && hb <= tol.hermitian;
  rep["model_kind"] = s.model ? jmlab::model_kind(*s.model) : "none";
  if (s.model) {
    if (const auto* p = std::get_if<jmlab::JointPovm>(&*s.model)) {
      rep["povm"] = povm_defects(*p, tol);
      ok = ok && rep["povm"]["valid"].get<bool>();
    } else if (const auto* a = std::get_if<jmlab::Ancilla>(&*s.model)) {
      const auto v = jmlab::validate(*a, tol);
      rep["ancilla"] = {{"valid", v.valid}};
      ok = ok && v.valid;
      if (v.valid) {
        rep["induced_povm"] = povm_defects(jmlab::povm_from_ancilla(*a, tol), tol);
        ok = ok && rep["induced_povm"]["valid"].get<bool>();
      }
    } else {
      const auto& mp = std::get<jmlab::MeasuringProcess>(*s.model);
      const auto v = jmlab::validate(mp, tol);
      rep["process"] = {{"valid", v.valid},
                        {"unitarity_defect", v.unitarity_defect},
                        {"pointer_hermitian_defect", v.pointer_hermitian_defect},
                        {"pointer_commutator", v.pointer_commutator}};
      ok = ok && v.valid;
      if (v.valid) {
        rep["induced_povm"] = povm_defects(jmlab::povm_from_process(mp, tol), tol);
        ok = ok && rep["induced_povm"]["valid"].get<bool>();
      }
    }
    if (ok) {
      const auto rm = jmlab::resolve_model(*s.model, tol);
      if (rm.povm.dim() != s.dim) {
        rep["model_dim_mismatch"] = true;
        ok = false;
      }
    }
  }
  rep["valid"] = ok;
  emit(g, "validate", rep);
  return ok ? kOk : kDomain;
}

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const Globals& g, const std::string& path) {
  const auto tol = g.tolerances();
  const auto s = load_scenario(path, tol);
  if (!s.model) throw UsageError("analyze: scenario has no povm, ancilla or process");
  const auto rep = jmlab::full_report(*s.model, s.a, s.b, s.psi, tol);
  emit(g, "report", jmlab::io::to_json(rep), jmlab::io::csv_header() + jmlab::io::to_csv_rows(rep, path));
  return rep.violation_count() == 0 ? kOk : kDomain;
}

// ---------------------------------------------------------------------------
// dilate

int cmd_dilate(const Globals& g, const std::string& path, bool verify) {
  const auto tol = g.tolerances();
  auto s = load_scenario(path, tol);
  if (!s.model || !std::holds_alternative<jmlab::JointPovm>(*s.model))
    throw UsageError("dilate: scenario must carry a povm model");
  const jmlab::JointPovm p = std::get<jmlab::JointPovm>(*s.model);
  const auto mp = jmlab::naimark_dilate(p, g.resolve_seed(), tol);
  s.model = mp;
  Json out = jmlab::io::to_json(s);
  int code = kOk;
  if (verify) {
    const auto back = jmlab::povm_from_process(mp, tol);
    double defect = 0.0;
    for (std::size_t k = 0; k < p.elements().size(); ++k)
      defect = std::max(defect, jmlab::max_entry_distance(back.elements()[k], p.elements()[k]));
    out["roundtrip_defect"] = defect;
    std::cerr << "roundtrip defect " << defect << '\n';
    if (defect > 1e-8) code = kDomain;
  }
  emit(g, "process", out);
  return code;
}

// ---------------------------------------------------------------------------
// gallery

struct GalleryArgs {
  std::string name;
  int dim = 0;  // 0: per-model default
  double eta = 1.0 / std::sqrt(2.0);
  double width = 0.5;
};

jmlab::io::ScenarioFile xy_scenario(int d) {
  jmlab::io::ScenarioFile f;
  if (d == 2) {
    f.dim = 2;
    f.a = jmlab::pauli::x();
    f.b = jmlab::pauli::y();
    f.psi = jmlab::StateVector::basis(2, 0);
  } else {
    const auto dp = jmlab::discrete_pair(d);
    f.dim = d;
    f.a = dp.x;
    f.b = dp.p;
    jmlab::ComplexVector v = jmlab::ComplexVector::Zero(d);
    v(0) = 1.0;
    v(1) = jmlab::Complex(0.0, 1.0);
    f.psi = jmlab::StateVector::normalized(v);
  }
  return f;
}

int cmd_gallery(const Globals& g, const GalleryArgs& args) {
  const auto tol = g.tolerances();
  const std::string& n = args.name;
  if (n == "ccr") {
    jmlab::CcrDemoConfig cfg;
    if (args.dim) cfg.cutoff = args.dim;
    const auto st = jmlab::OscillatorState::number(0);
    const auto rep = jmlab::truncated_ccr_demo(st, st, cfg, tol);
    emit(g, "ccr", jmlab::io::to_json(rep));
    return rep.generalized.holds && rep.closing.holds ? kOk : kDomain;
  }
  const int d = args.dim ? args.dim : (n == "epr" ? 3 : 2);
  if (d < 2) throw UsageError("gallery: --dim must be at least 2");
  jmlab::io::ScenarioFile f = xy_scenario(d);
  if (n == "guess") {
    f.model = jmlab::guess_model(f.a, f.b, 0.0, tol);
  } else if (n == "process") {
    f.model = jmlab::naimark_dilate(jmlab::guess_model(f.a, f.b, 0.0, tol), g.resolve_seed(), tol);
  } else if (n == "epr") {
    const auto dp = jmlab::discrete_pair(d);
    f.a = dp.x;
    f.b = dp.p;
    jmlab::Rng rng = jmlab::derived_rng(g.resolve_seed(), 0);
    f.psi = jmlab::random_state(d, rng);
    f.model = jmlab::epr_difference_sum_model(d, jmlab::sharpened_clock_state(d, args.width), tol);
  } else if (n == "independent") {
    f.model = jmlab::randomized_choice_model(f.a, f.b, 0.5, 0.0, 0.0, tol);
  } else if (n == "unbiased") {
    if (d != 2) throw UsageError("gallery: unbiased is a qubit model");
    f.model = jmlab::unbiased_qubit_xy_model(args.eta);
  } else {
    throw UsageError("gallery: unknown model '" + n + "' (guess, epr, independent, unbiased, process, ccr)");
  }
  emit(g, n, jmlab::io::to_json(f));
  return kOk;
}

// ---------------------------------------------------------------------------
// search / sweep

jmlab::Scenario config_scenario(const Json& cfg, const std::string& config_path, const jmlab::Tolerances& tol) {
  if (cfg.contains("scenario")) return jmlab::io::scenario_triple_from_json(cfg.at("scenario"), tol);
  if (cfg.contains("scenario_file")) {
    if (!cfg.at("scenario_file").is_string()) throw jmlab::ParseError("scenario_file must be a string");
    const fs::path rel = cfg.at("scenario_file").get<std::string>();
    const fs::path p = rel.is_absolute() ? rel : fs::path(config_path).parent_path() / rel;
    return jmlab::io::scenario_triple_from_json(read_json(p.string()), tol);
  }
  throw jmlab::ParseError("search config needs 'scenario' or 'scenario_file'");
}

int cmd_search(const Globals& g, const std::string& path) {
  const auto tol = g.tolerances();
  const Json j = read_json(path);
  jmlab::SearchConfig cfg = jmlab::io::search_config_from_json(j, tol);
  cfg.seed = g.resolve_seed(jmlab::io::seed_from_json(j));
  cfg.jobs = g.jobs;
  const jmlab::Scenario s = config_scenario(j, path, tol);
  const auto r = jmlab::minimize(s, cfg);
  Json out = jmlab::io::to_json(r);
  out["seed"] = cfg.seed;
  emit(g, "search", out, jmlab::trace_csv(r));  // the CSV is the evaluation trace
  return kOk;
}

int cmd_sweep(const Globals& g, const std::string& path) {
  const auto tol = g.tolerances();
  const Json j = read_json(path);
  if (!j.is_object()) throw jmlab::ParseError("sweep config must be an object");
  const std::string kind = j.value("kind", std::string("relations"));
  const std::uint64_t seed = g.resolve_seed(jmlab::io::seed_from_json(j));
  if (kind == "relations") {
    auto cfg = jmlab::io::relation_sweep_config_from_json(j, tol);
    cfg.seed = seed;
    cfg.jobs = g.jobs;
    const auto r = jmlab::relation_sweep(cfg);
    Json out = jmlab::io::to_json(r);
    out["seed"] = seed;
    emit(g, "sweep", out, jmlab::relation_sweep_csv(r));
    return r.violations == 0 ? kOk : kDomain;
  }
  if (kind == "search") {
    jmlab::SearchConfig cfg = jmlab::io::search_config_from_json(j, tol);
    cfg.seed = seed;
    cfg.jobs = g.jobs;
    const auto family = jmlab::io::family_from_json(jmlab::io::field(j, "family"), seed, tol);
    const auto rows = jmlab::sweep(family, cfg);
    Json list = Json::array();
    std::size_t below = 0;
    for (const auto& row : rows) {
      list.push_back({{"index", row.index},
                      {"best_value", row.best_value},
                      {"floor", row.floor},
                      {"floor_slack", row.best_value - row.floor},
                      {"evaluations", row.evaluations}});
      if (row.best_value - row.floor < -tol.holds) ++below;
    }
    const Json out = {{"objective", jmlab::objective_name(cfg.objective)},
                      {"seed", seed},
                      {"scenarios", rows.size()},
                      {"below_floor", below},
                      {"rows", std::move(list)}};
    emit(g, "sweep", out, jmlab::sweep_csv(rows, cfg.objective));
    return below == 0 ? kOk : kDomain;
  }
  throw jmlab::ParseError("unknown sweep kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jmlab: joint measurement noise and uncertainty relations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (u64)")->envname("JMLAB_SEED");
  app.add_option("--jobs", g.jobs, "Worker threads, 0 = available parallelism");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "Directory for output files");
  app.add_option("--tol", g.tol, "Slack tolerance for relation checks")->check(CLI::PositiveNumber);

  std::string path;
  bool verify = false;
  GalleryArgs gallery;

  auto* validate = app.add_subcommand("validate", "Check a scenario file and its model");
  validate->add_option("path", path, "Scenario JSON")->required();
  auto* analyze = app.add_subcommand("analyze", "Noise metrics and relation report for a scenario");
  analyze->add_option("path", path, "Scenario JSON")->required();
  auto* dilate = app.add_subcommand("dilate", "Measuring process for a scenario's POVM");
  dilate->add_option("path", path, "Scenario JSON")->required();
  dilate->add_flag("--verify", verify, "Re-induce the POVM and report the round-trip defect");
  auto* gal = app.add_subcommand("gallery", "Emit a built-in model");
  gal->add_option("name", gallery.name, "guess | epr | independent | unbiased | process | ccr")->required();
  gal->add_option("--dim", gallery.dim, "Dimension (cutoff for ccr)");
  gal->add_option("--eta", gallery.eta, "Sharpness of the unbiased model");
  gal->add_option("--width", gallery.width, "Ancilla width of the epr model");
  auto* search = app.add_subcommand("search", "Minimize an objective over joint POVMs");
  search->add_option("config", path, "Search config JSON")->required();
  auto* sweep = app.add_subcommand("sweep", "Relation or search sweep");
  sweep->add_option("config", path, "Sweep config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(g, path);
    if (*analyze) return cmd_analyze(g, path);
    if (*dilate) return cmd_dilate(g, path, verify);
    if (*gal) return cmd_gallery(g, gallery);
    if (*search) return cmd_search(g, path);
    if (*sweep) return cmd_sweep(g, path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const jmlab::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const jmlab::Error& e) {
    std::cerr << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kUsage;
}
