#include "msys/cli.hpp"

#include "msys/cascade.hpp"
#include "msys/factorization.hpp"
#include "msys/io.hpp"
#include "msys/schur_test.hpp"
#include "msys/system.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <optional>

namespace msys::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Settings {
  double rank_tol = kRankTol;
  double residual_tol = 1e-9;
  double norm_tol = 1e-8;
  std::size_t torus_samples = 100;
  unsigned degree_cap = 0;
  std::size_t budget = 32;
  std::uint64_t seed = 0;
};

void add_tolerance_flags(CLI::App* sub, Settings& s) {
  sub->add_option("--rank-tol", s.rank_tol, "Relative rank threshold")->capture_default_str();
  sub->add_option("--residual-tol", s.residual_tol, "Residual threshold")->capture_default_str();
  sub->add_option("--torus-samples", s.torus_samples, "Torus sample count")
      ->capture_default_str();
}

class Report {
 public:
  Report(std::string command, const std::vector<std::string>& args) {
    body_["command"] = std::move(command);
    body_["arguments"] = Json(std::vector<std::string>(args.begin() + 1, args.end()));
  }

  Json& operator[](const char* key) { return body_[key]; }

  void tolerances(const Settings& s, std::initializer_list<const char*> keys) {
    Json t = Json::object();
    for (std::string_view k : keys) {
      if (k == "rank_tol") t["rank_tol"] = s.rank_tol;
      if (k == "residual_tol") t["residual_tol"] = s.residual_tol;
      if (k == "norm_tol") t["norm_tol"] = s.norm_tol;
      if (k == "torus_samples") t["torus_samples"] = s.torus_samples;
    }
    body_["tolerances"] = std::move(t);
  }

  /// Records a verdict with its tolerance; returns `passed`.
  bool verdict(const std::string& name, bool passed, double value, double tol) {
    body_["verdicts"][name] = {{"passed", passed}, {"value", value}, {"tol", tol}};
    if (!passed) failed_ = true;
    return passed;
  }

  void flag(const std::string& name, bool passed) {
    body_["verdicts"][name] = {{"passed", passed}};
    if (!passed) failed_ = true;
  }

  void output(const fs::path& p) { body_["outputs"].push_back(p.string()); }

  bool failed() const { return failed_; }
  void fail() { failed_ = true; }

  int finish(std::ostream& out, std::chrono::steady_clock::time_point start) {
    const int code = failed_ ? kExitFail : kExitPass;
    body_["exit_code"] = code;
    body_["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    out << body_.dump(2) << '\n';
    return code;
  }

 private:
  Json body_ = Json::object();
  bool failed_ = false;
};

Json conservativity_json(const ConservativityReport& r) {
  Json j;
  j["isometric_family"] = r.is_isometric_family;
  j["coisometric_family"] = r.is_coisometric_family;
  j["worst_residual"] = r.worst_residual;
  j["tol"] = r.tol;
  if (r.failing_pair) {
    j["failing_pair"] = {r.failing_pair->first + 1, r.failing_pair->second + 1};
  }
  return j;
}

Json dims_json(const MultiSystem& s) {
  return {{"n_params", s.n_params}, {"dim_x", s.dim_x}, {"dim_u", s.dim_u}, {"dim_y", s.dim_y}};
}

void write_system(Report& r, const fs::path& p, const MultiSystem& s) {
  io::write_system_file(p, s);
  r.output(p);
}

void write_json(Report& r, const fs::path& p, const Json& j) {
  io::write_json_file(p, j);
  r.output(p);
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::size_t n_params = 1;
  Index dim_x = 0;
  Index dim_u = 1;
  Index dim_y = 1;
  bool zero_feedthrough = false;
  std::string germ_path;
  std::string out_path;
};

int cmd_generate(const GenerateArgs& g, const Settings& st, Report& r) {
  r["seed"] = st.seed;
  r.tolerances(st, {"residual_tol"});
  MultiSystem s;
  if (g.kind == "conservative") {
    if (g.n_params < 1) throw PreconditionError("--n-params must be at least 1");
    if (g.dim_x < 0 || g.dim_u < 0 || g.dim_y < 0) {
      throw PreconditionError("dimensions must be nonnegative");
    }
    s = random_conservative(g.n_params, g.dim_x, g.dim_u, g.dim_y, st.seed,
                            {.zero_feedthrough = g.zero_feedthrough});
  } else {
    if (g.germ_path.empty()) throw PreconditionError("germ-realization needs --germ");
    const PolyGerm germ = io::read_germ_file(g.germ_path);
    s = realize_germ(germ);
    const unsigned top = germ.max_degree().value_or(1);
    const double dist = germ_distance(taylor_coefficients(s, top), germ);
    r.verdict("expansion_matches", dist <= st.residual_tol, dist, st.residual_tol);
  }
  r["system"] = dims_json(s);
  r["conservativity"] = conservativity_json(is_conservative(s, st.residual_tol));
  write_system(r, g.out_path, s);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& path, const std::string& what, const Settings& st,
              Report& r) {
  const MultiSystem s = io::read_system_file(path);
  r["system"] = dims_json(s);
  if (what == "conservative") {
    r.tolerances(st, {"residual_tol"});
    const ConservativityReport c = is_conservative(s, st.residual_tol);
    r["conservativity"] = conservativity_json(c);
    r.verdict("conservative", c.conservative(), c.worst_residual, st.residual_tol);
  } else if (what == "dissipative") {
    r.tolerances(st, {"residual_tol", "torus_samples"});
    const DissipativityVerdict d = is_dissipative_sampled(s, st.torus_samples, st.residual_tol);
    r["max_pencil_norm"] = d.max_norm;
    r["samples"] = d.n_samples;
    r.verdict("dissipative_sampled", d.passed, d.max_norm, 1.0 + st.residual_tol);
    if (d.witness) r["witness_zeta"] = io::complex_vector_to_json(*d.witness);
  } else if (what == "closely-connected") {
    r.tolerances(st, {"rank_tol"});
    const Subspace cc = closely_connected_subspace(s, st.rank_tol);
    r["cc_dim"] = cc.dim();
    r.flag("closely_connected", cc.dim() == s.dim_x);
  } else if (what == "unitary-part") {
    r.tolerances(st, {"rank_tol"});
    const Subspace u = unitary_part(s, st.rank_tol);
    r["unitary_part_dim"] = u.dim();
    r.flag("completely_non_unitary", u.is_zero());
    if (!u.is_zero()) r["unitary_part"] = io::subspace_to_json(u);
  } else {
    const unsigned cap = st.degree_cap ? st.degree_cap : default_degree_cap(s);
    r["degree_cap"] = cap;
    r.tolerances(st, {});
    const auto m = multiplicity(s, cap);
    if (m) {
      r["multiplicity"] = *m;
    } else {
      r["multiplicity"] = nullptr;
      r.flag("multiplicity_found", false);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_cascade(const std::string& p2, const std::string& p1, const std::string& out,
                const std::string& x2_out, const Settings& st, Report& r) {
  r["seed"] = st.seed;
  r.tolerances(st, {"residual_tol"});
  const MultiSystem a2 = io::read_system_file(p2);
  const MultiSystem a1 = io::read_system_file(p1);
  const MultiSystem s = cascade(a2, a1);
  r["system"] = dims_json(s);
  r["conservativity"] = conservativity_json(is_conservative(s, st.residual_tol));
  const double res = verify_factor_tf(s, a2, a1, 20, st.seed);
  r.verdict("transfer_product", res <= st.residual_tol, res, st.residual_tol);
  write_system(r, out, s);
  if (!x2_out.empty()) write_json(r, x2_out, io::subspace_to_json(cascade_x2_block(a2, a1)));
  return 0;
}

int cmd_decompose(const std::string& path, const std::string& x2_path, const std::string& dir,
                  const Settings& st, Report& r) {
  r["seed"] = st.seed;
  r.tolerances(st, {"rank_tol", "residual_tol"});
  const MultiSystem s = io::read_system_file(path);
  const Subspace x2 = io::read_subspace_file(x2_path);
  if (x2.ambient_dim() != s.dim_x) {
    throw ShapeError(x2_path + ": ambient_dim " + std::to_string(x2.ambient_dim()) +
                     " does not match dim_x " + std::to_string(s.dim_x));
  }
  r["system"] = dims_json(s);
  const ConservativityReport c = is_conservative(s, st.residual_tol);
  if (!c.conservative()) {
    throw PreconditionError(path + ": system is not conservative (residual " +
                            std::to_string(c.worst_residual) + ")");
  }
  if (!check_condition_i(s, x2)) {
    r.flag("condition_i", false);
    return 0;
  }
  r.flag("condition_i", true);
  const ConditionIIResult ii = check_condition_ii(s, x2, st.rank_tol);
  r["image_dim"] = ii.image.dim();
  r.flag("condition_ii", ii.holds);
  if (!ii.holds) return 0;

  const CascadeDecomposition dec = decompose(s, x2);
  const double reassembly = reassembly_residual(s, dec, 20, st.seed);
  const double transfer = verify_factor_tf(s, dec.alpha2, dec.alpha1, 20, st.seed);
  r["dims"] = {{"x2", dec.x2.dim()}, {"intermediate", dec.intermediate.dim()},
               {"x1", dec.x1.dim()}};
  r.verdict("reassembly", reassembly <= st.residual_tol, reassembly, st.residual_tol);
  r.verdict("transfer_product", transfer <= st.residual_tol, transfer, st.residual_tol);
  r.flag("alpha2_conservative", is_conservative(dec.alpha2, st.residual_tol).conservative());
  r.flag("alpha1_conservative", is_conservative(dec.alpha1, st.residual_tol).conservative());

  prepare_dir(dir);
  const fs::path d(dir);
  write_system(r, d / "alpha2.json", dec.alpha2);
  write_system(r, d / "alpha1.json", dec.alpha1);
  write_json(r, d / "x2.json", io::subspace_to_json(dec.x2));
  write_json(r, d / "intermediate.json", io::subspace_to_json(dec.intermediate));
  write_json(r, d / "x1.json", io::subspace_to_json(dec.x1));
  return 0;
}

// ---------------------------------------------------------------------------

struct FactorArgs {
  std::string path;
  std::string mode;
  unsigned m = 0;
  std::string out_dir;
};

unsigned resolve_multiplicity(const MultiSystem& s, const FactorArgs& f, const Settings& st,
                              Report& r) {
  if (f.m) return f.m;
  const unsigned cap = st.degree_cap ? st.degree_cap : default_degree_cap(s);
  r["degree_cap"] = cap;
  const auto m = multiplicity(s, cap);
  if (!m) {
    throw PreconditionError(f.path + ": every homogeneous part up to degree " +
                            std::to_string(cap) + " vanishes");
  }
  return *m;
}

int cmd_factor(const FactorArgs& f, const Settings& st, Report& r) {
  r["seed"] = st.seed;
  r["mode"] = f.mode;
  const MultiSystem s = io::read_system_file(f.path);
  r["system"] = dims_json(s);
  const fs::path dir(f.out_dir);

  if (f.mode == "left" || f.mode == "right") {
    r.tolerances(st, {"residual_tol"});
    const unsigned m = resolve_multiplicity(s, f, st, r);
    r["m"] = m;
    double res = 0.0;
    if (f.mode == "left") {
      const LeftFactorization lf = factor_left(s, m);
      res = reconstruction_residual(s, lf, 20, 0.4, st.seed);
      prepare_dir(dir);
      write_json(r, dir / "chain.json", io::chain_to_json(lf.chain));
      write_json(r, dir / "tail.json", io::tail_to_json(lf.tail));
    } else {
      const RightFactorization rf = factor_right(s, m);
      res = reconstruction_residual(s, rf, 20, 0.4, st.seed);
      prepare_dir(dir);
      write_json(r, dir / "chain.json", io::chain_to_json(rf.chain));
      write_json(r, dir / "tail.json", io::tail_to_json(rf.tail));
    }
    r.verdict("reconstruction", res <= st.residual_tol, res, st.residual_tol);
  } else if (f.mode == "homogeneous") {
    r.tolerances(st, {"residual_tol", "norm_tol", "torus_samples"});
    const unsigned m = resolve_multiplicity(s, f, st, r);
    r["m"] = m;
    const LinearFactorChain chain = factor_homogeneous(s, m, st.degree_cap);
    const double dist = germ_distance(chain.expand(), taylor_coefficients(s, m));
    r.verdict("coefficients", dist <= st.residual_tol, dist, st.residual_tol);
    const std::vector<double> norms = chain.torus_norms(st.torus_samples);
    r["factor_torus_norms"] = norms;
    if (is_conservative(s, st.residual_tol).conservative()) {
      double worst = 0.0;
      for (double n : norms) worst = std::max(worst, n);
      r.verdict("factors_contractive", worst <= 1.0 + st.norm_tol, worst, 1.0 + st.norm_tol);
    }
    prepare_dir(dir);
    write_json(r, dir / "chain.json", io::chain_to_json(chain));
  } else {
    r.tolerances(st, {"residual_tol"});
    r["budget"] = st.budget;
    const auto outcome = solve_problem2(s, st.budget, st.seed, st.degree_cap);
    if (!outcome) {
      r["result"] = "inconclusive";
      r.fail();
      return 0;
    }
    r["result"] = "factorized";
    r["intermediate_dim"] = outcome->intermediate_dim;
    r["dims"] = {{"theta2_dim_x", outcome->theta2.dim_x},
                 {"theta1_dim_x", outcome->theta1.dim_x},
                 {"alpha_cc_dim_x", outcome->alpha_cc.dim_x}};
    r.verdict("product", outcome->product_residual <= st.residual_tol,
              outcome->product_residual, st.residual_tol);
    prepare_dir(dir);
    write_system(r, dir / "theta2.json", outcome->theta2);
    write_system(r, dir / "theta1.json", outcome->theta1);
    write_system(r, dir / "alpha_cc.json", outcome->alpha_cc);
    write_json(r, dir / "x2.json", io::subspace_to_json(outcome->witness_x2));
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct AglerArgs {
  std::string path;
  std::size_t trials = 50;
  double r = 0.9;
  std::string witness_out;
};

int cmd_agler(const AglerArgs& a, const Settings& st, Report& r) {
  r["seed"] = st.seed;
  r.tolerances(st, {"norm_tol"});
  if (!(a.r > 0.0 && a.r < 1.0)) throw PreconditionError("--r must lie in (0, 1)");
  const Json doc = io::read_json_file(a.path);
  TransferSource f;
  try {
    if (doc.is_object() && doc.contains("coefficients")) {
      f = io::germ_from_json(doc);
      r["source"] = "germ";
    } else {
      f = io::system_from_json(doc);
      r["source"] = "system";
    }
  } catch (const Error& e) {
    throw io::ParseError(a.path + ": " + e.what());
  }
  const AglerReport rep = agler_test(f, a.trials, a.r, st.norm_tol, st.seed);
  r["trials"] = rep.trials;
  r["r"] = rep.r;
  r["worst_tail_bound"] = rep.worst_tail_bound;
  r.verdict("no_witness", rep.passed(), rep.max_norm, 1.0 + st.norm_tol);
  if (rep.witness) {
    const AglerWitness& w = *rep.witness;
    Json wj;
    wj["strategy"] = std::string(to_string(w.strategy));
    wj["tuple_dim"] = w.tuple.dim;
    wj["norm"] = w.norm;
    wj["certified_norm"] = w.certified_norm;
    Json mats = Json::array();
    for (const auto& m : w.tuple.mats) mats.push_back(io::matrix_to_json(m));
    wj["tuple"] = std::move(mats);
    r["witness"] = wj;
    if (!a.witness_out.empty()) write_json(r, a.witness_out, wj);
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiparametric conservative systems toolkit"};
  app.require_subcommand(1);
  Settings st;

  auto* gen = app.add_subcommand("generate", "Write a random conservative system or a germ realization");
  GenerateArgs ga;
  gen->add_option("kind", ga.kind, "conservative | germ-realization")
      ->required()
      ->check(CLI::IsMember({"conservative", "germ-realization"}));
  gen->add_option("--n-params", ga.n_params, "Number of parameters N")->capture_default_str();
  gen->add_option("--dim-x", ga.dim_x, "State dimension")->capture_default_str();
  gen->add_option("--dim-u", ga.dim_u, "Input dimension")->capture_default_str();
  gen->add_option("--dim-y", ga.dim_y, "Output dimension")->capture_default_str();
  gen->add_flag("--zero-feedthrough", ga.zero_feedthrough, "Force D_k = 0");
  gen->add_option("--germ", ga.germ_path, "Germ coefficient file")->check(CLI::ExistingFile);
  gen->add_option("--seed", st.seed, "Random seed")->capture_default_str();
  gen->add_option("--residual-tol", st.residual_tol, "Residual threshold")->capture_default_str();
  gen->add_option("-o,--out", ga.out_path, "Output system file")->required();

  auto* chk = app.add_subcommand("check", "Check a property of a system file");
  std::string chk_path, chk_what;
  chk->add_option("what", chk_what,
                  "conservative | dissipative | closely-connected | unitary-part | multiplicity")
      ->required()
      ->check(CLI::IsMember(
          {"conservative", "dissipative", "closely-connected", "unitary-part", "multiplicity"}));
  chk->add_option("system", chk_path, "System file")->required()->check(CLI::ExistingFile);
  add_tolerance_flags(chk, st);
  chk->add_option("--degree-cap", st.degree_cap, "Degree cap for the multiplicity search (default dim_x + 2)");

  auto* cas = app.add_subcommand("cascade", "Cascade connection alpha2 alpha1");
  std::string cas2, cas1, cas_out, cas_x2;
  cas->add_option("alpha2", cas2, "Outer system file")->required()->check(CLI::ExistingFile);
  cas->add_option("alpha1", cas1, "Inner system file")->required()->check(CLI::ExistingFile);
  cas->add_option("-o,--out", cas_out, "Output system file")->required();
  cas->add_option("--x2-out", cas_x2, "Write the X2 block subspace here");
  cas->add_option("--seed", st.seed, "Seed for the sampled residual")->capture_default_str();
  cas->add_option("--residual-tol", st.residual_tol, "Residual threshold")->capture_default_str();

  auto* dec = app.add_subcommand("decompose", "Split a conservative system along X2");
  std::string dec_path, dec_x2, dec_dir;
  dec->add_option("system", dec_path, "System file")->required()->check(CLI::ExistingFile);
  dec->add_option("--x2", dec_x2, "Subspace file")->required()->check(CLI::ExistingFile);
  dec->add_option("-o,--out-dir", dec_dir, "Output directory")->required();
  dec->add_option("--seed", st.seed, "Seed for the sampled residuals")->capture_default_str();
  add_tolerance_flags(dec, st);

  auto* fac = app.add_subcommand("factor", "Factor a transfer function");
  FactorArgs fa;
  fac->add_option("mode", fa.mode, "left | right | homogeneous | problem2")
      ->required()
      ->check(CLI::IsMember({"left", "right", "homogeneous", "problem2"}));
  fac->add_option("system", fa.path, "System file")->required()->check(CLI::ExistingFile);
  fac->add_option("-m,--multiplicity", fa.m, "Multiplicity (searched when omitted)");
  fac->add_option("-o,--out-dir", fa.out_dir, "Output directory")->required();
  fac->add_option("--degree-cap", st.degree_cap, "Degree cap (default dim_x + 2)");
  fac->add_option("--budget", st.budget, "Candidate draws for problem2")->capture_default_str();
  fac->add_option("--seed", st.seed, "Random seed")->capture_default_str();
  fac->add_option("--norm-tol", st.norm_tol, "Contractivity slack")->capture_default_str();
  add_tolerance_flags(fac, st);

  auto* agl = app.add_subcommand("agler", "Search for a commuting-contraction witness");
  AglerArgs aa;
  agl->add_option("source", aa.path, "System or germ file")->required()->check(CLI::ExistingFile);
  agl->add_option("--trials", aa.trials, "Number of tuples")->capture_default_str();
  agl->add_option("--r", aa.r, "Radius in (0, 1)")->capture_default_str();
  agl->add_option("--seed", st.seed, "Random seed")->capture_default_str();
  agl->add_option("--norm-tol", st.norm_tol, "Slack above 1")->capture_default_str();
  agl->add_option("--witness-out", aa.witness_out, "Write the witness tuple here");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }

  const auto start = std::chrono::steady_clock::now();
  CLI::App* used = app.get_subcommands().front();
  Report report(used->get_name(), args);
  try {
    if (used == gen) {
      cmd_generate(ga, st, report);
    } else if (used == chk) {
      cmd_check(chk_path, chk_what, st, report);
    } else if (used == cas) {
      cmd_cascade(cas2, cas1, cas_out, cas_x2, st, report);
    } else if (used == dec) {
      cmd_decompose(dec_path, dec_x2, dec_dir, st, report);
    } else if (used == fac) {
      cmd_factor(fa, st, report);
    } else {
      cmd_agler(aa, st, report);
    }
  } catch (const std::exception& e) {
    err << "msys " << used->get_name() << ": error: " << e.what() << '\n';
    return kExitError;
  }
  return report.finish(out, start);
}

}  // namespace msys::cli
