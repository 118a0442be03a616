#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>

#include "qceq/angles.hpp"
#include "qceq/circuit_io.hpp"
#include "qceq/rewrite.hpp"
#include "qceq/rules.hpp"
#include "qceq/semantics.hpp"
#include "qceq/synthesis.hpp"

using json = nlohmann::json;
using namespace qceq;

namespace {

int g_max_qubits = kDefaultMaxQubits;
double g_tol = 1e-9;
std::uint64_t g_seed = 7;

json base_report(const std::string &command) {
  json j;
  j["command"] = command;
  j["inputs"] = json::object();
  j["seed"] = g_seed;
  j["results"] = json::array();
  j["max_deviation"] = 0.0;
  j["pass"] = true;
  return j;
}

void finish(json &rep) {
  double md = 0;
  bool pass = true;
  for (const json &r : rep["results"]) {
    if (r.contains("max_deviation"))
      md = std::max(md, r["max_deviation"].get<double>());
    if (r.contains("deviation")) md = std::max(md, r["deviation"].get<double>());
    if (r.contains("pass") && !r["pass"].get<bool>()) pass = false;
  }
  rep["max_deviation"] = md;
  rep["pass"] = pass;
  std::cout << rep.dump(2) << std::endl;
}

std::vector<double> split_doubles(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> split_ints(const std::string &s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

int cmd_eval(const std::string &path, bool choi) {
  Circuit c = load_circuit(path);
  json rep = base_report("eval");
  rep["inputs"]["circuit"] = path;
  if (c.theory == Theory::QCground) {
    Superoperator s = eval_cptp(c, g_max_qubits);
    std::cerr << "# superoperator " << s.map.rows() << "x" << s.map.cols()
              << (choi ? " (choi below)" : "") << "\n";
    std::cout << matrix_to_text(choi ? choi_matrix(s) : s.map);
    return 0;
  }
  Matrix u = eval_unitary(c, g_max_qubits);
  std::cerr << "# matrix " << u.rows() << "x" << u.cols() << "\n";
  std::cout << matrix_to_text(u);
  return 0;
}

int cmd_equiv(const std::string &a_path, const std::string &b_path) {
  Circuit a = load_circuit(a_path), b = load_circuit(b_path);
  json rep = base_report("equiv");
  rep["inputs"] = {{"lhs", a_path}, {"rhs", b_path}, {"tol", g_tol}};
  if (a.theory != b.theory)
    throw Error(ErrorCode::TheoryMismatch, "circuits use different theories");
  if (a.n_in != b.n_in || a.n_out() != b.n_out())
    throw Error(ErrorCode::ArityMismatch, "circuit arities differ");
  double dev = 0;
  std::string kind;
  if (a.theory == Theory::QCground) {
    kind = "cptp";
    dev = superop_distance(eval_cptp(a, g_max_qubits), eval_cptp(b, g_max_qubits));
  } else {
    kind = "unitary";
    dev = max_abs_diff(eval_unitary(a, g_max_qubits), eval_unitary(b, g_max_qubits));
  }
  bool pass = dev <= g_tol;
  rep["results"].push_back(
      {{"name", "equiv"}, {"semantics", kind}, {"deviation", dev}, {"pass", pass}});
  finish(rep);
  std::cerr << (pass ? "equal" : "NOT equal") << " (max deviation " << dev
            << ", " << kind << " semantics)\n";
  return pass ? 0 : 1;
}

int cmd_check_rules(const std::string &theory, int trials, bool retired) {
  auto th = theory_from_name(theory);
  if (!th) throw Error(ErrorCode::InvalidInput, "unknown theory " + theory);
  json rep = base_report("check-rules");
  rep["inputs"] = {{"theory", theory}, {"trials", trials}, {"retired", retired}};
  std::mt19937_64 rng(g_seed);
  std::vector<std::string> names = retired ? retired_set() : axiom_set(*th);
  bool all = true;
  for (const std::string &name : names) {
    const Rule &r = find_rule(name);
    double worst = 0;
    bool pass = true;
    for (int t = 0; t < trials; ++t) {
      RuleInstance inst = instantiate_random(r, rng, 5);
      SoundnessReport s = *th == Theory::QCground
                              ? soundness_check_cptp(inst, {g_tol}, g_max_qubits)
                              : soundness_check(inst, {g_tol}, g_max_qubits);
      worst = std::max(worst, s.deviation);
      pass = pass && s.pass;
    }
    all = all && pass;
    rep["results"].push_back(
        {{"name", name}, {"trials", trials}, {"max_deviation", worst}, {"pass", pass}});
    std::cerr << (pass ? "PASS " : "FAIL ") << name << "  max dev " << worst
              << "\n";
  }
  finish(rep);
  return all ? 0 : 1;
}

int cmd_identities(const std::string &theory, int trials) {
  auto th = theory_from_name(theory);
  if (!th) throw Error(ErrorCode::InvalidInput, "unknown theory " + theory);
  json rep = base_report("identities");
  rep["inputs"] = {{"theory", theory}, {"trials", trials}};
  bool all = true;
  for (const IdentityReport &r :
       derived_identity_suite(*th, trials, g_seed, {g_tol})) {
    all = all && r.pass;
    rep["results"].push_back({{"name", r.rule},
                              {"trials", r.trials},
                              {"max_deviation", r.max_deviation},
                              {"pass", r.pass}});
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.rule << "  max dev "
              << r.max_deviation << "\n";
  }
  finish(rep);
  return all ? 0 : 1;
}

int cmd_apply(const std::string &path, const std::string &rule,
              const std::string &dir, int anchor, const std::string &wires,
              const std::string &params, const std::string &out_path) {
  Circuit c = load_circuit(path);
  bool l2r = dir != "R2L";
  MatchHints hints;
  if (anchor >= 0) hints.anchor = static_cast<std::size_t>(anchor);
  if (!wires.empty()) hints.wires = split_ints(wires);
  if (!params.empty()) hints.params = split_doubles(params);
  std::vector<Match> ms =
      anchor >= 0 || !wires.empty() || !params.empty()
          ? find_matches_hinted(c, rule, l2r, hints)
          : find_matches(c, rule, l2r);
  json rep = base_report("apply");
  rep["inputs"] = {{"circuit", path}, {"rule", rule}, {"dir", l2r ? "L2R" : "R2L"}};
  if (ms.empty()) {
    rep["results"].push_back({{"name", "match"}, {"pass", false}});
    finish(rep);
    std::cerr << "no match\n";
    return 1;
  }
  Circuit next = apply_match(c, ms.front());
  double dev = -1;
  if (c.theory != Theory::QCground) {
    dev = max_abs_diff(eval_unitary(c, g_max_qubits),
                       eval_unitary(next, g_max_qubits));
  } else {
    dev = superop_distance(eval_cptp(c, g_max_qubits),
                           eval_cptp(next, g_max_qubits));
  }
  rep["results"].push_back({{"name", "apply"},
                            {"anchor", ms.front().anchor},
                            {"deviation", dev},
                            {"pass", dev <= g_tol}});
  if (!out_path.empty()) save_circuit(next, out_path);
  std::cerr << circuit_to_text(next);
  finish(rep);
  return dev <= g_tol ? 0 : 1;
}

int cmd_replay(const std::string &script) {
  Derivation d = parse_derivation_file(script);
  ReplayReport r = replay(d, g_max_qubits);
  json rep = base_report("replay");
  rep["inputs"] = {{"script", script}, {"name", d.name}};
  for (const StepReport &s : r.steps) {
    rep["results"].push_back({{"name", "step " + std::to_string(s.index) + " " + s.rule},
                              {"deviation", s.deviation},
                              {"pass", s.ok},
                              {"message", s.message}});
    std::cerr << (s.ok ? "ok   " : "FAIL ") << "step " << s.index << " "
              << s.rule << "\n";
  }
  rep["results"].push_back({{"name", "end"},
                            {"pass", r.success},
                            {"message", r.message}});
  finish(rep);
  std::cerr << (r.success ? "replay succeeded\n" : "replay FAILED: " + r.message + "\n");
  return r.success ? 0 : 1;
}

int cmd_solve_kstar(const std::string &gamma_str) {
  std::vector<double> g = split_doubles(gamma_str);
  if (g.size() != 4)
    throw Error(ErrorCode::BadParameters, "--gamma expects four angles");
  KstarAngles k = solve_kstar({g[0], g[1], g[2], g[3]});
  double dev = max_abs_diff(kstar_rhs_block(k.delta), kstar_lhs_block(k.gamma));
  json rep = base_report("solve-kstar");
  rep["inputs"]["gamma"] = g;
  json deltas = json::array();
  for (double d : k.delta) deltas.push_back(d);
  rep["results"].push_back({{"name", "kstar"},
                            {"delta", deltas},
                            {"deviation", dev},
                            {"pass", dev <= g_tol}});
  finish(rep);
  return dev <= g_tol ? 0 : 1;
}

int cmd_euler(const std::string &path, const std::string &form) {
  Matrix u = matrix_from_file(path);
  EulerAngles e = form == "xzx" ? euler_xzx(u) : euler_zxz(u);
  Matrix back = form == "xzx" ? euler_xzx_matrix(e) : euler_zxz_matrix(e);
  double dev = max_abs_diff(back, u);
  json rep = base_report("euler");
  rep["inputs"] = {{"matrix", path}, {"form", form}};
  rep["results"].push_back({{"name", "euler"},
                            {"angles", {e.b0, e.b1, e.b2, e.b3}},
                            {"deviation", dev},
                            {"pass", dev <= 1e-10}});
  finish(rep);
  return dev <= 1e-10 ? 0 : 1;
}

int cmd_synth(const std::string &path, const std::string &kind,
              const std::string &out_path) {
  Matrix m = matrix_from_file(path);
  Circuit c;
  Matrix target = m;
  if (kind == "unitary") {
    c = synth_unitary(m, g_max_qubits);
  } else if (kind == "isometry") {
    c = synth_isometry(m, g_seed);
  } else {
    throw Error(ErrorCode::InvalidInput, "--kind must be unitary or isometry");
  }
  double dev = max_abs_diff(eval_unitary(c, g_max_qubits), target);
  json rep = base_report("synth");
  rep["inputs"] = {{"matrix", path}, {"kind", kind}};
  rep["results"].push_back({{"name", "synth"},
                            {"gates", c.gates.size()},
                            {"deviation", dev},
                            {"pass", dev <= 1e-8}});
  if (!out_path.empty()) save_circuit(c, out_path);
  finish(rep);
  return dev <= 1e-8 ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"quantum circuit equational-theory toolbox"};
  app.require_subcommand(1);
  app.fallthrough();

  if (const char *env = std::getenv("QCEQ_MAX_QUBITS"))
    g_max_qubits = std::atoi(env);

  app.add_option("--seed", g_seed, "deterministic RNG seed");
  app.add_option("--tol", g_tol, "absolute max-entry tolerance");
  app.add_option("--max-qubits", g_max_qubits, "evaluator dimension cap");

  std::string circuit, other, rule, dir = "L2R", wires, params, out_path,
              script, gamma, matrix, form = "zxz", kind = "unitary",
              theory = "qc";
  int trials = 20, anchor = -1;
  bool choi = false, retired = false;

  auto *eval = app.add_subcommand("eval", "evaluate a circuit");
  eval->add_option("--circuit", circuit)->required();
  eval->add_flag("--choi", choi, "dump the Choi matrix (CPTP only)");

  auto *equiv = app.add_subcommand("equiv", "semantic equivalence of two circuits");
  equiv->add_option("lhs", circuit)->required();
  equiv->add_option("rhs", other)->required();

  auto *check = app.add_subcommand("check-rules", "axiom soundness report");
  check->add_option("--theory", theory);
  check->add_option("--trials", trials);
  check->add_flag("--retired", retired, "check the retired rules instead");

  auto *ident = app.add_subcommand("identities", "derived-identity suite");
  ident->add_option("--theory", theory);
  ident->add_option("--trials", trials);

  auto *apply = app.add_subcommand("apply", "apply a rewrite rule");
  apply->add_option("--circuit", circuit)->required();
  apply->add_option("--rule", rule)->required();
  apply->add_option("--dir", dir)->check(CLI::IsMember({"L2R", "R2L"}));
  apply->add_option("--anchor", anchor);
  apply->add_option("--wires", wires);
  apply->add_option("--params", params);
  apply->add_option("--out", out_path);

  auto *rep = app.add_subcommand("replay", "replay a derivation script");
  rep->add_option("--script", script)->required();

  auto *kst = app.add_subcommand("solve-kstar", "canonical K* angles");
  kst->add_option("--gamma", gamma)->required();

  auto *eul = app.add_subcommand("euler", "canonical Euler angles of a 2x2 unitary");
  eul->add_option("--matrix", matrix)->required();
  eul->add_option("--form", form)->check(CLI::IsMember({"zxz", "xzx"}));

  auto *syn = app.add_subcommand("synth", "synthesize a circuit from a matrix");
  syn->add_option("--matrix", matrix)->required();
  syn->add_option("--kind", kind)->check(CLI::IsMember({"unitary", "isometry"}));
  syn->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return cmd_eval(circuit, choi);
    if (equiv->parsed()) return cmd_equiv(circuit, other);
    if (check->parsed()) return cmd_check_rules(theory, trials, retired);
    if (ident->parsed()) return cmd_identities(theory, trials);
    if (apply->parsed())
      return cmd_apply(circuit, rule, dir, anchor, wires, params, out_path);
    if (rep->parsed()) return cmd_replay(script);
    if (kst->parsed()) return cmd_solve_kstar(gamma);
    if (eul->parsed()) return cmd_euler(matrix, form);
    if (syn->parsed()) return cmd_synth(matrix, kind, out_path);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    bool usage = e.code() == ErrorCode::ParseError ||
                 e.code() == ErrorCode::InvalidInput ||
                 e.code() == ErrorCode::BadParameters ||
                 e.code() == ErrorCode::UnknownRule ||
                 e.code() == ErrorCode::IO;
    return usage ? 2 : 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
