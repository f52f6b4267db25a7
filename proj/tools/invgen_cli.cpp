#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "invgen/crowns.hpp"
#include "invgen/harness.hpp"
#include "invgen/verify.hpp"

using namespace invgen;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInput = 2, kCap = 3 };

struct Globals {
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  unsigned threads = 1;
  std::string out;
  std::string format = "json";
};

// Inline JSON if it starts with '{', otherwise a file path.
json read_descriptor(const std::string& arg) {
  std::string text = arg;
  if (arg.find_first_not_of(" \t") == std::string::npos || arg[arg.find_first_not_of(" \t")] != '{') {
    std::ifstream in(arg);
    if (!in) throw InputError("cannot open " + arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("descriptor is not valid JSON: ") + e.what());
  }
}

json perm_json(const Group& g, Elem e) {
  json a = json::array();
  for (auto p : g.images(e)) a.push_back(p + 1);
  return a;
}

json subgroup_json(const Group& g, const SubgroupRecord& s) {
  json gens = json::array();
  for (Elem e : s.generators) gens.push_back(perm_json(g, e));
  return {{"order", s.order()}, {"generators", gens}};
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }
  void emit(const json& j) { os() << j.dump() << "\n"; }

private:
  std::ofstream file_;
};

json cheb_report(const Group& g, const ClassCoverageTable& t) {
  json j{{"group", g.name()}, {"order", g.order()}, {"r", t.r()}};
  if (t.r() > kInclusionExclusionCap) throw CapExceeded("inclusion-exclusion (use cheb mc)", kInclusionExclusionCap);
  auto ie = inclusion_exclusion(t);
  const auto c = chebotarev_exact(ie);
  const auto k = min_k_for_probability(ie, Rational(2, 9));
  j["c_exact"] = rational_json(c);
  j["c_float"] = to_double(c);
  j["ratio_sqrt"] = to_double(c) / std::sqrt(static_cast<double>(g.order()));
  j["min_k_29"] = k;
  j["p_at_min_k"] = rational_json(p_invariable_exact(ie, k));
  return j;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int run_cheb(const Globals& gl, const std::string& mode, const std::string& desc) {
  auto g = load_group(read_descriptor(desc));
  const auto cache = std::getenv("INVGEN_CACHE_DIR");
  auto t = coverage_table_cached(g, cache ? std::optional<std::string>(cache) : std::nullopt);
  Output out(gl.out);
  if (mode == "exact") {
    out.emit(cheb_report(g, t));
  } else {
    auto mc = chebotarev_montecarlo(t, gl.trials, gl.seed, gl.threads);
    out.emit({{"group", g.name()},
              {"order", g.order()},
              {"r", t.r()},
              {"c_mc", mc.estimate},
              {"mc_stderr", mc.stderr_},
              {"trials", mc.trials},
              {"seed", mc.seed}});
  }
  return kOk;
}

int run_pinv(const Globals& gl, const std::string& desc, unsigned k) {
  auto g = load_group(read_descriptor(desc));
  auto t = coverage_table(g);
  Output(gl.out).emit({{"group", g.name()}, {"k", k}, {"p_invariable", rational_json(p_invariable_exact(t, k))}});
  return kOk;
}

int run_mink(const Globals& gl, const std::string& desc, const std::string& threshold) {
  auto g = load_group(read_descriptor(desc));
  const auto th = parse_rational(threshold);
  auto ie = inclusion_exclusion(coverage_table(g));
  const auto k = min_k_for_probability(ie, th);
  Output(gl.out).emit({{"group", g.name()},
                       {"threshold", rational_json(th)},
                       {"k", k},
                       {"p_invariable", rational_json(p_invariable_exact(ie, k))}});
  return kOk;
}

int run_h1(const Globals& gl, const std::string& desc) {
  auto act = load_module_action(read_descriptor(desc));
  auto der = derivation_space(act);
  json j{{"group", act.group.name()}, {"order", act.group.order()}, {"p", act.p},         {"dim", act.dim},
         {"irreducible", act.irreducible}, {"dim_der", der.dim_der}, {"dim_ider", der.dim_ider}, {"e", der.e},
         {"m", der.m},                 {"over_end_field", der.over_end_field}};
  if (act.irreducible) {
    auto f = end_algebra(act);
    j["n"] = f.n;
    j["q"] = f.q;
  }
  Output(gl.out).emit(j);
  return kOk;
}

int run_crowns(const Globals& gl, const std::string& desc) {
  auto g = load_group(read_descriptor(desc));
  auto ns = normal_structure(g);
  auto series = chief_series(ns);
  json factors = json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& f = series[i];
    json fj{{"index", i},
            {"upper", subgroup_json(g, f.upper)},
            {"lower", subgroup_json(g, f.lower)},
            {"order", f.order},
            {"abelian", f.is_abelian},
            {"frattini", f.is_frattini}};
    if (f.is_abelian && !f.is_frattini) {
      auto c = abelian_crown(ns, series, i);
      fj["crown"] = {{"delta", c.delta}, {"R", subgroup_json(g, c.R)}, {"I", subgroup_json(g, c.I)}};
    }
    factors.push_back(fj);
  }
  json j{{"group", g.name()}, {"order", g.order()}, {"chief_factors", factors}};
  try {
    auto c = corona_decomposition(ns, series);
    j["corona"] = {{"factor", c.factor}, {"delta", c.delta}, {"R", subgroup_json(g, c.R)},
                   {"I", subgroup_json(g, c.I)}, {"U", subgroup_json(g, *c.U)}};
  } catch (const PreconditionError& e) {
    j["corona"] = {{"error", e.what()}};
  }
  Output(gl.out).emit(j);
  return kOk;
}

int run_lift(const Globals& gl, const std::string& desc) {
  auto [ctx, pr] = load_lift_problem(read_descriptor(desc));
  json j{{"u", pr.u}, {"d", pr.hs.size()}, {"n", ctx.field.n}, {"q", ctx.field.q}, {"m", ctx.der.m}};
  auto attempt = [&](const char* key, auto&& f) {
    try {
      j[key] = f();
    } catch (const PreconditionError& e) {
      j[key] = {{"error", e.what()}};
    }
  };
  attempt("gen_criterion", [&] { return json(gen_criterion(ctx, pr)); });
  attempt("invgen_criterion", [&] { return json(invgen_criterion(ctx, pr)); });
  attempt("max_rank_generate", [&] { return json(max_lift_rank(ctx, pr.hs, LiftMode::generate).u_max); });
  attempt("max_rank_invariable",
          [&] { return json(max_lift_rank(ctx, pr.hs, LiftMode::invariably_generate).u_max); });
  auto dc = dimen_bound_check(ctx, pr.hs);
  j["dimen"] = {{"lhs", dc.lhs}, {"rhs", dc.rhs}, {"holds", dc.holds}};
  Output(gl.out).emit(j);
  return dc.holds ? kOk : kViolation;
}

std::string csv_path_for(const std::string& jsonl) {
  const auto dot = jsonl.rfind('.');
  const auto slash = jsonl.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return jsonl + ".csv";
  return jsonl.substr(0, dot) + ".csv";
}

int run_survey_cmd(const Globals& gl, const std::string& corpus_path) {
  std::ifstream in(corpus_path);
  if (!in) throw InputError("cannot open " + corpus_path);
  auto corpus = read_corpus(in);
  SurveyOptions opt;
  opt.trials = gl.trials;
  opt.seed = gl.seed;
  opt.threads = gl.threads;
  if (const auto dir = std::getenv("INVGEN_CACHE_DIR")) opt.cache_dir = dir;

  Output out(gl.out);
  std::ofstream csv;
  const bool csv_main = gl.format == "csv";
  if (!gl.out.empty() && !csv_main) {
    csv.open(csv_path_for(gl.out));
    if (!csv) throw InputError("cannot write " + csv_path_for(gl.out));
  }
  if (csv_main) write_survey_csv_header(out.os());
  if (csv.is_open()) write_survey_csv_header(csv);
  auto rows = run_survey(corpus, opt, [&](const SurveyRow& r) {
    if (csv_main) {
      write_survey_csv_row(out.os(), r);
    } else {
      out.emit(r.to_json());
    }
    if (csv.is_open()) write_survey_csv_row(csv, r);
  });
  const auto s = summarize(rows);
  std::cerr << "rows " << s.rows << ", errors " << s.errors << ", max C/sqrt|G| = " << s.max_ratio_sqrt;
  if (!s.max_ratio_group.empty()) std::cerr << " (" << s.max_ratio_group << ")";
  std::cerr << ", bound violations " << s.bound_violations << "\n";
  return s.bound_violations == 0 ? kOk : kViolation;
}

int run_agl(const Globals& gl, const std::string& qs) {
  std::vector<int> list;
  for (const auto& q : split(qs)) {
    try {
      list.push_back(std::stoi(q));
    } catch (const std::exception&) {
      throw InputError("bad q: " + q);
    }
  }
  auto rows = agl_trend(list);
  Output out(gl.out);
  if (gl.format == "csv") {
    out.os() << "q,order,c_exact_num,c_exact_den,c_over_q\n";
    for (const auto& r : rows)
      out.os() << r.q << "," << r.order << "," << numerator_of(r.c_exact) << "," << denominator_of(r.c_exact) << ","
               << r.c_over_q << "\n";
  } else {
    for (const auto& r : rows) out.emit(to_json(r));
  }
  return kOk;
}

int run_binom(const Globals& gl, const std::string& eps, const std::string& ps, const std::string& ls) {
  std::vector<Rational> e, p;
  std::vector<std::uint64_t> l;
  for (const auto& s : split(eps)) e.push_back(parse_rational(s));
  for (const auto& s : split(ps)) p.push_back(parse_rational(s));
  for (const auto& s : split(ls)) {
    const auto dash = s.find('-');
    try {
      const long long lo = std::stoll(s.substr(0, dash));
      const long long hi = dash == std::string::npos ? lo : std::stoll(s.substr(dash + 1));
      if (lo < 0 || hi < lo) throw InputError("bad l range: " + s);
      for (long long v = lo; v <= hi; ++v) l.push_back(static_cast<std::uint64_t>(v));
    } catch (const std::logic_error&) {
      throw InputError("bad l: " + s);
    }
  }
  auto rows = binomial_check(e, p, l);
  Output out(gl.out);
  if (gl.format == "csv") out.os() << "epsilon,p,l,gamma,mm,tail,holds\n";
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.holds;
    if (gl.format == "csv")
      out.os() << to_string(r.epsilon) << "," << to_string(r.p) << "," << r.l << "," << r.gamma << "," << r.mm << ","
               << to_double(r.tail) << "," << (r.holds ? "true" : "false") << "\n";
    else
      out.emit(to_json(r));
  }
  return ok ? kOk : kViolation;
}

int run_verify(const Globals& gl) {
  auto report = verify_props(gl.seed);
  Output(gl.out).os() << report.dump(2) << "\n";
  return report["ok"].get<bool>() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariable generation and Chebotarev invariant toolkit"};
  app.require_subcommand(1);
  Globals gl;
  app.add_option("--seed", gl.seed, "RNG seed")->capture_default_str();
  app.add_option("--trials", gl.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--threads", gl.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", gl.out, "output file (default stdout)");
  app.add_option("--format", gl.format, "output format")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  app.fallthrough();

  std::string desc, mode = "exact", threshold = "2/9", qs = "2,3,4,5,7,8,9,11,13";
  std::string eps = "1/2,6/7", ps = "0.01,0.05,0.1,0.25,0.5", ls = "1-10";
  unsigned k = 1;
  std::function<int()> action;

  auto* cheb = app.add_subcommand("cheb", "Chebotarev invariant C(G)");
  cheb->add_option("mode", mode, "exact or mc")->required()->check(CLI::IsMember({"exact", "mc"}));
  cheb->add_option("group", desc, "group descriptor (JSON or file)")->required();
  cheb->callback([&] { action = [&] { return run_cheb(gl, mode, desc); }; });

  auto* pinv = app.add_subcommand("pinv", "exact P_I(G,k)");
  pinv->add_option("group", desc, "group descriptor")->required();
  pinv->add_option("-k", k, "number of elements")->capture_default_str();
  pinv->callback([&] { action = [&] { return run_pinv(gl, desc, k); }; });

  auto* mink = app.add_subcommand("mink", "least k with P_I(G,k) >= threshold");
  mink->add_option("group", desc, "group descriptor")->required();
  mink->add_option("--threshold", threshold, "rational threshold")->capture_default_str();
  mink->callback([&] { action = [&] { return run_mink(gl, desc, threshold); }; });

  auto* h1 = app.add_subcommand("h1", "derivations and H^1 of a module");
  h1->add_option("module", desc, "module descriptor")->required();
  h1->callback([&] { action = [&] { return run_h1(gl, desc); }; });

  auto* crowns = app.add_subcommand("crowns", "chief series, abelian crowns, corona decomposition");
  crowns->add_option("group", desc, "group descriptor")->required();
  crowns->callback([&] { action = [&] { return run_crowns(gl, desc); }; });

  auto* lift = app.add_subcommand("lift", "generation criteria for lifts to V^u : H");
  lift->add_option("problem", desc, "lift descriptor")->required();
  lift->callback([&] { action = [&] { return run_lift(gl, desc); }; });

  auto* survey = app.add_subcommand("survey", "bound-ratio survey over a JSONL corpus");
  survey->add_option("corpus", desc, "corpus file")->required();
  survey->callback([&] { action = [&] { return run_survey_cmd(gl, desc); }; });

  auto* agl = app.add_subcommand("agl-trend", "C(AGL(1,q))/q");
  agl->add_option("--q", qs, "comma-separated q list")->capture_default_str();
  agl->callback([&] { action = [&] { return run_agl(gl, qs); }; });

  auto* binom = app.add_subcommand("binom-check", "exact binomial tails at m = ceil(gamma l / p)");
  binom->add_option("--eps", eps, "comma-separated epsilons")->capture_default_str();
  binom->add_option("--p", ps, "comma-separated probabilities")->capture_default_str();
  binom->add_option("--l", ls, "comma-separated l values or ranges a-b")->capture_default_str();
  binom->callback([&] { action = [&] { return run_binom(gl, eps, ps, ls); }; });

  auto* verify = app.add_subcommand("verify", "run every property suite");
  verify->callback([&] { action = [&] { return run_verify(gl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    return action();
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kViolation;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  }
}
