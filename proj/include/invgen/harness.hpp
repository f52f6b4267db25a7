#pragma once

#include <array>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/chebotarev.hpp"
#include "invgen/crowns.hpp"
#include "invgen/errors.hpp"
#include "invgen/families.hpp"
#include "invgen/invariable.hpp"
#include "invgen/modlin.hpp"
#include "invgen/rational.hpp"

namespace invgen {

// ---------------------------------------------------------------------------
// Corpus

struct CorpusEntry {
  std::size_t line = 0;  // 1-based line in the corpus file
  nlohmann::json descriptor;
};

/// One JSON object per non-blank line.
inline std::vector<CorpusEntry> read_corpus(std::istream& in) {
  std::vector<CorpusEntry> out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back({line, nlohmann::json::parse(text)});
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("corpus line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

struct CorpusItem {
  std::string name;
  std::string tag;  // family, "explicit", "crownpower", "crownpower_general" or "module"
  Group group;
  std::optional<ModuleAction> module;  // H on V for crown-power entries
};

/// Group descriptor, {"module": ...} (V x| H), {"crownpower": {"module", "u"}}
/// or {"crownpower_general": {"group", "socle": "auto", "k"}}. An optional
/// top-level "name" overrides the generated one.
inline CorpusItem build_corpus_item(const nlohmann::json& d, const Limits& limits = {}) {
  if (!d.is_object()) throw InputError("corpus entry must be a JSON object");
  CorpusItem item{};
  if (d.contains("crownpower") || d.contains("module")) {
    const bool power = d.contains("crownpower");
    const auto& c = power ? d["crownpower"] : d;
    if (!c.is_object() || !c.contains("module")) throw InputError("crownpower needs a \"module\"");
    int u = 1;
    if (power) {
      u = json_int(c, "u");
      if (u < 0) throw InputError("crownpower: u must be nonnegative");
    }
    item.module = load_module_action(c["module"], limits);
    item.group = build_crown_power_abelian(*item.module, static_cast<std::size_t>(u), limits);
    item.tag = power ? "crownpower" : "module";
    item.name = "V^" + std::to_string(u) + ":" + item.module->group.name();
  } else if (d.contains("crownpower_general")) {
    const auto& c = d["crownpower_general"];
    if (!c.is_object() || !c.contains("group")) throw InputError("crownpower_general needs a \"group\"");
    if (c.contains("socle") && c["socle"] != "auto") throw InputError("crownpower_general: socle must be \"auto\"");
    const int k = json_int(c, "k");
    if (k < 1) throw InputError("crownpower_general: k must be positive");
    auto l = load_group(c["group"], limits);
    item.group = build_crown_power_general(l, monolith(l), static_cast<std::size_t>(k), limits);
    item.tag = "crownpower_general";
    item.name = l.name() + "_" + std::to_string(k);
  } else {
    item.group = load_group(d, limits);
    item.tag = d.contains("family") ? d["family"].get<std::string>() : "explicit";
    item.name = item.group.name();
  }
  if (d.contains("name") && d["name"].is_string()) item.name = d["name"].get<std::string>();
  return item;
}

// ---------------------------------------------------------------------------
// Coverage-table cache

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline nlohmann::json coverage_to_json(const Group& g, const ClassCoverageTable& t) {
  nlohmann::json j;
  j["canonical"] = g.canonical();
  j["class_of"] = t.classes.class_of;
  std::vector<Elem> reps;
  for (const auto& c : t.classes.classes) reps.push_back(c.representative);
  j["representatives"] = reps;
  j["maximal"] = nlohmann::json::array();
  for (const auto& m : t.max_classes) {
    std::vector<std::size_t> members = m.representative.members.indices();
    j["maximal"].push_back({{"members", members}, {"conjugates", m.conjugates}});
  }
  return j;
}

inline ClassCoverageTable coverage_from_json(const Group& g, const nlohmann::json& j) {
  if (j.at("canonical") != g.canonical()) throw InputError("cached coverage table belongs to another group");
  ConjugacyClasses cc;
  cc.class_of = j.at("class_of").get<std::vector<std::uint32_t>>();
  const auto reps = j.at("representatives").get<std::vector<Elem>>();
  if (cc.class_of.size() != g.order()) throw InputError("cached coverage table has the wrong order");
  for (Elem r : reps) cc.classes.push_back({r, 0, g.empty_set()});
  for (Elem x = 0; x < g.order(); ++x) {
    auto c = cc.class_of[x];
    if (c >= cc.classes.size()) throw InputError("cached coverage table: bad class index");
    cc.classes[c].members.set(x);
    ++cc.classes[c].size;
  }
  std::vector<MaximalClass> maxes;
  for (const auto& m : j.at("maximal")) {
    Bitset members = g.empty_set();
    for (auto x : m.at("members").get<std::vector<std::size_t>>()) members.set(x);
    auto rec = subgroup_from_members(g, std::move(members));
    rec.is_maximal = true;
    const auto conj = m.at("conjugates").get<std::size_t>();
    rec.is_normal = conj == 1;
    maxes.push_back({std::move(rec), conj});
  }
  return build_coverage(g, std::move(cc), std::move(maxes));
}

/// coverage_table memoised under dir, keyed by the canonical serialisation.
inline ClassCoverageTable coverage_table_cached(const Group& g, const std::optional<std::string>& dir) {
  if (!dir || dir->empty()) return coverage_table(g);
  namespace fs = std::filesystem;
  const auto canon = g.canonical();
  std::ostringstream name;
  name << "coverage-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canon) << ".json";
  const fs::path path = fs::path(*dir) / name.str();
  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      auto j = nlohmann::json::parse(in);
      if (j.at("canonical") == canon) return coverage_from_json(g, j);
    } catch (const std::exception&) {
      // unreadable or stale entry: recompute and overwrite
    }
  }
  auto t = coverage_table(g);
  std::error_code ec;
  fs::create_directories(*dir, ec);
  const fs::path tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    out << coverage_to_json(g, t).dump();
  }
  fs::rename(tmp, path, ec);
  return t;
}

/// Structural checks on a coverage table; returns one message per violation.
inline std::vector<std::string> check_coverage_table(const Group& g, const ClassCoverageTable& t) {
  std::vector<std::string> bad;
  if (t.order != g.order()) bad.push_back("order field differs from |G|");
  std::size_t total = 0;
  Bitset seen = g.empty_set();
  for (std::size_t c = 0; c < t.classes.size(); ++c) {
    const auto& cl = t.classes.classes[c];
    total += cl.size;
    if (cl.members.count() != cl.size) bad.push_back("class " + std::to_string(c) + ": size field wrong");
    if (g.order() % cl.size) bad.push_back("class " + std::to_string(c) + ": size does not divide |G|");
    if ((seen & cl.members).any()) bad.push_back("class " + std::to_string(c) + ": overlaps another class");
    seen |= cl.members;
  }
  if (total != g.order() || seen.count() != g.order()) bad.push_back("classes do not partition G");
  for (std::size_t m = 0; m < t.r(); ++m) {
    const auto& rep = t.max_classes[m].representative;
    const auto mo = rep.order();
    if (mo == 0 || mo >= g.order() || g.order() % mo) bad.push_back("maximal class " + std::to_string(m) + ": bad order");
    if (!rep.contains(Group::identity()) || closure(g, generators_of(g, rep.members)) != rep.members)
      bad.push_back("maximal class " + std::to_string(m) + ": not a subgroup");
    const auto conj = t.max_classes[m].conjugates;
    if (conj != 1 && conj != g.order() / mo) bad.push_back("maximal class " + std::to_string(m) + ": conjugate count");
    for (std::size_t c = 0; c < t.classes.size(); ++c) {
      const bool meets = (t.classes.classes[c].members & rep.members).any();
      if (meets != t.covers(c, m) || meets != t.covered_classes[m].test(c))
        bad.push_back("cell (" + std::to_string(c) + "," + std::to_string(m) + ") disagrees with the class/subgroup meet");
    }
    if (!t.covers(0, m)) bad.push_back("identity class not covered by maximal class " + std::to_string(m));
    if (t.union_size(m) >= g.order()) bad.push_back("maximal class " + std::to_string(m) + ": conjugates cover G");
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Survey

inline nlohmann::json rational_json(const Rational& r) {
  auto field = [](const BigInt& v) -> nlohmann::json {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
      return v.convert_to<std::int64_t>();
    return v.str();
  };
  return {{"num", field(numerator_of(r))}, {"den", field(denominator_of(r))}};
}

inline constexpr std::size_t kNoMinK = static_cast<std::size_t>(-1);

struct SurveyRow {
  std::size_t index = 0;  // position in the corpus
  std::size_t line = 0;
  std::string name, tag;
  std::size_t order = 0, r = 0;
  std::optional<Rational> c_exact;
  McEstimate mc;
  double ratio_sqrt = 0, sqrt_order = 0;
  std::optional<double> klz_ratio;
  std::size_t min_k_29 = kNoMinK;
  std::optional<Rational> p_at_min_k;
  std::optional<bool> bound_holds;  // C(G) <= k / P_I(G,k) at k = min_k_29
  // (m, fix_prob * |H|, m^2) for crown-power rows
  std::optional<std::array<long long, 3>> diagnostics;
  std::string error, error_kind;

  double c_value() const { return c_exact ? to_double(*c_exact) : mc.estimate; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["index"] = index;
    j["line"] = line;
    j["name"] = name;
    j["tag"] = tag;
    if (!error.empty()) {
      j["error"] = error;
      j["error_kind"] = error_kind;
      return j;
    }
    j["order"] = order;
    j["r"] = r;
    j["c_exact"] = c_exact ? rational_json(*c_exact) : nlohmann::json(nullptr);
    j["c_mc"] = mc.estimate;
    j["mc_stderr"] = mc.stderr_;
    j["trials"] = mc.trials;
    j["seed"] = mc.seed;
    j["sqrt_order"] = sqrt_order;
    j["ratio_sqrt"] = ratio_sqrt;
    j["klz_ratio"] = klz_ratio ? nlohmann::json(*klz_ratio) : nlohmann::json(nullptr);
    j["min_k_29"] = min_k_29 == kNoMinK ? nlohmann::json(nullptr) : nlohmann::json(min_k_29);
    j["p_at_min_k"] = p_at_min_k ? rational_json(*p_at_min_k) : nlohmann::json(nullptr);
    j["bound_holds"] = bound_holds ? nlohmann::json(*bound_holds) : nlohmann::json(nullptr);
    if (diagnostics)
      j["diagnostics"] = {{"m", (*diagnostics)[0]}, {"fix_prob_times_H", (*diagnostics)[1]}, {"m_squared", (*diagnostics)[2]}};
    return j;
  }
};

struct SurveyOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  Limits limits;
  std::optional<std::string> cache_dir;
};

/// Number of h in H fixing a nonzero vector of V.
inline std::size_t fixing_elements(const ModuleAction& act) {
  std::size_t n = 0;
  for (Elem h = 0; h < act.group.order(); ++h) n += fixed_space(act, h).dim() > 0;
  return n;
}

inline SurveyRow survey_row(const CorpusEntry& entry, std::size_t index, const SurveyOptions& opt) {
  SurveyRow row;
  row.index = index;
  row.line = entry.line;
  try {
    auto item = build_corpus_item(entry.descriptor, opt.limits);
    row.name = item.name;
    row.tag = item.tag;
    const auto& g = item.group;
    row.order = g.order();
    row.sqrt_order = std::sqrt(static_cast<double>(row.order));
    auto table = coverage_table_cached(g, opt.cache_dir);
    row.r = table.r();
    if (row.r <= kInclusionExclusionCap) {
      auto ie = inclusion_exclusion(table);
      row.c_exact = chebotarev_exact(ie);
      const Rational threshold(2, 9);
      row.min_k_29 = min_k_for_probability(ie, threshold);
      row.p_at_min_k = p_invariable_exact(ie, static_cast<unsigned>(row.min_k_29));
      if (*row.p_at_min_k > 0)
        row.bound_holds = *row.c_exact * *row.p_at_min_k <= Rational(static_cast<long long>(row.min_k_29));
      else
        row.bound_holds = g.is_trivial();
    }
    row.mc = chebotarev_montecarlo(table, opt.trials, opt.seed, 1);
    row.ratio_sqrt = row.c_value() / row.sqrt_order;
    if (row.order >= 2) row.klz_ratio = row.c_value() / std::sqrt(row.order * std::log(static_cast<double>(row.order)));
    if (item.module && item.module->irreducible && !item.module->group.is_trivial()) {
      auto der = derivation_space(*item.module);
      const auto m = static_cast<long long>(der.m);
      row.diagnostics = std::array<long long, 3>{m, static_cast<long long>(fixing_elements(*item.module)), m * m};
    }
  } catch (const CapExceeded& e) {
    row.error = e.what();
    row.error_kind = "cap";
  } catch (const InputError& e) {
    row.error = e.what();
    row.error_kind = "input";
  } catch (const PreconditionError& e) {
    row.error = e.what();
    row.error_kind = "precondition";
  }
  return row;
}

/// Rows are handed to sink in corpus order whatever order the workers finish in.
inline std::vector<SurveyRow> run_survey(const std::vector<CorpusEntry>& corpus, const SurveyOptions& opt,
                                         const std::function<void(const SurveyRow&)>& sink = {}) {
  const std::size_t n = corpus.size();
  std::vector<std::optional<SurveyRow>> done(n);
  std::vector<SurveyRow> out;
  std::mutex mu;
  std::size_t next_task = 0, next_emit = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next_task >= n || failure) return;
        i = next_task++;
      }
      std::optional<SurveyRow> row;
      try {
        row = survey_row(corpus[i], i, opt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      done[i] = std::move(row);
      while (next_emit < n && done[next_emit]) {
        if (sink) sink(*done[next_emit]);
        out.push_back(std::move(*done[next_emit]));
        done[next_emit].reset();
        ++next_emit;
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(std::max<std::size_t>(1, n))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline void write_survey_csv_header(std::ostream& os) {
  os << "name,tag,order,r,c_exact_num,c_exact_den,c_mc,stderr,trials,seed,ratio_sqrt,min_k_29,klz_ratio,error\n";
}

inline void write_survey_csv_row(std::ostream& os, const SurveyRow& row) {
  std::ostringstream s;
  s << std::setprecision(12);
  s << csv_field(row.name) << ',' << csv_field(row.tag) << ',';
  if (!row.error.empty()) {
    s << ",,,,,,,,,,," << csv_field(row.error) << '\n';
    os << s.str();
    return;
  }
  s << row.order << ',' << row.r << ',';
  if (row.c_exact) s << numerator_of(*row.c_exact) << ',' << denominator_of(*row.c_exact);
  else s << ',';
  s << ',' << row.mc.estimate << ',' << row.mc.stderr_ << ',' << row.mc.trials << ',' << row.mc.seed << ','
    << row.ratio_sqrt << ',';
  if (row.min_k_29 != kNoMinK) s << row.min_k_29;
  s << ',';
  if (row.klz_ratio) s << *row.klz_ratio;
  s << ",\n";
  os << s.str();
}

struct SurveySummary {
  std::size_t rows = 0, errors = 0;
  double max_ratio_sqrt = 0;
  std::string max_ratio_group;
  std::size_t bound_violations = 0;
};

inline SurveySummary summarize(const std::vector<SurveyRow>& rows) {
  SurveySummary s;
  s.rows = rows.size();
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++s.errors;
      continue;
    }
    if (r.ratio_sqrt > s.max_ratio_sqrt) {
      s.max_ratio_sqrt = r.ratio_sqrt;
      s.max_ratio_group = r.name;
    }
    if (r.bound_holds && !*r.bound_holds) ++s.bound_violations;
  }
  return s;
}

// ---------------------------------------------------------------------------
// AGL(1,q) trend

struct AglRow {
  int q = 0;
  std::size_t order = 0;
  Rational c_exact;
  double c_over_q = 0;
};

inline AglRow agl_trend_row(int q, const Limits& limits = {}) {
  if (q < 2 || q > 256) throw InputError("agl-trend: q = " + std::to_string(q) + " unsupported");
  auto g = families::agl1(q, limits);
  AglRow row;
  row.q = q;
  row.order = g.order();
  row.c_exact = chebotarev_exact(coverage_table(g));
  row.c_over_q = to_double(row.c_exact) / q;
  return row;
}

inline std::vector<AglRow> agl_trend(const std::vector<int>& qs, const Limits& limits = {}) {
  std::vector<AglRow> out;
  for (int q : qs) out.push_back(agl_trend_row(q, limits));
  return out;
}

// ---------------------------------------------------------------------------
// Binomial tails

inline double gamma_epsilon(double eps) {
  const double alpha = 1.0 - std::exp(-1.0);
  return (1.0 - std::log(1.0 - eps)) / alpha;
}

inline Rational rational_pow(const Rational& r, unsigned e) {
  return Rational(boost::multiprecision::pow(numerator_of(r), e), boost::multiprecision::pow(denominator_of(r), e));
}

/// P(B(m, p) >= l), exact.
inline Rational binomial_upper_tail(std::uint64_t m, const Rational& p, std::uint64_t l) {
  if (p < 0 || p > 1) throw PreconditionError("binomial tail: p outside [0, 1]");
  if (l == 0) return Rational(1);
  if (l > m) return Rational(0);
  const Rational q = 1 - p;
  if (q == 0) return Rational(1);
  // term_i = C(m,i) p^i q^(m-i), built upwards from term_0 = q^m
  Rational term = rational_pow(q, static_cast<unsigned>(m));
  Rational below = 0;
  const Rational ratio = p / q;
  for (std::uint64_t i = 0; i < l; ++i) {
    below += term;
    term *= ratio * Rational(static_cast<long long>(m - i), static_cast<long long>(i + 1));
  }
  return 1 - below;
}

struct BinomialCheckRow {
  Rational epsilon, p;
  std::uint64_t l = 0;
  double gamma = 0;
  std::uint64_t mm = 0;
  Rational tail;
  bool holds = false;
};

inline BinomialCheckRow binomial_check_row(const Rational& eps, const Rational& p, std::uint64_t l) {
  if (!(eps > 0 && eps < 1)) throw PreconditionError("binom-check: epsilon must lie in (0, 1)");
  if (!(p > 0 && p < 1)) throw PreconditionError("binom-check: p must lie in (0, 1)");
  if (l < 1) throw PreconditionError("binom-check: l must be at least 1");
  BinomialCheckRow row;
  row.epsilon = eps;
  row.p = p;
  row.l = l;
  row.gamma = gamma_epsilon(to_double(eps));
  row.mm = static_cast<std::uint64_t>(std::ceil(row.gamma * static_cast<double>(l) / to_double(p)));
  row.tail = binomial_upper_tail(row.mm, p, l);
  row.holds = row.tail >= eps;
  return row;
}

inline std::vector<BinomialCheckRow> binomial_check(const std::vector<Rational>& eps, const std::vector<Rational>& ps,
                                                    const std::vector<std::uint64_t>& ls) {
  std::vector<BinomialCheckRow> out;
  for (const auto& e : eps)
    for (const auto& p : ps)
      for (auto l : ls) out.push_back(binomial_check_row(e, p, l));
  return out;
}

inline nlohmann::json to_json(const BinomialCheckRow& r) {
  return {{"epsilon", rational_json(r.epsilon)}, {"p", rational_json(r.p)}, {"l", r.l},       {"gamma", r.gamma},
          {"mm", r.mm},                          {"tail", rational_json(r.tail)}, {"tail_float", to_double(r.tail)},
          {"holds", r.holds}};
}

inline nlohmann::json to_json(const AglRow& r) {
  return {{"q", r.q}, {"order", r.order}, {"c_exact", rational_json(r.c_exact)}, {"c_over_q", r.c_over_q}};
}

}  // namespace invgen
