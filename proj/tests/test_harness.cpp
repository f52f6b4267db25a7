#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "invgen/harness.hpp"
#include "invgen/verify.hpp"

using namespace invgen;

namespace {

std::vector<CorpusEntry> corpus_of(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in);
}

std::string jsonl(const std::vector<SurveyRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.to_json().dump() + "\n";
  return out;
}

// P(B(m,p) >= l) by summing over all 2^m outcome strings.
Rational tail_by_outcomes(unsigned m, const Rational& p, unsigned l) {
  Rational total = 0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    const auto ones = static_cast<unsigned>(std::popcount(mask));
    if (ones < l) continue;
    Rational w = 1;
    for (unsigned i = 0; i < m; ++i) w *= (mask >> i) & 1u ? p : 1 - p;
    total += w;
  }
  return total;
}

}  // namespace

TEST(Corpus, Parsing) {
  auto c = corpus_of("{\"family\":\"cyclic\",\"n\":2}\n\n  \n{\"family\":\"sym\",\"n\":3}\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].line, 4u);
  EXPECT_THROW(corpus_of("{\"family\":\n"), InputError);
  EXPECT_TRUE(corpus_of("").empty());
}

TEST(Corpus, Items) {
  auto a = build_corpus_item(nlohmann::json::parse(R"({"family":"agl1","q":5})"));
  EXPECT_EQ(a.tag, "agl1");
  EXPECT_EQ(a.group.order(), 20u);
  auto e = build_corpus_item(nlohmann::json::parse(R"({"degree":3,"generators":[[2,1,3],[2,3,1]],"name":"S3"})"));
  EXPECT_EQ(e.tag, "explicit");
  EXPECT_EQ(e.name, "S3");
  auto cp = build_corpus_item(nlohmann::json::parse(
      R"({"crownpower":{"module":{"group":{"family":"cyclic","n":2},"p":3,"dim":1,"matrices":[[[2]]]},"u":2}})"));
  EXPECT_EQ(cp.group.order(), 18u);
  ASSERT_TRUE(cp.module.has_value());
  auto gp = build_corpus_item(
      nlohmann::json::parse(R"({"crownpower_general":{"group":{"family":"sym","n":3},"socle":"auto","k":3}})"));
  EXPECT_EQ(gp.group.order(), 54u);
  EXPECT_THROW(build_corpus_item(nlohmann::json::parse(R"({"family":"nope"})")), InputError);
  EXPECT_THROW(build_corpus_item(nlohmann::json::parse(R"({"crownpower_general":{"group":{"family":"cyclic","n":6},"k":2}})")),
               PreconditionError);
}

TEST(Survey, SmallCorpus) {
  auto c = corpus_of(R"({"family":"cyclic","n":2}
{"family":"cyclic","n":3}
{"family":"sym","n":3})");
  SurveyOptions opt;
  opt.trials = 2000;
  auto rows = run_survey(c, opt);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(*rows[0].c_exact, Rational(2));
  EXPECT_EQ(*rows[1].c_exact, Rational(3, 2));
  EXPECT_EQ(*rows[2].c_exact, Rational(19, 5));
  EXPECT_EQ(rows[2].min_k_29, 2u);
  EXPECT_EQ(*rows[2].p_at_min_k, Rational(1, 3));
  for (const auto& r : rows) {
    EXPECT_TRUE(r.error.empty());
    EXPECT_TRUE(*r.bound_holds);
    EXPECT_GT(r.ratio_sqrt, 0);
    EXPECT_NEAR(r.ratio_sqrt, to_double(*r.c_exact) / std::sqrt(static_cast<double>(r.order)), 1e-12);
  }
  auto j = rows[2].to_json();
  EXPECT_EQ(j["c_exact"]["num"], 19);
  EXPECT_EQ(j["c_exact"]["den"], 5);
  EXPECT_EQ(j["trials"], 2000);
}

TEST(Survey, EmptyCorpus) {
  SurveyOptions opt;
  EXPECT_TRUE(run_survey({}, opt).empty());
  EXPECT_EQ(summarize({}).rows, 0u);
}

TEST(Survey, ErrorRowsDoNotStopTheRun) {
  auto c = corpus_of(R"({"family":"cyclic","n":2}
{"family":"sym","n":7}
{"family":"nope"}
{"family":"cyclic","n":3})");
  SurveyOptions opt;
  opt.trials = 100;
  auto rows = run_survey(c, opt);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].error_kind, "cap");
  EXPECT_NE(rows[1].error.find("cap"), std::string::npos);
  EXPECT_EQ(rows[2].error_kind, "input");
  EXPECT_TRUE(rows[3].error.empty());
  EXPECT_TRUE(rows[1].to_json().contains("error"));
  auto s = summarize(rows);
  EXPECT_EQ(s.errors, 2u);
}

TEST(Survey, DeterministicAcrossThreadCounts) {
  auto c = corpus_of(R"({"family":"sym","n":4}
{"family":"dihedral","n":5}
{"family":"agl1","q":7}
{"family":"alt","n":5}
{"family":"cyclic","n":12}
{"family":"elemab","p":2,"k":3})");
  SurveyOptions opt;
  opt.trials = 3000;
  opt.seed = 99;
  const auto one = jsonl(run_survey(c, opt));
  opt.threads = 4;
  std::vector<std::size_t> order;
  const auto four = jsonl(run_survey(c, opt, [&](const SurveyRow& r) { order.push_back(r.index); }));
  EXPECT_EQ(one, four);
  EXPECT_EQ(order, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  opt.seed = 100;
  EXPECT_NE(one, jsonl(run_survey(c, opt)));
}

TEST(Survey, CsvShape) {
  auto c = corpus_of(R"({"family":"sym","n":3,"name":"Sym, three"}
{"family":"sym","n":7})");
  SurveyOptions opt;
  opt.trials = 100;
  std::ostringstream os;
  write_survey_csv_header(os);
  for (const auto& r : run_survey(c, opt)) write_survey_csv_row(os, r);
  std::istringstream in(os.str());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header.substr(0, 40), "name,tag,order,r,c_exact_num,c_exact_den");
  EXPECT_EQ(first.substr(0, 26), "\"Sym, three\",sym,6,2,19,5,");
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(second.begin(), second.end(), ','));
}

TEST(Cache, RoundTrip) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "invgen-cache-test";
  fs::remove_all(dir);
  auto g = families::symmetric(4);
  auto fresh = coverage_table(g);
  auto first = coverage_table_cached(g, dir.string());
  ASSERT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
  auto second = coverage_table_cached(g, dir.string());
  for (const auto* t : {&first, &second}) {
    EXPECT_EQ(t->covered_by, fresh.covered_by);
    EXPECT_EQ(t->classes.class_of, fresh.classes.class_of);
    EXPECT_EQ(chebotarev_exact(*t), chebotarev_exact(fresh));
    EXPECT_TRUE(check_coverage_table(g, *t).empty());
  }
  // a corrupt entry is recomputed
  for (const auto& f : fs::directory_iterator(dir)) std::ofstream(f.path()) << "{not json";
  EXPECT_EQ(coverage_table_cached(g, dir.string()).covered_by, fresh.covered_by);
  fs::remove_all(dir);
}

TEST(CoverageCheck, DetectsCorruption) {
  auto g = families::symmetric(4);
  auto t = coverage_table(g);
  EXPECT_TRUE(check_coverage_table(g, t).empty());
  auto bad = t;
  const auto c = bad.classes.size() - 1;
  if (bad.covered_by[c].test(0)) bad.covered_by[c].reset(0);
  else bad.covered_by[c].set(0);
  EXPECT_FALSE(check_coverage_table(g, bad).empty());
  auto bad2 = t;
  bad2.classes.classes[1].size += 1;
  EXPECT_FALSE(check_coverage_table(g, bad2).empty());
}

TEST(AglTrend, Examples) {
  auto rows = agl_trend({2, 3, 4});
  EXPECT_EQ(rows[0].c_exact, Rational(2));
  EXPECT_DOUBLE_EQ(rows[0].c_over_q, 1.0);
  EXPECT_EQ(rows[1].c_exact, Rational(19, 5));
  EXPECT_NEAR(rows[1].c_over_q, 19.0 / 15.0, 1e-12);
  EXPECT_EQ(rows[2].order, 12u);
  EXPECT_THROW(agl_trend({6}), InputError);
}

TEST(Binomial, TailAgainstOutcomeSum) {
  for (unsigned m : {1u, 4u, 9u, 12u})
    for (const auto& p : {Rational(1, 2), Rational(1, 20), Rational(3, 7)})
      for (unsigned l = 0; l <= m + 1; ++l) EXPECT_EQ(binomial_upper_tail(m, p, l), tail_by_outcomes(m, p, l));
}

TEST(Binomial, Examples) {
  auto a = binomial_check_row(Rational(1, 2), Rational(1, 2), 1);
  EXPECT_EQ(a.mm, static_cast<std::uint64_t>(std::ceil(2 * gamma_epsilon(0.5))));
  EXPECT_TRUE(a.holds);
  EXPECT_GE(a.tail, Rational(1, 2));
  auto b = binomial_check_row(Rational(6, 7), parse_rational("0.05"), 5);
  EXPECT_TRUE(b.holds);
  EXPECT_NEAR(b.gamma, (1 + std::log(7.0)) / (1 - std::exp(-1.0)), 1e-12);
  EXPECT_THROW(binomial_check_row(Rational(1, 2), Rational(1, 2), 0), PreconditionError);
  EXPECT_THROW(binomial_check_row(Rational(1), Rational(1, 2), 1), PreconditionError);
  EXPECT_THROW(binomial_check_row(Rational(1, 2), Rational(0), 1), PreconditionError);
}

TEST(Verify, SuitesPassAndAreDeterministic) {
  auto a = verify_props(7);
  EXPECT_TRUE(a["ok"].get<bool>()) << a.dump(2);
  for (const auto& s : a["suites"]) EXPECT_GT(s["checked"].get<std::size_t>(), 0u) << s["suite"];
  EXPECT_EQ(a.dump(), verify_props(7).dump());
}
