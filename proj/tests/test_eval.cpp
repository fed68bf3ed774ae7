#include <doctest.h>

#include <algorithm>
#include <set>

#include "metric_table.hpp"
#include "seeaction/error.hpp"
#include "seeaction/rng.hpp"

using namespace seeaction;
using namespace seeaction::eval;

namespace {

Tokens random_phrase(Rng& rng, int max_len) {
  static const char* words[] = {"in", "popup", "top", "left", "Toolbar", "menu", "of", "the", "PAGE"};
  Tokens t(static_cast<size_t>(rng.range(1, max_len)));
  for (auto& w : t) w = words[rng.below(9)];
  return t;
}

Tokens upper(Tokens t) {
  for (auto& w : t) std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::toupper(c); });
  return t;
}

}  // namespace

TEST_CASE("metric table matches hand values and oracles") {
  for (const auto& c : testing::metric_table()) {
    INFO(c.name);
    CHECK(std::abs(c.got - c.expected) <= 1e-6);
  }
}

TEST_CASE("classification report edge cases") {
  const std::vector<int> same{0, 3, 3, 7};
  auto r = classification_report(same, same, 11);
  CHECK(r.accuracy == 1.0);
  CHECK(r.macro_precision == 1.0);
  CHECK(r.macro_recall == 1.0);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.per_class[5].support == 0);
  CHECK_THROWS_AS(classification_report(std::vector<int>{0}, std::vector<int>{0, 1}, 2), ValidationError);
  CHECK_THROWS_AS(classification_report(std::vector<int>{}, std::vector<int>{}, 2), ValidationError);
}

TEST_CASE("property: accuracy is the confusion trace over the total") {
  Rng rng(40);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = rng.range(1, 11);
    std::vector<int> p(static_cast<size_t>(rng.range(1, 50))), l(p.size());
    int hits = 0;
    for (size_t i = 0; i < p.size(); ++i) {
      p[i] = static_cast<int>(rng.below(static_cast<uint64_t>(k)));
      l[i] = static_cast<int>(rng.below(static_cast<uint64_t>(k)));
      hits += p[i] == l[i];
    }
    auto r = classification_report(p, l, k);
    int trace = 0;
    for (int c = 0; c < k; ++c) trace += r.confusion[c][c];
    CHECK(r.accuracy == static_cast<double>(hits) / static_cast<double>(p.size()));
    CHECK(trace == hits);
    for (const auto& m : r.per_class) {
      CHECK(m.precision >= 0.0);
      CHECK(m.precision <= 1.0);
      CHECK(m.recall <= 1.0);
      CHECK(m.f1 <= 1.0);
    }
    CHECK(r.macro_f1 <= 1.0);
  }
}

TEST_CASE("property: caption metrics are bounded, case-blind, and exact on self") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens c = random_phrase(rng, 6), r = random_phrase(rng, 6);
    for (double v : {bleu1(c, r), rouge1(c, r), meteor1(c, r)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(bleu1(c, r) == bleu1(upper(c), r));
    CHECK(rouge1(c, r) == rouge1(c, upper(r)));
    CHECK(meteor1(upper(c), r) == meteor1(c, r));
    CHECK(bleu1(c, c) == doctest::Approx(1.0));
    CHECK(rouge1(c, c) == doctest::Approx(1.0));
    Tokens lc = c, lr = r;
    for (auto* t : {&lc, &lr})
      for (auto& w : *t) std::transform(w.begin(), w.end(), w.begin(), [](unsigned char ch) { return std::tolower(ch); });
    CHECK(meteor1(c, r) == doctest::Approx(oracle::meteor(lc, lr)).epsilon(1e-12));
  }
}

TEST_CASE("property: cider matches the brute-force tf-idf oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Tokens> cands, refs;
    const int n = rng.range(1, 6);
    for (int i = 0; i < n; ++i) {
      cands.push_back(random_phrase(rng, 5));
      refs.push_back(random_phrase(rng, 5));
    }
    auto lower_all = [](std::vector<Tokens> v) {
      for (auto& t : v)
        for (auto& w : t) std::transform(w.begin(), w.end(), w.begin(), [](unsigned char ch) { return std::tolower(ch); });
      return v;
    };
    const auto lc = lower_all(cands), lr = lower_all(refs);
    double expected = 0;
    for (int i = 0; i < n; ++i) expected += oracle::cider_pair(lc[i], lr[i], lr);
    expected /= n;
    const double got = cider1(cands, refs, refs);
    CHECK(got >= 0.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    CHECK(caption_scores(cands, refs).cider == doctest::Approx(got));
  }
}

TEST_CASE("cider is not invariant under corpus duplication with this idf") {
  // log(N/(1+df)) shifts by log 2 per doubling; the cosine does not cancel it.
  const std::vector<Tokens> c{{"in", "popup"}}, r{{"in", "toolbar"}};
  const std::vector<Tokens> corpus{{"in", "toolbar"}, {"popup", "menu"}, {"in", "page"}};
  auto twice = corpus;
  twice.insert(twice.end(), corpus.begin(), corpus.end());
  CHECK(cider1(c, r, corpus) != doctest::Approx(cider1(c, r, twice)));
}

TEST_CASE("kfold_split partitions the indices") {
  auto f = kfold_split(10, 5, 3);
  REQUIRE(f.size() == 5);
  std::set<size_t> all;
  for (const auto& fold : f) {
    CHECK(fold.size() == 2);
    all.insert(fold.begin(), fold.end());
  }
  CHECK(all.size() == 10);
  CHECK(kfold_split(10, 5, 3) == f);
  CHECK(kfold_split(10, 5, 4) != f);

  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 2 + rng.below(60);
    const int k = rng.range(2, static_cast<int>(std::clamp<size_t>(n, 2, 8)));
    auto folds = kfold_split(n, k, rng.next());
    size_t lo = n, hi = 0, total = 0;
    std::set<size_t> seen;
    for (const auto& fold : folds) {
      lo = std::min(lo, fold.size());
      hi = std::max(hi, fold.size());
      total += fold.size();
      seen.insert(fold.begin(), fold.end());
    }
    CHECK(hi - lo <= 1);
    CHECK(total == n);
    CHECK(seen.size() == n);
  }
}

TEST_CASE("report rendering") {
  const std::vector<int> p{0, 1, 1}, l{0, 0, 1};
  auto r = classification_report(p, l, 3);
  const std::vector<std::string> names{"a", "b", "c"};
  auto j = to_json(r, names);
  CHECK(j.dump().find("\"a\"") != std::string::npos);
  auto table = format_table(r, names);
  CHECK(table.find("b") != std::string::npos);
  CHECK(table.find(" c ") == std::string::npos);
}
