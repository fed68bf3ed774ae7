#include "seeaction/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "seeaction/error.hpp"
#include "seeaction/rng.hpp"

namespace seeaction::eval {
namespace {

Tokens lowered(const Tokens& t) {
  Tokens out = t;
  for (auto& w : out) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
  }
  return out;
}

std::map<std::string, int> counts(const Tokens& t) {
  std::map<std::string, int> c;
  for (const auto& w : t) ++c[w];
  return c;
}

// Clipped unigram overlap.
int overlap(const Tokens& a, const Tokens& b) {
  const auto ca = counts(a);
  const auto cb = counts(b);
  int m = 0;
  for (const auto& [w, n] : ca) {
    auto it = cb.find(w);
    if (it != cb.end()) m += std::min(n, it->second);
  }
  return m;
}

int count_chunks(const std::vector<int>& align) {
  int chunks = 0;
  int prev = -2;
  for (int r : align) {
    if (r < 0) {
      prev = -2;
      continue;
    }
    if (r != prev + 1) ++chunks;
    prev = r;
  }
  return chunks;
}

void search_alignment(const Tokens& cand, const Tokens& ref, size_t i, std::vector<int>& align, std::vector<bool>& used,
                      MeteorAlignment& best) {
  if (i == cand.size()) {
    const int m = static_cast<int>(std::count_if(align.begin(), align.end(), [](int r) { return r >= 0; }));
    const int ch = count_chunks(align);
    if (m > best.matches || (m == best.matches && ch < best.chunks)) best = {m, ch};
    return;
  }
  for (size_t r = 0; r < ref.size(); ++r) {
    if (used[r] || ref[r] != cand[i]) continue;
    used[r] = true;
    align[i] = static_cast<int>(r);
    search_alignment(cand, ref, i + 1, align, used, best);
    used[r] = false;
  }
  // Skipping a matchable token can free a partner for a later one and give
  // fewer chunks at the same match count.
  align[i] = -1;
  search_alignment(cand, ref, i + 1, align, used, best);
}

}  // namespace

ClassificationReport classification_report(std::span<const int> predictions, std::span<const int> labels, int k) {
  if (predictions.size() != labels.size()) throw ValidationError("predictions and labels differ in length");
  if (labels.empty()) throw ValidationError("classification_report needs at least one sample");
  if (k < 1) throw ValidationError("class count must be >= 1");
  ClassificationReport r;
  r.total = static_cast<int>(labels.size());
  r.per_class.assign(static_cast<size_t>(k), {});
  r.confusion.assign(static_cast<size_t>(k), std::vector<int>(static_cast<size_t>(k), 0));
  int correct = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    const int p = predictions[i];
    if (l < 0 || l >= k || p < 0 || p >= k) throw ValidationError("class id out of range");
    ++r.confusion[l][p];
    ++r.per_class[l].support;
    ++r.per_class[p].predicted;
    if (l == p) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / r.total;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    ClassMetrics& m = r.per_class[c];
    const int tp = r.confusion[c][c];
    m.precision = m.predicted ? static_cast<double>(tp) / m.predicted : 0.0;
    m.recall = m.support ? static_cast<double>(tp) / m.support : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    if (m.support > 0) {
      ++present;
      r.macro_precision += m.precision;
      r.macro_recall += m.recall;
      r.macro_f1 += m.f1;
    }
  }
  r.macro_precision /= present;
  r.macro_recall /= present;
  r.macro_f1 /= present;
  return r;
}

double bleu1(const Tokens& candidate, const Tokens& reference) {
  const Tokens c = lowered(candidate);
  const Tokens r = lowered(reference);
  if (c.empty()) return 0.0;
  const double precision = static_cast<double>(overlap(c, r)) / c.size();
  const double bp = std::min(1.0, std::exp(1.0 - static_cast<double>(r.size()) / c.size()));
  return precision * bp;
}

double rouge1(const Tokens& candidate, const Tokens& reference) {
  const Tokens c = lowered(candidate);
  const Tokens r = lowered(reference);
  if (r.empty() || c.empty()) return 0.0;
  return static_cast<double>(overlap(c, r)) / r.size();
}

MeteorAlignment meteor_alignment(const Tokens& candidate, const Tokens& reference) {
  const Tokens c = lowered(candidate);
  const Tokens r = lowered(reference);
  MeteorAlignment best{0, 0};
  std::vector<int> align(c.size(), -1);
  std::vector<bool> used(r.size(), false);
  search_alignment(c, r, 0, align, used, best);
  return best;
}

double meteor1(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const MeteorAlignment a = meteor_alignment(candidate, reference);
  if (a.matches == 0) return 0.0;
  const double p = static_cast<double>(a.matches) / candidate.size();
  const double r = static_cast<double>(a.matches) / reference.size();
  const double f = 10.0 * p * r / (r + 9.0 * p);
  const double frag = static_cast<double>(a.chunks) / a.matches;
  return f * (1.0 - 0.5 * frag * frag * frag);
}

double cider1(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references,
              const std::vector<Tokens>& corpus) {
  if (candidates.size() != references.size()) throw ValidationError("cider1: candidates/references length mismatch");
  if (candidates.empty()) return 0.0;
  const double n = static_cast<double>(corpus.size());
  std::map<std::string, int> df;
  for (const auto& doc : corpus) {
    const Tokens low = lowered(doc);
    for (const auto& w : std::set<std::string>(low.begin(), low.end())) ++df[w];
  }
  auto tfidf = [&](const Tokens& t) {
    std::map<std::string, double> v;
    if (t.empty()) return v;
    for (const auto& [w, c] : counts(t)) {
      auto it = df.find(w);
      const double d = it == df.end() ? 0.0 : it->second;
      v[w] = (static_cast<double>(c) / t.size()) * std::log(n / (1.0 + d));
    }
    return v;
  };
  double total = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto a = tfidf(lowered(candidates[i]));
    const auto b = tfidf(lowered(references[i]));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [w, x] : a) {
      na += x * x;
      auto it = b.find(w);
      if (it != b.end()) dot += x * it->second;
    }
    for (const auto& [w, y] : b) nb += y * y;
    if (na > 0.0 && nb > 0.0) total += 10.0 * dot / (std::sqrt(na) * std::sqrt(nb));
  }
  return total / static_cast<double>(candidates.size());
}

CaptionScores caption_scores(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references) {
  if (candidates.size() != references.size()) throw ValidationError("caption_scores: length mismatch");
  CaptionScores s;
  if (candidates.empty()) return s;
  for (size_t i = 0; i < candidates.size(); ++i) {
    s.bleu1 += bleu1(candidates[i], references[i]);
    s.rouge1 += rouge1(candidates[i], references[i]);
    s.meteor += meteor1(candidates[i], references[i]);
  }
  const double n = static_cast<double>(candidates.size());
  s.bleu1 /= n;
  s.rouge1 /= n;
  s.meteor /= n;
  s.cider = cider1(candidates, references, references);
  return s;
}

std::vector<std::vector<size_t>> kfold_split(size_t n, int k, uint64_t seed) {
  if (k < 2) throw ValidationError("fold count must be >= 2");
  if (static_cast<size_t>(k) > n) throw ValidationError("fold count exceeds sample count");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<size_t>> folds(static_cast<size_t>(k));
  for (size_t i = 0; i < n; ++i) folds[i % static_cast<size_t>(k)].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

nlohmann::json to_json(const ClassificationReport& r, const std::vector<std::string>& class_names) {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& m = r.per_class[c];
    rows.push_back({{"class", c < class_names.size() ? class_names[c] : std::to_string(c)},
                    {"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1},
                    {"support", m.support}});
  }
  j["per_class"] = rows;
  j["macro"] = {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}};
  j["accuracy"] = r.accuracy;
  j["total"] = r.total;
  j["confusion"] = r.confusion;
  return j;
}

nlohmann::json to_json(const CaptionScores& s) {
  return {{"bleu1", s.bleu1}, {"rouge1", s.rouge1}, {"meteor", s.meteor}, {"cider", s.cider}};
}

std::string format_table(const ClassificationReport& r, const std::vector<std::string>& class_names) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %9s %9s %9s %8s\n", "Class", "Precision", "Recall", "F1", "Support");
  out += line;
  for (size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& m = r.per_class[c];
    if (m.support == 0) continue;
    const std::string name = c < class_names.size() ? class_names[c] : std::to_string(c);
    std::snprintf(line, sizeof(line), "%-12s %9.3f %9.3f %9.3f %8d\n", name.c_str(), m.precision, m.recall, m.f1, m.support);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-12s %9.3f %9.3f %9.3f %8d\n", "Average", r.macro_precision, r.macro_recall,
                r.macro_f1, r.total);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %9.3f\n", "Accuracy", r.accuracy);
  out += line;
  return out;
}

}  // namespace seeaction::eval
