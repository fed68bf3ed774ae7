#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace seeaction::eval {

using Tokens = std::vector<std::string>;

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;    // occurrences in labels
  int predicted = 0;  // occurrences in predictions
};

struct ClassificationReport {
  std::vector<ClassMetrics> per_class;
  std::vector<std::vector<int>> confusion;  // [label][prediction]
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  int total = 0;
};

// Macro averages run over the classes that occur in `labels`.
ClassificationReport classification_report(std::span<const int> predictions, std::span<const int> labels, int k);

// All caption metrics lowercase their inputs and compare unigrams.
double bleu1(const Tokens& candidate, const Tokens& reference);
double rouge1(const Tokens& candidate, const Tokens& reference);
// Exact-match unigram METEOR: F = 10PR/(R+9P), fragmentation penalty 0.5 (chunks/matches)^3.
double meteor1(const Tokens& candidate, const Tokens& reference);

struct MeteorAlignment {
  int matches = 0;
  int chunks = 0;
};
// One-to-one exact alignment with the most matches and, among those, the fewest chunks.
MeteorAlignment meteor_alignment(const Tokens& candidate, const Tokens& reference);

// Mean over pairs of 10 * cosine(tfidf(candidate), tfidf(reference)), with
// TF = count/length and IDF = log(N / (1 + df)) over `corpus`.
double cider1(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references,
              const std::vector<Tokens>& corpus);

struct CaptionScores {
  double bleu1 = 0.0;
  double rouge1 = 0.0;
  double meteor = 0.0;
  double cider = 0.0;
};

// Per-pair means; CIDEr uses the references as its corpus.
CaptionScores caption_scores(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references);

// Seeded shuffle dealt round-robin into k folds.
std::vector<std::vector<size_t>> kfold_split(size_t n, int k, uint64_t seed);

nlohmann::json to_json(const ClassificationReport& r, const std::vector<std::string>& class_names);
nlohmann::json to_json(const CaptionScores& s);
// Aligned text table: one row per label-present class, then an average row.
std::string format_table(const ClassificationReport& r, const std::vector<std::string>& class_names);

}  // namespace seeaction::eval
