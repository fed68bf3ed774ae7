#pragma once

#include <string>
#include <unordered_map>
#include <vector>


namespace seeaction::model {

// Word <-> id bijection with reserved ids 0..3.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kStart = 1;
  static constexpr int kEnd = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReserved = 4;

  Vocabulary();

  // Adds the distinct words of `phrases`, sorted, after the reserved ids.
  static Vocabulary build(const std::vector<std::vector<std::string>>& phrases);
  static Vocabulary from_words(const std::vector<std::string>& words);

  int size() const { return static_cast<int>(words_.size()); }
  int id(const std::string& word) const;  // kUnk when absent
  const std::string& word(int id) const;
  bool contains(const std::string& word) const { return ids_.count(word) != 0; }
  static bool is_reserved(int id) { return id >= 0 && id < kReserved; }

  std::vector<int> encode(const std::vector<std::string>& words) const;
  // Drops reserved ids except <unk>, which is rendered as "<unk>".
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  // Words after the reserved block, in id order.
  std::vector<std::string> words() const;

  bool operator==(const Vocabulary& o) const { return words_ == o.words_; }

 private:
  void add(const std::string& word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace seeaction::model
