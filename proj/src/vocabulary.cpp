#include "seeaction/vocabulary.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace seeaction::model {

Vocabulary::Vocabulary() {
  for (const char* w : {"<pad>", "<start>", "<end>", "<unk>"}) add(w);
}

void Vocabulary::add(const std::string& word) {
  if (ids_.count(word)) return;
  ids_.emplace(word, static_cast<int>(words_.size()));
  words_.push_back(word);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& phrases) {
  std::set<std::string> distinct;
  for (const auto& p : phrases) distinct.insert(p.begin(), p.end());
  return from_words(std::vector<std::string>(distinct.begin(), distinct.end()));
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
  Vocabulary v;
  for (const auto& w : words) {
    if (v.contains(w)) throw std::invalid_argument("duplicate or reserved vocabulary word: " + w);
    v.add(w);
  }
  return v;
}

int Vocabulary::id(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::word(int id) const { return words_.at(static_cast<size_t>(id)); }

std::vector<int> Vocabulary::encode(const std::vector<std::string>& words) const {
  std::vector<int> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(id(w));
  return out;
}

std::vector<std::string> Vocabulary::decode(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  for (int i : ids) {
    if (i == kUnk || !is_reserved(i)) out.push_back(word(i));
  }
  return out;
}

std::vector<std::string> Vocabulary::words() const {
  return std::vector<std::string>(words_.begin() + kReserved, words_.end());
}

}  // namespace seeaction::model
