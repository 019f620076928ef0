#include "seq2form/vocab.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace s2f {

Vocabulary::Vocabulary() {
    add("<unk>");
    add("<s>");
    add("</s>");
}

void Vocabulary::add(const std::string& token) {
    if (to_index_.count(token)) return;
    to_index_.emplace(token, static_cast<int>(tokens_.size()));
    tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sequences) {
    std::map<std::string, long long> freq;  // ordered map: lexicographic tie-break for free
    for (const auto& seq : sequences) {
        for (const auto& tok : seq) ++freq[tok];
    }
    std::vector<std::pair<std::string, long long>> entries(freq.begin(), freq.end());
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    for (const auto& [tok, n] : entries) v.add(tok);
    return v;
}

int Vocabulary::index_of(const std::string& token) const {
    auto it = to_index_.find(token);
    return it == to_index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
    return to_index_.find(token) != to_index_.end();
}

const std::string& Vocabulary::token_at(int index) const {
    if (index < 0 || index >= size()) {
        throw std::out_of_range("Vocabulary: index " + std::to_string(index) +
                                " out of range (size " + std::to_string(size()) + ")");
    }
    return tokens_[static_cast<std::size_t>(index)];
}

}  // namespace s2f
