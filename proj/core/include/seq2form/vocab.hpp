#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace s2f {

// Token <-> index map with fixed reserved slots. Non-reserved tokens are
// ordered by descending frequency, ties broken lexicographically, so a
// rebuild from the same corpus assigns identical indices.
class Vocabulary {
public:
    static constexpr int kUnk = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kReserved = 3;

    Vocabulary();

    // Builds from token sequences (frequency desc, then lexicographic).
    static Vocabulary build(const std::vector<std::vector<std::string>>& sequences);

    // UNK index for unknown tokens.
    int index_of(const std::string& token) const;
    bool contains(const std::string& token) const;
    const std::string& token_at(int index) const;  // throws std::out_of_range
    int size() const { return static_cast<int>(tokens_.size()); }

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
    std::unordered_map<std::string, int> to_index_;
    std::vector<std::string> tokens_;

    void add(const std::string& token);
};

}  // namespace s2f
