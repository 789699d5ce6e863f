#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pccloud::text {

enum class DocumentSource { Submission, Publication };

/// One title+abstract unit: a submitted paper or a reviewer's publication.
struct RawDocument {
    std::string id;
    std::string title;
    std::string abstract;
    DocumentSource source = DocumentSource::Submission;

    friend bool operator==(const RawDocument&, const RawDocument&) = default;
};

/// A sanitized, lowercase word. Only tokenize() produces these.
struct Token {
    std::string surface;

    friend auto operator<=>(const Token&, const Token&) = default;
};

/// term -> positive weight. Ordered so iteration is deterministic.
using TermWeights = std::map<std::string, double, std::less<>>;

using WeightedTerm = std::pair<std::string, double>;

class StopwordList {
public:
    StopwordList() = default;
    explicit StopwordList(std::set<std::string, std::less<>> words);

    /// Parses the one-word-per-line format: '#' lines and blank lines are
    /// skipped, entries are trimmed and lowercased.
    static StopwordList parse(std::istream& in);
    static StopwordList load(const std::filesystem::path& path);

    /// The English list compiled into the library.
    static const StopwordList& bundled();

    bool contains(std::string_view word) const { return words_.find(word) != words_.end(); }
    const std::set<std::string, std::less<>>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::set<std::string, std::less<>> words_;
};

std::string_view bundledStopwordText();

/// Unicode simple lowercase of UTF-8 text. Invalid bytes become U+FFFD.
std::string toLower(std::string_view utf8);

/// Number of code points in UTF-8 text.
std::size_t codePointCount(std::string_view utf8);

/// Lowercase, replace everything except letters, digits, '-' and '\'' with
/// spaces, split, strip edge '-'/'\'', then drop pieces with no letter or
/// fewer than two code points. Order and duplicates are preserved.
std::vector<Token> tokenize(std::string_view text);

std::vector<Token> removeStopwords(const std::vector<Token>& tokens, const StopwordList& stopwords);

TermWeights countTerms(const std::vector<Token>& tokens);

/// Sum over documents of titleBoost * title counts + abstract counts, after
/// tokenization and stopword removal. Throws Error(Parameter) unless
/// titleBoost > 0.
TermWeights buildCorpusWeights(const std::vector<RawDocument>& docs, const StopwordList& stopwords,
                               double titleBoost = 1.0);

/// Heaviest n terms, ties broken by byte-wise term order.
std::vector<WeightedTerm> topTerms(const TermWeights& weights, std::size_t n);

}  // namespace pccloud::text
