#include "pccloud/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "pccloud/error.hpp"

namespace pccloud::text {

namespace {

// Calls fn(codePoint) for each code point; malformed sequences yield -1.
template <typename Fn>
void forEachCodePoint(std::string_view utf8, Fn&& fn)
{
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        fn(c);
    }
}

void appendUtf8(std::string& out, UChar32 c)
{
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool isTokenChar(UChar32 c)
{
    return c == '-' || c == '\'' || u_isalpha(c) || u_isdigit(c);
}

bool isEdgeMark(char c)
{
    return c == '-' || c == '\'';
}

std::string trim(std::string_view s)
{
    const auto* ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string toLower(std::string_view utf8)
{
    std::string out;
    out.reserve(utf8.size());
    forEachCodePoint(utf8, [&](UChar32 c) { appendUtf8(out, c < 0 ? 0xFFFD : u_tolower(c)); });
    return out;
}

std::size_t codePointCount(std::string_view utf8)
{
    std::size_t n = 0;
    forEachCodePoint(utf8, [&](UChar32) { ++n; });
    return n;
}

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> tokens;
    std::string piece;

    auto flush = [&] {
        // Edge marks are single ASCII bytes, so byte-wise stripping is safe.
        std::size_t begin = 0;
        std::size_t end = piece.size();
        while (begin < end && isEdgeMark(piece[begin]))
            ++begin;
        while (end > begin && isEdgeMark(piece[end - 1]))
            --end;
        std::string_view core(piece.data() + begin, end - begin);

        bool hasLetter = false;
        std::size_t count = 0;
        forEachCodePoint(core, [&](UChar32 c) {
            ++count;
            hasLetter = hasLetter || u_isalpha(c);
        });
        if (hasLetter && count >= 2)
            tokens.push_back(Token{std::string(core)});
        piece.clear();
    };

    forEachCodePoint(text, [&](UChar32 c) {
        const UChar32 lower = c < 0 ? -1 : u_tolower(c);
        if (lower >= 0 && isTokenChar(lower)) {
            appendUtf8(piece, lower);
        } else if (!piece.empty()) {
            flush();
        }
    });
    if (!piece.empty())
        flush();
    return tokens;
}

StopwordList::StopwordList(std::set<std::string, std::less<>> words)
{
    for (const auto& w : words) {
        auto entry = toLower(trim(w));
        if (!entry.empty())
            words_.insert(std::move(entry));
    }
}

StopwordList StopwordList::parse(std::istream& in)
{
    std::set<std::string, std::less<>> words;
    std::string line;
    while (std::getline(in, line)) {
        auto entry = trim(line);
        if (entry.empty() || entry.front() == '#')
            continue;
        words.insert(toLower(entry));
    }
    StopwordList list;
    list.words_ = std::move(words);
    return list;
}

StopwordList StopwordList::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open stopword file " + path.string());
    return parse(in);
}

const StopwordList& StopwordList::bundled()
{
    static const StopwordList list = [] {
        std::istringstream in{std::string(bundledStopwordText())};
        return parse(in);
    }();
    return list;
}

std::vector<Token> removeStopwords(const std::vector<Token>& tokens, const StopwordList& stopwords)
{
    std::vector<Token> kept;
    kept.reserve(tokens.size());
    std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(kept),
                 [&](const Token& t) { return !stopwords.contains(t.surface); });
    return kept;
}

TermWeights countTerms(const std::vector<Token>& tokens)
{
    TermWeights weights;
    for (const auto& t : tokens)
        weights[t.surface] += 1.0;
    return weights;
}

TermWeights buildCorpusWeights(const std::vector<RawDocument>& docs, const StopwordList& stopwords,
                               double titleBoost)
{
    if (!(titleBoost > 0.0))
        throw Error(ErrorKind::Parameter, "titleBoost must be positive");

    TermWeights weights;
    for (const auto& doc : docs) {
        for (const auto& t : removeStopwords(tokenize(doc.title), stopwords))
            weights[t.surface] += titleBoost;
        for (const auto& t : removeStopwords(tokenize(doc.abstract), stopwords))
            weights[t.surface] += 1.0;
    }
    return weights;
}

std::vector<WeightedTerm> topTerms(const TermWeights& weights, std::size_t n)
{
    std::vector<WeightedTerm> ranked(weights.begin(), weights.end());
    const auto keep = std::min(n, ranked.size());
    auto heavierFirst = [](const WeightedTerm& a, const WeightedTerm& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    };
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      heavierFirst);
    ranked.resize(keep);
    return ranked;
}

}  // namespace pccloud::text
