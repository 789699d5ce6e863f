#include "pccloud/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "pccloud/error.hpp"

namespace pccloud::corpus {

using nlohmann::json;

namespace {

constexpr const char* kConferenceFile = "conference.json";
constexpr const char* kPapersFile = "papers.json";
constexpr const char* kReviewersFile = "reviewers.json";
constexpr const char* kAssignmentsFile = "assignments.json";

[[noreturn]] void invalid(const std::string& message)
{
    throw Error(ErrorKind::Validation, message);
}

json readJsonFile(const std::filesystem::path& path)
{
    const auto name = path.filename().string();
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, name + ": cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, name + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

// Field accessors that turn every shape mismatch into a validation error
// naming the file and entity, so any input either loads or is diagnosed.
class Reader {
public:
    Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where))
    {
        if (!obj_.is_object())
            invalid(where_ + ": expected a JSON object");
    }

    std::string string(const char* key) const
    {
        const auto it = obj_.find(key);
        if (it == obj_.end() || !it->is_string())
            invalid(where_ + ": missing string field '" + key + "'");
        return it->get<std::string>();
    }

    std::optional<std::string> optionalString(const char* key) const
    {
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null())
            return std::nullopt;
        if (!it->is_string())
            invalid(where_ + ": field '" + key + "' must be a string");
        return it->get<std::string>();
    }

    std::vector<std::string> strings(const char* key) const
    {
        std::vector<std::string> out;
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null())
            return out;
        if (!it->is_array())
            invalid(where_ + ": field '" + key + "' must be an array of strings");
        for (const auto& v : *it) {
            if (!v.is_string())
                invalid(where_ + ": field '" + key + "' must be an array of strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    }

    const json* child(const char* key) const
    {
        const auto it = obj_.find(key);
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    const std::string& where() const { return where_; }

private:
    const json& obj_;
    std::string where_;
};

const json& requireArray(const json& j, const std::string& where)
{
    if (!j.is_array())
        invalid(where + ": expected a JSON array");
    return j;
}

std::string entity(const char* file, const char* kind, std::size_t index)
{
    return std::string(file) + ": " + kind + "[" + std::to_string(index) + "]";
}

Paper paperFromJson(const json& j, std::size_t index)
{
    Reader r(j, entity(kPapersFile, "paper", index));
    Paper p;
    p.id = r.string("id");
    p.title = r.string("title");
    p.abstract = r.optionalString("abstract").value_or("");
    p.topics = r.strings("topics");
    p.authorNames = r.strings("authorNames");
    return p;
}

Reviewer reviewerFromJson(const json& j, std::size_t index)
{
    Reader r(j, entity(kReviewersFile, "reviewer", index));
    Reviewer rev;
    rev.id = r.string("id");
    rev.name = r.string("name");
    rev.affiliation = r.optionalString("affiliation");
    if (const auto* ids = r.child("externalIds")) {
        Reader idr(*ids, r.where() + ".externalIds");
        rev.externalIds.dblpQuery = idr.optionalString("dblpQuery");
        rev.externalIds.semanticScholarAuthorId = idr.optionalString("semanticScholarAuthorId");
    }
    if (const auto* pubs = r.child("publications")) {
        requireArray(*pubs, r.where() + ".publications");
        for (std::size_t i = 0; i < pubs->size(); ++i) {
            Reader pr((*pubs)[i], r.where() + ".publications[" + std::to_string(i) + "]");
            rev.publications.push_back({pr.string("id"), pr.string("title"), pr.optionalString("abstract").value_or(""),
                                        text::DocumentSource::Publication});
        }
    }
    rev.acceptedTopics = r.strings("acceptedTopics");
    return rev;
}

template <typename Enum, std::size_t N>
Enum enumFromString(const std::string& value, const std::pair<const char*, Enum> (&table)[N], const std::string& where,
                    const char* field)
{
    for (const auto& [name, e] : table)
        if (value == name)
            return e;
    invalid(where + ": unknown " + field + " '" + value + "'");
}

constexpr std::pair<const char*, AssignmentStatus> kStatuses[] = {
    {"proposed", AssignmentStatus::Proposed},
    {"confirmed", AssignmentStatus::Confirmed},
    {"declined", AssignmentStatus::Declined},
};
constexpr std::pair<const char*, AssignmentOrigin> kOrigins[] = {
    {"manual", AssignmentOrigin::Manual},
    {"suggested", AssignmentOrigin::Suggested},
};

Assignment assignmentFromJson(const json& j, const std::string& where)
{
    Reader r(j, where);
    Assignment a;
    a.paperId = r.string("paperId");
    a.reviewerId = r.string("reviewerId");
    a.status = enumFromString(r.optionalString("status").value_or("proposed"), kStatuses, where, "status");
    a.origin = enumFromString(r.optionalString("origin").value_or("manual"), kOrigins, where, "origin");
    return a;
}

void checkReferences(const Conference& c, const Assignment& a, const std::string& where)
{
    if (!c.findPaper(a.paperId))
        invalid(where + ": unknown paper '" + a.paperId + "'");
    if (!c.findReviewer(a.reviewerId))
        invalid(where + ": unknown reviewer '" + a.reviewerId + "'");
}

std::string lowered(std::string_view s)
{
    return text::toLower(s);
}

}  // namespace

const Paper* Conference::findPaper(std::string_view id) const
{
    const auto it = std::find_if(papers.begin(), papers.end(), [&](const Paper& p) { return p.id == id; });
    return it == papers.end() ? nullptr : &*it;
}

const Reviewer* Conference::findReviewer(std::string_view id) const
{
    const auto it = std::find_if(reviewers.begin(), reviewers.end(), [&](const Reviewer& r) { return r.id == id; });
    return it == reviewers.end() ? nullptr : &*it;
}

const Assignment* Conference::findAssignment(std::string_view paperId, std::string_view reviewerId) const
{
    const auto it = std::find_if(assignments.begin(), assignments.end(), [&](const Assignment& a) {
        return a.paperId == paperId && a.reviewerId == reviewerId;
    });
    return it == assignments.end() ? nullptr : &*it;
}

std::string_view toString(AssignmentStatus s)
{
    for (const auto& [name, e] : kStatuses)
        if (e == s)
            return name;
    return "proposed";
}

std::string_view toString(AssignmentOrigin o)
{
    for (const auto& [name, e] : kOrigins)
        if (e == o)
            return name;
    return "manual";
}

json toJson(const Paper& p)
{
    return {{"id", p.id}, {"title", p.title}, {"abstract", p.abstract}, {"topics", p.topics},
            {"authorNames", p.authorNames}};
}

json toJson(const Reviewer& r)
{
    json j = {{"id", r.id}, {"name", r.name}};
    if (r.affiliation)
        j["affiliation"] = *r.affiliation;
    json ids = json::object();
    if (r.externalIds.dblpQuery)
        ids["dblpQuery"] = *r.externalIds.dblpQuery;
    if (r.externalIds.semanticScholarAuthorId)
        ids["semanticScholarAuthorId"] = *r.externalIds.semanticScholarAuthorId;
    j["externalIds"] = ids;
    json pubs = json::array();
    for (const auto& d : r.publications)
        pubs.push_back({{"id", d.id}, {"title", d.title}, {"abstract", d.abstract}});
    j["publications"] = pubs;
    j["acceptedTopics"] = r.acceptedTopics;
    return j;
}

json toJson(const Assignment& a)
{
    return {{"paperId", a.paperId}, {"reviewerId", a.reviewerId}, {"status", toString(a.status)},
            {"origin", toString(a.origin)}};
}

json toJson(const std::vector<Assignment>& as)
{
    json j = json::array();
    for (const auto& a : as)
        j.push_back(toJson(a));
    return j;
}

Assignment assignmentFromJson(const json& j)
{
    return assignmentFromJson(j, "assignment");
}

void validate(const Conference& c)
{
    std::set<std::string_view> seen;
    for (const auto& t : c.topics)
        if (!seen.insert(t).second)
            invalid(std::string(kConferenceFile) + ": duplicate topic '" + t + "'");

    seen.clear();
    for (const auto& p : c.papers) {
        if (p.id.empty())
            invalid(std::string(kPapersFile) + ": paper with empty id");
        if (!seen.insert(p.id).second)
            invalid(std::string(kPapersFile) + ": duplicate paper id '" + p.id + "'");
        if (p.title.empty())
            invalid(std::string(kPapersFile) + ": paper '" + p.id + "' has an empty title");
    }

    seen.clear();
    for (const auto& r : c.reviewers) {
        if (r.id.empty())
            invalid(std::string(kReviewersFile) + ": reviewer with empty id");
        if (!seen.insert(r.id).second)
            invalid(std::string(kReviewersFile) + ": duplicate reviewer id '" + r.id + "'");
        if (r.name.empty())
            invalid(std::string(kReviewersFile) + ": reviewer '" + r.id + "' has an empty name");
        std::set<std::string_view> pubIds;
        for (const auto& d : r.publications) {
            if (d.id.empty() || !pubIds.insert(d.id).second)
                invalid(std::string(kReviewersFile) + ": reviewer '" + r.id + "' has a missing or duplicate publication id '"
                        + d.id + "'");
            if (d.title.empty())
                invalid(std::string(kReviewersFile) + ": publication '" + d.id + "' of reviewer '" + r.id
                        + "' has an empty title");
        }
    }

    std::set<std::pair<std::string_view, std::string_view>> pairs;
    for (const auto& a : c.assignments) {
        checkReferences(c, a, kAssignmentsFile);
        if (!pairs.emplace(a.paperId, a.reviewerId).second)
            invalid(std::string(kAssignmentsFile) + ": duplicate assignment ('" + a.paperId + "', '" + a.reviewerId + "')");
    }
}

std::vector<std::string> collectWarnings(const Conference& c)
{
    std::vector<std::string> warnings;
    const std::set<std::string_view> topics(c.topics.begin(), c.topics.end());
    auto checkTopics = [&](const std::vector<std::string>& names, const std::string& owner) {
        for (const auto& t : names)
            if (!topics.count(t))
                warnings.push_back(owner + " uses unknown topic '" + t + "'");
    };
    for (const auto& p : c.papers)
        checkTopics(p.topics, "paper '" + p.id + "'");
    for (const auto& r : c.reviewers)
        checkTopics(r.acceptedTopics, "reviewer '" + r.id + "'");

    for (const auto& p : c.papers)
        for (const auto& author : p.authorNames)
            for (const auto& r : c.reviewers)
                if (lowered(author) == lowered(r.name))
                    warnings.push_back("paper '" + p.id + "' author '" + author + "' matches reviewer '" + r.id + "'");
    return warnings;
}

LoadedCorpus loadCorpusWithWarnings(const std::filesystem::path& dir)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw Error(ErrorKind::Io, "corpus directory not found: " + dir.string());

    Conference c;
    {
        const auto j = readJsonFile(dir / kConferenceFile);
        Reader r(j, kConferenceFile);
        c.name = r.string("name");
        c.topics = r.strings("topics");
    }
    {
        const auto j = readJsonFile(dir / kPapersFile);
        requireArray(j, kPapersFile);
        for (std::size_t i = 0; i < j.size(); ++i)
            c.papers.push_back(paperFromJson(j[i], i));
    }
    {
        const auto j = readJsonFile(dir / kReviewersFile);
        requireArray(j, kReviewersFile);
        for (std::size_t i = 0; i < j.size(); ++i)
            c.reviewers.push_back(reviewerFromJson(j[i], i));
    }
    if (std::filesystem::exists(dir / kAssignmentsFile, ec)) {
        const auto j = readJsonFile(dir / kAssignmentsFile);
        requireArray(j, kAssignmentsFile);
        for (std::size_t i = 0; i < j.size(); ++i)
            c.assignments.push_back(assignmentFromJson(j[i], entity(kAssignmentsFile, "assignment", i)));
    }

    validate(c);
    auto warnings = collectWarnings(c);
    return {std::move(c), std::move(warnings)};
}

Conference loadCorpus(const std::filesystem::path& dir)
{
    return loadCorpusWithWarnings(dir).conference;
}

void writeFileAtomically(const std::filesystem::path& path, std::string_view content)
{
    static std::atomic<unsigned> counter{0};
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(ErrorKind::Io, "short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw Error(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message());
    }
}

void saveAssignments(const Conference& conference, const std::filesystem::path& dir)
{
    writeFileAtomically(dir / kAssignmentsFile, toJson(conference.assignments).dump(2) + "\n");
}

void saveReviewers(const Conference& conference, const std::filesystem::path& dir)
{
    json j = json::array();
    for (const auto& r : conference.reviewers)
        j.push_back(toJson(r));
    writeFileAtomically(dir / kReviewersFile, j.dump(2) + "\n");
}

Conference upsertAssignment(const Conference& conference, const Assignment& assignment)
{
    checkReferences(conference, assignment, "assignment");
    Conference next = conference;
    auto it = std::find_if(next.assignments.begin(), next.assignments.end(), [&](const Assignment& a) {
        return a.paperId == assignment.paperId && a.reviewerId == assignment.reviewerId;
    });
    if (it != next.assignments.end())
        *it = assignment;
    else
        next.assignments.push_back(assignment);
    return next;
}

RemoveResult removeAssignment(const Conference& conference, std::string_view paperId, std::string_view reviewerId)
{
    RemoveResult result{conference, false};
    auto& as = result.conference.assignments;
    const auto it = std::find_if(as.begin(), as.end(), [&](const Assignment& a) {
        return a.paperId == paperId && a.reviewerId == reviewerId;
    });
    if (it != as.end()) {
        as.erase(it);
        result.found = true;
    }
    return result;
}

text::RawDocument submissionDocument(const Paper& paper)
{
    return {paper.id, paper.title, paper.abstract, text::DocumentSource::Submission};
}

std::vector<text::RawDocument> submissionDocuments(const Conference& conference)
{
    std::vector<text::RawDocument> docs;
    docs.reserve(conference.papers.size());
    for (const auto& p : conference.papers)
        docs.push_back(submissionDocument(p));
    return docs;
}

}  // namespace pccloud::corpus
