#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pccloud/text.hpp"

namespace pccloud::corpus {

struct Paper {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> topics;
    std::vector<std::string> authorNames;

    friend bool operator==(const Paper&, const Paper&) = default;
};

struct ExternalIds {
    std::optional<std::string> dblpQuery;
    std::optional<std::string> semanticScholarAuthorId;

    bool empty() const { return !dblpQuery && !semanticScholarAuthorId; }
    friend bool operator==(const ExternalIds&, const ExternalIds&) = default;
};

struct Reviewer {
    std::string id;
    std::string name;
    std::optional<std::string> affiliation;
    ExternalIds externalIds;
    std::vector<text::RawDocument> publications;
    std::vector<std::string> acceptedTopics;

    friend bool operator==(const Reviewer&, const Reviewer&) = default;
};

enum class AssignmentStatus { Proposed, Confirmed, Declined };
enum class AssignmentOrigin { Manual, Suggested };

struct Assignment {
    std::string paperId;
    std::string reviewerId;
    AssignmentStatus status = AssignmentStatus::Proposed;
    AssignmentOrigin origin = AssignmentOrigin::Manual;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Immutable snapshot of one conference. Mutations return new values.
struct Conference {
    std::string name;
    std::vector<std::string> topics;
    std::vector<Paper> papers;
    std::vector<Reviewer> reviewers;
    std::vector<Assignment> assignments;

    const Paper* findPaper(std::string_view id) const;
    const Reviewer* findReviewer(std::string_view id) const;
    const Assignment* findAssignment(std::string_view paperId, std::string_view reviewerId) const;

    friend bool operator==(const Conference&, const Conference&) = default;
};

std::string_view toString(AssignmentStatus s);
std::string_view toString(AssignmentOrigin o);

// JSON mapping shared by the corpus files, the HTTP service and the CLI.
nlohmann::json toJson(const Paper& p);
nlohmann::json toJson(const Reviewer& r);
nlohmann::json toJson(const Assignment& a);
nlohmann::json toJson(const std::vector<Assignment>& as);

/// Parses one assignment object; throws Error(Validation) describing the
/// offending field.
Assignment assignmentFromJson(const nlohmann::json& j);

/// Checks every referential and uniqueness invariant. Throws
/// Error(Validation) naming the offending entity.
void validate(const Conference& conference);

/// Soft findings: topic names outside the conference topic list and
/// author/reviewer name collisions.
std::vector<std::string> collectWarnings(const Conference& conference);

struct LoadedCorpus {
    Conference conference;
    std::vector<std::string> warnings;
};

/// Reads conference.json, papers.json, reviewers.json and the optional
/// assignments.json. Missing files raise Io, malformed JSON raises Parse,
/// broken invariants raise Validation; each message names the file.
LoadedCorpus loadCorpusWithWarnings(const std::filesystem::path& dir);
Conference loadCorpus(const std::filesystem::path& dir);

/// Atomically replaces assignments.json (temp file + rename).
void saveAssignments(const Conference& conference, const std::filesystem::path& dir);

/// Atomically replaces reviewers.json, e.g. after hydration.
void saveReviewers(const Conference& conference, const std::filesystem::path& dir);

/// Writes content to path via a sibling temp file and rename. On failure
/// the previous file is untouched and Error(Io) is thrown.
void writeFileAtomically(const std::filesystem::path& path, std::string_view content);

Conference upsertAssignment(const Conference& conference, const Assignment& assignment);

struct RemoveResult {
    Conference conference;
    bool found = false;
};

RemoveResult removeAssignment(const Conference& conference, std::string_view paperId, std::string_view reviewerId);

/// Title+abstract of every paper as submission documents.
std::vector<text::RawDocument> submissionDocuments(const Conference& conference);
text::RawDocument submissionDocument(const Paper& paper);

}  // namespace pccloud::corpus
