#pragma once

// Small on-disk corpus for the command tests, with hand-counted expectations.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace fixture {

/// Offensive kept: p01 p02 p04 p06 p07 p09. Mention kept among those: p01 p02 p06 p09.
inline const char* kFilterCorpus =
    R"({"id":"p01","author_id":"alice","text":"@bob you idiot","created_at":"2017-08-01T10:00:00Z"}
{"id":"p02","author_id":"bob","text":"what a moron @carol","created_at":"2017-08-01T11:00:00Z"}
{"id":"p03","author_id":"carol","text":"have a nice day @alice","created_at":"2017-08-01T12:00:00Z"}
{"id":"p04","author_id":"dave","text":"loser","created_at":"2017-08-01T13:00:00Z"}
{"id":"p05","author_id":"erin","text":"hello world","created_at":"2017-08-01T14:00:00Z"}
{"id":"p06","author_id":"bob","text":"@alice @dave total idiot","created_at":"2017-08-01T15:00:00Z"}
{"id":"p07","author_id":"carol","text":"I will die laughing","created_at":"2017-08-01T16:00:00Z"}
{"id":"p08","author_id":"alice","text":"@bob thanks","created_at":"2017-08-01T17:00:00Z"}
{"id":"p09","author_id":"dave","text":"moron @carol","created_at":"2017-08-01T18:00:00Z"}
{"id":"p10","author_id":"erin","text":"so sunny today","created_at":"2017-08-01T19:00:00Z"}
)";

inline const char* kLexicon = "idiot\t1\nmoron\t2\ndie\t1\nloser\t1\n";

struct FilterCounts {
  std::size_t input, offensive_kept, offensive_dropped, mention_kept, mention_dropped;
};
inline const FilterCounts kFilterCounts{10, 6, 4, 4, 2};

/// Predicted incivil: p01 (alice->bob), p02 (bob->carol), p06 (bob->alice,dave), p09 (dave->carol).
inline const char* kPredictions =
    R"({"tweet_id":"p01","p_incivil":0.9,"label_pred":"incivil"}
{"tweet_id":"p02","p_incivil":0.8,"label_pred":"incivil"}
{"tweet_id":"p03","p_incivil":0.1,"label_pred":"civil"}
{"tweet_id":"p06","p_incivil":0.7,"label_pred":"incivil"}
{"tweet_id":"p09","p_incivil":0.6,"label_pred":"incivil"}
{"tweet_id":"p10","p_incivil":0.2,"label_pred":"civil"}
)";

/// erin has no profile.
inline const char* kProfiles =
    R"({"user_id":"alice","followers_count":300,"friends_count":100,"statuses_count":5}
{"user_id":"bob","followers_count":45,"friends_count":55,"statuses_count":5}
{"user_id":"carol","followers_count":90,"friends_count":10,"statuses_count":5}
{"user_id":"dave","followers_count":1,"friends_count":3,"statuses_count":5}
)";

inline const std::map<std::string, std::pair<double, double>> kFollowersFriends = {
    {"alice", {300, 100}}, {"bob", {45, 55}}, {"carol", {90, 10}}, {"dave", {1, 3}}};

/// Labels for the predicted tweets; p06 and p10 are misclassified.
inline const char* kLabels = "tweet_id,label\np01,incivil\np02,incivil\np03,civil\np06,civil\np09,incivil\np10,incivil\n";

/// Conflict corpus: c1 alice->bob, c2 has no mention, c3 bob->alice,dave.
inline const char* kConflictCorpus =
    R"({"id":"c1","author_id":"alice","text":"@bob you idiot","created_at":"2017-09-01T10:00:00Z"}
{"id":"c2","author_id":"carol","text":"nobody mentioned","created_at":"2017-09-01T10:00:00Z"}
{"id":"c3","author_id":"bob","text":"@alice @dave ugh","created_at":"2017-09-01T11:00:00Z"}
)";

/// Newest first per user: alice +pizza then -boston; bob -pizza then -boston;
/// dave +pizza then +boston.
inline const char* kConflictTimelines =
    R"({"id":"ta1","author_id":"alice","text":"I love Pizza","created_at":"2017-01-02T00:00:00Z"}
{"id":"ta2","author_id":"alice","text":"I hate Boston","created_at":"2017-01-01T00:00:00Z"}
{"id":"tb1","author_id":"bob","text":"I hate Pizza","created_at":"2017-01-02T00:00:00Z"}
{"id":"tb2","author_id":"bob","text":"I hate Boston","created_at":"2017-01-01T00:00:00Z"}
{"id":"td1","author_id":"dave","text":"I love Pizza","created_at":"2017-01-02T00:00:00Z"}
{"id":"td2","author_id":"dave","text":"I love Boston","created_at":"2017-01-01T00:00:00Z"}
)";

/// tweet -> conflict count with the full timelines and with k = 1.
inline const std::map<std::string, long> kConflictsFull = {{"c1", 1}, {"c3", 3}};
inline const std::map<std::string, long> kConflictsK1 = {{"c1", 1}, {"c3", 2}};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("incivil_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixture
