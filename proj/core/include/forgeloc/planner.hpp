// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_PLANNER_HPP_
#define FORGELOC_PLANNER_HPP_

#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forgeloc/types.hpp"

namespace forgeloc {

struct Token {
  std::string text;
  double start = 0.0;
  double end = 0.0;
};

struct Transcript {
  double duration = 0.0;
  std::vector<Token> tokens;
};

/// Tokens must be nonempty, time-ordered, non-overlapping and inside
/// [0, duration].
void CheckTranscript(const Transcript& t);

/// Lowercases and removes ASCII punctuation.
std::string NormalizeToken(std::string_view text);

/// Scores a sequence of normalized words.
class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  virtual double Score(const std::vector<std::string>& words) const = 0;
};

/// Additive valence scorer: words outside the lexicon contribute zero.
class Lexicon : public SentimentScorer {
 public:
  Lexicon() = default;
  Lexicon(std::initializer_list<std::pair<const std::string, double>> entries);

  /// Throws on a non-finite valence. The word is normalized first.
  void Add(const std::string& word, double valence);
  double Valence(const std::string& word) const;
  bool Contains(const std::string& word) const;
  std::size_t size() const { return valence_.size(); }

  double Score(const std::vector<std::string>& words) const override;

 private:
  std::map<std::string, double> valence_;
};

/// Word -> antonyms, both normalized. Each antonym list is sorted and
/// deduplicated.
class AntonymDictionary {
 public:
  AntonymDictionary() = default;
  AntonymDictionary(
      std::initializer_list<std::pair<const std::string, std::vector<std::string>>>
          entries);

  /// Throws if an antonym equals the word itself.
  void Add(const std::string& word, const std::vector<std::string>& antonyms);
  const std::vector<std::string>& Lookup(const std::string& word) const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Normalized token texts in transcript order.
std::vector<std::string> Words(const Transcript& t);

double Sentiment(const Transcript& t, const SentimentScorer& scorer);

/// The antonym of token `index` that maximizes |S(D) - S(D')| with only
/// that token replaced, paired with that magnitude. Ties go to the
/// lexicographically smallest antonym. Empty if the token has no antonyms.
std::optional<std::pair<std::string, double>> BestReplacement(
    const Transcript& t, int index, const SentimentScorer& scorer,
    const AntonymDictionary& antonyms);

struct Replacement {
  int token_index = 0;
  std::string original;
  std::string replacement;
  double delta_s = 0.0;  // S(D with only this replacement) - S(D)
};

struct ManipulationPlan {
  std::vector<Replacement> replacements;  // ascending token index
  double total_delta = 0.0;
  double sentiment_before = 0.0;
  double sentiment_after = 0.0;  // all replacements applied
  std::vector<Segment> fake_segments;

  bool empty() const { return replacements.empty(); }
};

/// Maximum replacements: 1 below 10 seconds, otherwise 2.
int ReplacementBudget(double duration);

/// Exhaustive search over replacement sets on distinct tokens of size at
/// most ReplacementBudget(duration), maximizing |sum of delta_s|. Ties go to
/// fewer replacements, then lexicographically smaller token indices, then
/// smaller antonym strings. Returns an empty plan when no candidate changes
/// the sentiment.
ManipulationPlan Plan(const Transcript& t, const SentimentScorer& scorer,
                      const AntonymDictionary& antonyms);

/// The three fake variants of `base` sharing the plan's segments, with
/// (eta_v, eta_a) = (1, 1), (0, 1), (1, 0) and ids suffixed "_av", "_a",
/// "_v". Throws on an empty plan.
std::vector<VideoAnnotation> EmitVariants(const ManipulationPlan& plan,
                                          const VideoAnnotation& base);

// Transcript JSON: {"duration": s, "tokens": [{"text", "start", "end"}]}.
Transcript ReadTranscript(std::istream& in);
Transcript ReadTranscriptFile(const std::string& path);

// Tab-separated; blank lines and lines starting with '#' are skipped.
Lexicon ReadLexicon(std::istream& in);
Lexicon ReadLexiconFile(const std::string& path);
AntonymDictionary ReadAntonyms(std::istream& in);
AntonymDictionary ReadAntonymsFile(const std::string& path);

std::string PlanToJson(const ManipulationPlan& plan);

}  // namespace forgeloc

#endif  // FORGELOC_PLANNER_HPP_
