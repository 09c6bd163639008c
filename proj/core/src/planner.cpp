// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace forgeloc {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kNoAntonyms;

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, '\t')) out.push_back(field);
  return out;
}

bool SkipLine(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

// One applicable (token, antonym) substitution.
struct Candidate {
  int token = 0;
  const std::string* antonym = nullptr;
  double delta = 0.0;
};

struct Choice {
  std::vector<const Candidate*> items;
  double sum = 0.0;
};

// True if `a` should be preferred over `b` at equal |sum|.
bool TieBreak(const Choice& a, const Choice& b) {
  if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (a.items[i]->token != b.items[i]->token) {
      return a.items[i]->token < b.items[i]->token;
    }
  }
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (*a.items[i]->antonym != *b.items[i]->antonym) {
      return *a.items[i]->antonym < *b.items[i]->antonym;
    }
  }
  return false;
}

}  // namespace

void CheckTranscript(const Transcript& t) {
  if (!std::isfinite(t.duration) || t.duration < 0.0) {
    throw Error("transcript duration must be finite and nonnegative");
  }
  double prev_end = 0.0;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    const Token& tok = t.tokens[i];
    if (!(tok.start >= 0.0 && tok.end > tok.start && tok.end <= t.duration)) {
      throw Error("token " + std::to_string(i) +
                  " is empty or lies outside [0, duration]");
    }
    if (tok.start < prev_end) {
      throw Error("token " + std::to_string(i) +
                  " overlaps or precedes the previous token");
    }
    prev_end = tok.end;
  }
}

std::string NormalizeToken(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u) || std::isspace(u)) continue;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

Lexicon::Lexicon(
    std::initializer_list<std::pair<const std::string, double>> entries) {
  for (const auto& [w, v] : entries) Add(w, v);
}

void Lexicon::Add(const std::string& word, double valence) {
  if (!std::isfinite(valence)) {
    throw Error("lexicon valence for '" + word + "' is not finite");
  }
  valence_[NormalizeToken(word)] = valence;
}

double Lexicon::Valence(const std::string& word) const {
  auto it = valence_.find(word);
  return it == valence_.end() ? 0.0 : it->second;
}

bool Lexicon::Contains(const std::string& word) const {
  return valence_.count(word) > 0;
}

double Lexicon::Score(const std::vector<std::string>& words) const {
  double s = 0.0;
  for (const std::string& w : words) s += Valence(w);
  return s;
}

AntonymDictionary::AntonymDictionary(
    std::initializer_list<std::pair<const std::string, std::vector<std::string>>>
        entries) {
  for (const auto& [w, a] : entries) Add(w, a);
}

void AntonymDictionary::Add(const std::string& word,
                            const std::vector<std::string>& antonyms) {
  const std::string key = NormalizeToken(word);
  std::vector<std::string>& list = entries_[key];
  for (const std::string& a : antonyms) {
    std::string n = NormalizeToken(a);
    if (n.empty()) continue;
    if (n == key) throw Error("'" + word + "' is listed as its own antonym");
    list.push_back(std::move(n));
  }
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
}

const std::vector<std::string>& AntonymDictionary::Lookup(
    const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? kNoAntonyms : it->second;
}

std::vector<std::string> Words(const Transcript& t) {
  std::vector<std::string> words;
  words.reserve(t.tokens.size());
  for (const Token& tok : t.tokens) words.push_back(NormalizeToken(tok.text));
  return words;
}

double Sentiment(const Transcript& t, const SentimentScorer& scorer) {
  return scorer.Score(Words(t));
}

std::optional<std::pair<std::string, double>> BestReplacement(
    const Transcript& t, int index, const SentimentScorer& scorer,
    const AntonymDictionary& antonyms) {
  if (index < 0 || index >= static_cast<int>(t.tokens.size())) {
    throw Error("token index out of range");
  }
  std::vector<std::string> words = Words(t);
  const double base = scorer.Score(words);
  const std::string original = words[static_cast<std::size_t>(index)];
  std::optional<std::pair<std::string, double>> best;
  for (const std::string& a : antonyms.Lookup(original)) {
    words[static_cast<std::size_t>(index)] = a;
    const double mag = std::abs(scorer.Score(words) - base);
    if (!best || mag > best->second) best = {a, mag};
  }
  return best;
}

int ReplacementBudget(double duration) { return duration < 10.0 ? 1 : 2; }

ManipulationPlan Plan(const Transcript& t, const SentimentScorer& scorer,
                      const AntonymDictionary& antonyms) {
  CheckTranscript(t);
  std::vector<std::string> words = Words(t);
  ManipulationPlan plan;
  plan.sentiment_before = scorer.Score(words);
  plan.sentiment_after = plan.sentiment_before;

  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string original = words[i];
    for (const std::string& a : antonyms.Lookup(original)) {
      words[i] = a;
      cands.push_back({static_cast<int>(i), &a,
                       scorer.Score(words) - plan.sentiment_before});
    }
    words[i] = original;
  }

  const int budget = ReplacementBudget(t.duration);
  Choice best;
  auto consider = [&](Choice c) {
    const double mag = std::abs(c.sum);
    const double best_mag = std::abs(best.sum);
    if (best.items.empty() || mag > best_mag ||
        (mag == best_mag && TieBreak(c, best))) {
      best = std::move(c);
    }
  };
  for (std::size_t i = 0; i < cands.size(); ++i) {
    consider({{&cands[i]}, cands[i].delta});
    if (budget < 2) continue;
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      if (cands[j].token == cands[i].token) continue;
      consider({{&cands[i], &cands[j]}, cands[i].delta + cands[j].delta});
    }
  }
  if (best.items.empty() || best.sum == 0.0) return plan;

  plan.total_delta = best.sum;
  for (const Candidate* c : best.items) {
    const Token& tok = t.tokens[static_cast<std::size_t>(c->token)];
    plan.replacements.push_back({c->token, tok.text, *c->antonym, c->delta});
    plan.fake_segments.push_back({tok.start, tok.end, 1.0});
    words[static_cast<std::size_t>(c->token)] = *c->antonym;
  }
  plan.sentiment_after = scorer.Score(words);
  return plan;
}

std::vector<VideoAnnotation> EmitVariants(const ManipulationPlan& plan,
                                          const VideoAnnotation& base) {
  if (plan.empty()) throw Error("cannot emit variants of an empty plan");
  struct Variant {
    const char* suffix;
    bool eta_v;
    bool eta_a;
  };
  static constexpr Variant kVariants[] = {
      {"_av", true, true}, {"_a", false, true}, {"_v", true, false}};
  std::vector<VideoAnnotation> out;
  for (const Variant& v : kVariants) {
    VideoAnnotation a = base;
    a.video_id = base.video_id + v.suffix;
    a.eta_v = v.eta_v;
    a.eta_a = v.eta_a;
    a.fake_segments = plan.fake_segments;
    CheckAnnotation(a);
    out.push_back(std::move(a));
  }
  return out;
}

Transcript ReadTranscript(std::istream& in) {
  Transcript t;
  try {
    const json j = json::parse(in);
    t.duration = j.at("duration").get<double>();
    for (const json& tok : j.at("tokens")) {
      t.tokens.push_back({tok.at("text").get<std::string>(),
                          tok.at("start").get<double>(),
                          tok.at("end").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(std::string("transcript: ") + e.what());
  }
  CheckTranscript(t);
  return t;
}

Transcript ReadTranscriptFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcript '" + path + "'");
  return ReadTranscript(in);
}

Lexicon ReadLexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    const std::vector<std::string> f = SplitTabs(line);
    double v = 0.0;
    try {
      if (f.size() != 2) throw std::invalid_argument("expected 2 fields");
      std::size_t used = 0;
      v = std::stod(f[1], &used);
    } catch (const std::exception&) {
      throw Error("lexicon line " + std::to_string(line_no) +
                  ": expected 'word<TAB>valence'");
    }
    lex.Add(f[0], v);
  }
  return lex;
}

Lexicon ReadLexiconFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon '" + path + "'");
  return ReadLexicon(in);
}

AntonymDictionary ReadAntonyms(std::istream& in) {
  AntonymDictionary dict;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    std::vector<std::string> f = SplitTabs(line);
    if (f.size() < 2) {
      throw Error("antonym line " + std::to_string(line_no) +
                  ": expected 'word<TAB>antonym...'");
    }
    const std::string word = f.front();
    f.erase(f.begin());
    dict.Add(word, f);
  }
  return dict;
}

AntonymDictionary ReadAntonymsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open antonym dictionary '" + path + "'");
  return ReadAntonyms(in);
}

std::string PlanToJson(const ManipulationPlan& plan) {
  json reps = json::array();
  for (const Replacement& r : plan.replacements) {
    reps.push_back({{"token_index", r.token_index},
                    {"original", r.original},
                    {"replacement", r.replacement},
                    {"delta_s", r.delta_s}});
  }
  json segs = json::array();
  for (const Segment& s : plan.fake_segments) {
    segs.push_back({{"start", s.start}, {"end", s.end}});
  }
  const json j = {{"replacements", reps},
                  {"total_delta", plan.total_delta},
                  {"sentiment_before", plan.sentiment_before},
                  {"sentiment_after", plan.sentiment_after},
                  {"fake_segments", segs}};
  return j.dump(2);
}

}  // namespace forgeloc
