// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace forgeloc::oracle {
namespace {

// Rank order: higher score first, earlier input first among equal scores.
std::vector<std::size_t> Ranked(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return idx;
}

// Greedy assignment of ranked predictions to ground truth of one video.
int Assign(const Segment& p, const std::vector<Segment>& gts,
           std::vector<bool>& taken, double thr) {
  std::vector<double> ious(gts.size(), -1.0);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!taken[g]) ious[g] = Iou(p.start, p.end, gts[g].start, gts[g].end);
  }
  int pick = -1;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (ious[g] < thr || taken[g]) continue;
    if (pick < 0 || ious[g] > ious[static_cast<std::size_t>(pick)]) {
      pick = static_cast<int>(g);
    }
  }
  if (pick >= 0) taken[static_cast<std::size_t>(pick)] = true;
  return pick;
}

const VideoAnnotation* Find(const Manifest& m, const std::string& id) {
  for (const VideoAnnotation& a : m) {
    if (a.video_id == id) return &a;
  }
  return nullptr;
}

}  // namespace

double Iou(double s0, double e0, double s1, double e1) {
  const double inter = std::max(0.0, std::min(e0, e1) - std::max(s0, s1));
  if (inter == 0.0) return 0.0;
  return inter / ((e0 - s0) + (e1 - s1) - inter);
}

std::vector<std::vector<double>> GtGrid(const std::vector<Segment>& gts,
                                        int frames, int max_duration) {
  std::vector<std::vector<double>> grid(
      static_cast<std::size_t>(max_duration),
      std::vector<double>(static_cast<std::size_t>(frames), -1.0));
  for (int t = 0; t < frames; ++t) {
    for (int len = 1; len <= max_duration && t + len <= frames; ++len) {
      double best = 0.0;
      for (const Segment& g : gts) {
        best = std::max(best, Iou(t, t + len, g.start, g.end));
      }
      grid[static_cast<std::size_t>(len - 1)][static_cast<std::size_t>(t)] = best;
    }
  }
  return grid;
}

double AveragePrecision(const std::vector<Prediction>& preds,
                        const Manifest& manifest, double thr) {
  std::vector<Prediction> kept;
  for (const Prediction& p : preds) {
    if (Find(manifest, p.video_id) != nullptr) kept.push_back(p);
  }
  std::vector<double> scores;
  for (const Prediction& p : kept) scores.push_back(p.segment.score);
  std::map<std::string, std::vector<bool>> taken;
  int n_gt = 0;
  for (const VideoAnnotation& a : manifest) {
    taken[a.video_id].assign(a.fake_segments.size(), false);
    n_gt += static_cast<int>(a.fake_segments.size());
  }

  std::vector<bool> tp;
  for (std::size_t i : Ranked(scores)) {
    const VideoAnnotation* a = Find(manifest, kept[i].video_id);
    tp.push_back(Assign(kept[i].segment, a->fake_segments, taken[a->video_id], thr) >= 0);
  }
  std::vector<double> prec(tp.size());
  int hits = 0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    hits += tp[k] ? 1 : 0;
    prec[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  double ap = 0.0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    if (!tp[k]) continue;
    ap += *std::max_element(prec.begin() + static_cast<std::ptrdiff_t>(k), prec.end());
  }
  return ap / n_gt;
}

double AverageRecall(const std::vector<Prediction>& preds,
                     const Manifest& manifest, int budget) {
  int n_gt = 0;
  for (const VideoAnnotation& a : manifest) n_gt += static_cast<int>(a.fake_segments.size());
  double total = 0.0;
  int n_thr = 0;
  for (int k = 50; k <= 95; k += 5, ++n_thr) {
    const double thr = k / 100.0;
    int found = 0;
    for (const VideoAnnotation& a : manifest) {
      std::vector<Segment> mine;
      for (const Prediction& p : preds) {
        if (p.video_id == a.video_id) mine.push_back(p.segment);
      }
      std::vector<double> scores;
      for (const Segment& s : mine) scores.push_back(s.score);
      std::vector<std::size_t> order = Ranked(scores);
      if (order.size() > static_cast<std::size_t>(budget)) order.resize(static_cast<std::size_t>(budget));
      std::vector<bool> taken(a.fake_segments.size(), false);
      for (std::size_t i : order) {
        if (Assign(mine[i], a.fake_segments, taken, thr) >= 0) ++found;
      }
    }
    total += static_cast<double>(found) / n_gt;
  }
  return total / n_thr;
}

double Auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

std::vector<Segment> SoftNms(std::vector<Segment> boxes,
                             const SoftNmsConfig& config) {
  std::vector<Segment> picked;
  boxes.erase(std::remove_if(boxes.begin(), boxes.end(),
                             [&](const Segment& b) { return b.score < config.score_floor; }),
              boxes.end());
  while (!boxes.empty()) {
    auto top = std::max_element(boxes.begin(), boxes.end(),
                                [](const Segment& a, const Segment& b) {
                                  return a.score < b.score;
                                });
    const Segment m = *top;
    boxes.erase(top);
    picked.push_back(m);
    std::vector<Segment> rest;
    for (Segment b : boxes) {
      const double o = Iou(m.start, m.end, b.start, b.end);
      double w = 1.0;
      if (config.method == DecayMethod::kGaussian) {
        w = std::exp(-o * o / config.sigma);
      } else if (o > config.iou_cut) {
        w = 1.0 - o;
      }
      b.score *= w;
      if (b.score >= config.score_floor) rest.push_back(b);
    }
    boxes = rest;
  }
  if (picked.size() > static_cast<std::size_t>(config.top_k)) {
    picked.resize(static_cast<std::size_t>(config.top_k));
  }
  return picked;
}

PlanChoice BestPlan(const Transcript& t, const Lexicon& lexicon,
                    const AntonymDictionary& antonyms) {
  std::vector<std::string> words;
  for (const Token& tok : t.tokens) words.push_back(NormalizeToken(tok.text));
  auto score = [&](const std::vector<std::string>& w) {
    double s = 0.0;
    for (const std::string& x : w) s += lexicon.Valence(x);
    return s;
  };
  const double base = score(words);
  const int budget = t.duration < 10.0 ? 1 : 2;
  const int n = static_cast<int>(words.size());

  // Strict "a is preferred over b" for equal magnitudes.
  auto prefer = [](const PlanChoice& a, const PlanChoice& b) {
    if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
    if (a.tokens != b.tokens) return a.tokens < b.tokens;
    return a.antonyms < b.antonyms;
  };
  PlanChoice best;
  bool have = false;
  std::function<void(int, PlanChoice&)> extend = [&](int from, PlanChoice& cur) {
    if (!cur.tokens.empty()) {
      std::vector<std::string> w = words;
      for (std::size_t k = 0; k < cur.tokens.size(); ++k) {
        w[static_cast<std::size_t>(cur.tokens[k])] = cur.antonyms[k];
      }
      cur.delta = score(w) - base;
      const double mag = std::abs(cur.delta);
      const double best_mag = std::abs(best.delta);
      if (!have || mag > best_mag || (mag == best_mag && prefer(cur, best))) {
        best = cur;
        have = true;
      }
    }
    if (static_cast<int>(cur.tokens.size()) == budget) return;
    for (int i = from; i < n; ++i) {
      for (const std::string& a : antonyms.Lookup(words[static_cast<std::size_t>(i)])) {
        cur.tokens.push_back(i);
        cur.antonyms.push_back(a);
        extend(i + 1, cur);
        cur.tokens.pop_back();
        cur.antonyms.pop_back();
      }
    }
  };
  PlanChoice cur;
  extend(0, cur);
  if (!have || best.delta == 0.0) return {};
  return best;
}

Manifest RandomManifest(std::mt19937_64& rng, int n_videos, int max_gt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, max_gt);
  for (;;) {
    Manifest m;
    int total = 0;
    for (int v = 0; v < n_videos; ++v) {
      VideoAnnotation a;
      a.video_id = "v" + std::to_string(v);
      a.fps = 25.0;
      a.duration = 2.0 + 8.0 * u(rng);
      a.n_frames = static_cast<int>(std::lround(a.duration * a.fps));
      const int k = count(rng);
      // One segment inside each of k equal slots keeps them disjoint.
      for (int g = 0; g < k; ++g) {
        const double slot = a.duration / k;
        const double len = slot * (0.1 + 0.8 * u(rng));
        const double start = g * slot + (slot - len) * u(rng);
        a.fake_segments.push_back({start, start + len, 1.0});
      }
      a.eta_v = !a.fake_segments.empty();
      a.eta_a = a.eta_v && u(rng) < 0.5;
      total += k;
      m.push_back(std::move(a));
    }
    if (total > 0) return m;
  }
}

std::vector<Prediction> RandomPredictions(std::mt19937_64& rng,
                                          const Manifest& manifest,
                                          int max_preds, bool unknown_ids) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, max_preds);
  std::vector<Prediction> preds;
  for (const VideoAnnotation& a : manifest) {
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      Prediction p;
      p.video_id = a.video_id;
      if (!a.fake_segments.empty() && u(rng) < 0.5) {
        const Segment& g = a.fake_segments[static_cast<std::size_t>(
            std::uniform_int_distribution<int>(
                0, static_cast<int>(a.fake_segments.size()) - 1)(rng))];
        const double jitter = 0.3 * (g.end - g.start);
        p.segment.start = std::max(0.0, g.start + jitter * (u(rng) - 0.5));
        p.segment.end = std::max(p.segment.start + 0.04, g.end + jitter * (u(rng) - 0.5));
      } else {
        const double len = 0.1 + 2.0 * u(rng);
        p.segment.start = (a.duration - len) * u(rng);
        p.segment.end = p.segment.start + len;
      }
      // A coarse grid for some scores so ties occur.
      p.segment.score = u(rng) < 0.3 ? std::round(10.0 * u(rng)) / 10.0 : u(rng);
      preds.push_back(p);
    }
  }
  if (unknown_ids && u(rng) < 0.5) {
    preds.push_back({"unknown", {0.0, 1.0, 0.99}});
  }
  std::shuffle(preds.begin(), preds.end(), rng);
  return preds;
}

}  // namespace forgeloc::oracle
