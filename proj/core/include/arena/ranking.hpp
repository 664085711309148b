// Copyright 2026 The Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/domain.hpp"

namespace arena {

// A vote with its pairing resolved, as read from the store or a votes file.
struct RankingVote {
  ConversationId conversation_id;
  ModelId model_a;
  ModelId model_b;
  VoteChoice choice = VoteChoice::tie;
  Timestamp cast_at{};
};

struct RankingReaction {
  ConversationId conversation_id;
  ModelId model_a;
  ModelId model_b;
  int turn_index = 0;
  Side side = Side::a;
  Polarity polarity = Polarity::positive;
};

struct RankingWeights {
  double vote_w = 1.0;
  double reaction_w = 0.5;
};

struct OutcomeMatrix {
  std::vector<ModelId> models;
  std::vector<std::vector<double>> wins;  // wins[i][j]: mass of "i preferred over j"
  double pseudo_count = 0;

  std::size_t size() const { return models.size(); }
  double comparisons(std::size_t i, std::size_t j) const { return wins[i][j] + wins[j][i]; }
  std::optional<std::size_t> index_of(const ModelId& id) const;
};

// One resampling unit: a vote or a reaction-derived pseudo-vote, already
// weighted. Bootstrap replicas resample these.
struct ComparisonUnit {
  std::size_t i = 0;
  std::size_t j = 0;
  double i_over_j = 0;
  double j_over_i = 0;
};

// Model universe: `models` when nonempty (every referenced id must be in
// it, else Error(invalid_argument)); otherwise the sorted set of ids that
// appear in the data.
std::vector<ModelId> model_universe(std::span<const RankingVote> votes, std::span<const RankingReaction> reactions,
                                    std::span<const ModelId> models = {});

// Votes contribute vote_w to the preferred side (half each way for tie and
// both_bad). A conversation without a vote whose summed per-side reaction
// score (+1 positive, -1 negative) is strictly greater on one side
// contributes reaction_w toward that side.
std::vector<ComparisonUnit> comparison_units(std::span<const RankingVote> votes,
                                             std::span<const RankingReaction> reactions,
                                             const RankingWeights& weights, std::span<const ModelId> universe);

// Sums units into a matrix, then adds lambda to every ordered pair i != j.
OutcomeMatrix assemble_matrix(std::vector<ModelId> universe, std::span<const ComparisonUnit> units, double lambda);

// Throws Error(invalid_config) for negative weights or lambda.
OutcomeMatrix build_outcome_matrix(std::span<const RankingVote> votes, std::span<const RankingReaction> reactions,
                                   const RankingWeights& weights, double lambda,
                                   std::span<const ModelId> models = {});

// Connected components of the comparison graph (edge where
// wins[i][j] + wins[j][i] > 0). Ids are assigned in order of first member.
std::vector<int> connectivity(const OutcomeMatrix& m);

// Sum over i != j of wins[i][j] * log(p_i / (p_i + p_j)).
double bt_log_likelihood(const OutcomeMatrix& m, std::span<const double> p);

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 10'000;
  bool per_component = false;
  bool record_trace = false;
};

struct FitResult {
  std::vector<double> strengths;  // geometric mean 1 within each component
  std::vector<int> components;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0;
  std::vector<double> trace;  // log-likelihood after each iteration (record_trace)
  int monotonicity_violations = 0;
};

// Minorization-maximization fit of P(i beats j) = p_i / (p_i + p_j).
// Errors: no_data (empty matrix or no comparison mass), disconnected_graph
// (several components and per_component off), no_finite_mle (a component
// whose directed win graph is not strongly connected, so some strength
// diverges).
FitResult fit_bradley_terry(const OutcomeMatrix& m, const FitOptions& options = {});

// 1000 + 400 * log10(p). Throws Error(invalid_strengths) for p <= 0.
double to_display_rating(double p);
std::vector<double> to_display_ratings(std::span<const double> p);

struct RankingConfig {
  RankingWeights weights;
  double lambda = 0.1;
  int bootstrap_rounds = 200;
  std::uint64_t seed = 0;
  FitOptions fit;
};

struct Interval {
  double low = 0;
  double high = 0;
};

struct BootstrapResult {
  std::vector<ModelId> models;
  std::vector<double> point_ratings;
  std::vector<Interval> intervals;
  int failed_replicas = 0;
};

// Percentile bootstrap over comparison units: B replicas, each resampling
// the units with replacement using a stream derived from (seed, replica),
// then 2.5 / 97.5 percentiles of display ratings. Intervals are widened if
// needed so they contain the point rating. Requires B >= 50.
BootstrapResult bootstrap_intervals(std::span<const RankingVote> votes, std::span<const RankingReaction> reactions,
                                    const RankingConfig& config, std::span<const ModelId> models = {});

// Linear-interpolation percentile (q in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

struct LeaderboardEntry {
  ModelId model_id;
  double strength = 1;
  double display_rating = 1000;
  double ci_low = 1000;
  double ci_high = 1000;
  std::int64_t n_comparisons = 0;
  int component_id = 0;
};

struct LeaderboardSnapshot {
  std::vector<LeaderboardEntry> entries;  // display_rating descending
  Timestamp as_of{};
  RankingConfig config;
  std::int64_t vote_count = 0;
  std::int64_t pseudo_vote_count = 0;
  std::string config_digest;
};

LeaderboardSnapshot compute_leaderboard(std::span<const RankingVote> votes,
                                        std::span<const RankingReaction> reactions, const RankingConfig& config,
                                        Timestamp as_of, std::span<const ModelId> models = {});

std::string config_digest(const RankingConfig& config);

nlohmann::ordered_json to_json(const LeaderboardSnapshot& s);
LeaderboardSnapshot snapshot_from_json(const nlohmann::json& j);

// Fixed-width text table for terminals.
std::string format_table(const LeaderboardSnapshot& s);

}  // namespace arena
