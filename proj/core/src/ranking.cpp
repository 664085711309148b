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

#include "arena/ranking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "arena/error.hpp"
#include "arena/util.hpp"

namespace arena {

std::optional<std::size_t> OutcomeMatrix::index_of(const ModelId& id) const {
  auto it = std::find(models.begin(), models.end(), id);
  if (it == models.end()) return std::nullopt;
  return static_cast<std::size_t>(it - models.begin());
}

std::vector<ModelId> model_universe(std::span<const RankingVote> votes, std::span<const RankingReaction> reactions,
                                    std::span<const ModelId> models) {
  std::set<ModelId> referenced;
  for (const auto& v : votes) referenced.insert({v.model_a, v.model_b});
  for (const auto& r : reactions) referenced.insert({r.model_a, r.model_b});
  if (models.empty()) return {referenced.begin(), referenced.end()};

  std::set<ModelId> known(models.begin(), models.end());
  for (const auto& id : referenced) {
    if (!known.count(id)) throw Error(ErrorCode::invalid_argument, "unknown model '" + id + "' in outcomes");
  }
  std::vector<ModelId> out;
  std::set<ModelId> seen;
  for (const auto& id : models) {
    if (seen.insert(id).second) out.push_back(id);
  }
  return out;
}

std::vector<ComparisonUnit> comparison_units(std::span<const RankingVote> votes,
                                             std::span<const RankingReaction> reactions,
                                             const RankingWeights& weights, std::span<const ModelId> universe) {
  std::map<ModelId, std::size_t> index;
  for (std::size_t k = 0; k < universe.size(); ++k) index.emplace(universe[k], k);
  auto idx = [&](const ModelId& id) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::invalid_argument, "unknown model '" + id + "' in outcomes");
    return it->second;
  };

  std::vector<ComparisonUnit> units;
  std::set<ConversationId> voted;
  for (const auto& v : votes) {
    if (v.model_a == v.model_b) continue;
    voted.insert(v.conversation_id);
    ComparisonUnit u{idx(v.model_a), idx(v.model_b), 0, 0};
    switch (v.choice) {
      case VoteChoice::a: u.i_over_j = weights.vote_w; break;
      case VoteChoice::b: u.j_over_i = weights.vote_w; break;
      case VoteChoice::tie:
      case VoteChoice::both_bad:
        u.i_over_j = u.j_over_i = weights.vote_w / 2;
        break;
    }
    units.push_back(u);
  }

  struct NetScore {
    ModelId a, b;
    int score_a = 0;
    int score_b = 0;
  };
  std::map<ConversationId, NetScore> net;
  for (const auto& r : reactions) {
    if (voted.count(r.conversation_id) || r.model_a == r.model_b) continue;
    auto& s = net.try_emplace(r.conversation_id, NetScore{r.model_a, r.model_b}).first->second;
    const int delta = r.polarity == Polarity::positive ? 1 : -1;
    (r.side == Side::a ? s.score_a : s.score_b) += delta;
  }
  for (const auto& [_, s] : net) {
    if (s.score_a == s.score_b) continue;
    ComparisonUnit u{idx(s.a), idx(s.b), 0, 0};
    (s.score_a > s.score_b ? u.i_over_j : u.j_over_i) = weights.reaction_w;
    units.push_back(u);
  }
  return units;
}

OutcomeMatrix assemble_matrix(std::vector<ModelId> universe, std::span<const ComparisonUnit> units, double lambda) {
  OutcomeMatrix m;
  const std::size_t n = universe.size();
  m.models = std::move(universe);
  m.pseudo_count = lambda;
  m.wins.assign(n, std::vector<double>(n, 0.0));
  for (const auto& u : units) {
    m.wins[u.i][u.j] += u.i_over_j;
    m.wins[u.j][u.i] += u.j_over_i;
  }
  if (lambda > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) m.wins[i][j] += lambda;
      }
    }
  }
  return m;
}

namespace {
void check_config(const RankingWeights& w, double lambda) {
  if (!(w.vote_w >= 0) || !(w.reaction_w >= 0)) throw Error(ErrorCode::invalid_config, "negative ranking weight");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw Error(ErrorCode::invalid_config, "lambda must be >= 0");
}
}  // namespace

OutcomeMatrix build_outcome_matrix(std::span<const RankingVote> votes, std::span<const RankingReaction> reactions,
                                   const RankingWeights& weights, double lambda, std::span<const ModelId> models) {
  check_config(weights, lambda);
  auto universe = model_universe(votes, reactions, models);
  const auto units = comparison_units(votes, reactions, weights, universe);
  return assemble_matrix(std::move(universe), units, lambda);
}

std::vector<int> connectivity(const OutcomeMatrix& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m.comparisons(i, j) > 0) parent[find(i)] = find(j);
    }
  }
  std::vector<int> out(n, -1);
  std::map<std::size_t, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = ids.try_emplace(find(i), static_cast<int>(ids.size())).first->second;
  }
  return out;
}

double bt_log_likelihood(const OutcomeMatrix& m, std::span<const double> p) {
  double ll = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (i == j || m.wins[i][j] == 0) continue;
      ll += m.wins[i][j] * (std::log(p[i]) - std::log(p[i] + p[j]));
    }
  }
  return ll;
}

namespace {

// Every member reaches every other along "beats" edges and along "beaten
// by" edges; the MLE is finite only then.
bool strongly_connected(const OutcomeMatrix& m, const std::vector<std::size_t>& members) {
  if (members.size() < 2) return true;
  for (bool forward : {true, false}) {
    std::set<std::size_t> seen{members.front()};
    std::vector<std::size_t> frontier{members.front()};
    while (!frontier.empty()) {
      const auto u = frontier.back();
      frontier.pop_back();
      for (auto v : members) {
        const double w = forward ? m.wins[u][v] : m.wins[v][u];
        if (u != v && w > 0 && seen.insert(v).second) frontier.push_back(v);
      }
    }
    if (seen.size() != members.size()) return false;
  }
  return true;
}

void normalize_geometric(std::vector<double>& p, const std::vector<std::size_t>& members) {
  double mean_log = 0;
  for (auto i : members) mean_log += std::log(p[i]);
  mean_log /= static_cast<double>(members.size());
  const double scale = std::exp(-mean_log);
  for (auto i : members) p[i] *= scale;
}

std::string describe_components(const OutcomeMatrix& m, const std::vector<int>& comp) {
  std::map<int, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < comp.size(); ++i) groups[comp[i]].push_back(m.models[i]);
  std::string out;
  for (const auto& [id, names] : groups) {
    out += fmt::format("\n  component {}: {}", id, fmt::join(names, ", "));
  }
  return out;
}

}  // namespace

FitResult fit_bradley_terry(const OutcomeMatrix& m, const FitOptions& options) {
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorCode::no_data, "no models to rank");
  double mass = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = m.wins[i][j];
      if (!std::isfinite(w) || w < 0) throw Error(ErrorCode::invalid_argument, "outcome weights must be finite and >= 0");
      if (i != j) mass += w;
    }
  }
  if (mass == 0) throw Error(ErrorCode::no_data, "no comparisons to fit");

  FitResult result;
  result.components = connectivity(m);
  const int n_components = *std::max_element(result.components.begin(), result.components.end()) + 1;
  if (n_components > 1 && !options.per_component) {
    throw Error(ErrorCode::disconnected_graph,
                "comparison graph has " + std::to_string(n_components) + " components:" +
                    describe_components(m, result.components));
  }

  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(n_components));
  for (std::size_t i = 0; i < n; ++i) groups[static_cast<std::size_t>(result.components[i])].push_back(i);
  for (const auto& g : groups) {
    if (!strongly_connected(m, g)) {
      throw Error(ErrorCode::no_finite_mle,
                  "maximum likelihood strengths diverge (a model never wins or never loses within its "
                  "component); use lambda > 0");
    }
  }

  std::vector<double> total_wins(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) total_wins[i] += m.wins[i][j];
    }
  }

  std::vector<double> p(n, 1.0);
  std::vector<double> next(n, 1.0);
  double ll = bt_log_likelihood(m, p);
  bool converged = false;
  int iter = 0;
  while (iter < options.max_iter) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) {
      double denom = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) {
          const double nij = m.comparisons(i, j);
          if (nij > 0) denom += nij / (p[i] + p[j]);
        }
      }
      next[i] = denom > 0 ? total_wins[i] / denom : 1.0;
    }
    for (const auto& g : groups) normalize_geometric(next, g);

    double max_step = 0;
    for (std::size_t i = 0; i < n; ++i) max_step = std::max(max_step, std::abs(std::log(next[i]) - std::log(p[i])));
    p.swap(next);

    const double next_ll = bt_log_likelihood(m, p);
    // Ascent holds exactly; the slack only absorbs rounding near the optimum.
    const double slack = 1e-12 * std::max(1.0, std::abs(ll));
    if (next_ll < ll - slack) ++result.monotonicity_violations;
    assert(next_ll >= ll - slack);
    ll = next_ll;
    if (options.record_trace) result.trace.push_back(ll);
    if (max_step < options.tol) {
      converged = true;
      break;
    }
  }

  result.strengths = std::move(p);
  result.iterations = iter;
  result.converged = converged;
  result.log_likelihood = ll;
  return result;
}

double to_display_rating(double p) {
  if (!(p > 0) || !std::isfinite(p)) {
    throw Error(ErrorCode::invalid_strengths, "strength must be positive and finite");
  }
  return 1000.0 + 400.0 * std::log10(p);
}

std::vector<double> to_display_ratings(std::span<const double> p) {
  std::vector<double> out;
  out.reserve(p.size());
  for (double v : p) out.push_back(to_display_rating(v));
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::no_data, "percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::size_t bounded(std::mt19937_64& gen, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(gen()) * n) >> 64);
}

}  // namespace

BootstrapResult bootstrap_intervals(std::span<const RankingVote> votes, std::span<const RankingReaction> reactions,
                                    const RankingConfig& config, std::span<const ModelId> models) {
  if (config.bootstrap_rounds < 50) throw Error(ErrorCode::invalid_config, "bootstrap rounds must be >= 50");
  check_config(config.weights, config.lambda);

  const auto universe = model_universe(votes, reactions, models);
  const auto units = comparison_units(votes, reactions, config.weights, universe);
  if (units.empty()) throw Error(ErrorCode::no_data, "no votes or reaction-derived comparisons");

  const auto point_matrix = assemble_matrix(universe, units, config.lambda);
  const auto point = fit_bradley_terry(point_matrix, config.fit);

  BootstrapResult result;
  result.models = universe;
  result.point_ratings = to_display_ratings(point.strengths);

  const auto rounds = static_cast<std::size_t>(config.bootstrap_rounds);
  std::vector<std::optional<std::vector<double>>> replicas(rounds);
  FitOptions replica_fit = config.fit;
  replica_fit.per_component = true;
  replica_fit.record_trace = false;

  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    std::vector<ComparisonUnit> sample(units.size());
    for (std::size_t r; (r = cursor.fetch_add(1)) < rounds;) {
      std::mt19937_64 gen(splitmix64(config.seed ^ splitmix64(r + 1)));
      for (auto& u : sample) u = units[bounded(gen, units.size())];
      try {
        const auto fit = fit_bradley_terry(assemble_matrix(universe, sample, config.lambda), replica_fit);
        replicas[r] = to_display_ratings(fit.strengths);
      } catch (const Error&) {
        // Replicas without a finite MLE (possible with lambda = 0) are dropped.
      }
    }
  };
  const auto threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<std::vector<double>> per_model(universe.size());
  for (const auto& rep : replicas) {
    if (!rep) {
      ++result.failed_replicas;
      continue;
    }
    for (std::size_t k = 0; k < universe.size(); ++k) per_model[k].push_back((*rep)[k]);
  }
  if (per_model.empty() || per_model.front().empty()) {
    throw Error(ErrorCode::no_finite_mle, "every bootstrap replica failed to fit");
  }
  for (std::size_t k = 0; k < universe.size(); ++k) {
    Interval iv{percentile(per_model[k], 0.025), percentile(per_model[k], 0.975)};
    iv.low = std::min(iv.low, result.point_ratings[k]);
    iv.high = std::max(iv.high, result.point_ratings[k]);
    result.intervals.push_back(iv);
  }
  return result;
}

std::string config_digest(const RankingConfig& c) {
  // Canonical, human-readable digest of everything that shapes a snapshot.
  return fmt::format("vote_w={};reaction_w={};lambda={};B={};seed={};tol={};max_iter={};per_component={}",
                     c.weights.vote_w, c.weights.reaction_w, c.lambda, c.bootstrap_rounds, c.seed, c.fit.tol,
                     c.fit.max_iter, c.fit.per_component);
}

LeaderboardSnapshot compute_leaderboard(std::span<const RankingVote> votes,
                                        std::span<const RankingReaction> reactions, const RankingConfig& config,
                                        Timestamp as_of, std::span<const ModelId> models) {
  check_config(config.weights, config.lambda);
  const auto universe = model_universe(votes, reactions, models);
  const auto units = comparison_units(votes, reactions, config.weights, universe);
  if (units.empty()) throw Error(ErrorCode::no_data, "no votes or reaction-derived comparisons");
  const auto matrix = assemble_matrix(universe, units, config.lambda);
  const auto fit = fit_bradley_terry(matrix, config.fit);
  const auto boot = bootstrap_intervals(votes, reactions, config, models);

  std::vector<std::int64_t> counts(universe.size(), 0);
  for (const auto& u : units) {
    ++counts[u.i];
    ++counts[u.j];
  }

  LeaderboardSnapshot snap;
  snap.as_of = as_of;
  snap.config = config;
  snap.config_digest = config_digest(config);
  for (const auto& v : votes) snap.vote_count += v.model_a != v.model_b;
  snap.pseudo_vote_count = static_cast<std::int64_t>(units.size()) - snap.vote_count;
  for (std::size_t k = 0; k < universe.size(); ++k) {
    LeaderboardEntry e;
    e.model_id = universe[k];
    e.strength = fit.strengths[k];
    e.display_rating = to_display_rating(fit.strengths[k]);
    e.ci_low = std::min(boot.intervals[k].low, e.display_rating);
    e.ci_high = std::max(boot.intervals[k].high, e.display_rating);
    e.n_comparisons = counts[k];
    e.component_id = fit.components[k];
    snap.entries.push_back(std::move(e));
  }
  std::sort(snap.entries.begin(), snap.entries.end(), [](const auto& x, const auto& y) {
    if (x.display_rating != y.display_rating) return x.display_rating > y.display_rating;
    return x.model_id < y.model_id;
  });
  return snap;
}

nlohmann::ordered_json to_json(const LeaderboardSnapshot& s) {
  nlohmann::ordered_json j;
  j["as_of"] = format_timestamp(s.as_of);
  j["config"] = {
      {"vote_w", s.config.weights.vote_w},
      {"reaction_w", s.config.weights.reaction_w},
      {"lambda", s.config.lambda},
      {"bootstrap_rounds", s.config.bootstrap_rounds},
      {"seed", s.config.seed},
      {"tol", s.config.fit.tol},
      {"max_iter", s.config.fit.max_iter},
      {"per_component", s.config.fit.per_component},
  };
  j["config_digest"] = s.config_digest;
  j["vote_count"] = s.vote_count;
  j["pseudo_vote_count"] = s.pseudo_vote_count;
  auto& entries = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : s.entries) {
    entries.push_back({
        {"model_id", e.model_id},
        {"strength", e.strength},
        {"display_rating", e.display_rating},
        {"ci_low", e.ci_low},
        {"ci_high", e.ci_high},
        {"n_comparisons", e.n_comparisons},
        {"component_id", e.component_id},
    });
  }
  return j;
}

LeaderboardSnapshot snapshot_from_json(const nlohmann::json& j) {
  LeaderboardSnapshot s;
  s.as_of = parse_timestamp(j.at("as_of").get<std::string>());
  const auto& c = j.at("config");
  s.config.weights.vote_w = c.at("vote_w").get<double>();
  s.config.weights.reaction_w = c.at("reaction_w").get<double>();
  s.config.lambda = c.at("lambda").get<double>();
  s.config.bootstrap_rounds = c.at("bootstrap_rounds").get<int>();
  s.config.seed = c.at("seed").get<std::uint64_t>();
  s.config.fit.tol = c.value("tol", 1e-8);
  s.config.fit.max_iter = c.value("max_iter", 10'000);
  s.config.fit.per_component = c.value("per_component", false);
  s.config_digest = j.value("config_digest", config_digest(s.config));
  s.vote_count = j.value("vote_count", std::int64_t{0});
  s.pseudo_vote_count = j.value("pseudo_vote_count", std::int64_t{0});
  for (const auto& e : j.at("entries")) {
    LeaderboardEntry entry;
    entry.model_id = e.at("model_id").get<std::string>();
    entry.strength = e.at("strength").get<double>();
    entry.display_rating = e.at("display_rating").get<double>();
    entry.ci_low = e.at("ci_low").get<double>();
    entry.ci_high = e.at("ci_high").get<double>();
    entry.n_comparisons = e.at("n_comparisons").get<std::int64_t>();
    entry.component_id = e.at("component_id").get<int>();
    s.entries.push_back(std::move(entry));
  }
  return s;
}

std::string format_table(const LeaderboardSnapshot& s) {
  std::size_t width = 8;
  for (const auto& e : s.entries) width = std::max(width, e.model_id.size());
  std::string out = fmt::format("Leaderboard as of {}\n", format_timestamp(s.as_of));
  out += fmt::format("{:>4}  {:<{}}  {:>8}  {:>19}  {:>8}  {:>6}  {:>4}\n", "rank", "model", width, "rating",
                     "95% CI", "P(>avg)", "n", "comp");
  int rank = 0;
  for (const auto& e : s.entries) {
    out += fmt::format("{:>4}  {:<{}}  {:>8.1f}  [{:>8.1f}, {:>8.1f}]  {:>8.4f}  {:>6}  {:>4}\n", ++rank, e.model_id,
                       width, e.display_rating, e.ci_low, e.ci_high, e.strength / (e.strength + 1.0),
                       e.n_comparisons, e.component_id);
  }
  return out;
}

}  // namespace arena
