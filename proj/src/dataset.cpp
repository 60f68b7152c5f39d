#include "exterm/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "exterm/puct.hpp"
#include "exterm/rng.hpp"

namespace exterm {

namespace {

Expression score_sum_term() { return parse_prefix("sc"); }

int best_prior_move(const Evaluation& ev) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(ev.priors.size()); ++a) {
    if (ev.priors[static_cast<std::size_t>(a)] > ev.priors[static_cast<std::size_t>(best)]) {
      best = a;
    }
  }
  return best;
}

}  // namespace

void CachedArm::rebuild_prefix() {
  prefix.resize(evals.size() + 1);
  prefix[0] = 0.0;
  for (std::size_t i = 0; i < evals.size(); ++i) prefix[i + 1] = prefix[i] + evals[i];
}

Dataset generate_dataset(const GenParams& p, GenStats* stats) {
  if (p.state_count < 1) throw std::invalid_argument("generate_dataset: state_count >= 1");
  if (p.trace_len < 32) throw std::invalid_argument("generate_dataset: trace_len >= 32");
  if (p.branching < 2) throw std::invalid_argument("generate_dataset: branching >= 2");
  if (p.opening_plies < 0 || p.opening_plies >= p.depth) {
    throw std::invalid_argument("generate_dataset: opening_plies must be < depth");
  }
  if (p.label_budget < 1) throw std::invalid_argument("generate_dataset: label_budget >= 1");

  Dataset ds;
  ds.header.trace_len = p.trace_len;
  ds.header.branching = p.branching;
  ds.header.depth = p.depth;
  ds.header.c_inner = p.c_inner;
  ds.header.label_budget = p.label_budget;
  ds.header.opening_plies = p.opening_plies;
  ds.header.seed = p.seed;

  Rng rng(derive_seed(p.seed, 0));
  GenStats local;
  while (static_cast<int>(ds.states.size()) < p.state_count) {
    local.attempts += 1;
    PGameState state;
    state.seed = rng.next_u64();
    state.branching = p.branching;
    state.depth_limit = p.depth;
    bool dead = false;
    for (int ply = 0; ply < p.opening_plies; ++ply) {
      if (state.terminal()) {
        dead = true;
        break;
      }
      state = state.child(best_prior_move(heuristic_eval(state)));
    }
    if (dead || state.terminal()) {
      local.skipped += 1;
      continue;
    }

    Evaluation ev = heuristic_eval(state);
    std::vector<std::pair<int, double>> qualified;
    for (int a = 0; a < state.branching; ++a) {
      double prior = ev.priors[static_cast<std::size_t>(a)];
      if (prior >= kPriorCutoff) qualified.push_back({a, prior});
    }
    std::stable_sort(qualified.begin(), qualified.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (qualified.size() < 2) {
      local.skipped += 1;
      continue;
    }

    CachedState rec;
    char id[16];
    std::snprintf(id, sizeof(id), "s%04d", static_cast<int>(ds.states.size()));
    rec.state_id = id;
    rec.tree_seed = state.seed;
    rec.branching = state.branching;
    rec.depth = state.depth_limit;
    rec.path = state.path;

    for (const auto& [move, prior] : qualified) {
      CachedArm arm;
      arm.move = move;
      arm.prior = prior;
      arm.evals.reserve(static_cast<std::size_t>(p.trace_len));
      SearchTree tree(state.child(move), p.c_inner);
      for (int k = 0; k < p.trace_len; ++k) {
        arm.evals.push_back(1.0 - tree.descend_once());
      }
      arm.rebuild_prefix();
      rec.arms.push_back(std::move(arm));
    }

    // Reference label: the large-budget search's most visited move, taken
    // among the stored arms.
    SearchResult ref = puct_search(state, p.label_budget, p.c_inner);
    const SearchNode& root = ref.tree.root();
    int label = rec.arms[0].move;
    int label_visits = -1;
    for (const CachedArm& arm : rec.arms) {
      int visits = root.child_visits[static_cast<std::size_t>(arm.move)];
      if (visits > label_visits) {
        label_visits = visits;
        label = arm.move;
      }
    }
    rec.label_move = label;
    ds.states.push_back(std::move(rec));
  }
  if (stats) *stats = local;
  return ds;
}

Dataset relabel_curriculum(const Dataset& dataset, long sh_budget) {
  Dataset out = dataset;
  out.header.relabel_budget = sh_budget;
  Expression term = score_sum_term();
  for (CachedState& state : out.states) {
    std::vector<RootArm> arms;
    arms.reserve(state.arms.size());
    for (const CachedArm& src : state.arms) {
      RootArm a;
      a.move = src.move;
      a.prior = src.prior;
      a.trace = src.evals;
      a.prefix = src.prefix;
      arms.push_back(std::move(a));
    }
    try {
      int winner = run_sequential_halving(arms, sh_budget, 0.5, term);
      state.label_move = arms[static_cast<std::size_t>(winner)].move;
    } catch (const std::exception& e) {
      throw std::runtime_error("relabel_curriculum: state " + state.state_id + ": " +
                               e.what());
    }
  }
  return out;
}

std::optional<ScoreResult> ScoreCache::lookup(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

void ScoreCache::insert(const std::string& key, ScoreResult result) {
  std::unique_lock lock(mu_);
  map_[key] = result;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mu_);
  return map_.size();
}

ScoreResult score_expression(const Expression& term, const Dataset& dataset,
                             const ScoringPolicy& policy, ScoreCache* cache) {
  if (!term.complete()) throw std::logic_error("score_expression: incomplete term");
  if (policy.top_k < 1) throw std::invalid_argument("score_expression: top_k >= 1");

  std::string key;
  if (cache) {
    key = canonical_key(term);
    if (auto hit = cache->lookup(key)) return *hit;
  }

  // Stored arms are already prior-filtered and sorted descending, so the
  // top-k restriction is a plain truncation; the scratch arms reuse their
  // capacity across states.
  std::vector<RootArm> scratch;
  ScoreResult result;
  const long total = static_cast<long>(dataset.states.size());
  for (long i = 0; i < total; ++i) {
    const CachedState& state = dataset.states[static_cast<std::size_t>(i)];
    const int k = std::min<int>(policy.top_k, static_cast<int>(state.arms.size()));
    if (static_cast<int>(scratch.size()) < k) scratch.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const CachedArm& src = state.arms[static_cast<std::size_t>(j)];
      RootArm& arm = scratch[static_cast<std::size_t>(j)];
      arm.move = src.move;
      arm.prior = src.prior;
      arm.prefix.assign(src.prefix.begin(), src.prefix.end());
      arm.consumed = 0;
    }
    std::span<RootArm> arms(scratch.data(), static_cast<std::size_t>(k));
    int winner = run_sequential_halving(arms, policy.budget, 0.5, term);
    if (arms[static_cast<std::size_t>(winner)].move == state.label_move) {
      result.hits += 1;
    }
    if (policy.early_stop && (i + 1) == policy.early_stop_after && (i + 1) < total &&
        result.hits < policy.early_stop_threshold) {
      result.early_stopped = true;
      break;
    }
  }
  if (cache) cache->insert(key, result);
  return result;
}

std::vector<ReportRow> accuracy_report(std::span<const Expression> terms,
                                       const Dataset& dataset, ScoringPolicy policy) {
  policy.early_stop = false;
  std::vector<ReportRow> rows;
  rows.reserve(terms.size());
  for (const Expression& term : terms) {
    ScoreResult r = score_expression(term, dataset, policy);
    ReportRow row;
    row.term_prefix = canonical_key(term);
    row.term_infix = to_infix(term);
    row.hits = r.hits;
    row.accuracy_pct =
        dataset.states.empty()
            ? 0.0
            : 100.0 * static_cast<double>(r.hits) / static_cast<double>(dataset.states.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

long worst_case_arm_consumption(const Dataset& dataset, long budget, int top_k) {
  std::set<int> arm_counts;
  for (const CachedState& s : dataset.states) {
    arm_counts.insert(std::min<int>(top_k, static_cast<int>(s.arms.size())));
  }
  long worst = 0;
  for (int n : arm_counts) {
    if (n < 2) continue;
    worst = std::max(worst, max_arm_consumption(budget, n));
  }
  return worst;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_int_array(std::string& out, const std::vector<int>& xs) {
  out += '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  out += ']';
}

void validate_state(const CachedState& s, int trace_len) {
  if (s.arms.size() < 2) {
    throw std::runtime_error("dataset: state " + s.state_id + " has fewer than 2 arms");
  }
  bool label_found = false;
  double prev_prior = 2.0;
  for (const CachedArm& a : s.arms) {
    if (a.prior < kPriorCutoff) {
      throw std::runtime_error("dataset: state " + s.state_id + " arm below prior cutoff");
    }
    if (a.prior > prev_prior) {
      throw std::runtime_error("dataset: state " + s.state_id + " arms not sorted by prior");
    }
    prev_prior = a.prior;
    if (static_cast<int>(a.evals.size()) != trace_len) {
      throw std::runtime_error("dataset: state " + s.state_id + " trace length mismatch");
    }
    for (double v : a.evals) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::runtime_error("dataset: state " + s.state_id + " eval outside [0,1]");
      }
    }
    if (a.move == s.label_move) label_found = true;
  }
  if (!label_found) {
    throw std::runtime_error("dataset: state " + s.state_id + " label is not an arm");
  }
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);

  std::string line;
  line += "{\"format\":\"exterm-dataset\",\"version\":";
  line += std::to_string(ds.header.format_version);
  line += ",\"k\":" + std::to_string(ds.header.trace_len);
  line += ",\"states\":" + std::to_string(ds.states.size());
  line += ",\"branching\":" + std::to_string(ds.header.branching);
  line += ",\"depth\":" + std::to_string(ds.header.depth);
  line += ",\"c_inner\":";
  append_double(line, ds.header.c_inner);
  line += ",\"label_budget\":" + std::to_string(ds.header.label_budget);
  line += ",\"opening_plies\":" + std::to_string(ds.header.opening_plies);
  line += ",\"seed\":" + std::to_string(ds.header.seed);
  line += ",\"relabel_budget\":" + std::to_string(ds.header.relabel_budget);
  line += "}\n";
  out << line;

  for (const CachedState& s : ds.states) {
    line.clear();
    line += "{\"state_id\":\"" + s.state_id + "\"";
    line += ",\"tree\":{\"seed\":" + std::to_string(s.tree_seed);
    line += ",\"branching\":" + std::to_string(s.branching);
    line += ",\"depth\":" + std::to_string(s.depth);
    line += ",\"path\":";
    append_int_array(line, s.path);
    line += "},\"label\":" + std::to_string(s.label_move);
    line += ",\"arms\":[";
    for (std::size_t i = 0; i < s.arms.size(); ++i) {
      const CachedArm& a = s.arms[i];
      if (i) line += ',';
      line += "{\"move\":" + std::to_string(a.move);
      line += ",\"prior\":";
      append_double(line, a.prior);
      line += ",\"evals\":[";
      for (std::size_t j = 0; j < a.evals.size(); ++j) {
        if (j) line += ',';
        append_double(line, a.evals[j]);
      }
      line += "]}";
    }
    line += "]}\n";
    out << line;
  }
  if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_dataset: empty file");
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.value("format", "") != "exterm-dataset") {
    throw std::runtime_error("load_dataset: not an exterm dataset file");
  }

  Dataset ds;
  ds.header.format_version = header.at("version").get<int>();
  ds.header.trace_len = header.at("k").get<int>();
  ds.header.branching = header.at("branching").get<int>();
  ds.header.depth = header.at("depth").get<int>();
  ds.header.c_inner = header.at("c_inner").get<double>();
  ds.header.label_budget = header.at("label_budget").get<long>();
  ds.header.opening_plies = header.at("opening_plies").get<int>();
  ds.header.seed = header.at("seed").get<std::uint64_t>();
  ds.header.relabel_budget = header.at("relabel_budget").get<long>();

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    CachedState s;
    s.state_id = j.at("state_id").get<std::string>();
    const auto& tree = j.at("tree");
    s.tree_seed = tree.at("seed").get<std::uint64_t>();
    s.branching = tree.at("branching").get<int>();
    s.depth = tree.at("depth").get<int>();
    s.path = tree.at("path").get<std::vector<int>>();
    s.label_move = j.at("label").get<int>();
    for (const auto& ja : j.at("arms")) {
      CachedArm a;
      a.move = ja.at("move").get<int>();
      a.prior = ja.at("prior").get<double>();
      a.evals = ja.at("evals").get<std::vector<double>>();
      a.rebuild_prefix();
      s.arms.push_back(std::move(a));
    }
    validate_state(s, ds.header.trace_len);
    ds.states.push_back(std::move(s));
  }
  return ds;
}

}  // namespace exterm
