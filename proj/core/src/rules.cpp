#include "mbe/rules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mbe/errors.hpp"

namespace mbe {

double confidence(const RuleStats& stats) {
  if (stats.pos + stats.neg == 0) throw data_error("confidence: rule has no trajectories");
  return static_cast<double>(stats.pos) / static_cast<double>(stats.pos + stats.neg);
}

void RuleStore::record_trajectory(const Vocabulary& vocab, RelationId query_relation,
                                  const std::vector<RelationId>& trajectory, bool success) {
  RuleKey key{query_relation, {}};
  for (RelationId r : trajectory)
    if (!vocab.is_self_loop(r)) key.body.push_back(r);
  if (key.body.empty()) return;
  RuleStats& s = rules_[key];
  if (success)
    ++s.pos;
  else
    ++s.neg;
}

std::vector<RuleKey> RuleStore::trustworthy_rules(double gamma1, std::uint64_t gamma2) const {
  std::vector<RuleKey> out;
  for (const auto& [key, stats] : rules_)
    if (confidence(stats) >= gamma1 && stats.pos >= gamma2) out.push_back(key);
  return out;
}

std::vector<const std::map<RuleKey, RuleStats>::value_type*> RuleStore::for_query(
    RelationId query_relation) const {
  std::vector<const std::map<RuleKey, RuleStats>::value_type*> out;
  auto lo = rules_.lower_bound(RuleKey{query_relation, {}});
  for (auto it = lo; it != rules_.end() && it->first.query_relation == query_relation; ++it)
    out.push_back(&*it);
  return out;
}

std::uint64_t RuleStore::total_pos(RelationId query_relation) const {
  std::uint64_t total = 0;
  for (const auto* entry : for_query(query_relation)) total += entry->second.pos;
  return total;
}

void RuleStore::merge(const RuleStore& other) {
  for (const auto& [key, stats] : other.rules_) {
    RuleStats& s = rules_[key];
    s.pos += stats.pos;
    s.neg += stats.neg;
  }
}

void RuleStore::add(const RuleKey& key, const RuleStats& stats) {
  RuleStats& s = rules_[key];
  s.pos += stats.pos;
  s.neg += stats.neg;
}

namespace {

constexpr std::uint64_t kImportScale = 100;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

RuleStore import_rules(const std::filesystem::path& path, const Vocabulary& vocab,
                       std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open rule file " + path.string());
  std::map<RuleKey, RuleStats> parsed;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw data_error(path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    auto arrow = line.find("<=");
    auto bar = line.find('|');
    if (arrow == std::string::npos || bar == std::string::npos || bar < arrow)
      fail("expected 'head <= body... | conf=... support=...'");
    std::string head = trim(line.substr(0, arrow));
    if (head.empty() || !vocab.has_relation(head)) fail("unknown head relation '" + head + "'");
    RuleKey key{vocab.relation_id(head), {}};

    std::string body = line.substr(arrow + 2, bar - arrow - 2);
    std::stringstream bs(body);
    std::string tok;
    while (std::getline(bs, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) fail("empty body relation");
      if (!vocab.has_relation(tok)) fail("unknown body relation '" + tok + "'");
      key.body.push_back(vocab.relation_id(tok));
    }
    if (key.body.empty()) fail("rule body is empty");

    double conf = -1.0;
    long long support = -1;
    std::stringstream ts(line.substr(bar + 1));
    while (ts >> tok) {
      if (tok.rfind("conf=", 0) == 0) {
        try {
          conf = std::stod(tok.substr(5));
        } catch (...) {
          fail("bad conf value '" + tok + "'");
        }
      } else if (tok.rfind("support=", 0) == 0) {
        try {
          support = std::stoll(tok.substr(8));
        } catch (...) {
          fail("bad support value '" + tok + "'");
        }
      } else {
        fail("unexpected token '" + tok + "'");
      }
    }
    if (conf < 0.0 || conf > 1.0) fail("conf missing or out of [0,1]");
    if (support < 1) fail("support missing or < 1");

    RuleStats stats;
    stats.pos = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(support) * conf * kImportScale));
    stats.neg = static_cast<std::uint64_t>(support) * kImportScale - stats.pos;
    if (parsed.count(key) && warnings)
      warnings->push_back(path.string() + ":" + std::to_string(lineno) +
                          ": duplicate rule key, last occurrence wins");
    parsed[key] = stats;
  }
  RuleStore store;
  for (const auto& [key, stats] : parsed) store.add(key, stats);
  return store;
}

void export_rules(const std::filesystem::path& path, const RuleStore& store,
                  const Vocabulary& vocab) {
  std::vector<std::pair<RuleKey, RuleStats>> entries(store.rules().begin(), store.rules().end());
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    double ca = confidence(a.second), cb = confidence(b.second);
    if (ca != cb) return ca > cb;
    if (a.second.pos != b.second.pos) return a.second.pos > b.second.pos;
    return a.first < b.first;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write rule file " + path.string());
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& [key, stats] : entries) {
    out << vocab.relation_label(key.query_relation) << " <= ";
    for (std::size_t i = 0; i < key.body.size(); ++i)
      out << (i ? ", " : "") << vocab.relation_label(key.body[i]);
    out << " | conf=" << confidence(stats) << " support=" << stats.pos + stats.neg << '\n';
  }
}

std::vector<Fact> augment(const GraphSnapshot& snapshot, const std::vector<RuleKey>& trustworthy,
                          std::size_t max_new_per_pair) {
  std::vector<Fact> out;
  if (trustworthy.empty()) return out;

  std::map<RelationId, std::vector<const RuleKey*>> by_relation;
  for (const RuleKey& key : trustworthy) by_relation[key.query_relation].push_back(&key);

  // Distinct (head, relation) pairs in fact-ordinal order.
  std::set<std::pair<EntityId, RelationId>> seen_pairs;
  for (const Fact& f : snapshot.facts()) {
    auto pair = std::make_pair(f.head, f.relation);
    if (!seen_pairs.insert(pair).second) continue;
    auto it = by_relation.find(f.relation);
    if (it == by_relation.end()) continue;

    std::unordered_set<EntityId> emitted;
    std::size_t added = 0;
    for (const RuleKey* rule : it->second) {
      // Follow the body through the graph; frontier kept in discovery order.
      std::vector<EntityId> frontier{f.head};
      for (RelationId step : rule->body) {
        std::vector<EntityId> next;
        std::unordered_set<EntityId> in_next;
        for (EntityId e : frontier)
          for (const Action& a : snapshot.action_space(e))
            if (a.relation == step && in_next.insert(a.entity).second) next.push_back(a.entity);
        frontier = std::move(next);
        if (frontier.empty()) break;
      }
      for (EntityId tail : frontier) {
        if (!emitted.insert(tail).second) continue;
        if (max_new_per_pair != 0 && added >= max_new_per_pair) break;
        out.push_back({f.head, f.relation, tail, Provenance::Augmented, 0});
        ++added;
      }
      if (max_new_per_pair != 0 && added >= max_new_per_pair) break;
    }
  }
  return out;
}

}  // namespace mbe
