#include "mbe/builder.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "mbe/errors.hpp"

namespace mbe {

void BuildConfig::check() const {
  if (n_seeds < 1) throw data_error("build config: n_seeds must be >= 1");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0))
    throw data_error("build config: keep_prob must be in (0, 1]");
  if (num_batches < 1) throw data_error("build config: num_batches must be >= 1");
}

std::pair<std::vector<Fact>, std::vector<Fact>> spanning_split(
    const std::vector<Fact>& batch_facts, const std::vector<EntityId>& known,
    const std::vector<EntityId>& new_entities) {
  if (batch_facts.empty()) return {};

  // Undirected incidence lists in fact-ordinal order.
  std::unordered_map<EntityId, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < batch_facts.size(); ++i) {
    incident[batch_facts[i].head].push_back(i);
    if (batch_facts[i].tail != batch_facts[i].head) incident[batch_facts[i].tail].push_back(i);
  }

  std::vector<bool> in_tree(batch_facts.size(), false);
  std::unordered_set<EntityId> visited;
  std::deque<EntityId> queue;
  auto visit = [&](EntityId e) {
    if (visited.insert(e).second) queue.push_back(e);
  };
  auto drain = [&] {
    while (!queue.empty()) {
      EntityId u = queue.front();
      queue.pop_front();
      for (std::size_t fi : incident[u]) {
        const Fact& f = batch_facts[fi];
        EntityId v = f.head == u ? f.tail : f.head;
        if (!visited.count(v)) {
          in_tree[fi] = true;
          visit(v);
        }
      }
    }
  };
  // All known entities are roots at once, so no tree edge ever links two
  // already-covered entities; isolated new components get their own root.
  for (EntityId e : known)
    if (incident.count(e)) visit(e);
  drain();
  for (EntityId e : new_entities)
    if (incident.count(e) && !visited.count(e)) {
      visit(e);
      drain();
    }

  // A new entity whose only facts are self-loops or duplicates of visited
  // pairs gets its lowest-ordinal fact promoted, so that every new entity
  // with a fact appears in support.
  std::unordered_set<EntityId> covered;
  for (std::size_t i = 0; i < batch_facts.size(); ++i)
    if (in_tree[i]) {
      covered.insert(batch_facts[i].head);
      covered.insert(batch_facts[i].tail);
    }
  for (EntityId e : new_entities) {
    auto it = incident.find(e);
    if (it == incident.end()) continue;
    if (!covered.count(e)) {
      std::size_t fi = it->second.front();
      in_tree[fi] = true;
      covered.insert(batch_facts[fi].head);
      covered.insert(batch_facts[fi].tail);
    }
  }

  std::vector<Fact> support, query;
  for (std::size_t i = 0; i < batch_facts.size(); ++i) {
    Fact f = batch_facts[i];
    if (in_tree[i]) {
      f.provenance = Provenance::BatchSupport;
      support.push_back(f);
    } else {
      f.provenance = Provenance::BatchQuery;
      query.push_back(f);
    }
  }
  return {std::move(support), std::move(query)};
}

namespace {

struct SourceGraph {
  std::shared_ptr<Vocabulary> vocab;
  std::vector<Fact> facts;
  std::vector<std::vector<std::pair<EntityId, std::size_t>>> adj;  // (other, fact)
};

SourceGraph index_source(const std::vector<TripleLine>& source) {
  SourceGraph g;
  g.vocab = std::make_shared<Vocabulary>();
  for (const TripleLine& l : source) {
    EntityId h = g.vocab->intern(l.head, Vocabulary::Kind::Entity);
    RelationId r = g.vocab->intern(l.relation, Vocabulary::Kind::Relation);
    EntityId t = g.vocab->intern(l.tail, Vocabulary::Kind::Entity);
    g.facts.push_back({h, r, t, Provenance::OriginalTrain, 0});
  }
  g.adj.resize(g.vocab->num_entities());
  for (std::size_t i = 0; i < g.facts.size(); ++i) {
    const Fact& f = g.facts[i];
    g.adj[f.head].push_back({f.tail, i});
    if (f.tail != f.head) g.adj[f.tail].push_back({f.head, i});
  }
  return g;
}

}  // namespace

BuildResult build_mbe(const std::vector<TripleLine>& source, const BuildConfig& cfg) {
  cfg.check();
  SourceGraph g = index_source(source);
  const std::size_t n_entities = g.vocab->num_entities();
  if (n_entities < cfg.num_batches * 10)
    throw data_error("build: source too small (" + std::to_string(n_entities) +
                     " entities, need >= " + std::to_string(cfg.num_batches * 10) + ")");

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  // Seeding: n_seeds distinct entities, uniform.
  std::vector<EntityId> ids(n_entities);
  std::iota(ids.begin(), ids.end(), 0);
  std::size_t n_seeds = std::min(cfg.n_seeds, n_entities);
  for (std::size_t i = 0; i < n_seeds; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_entities - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  std::vector<char> member(n_entities, 0);
  for (std::size_t i = 0; i < n_seeds; ++i) member[ids[i]] = 1;
  std::size_t member_count = n_seeds;

  // Growing: BFS sweeps from the current member set; each visited entity
  // joins with probability p. Rejected entities may be re-offered on later
  // rounds. Bounded at 100 rounds.
  const std::size_t target = (n_entities + 1) / 2;
  int rounds = 0;
  while (member_count < target) {
    if (++rounds > 100)
      throw data_error("build: growing did not reach half of the entities after 100 BFS rounds "
                       "(reached " + std::to_string(member_count) + "/" + std::to_string(target) +
                       "); the source graph is likely too disconnected");
    std::vector<char> visited(n_entities, 0);
    std::deque<EntityId> queue;
    for (EntityId e = 0; e < n_entities; ++e)
      if (member[e]) {
        visited[e] = 1;
        queue.push_back(e);
      }
    while (!queue.empty() && member_count < target) {
      EntityId u = queue.front();
      queue.pop_front();
      for (auto [v, fi] : g.adj[u]) {
        if (visited[v]) continue;
        visited[v] = 1;
        if (!member[v] && coin(rng) < cfg.keep_prob) {
          member[v] = 1;
          if (++member_count >= target) break;
        }
        queue.push_back(v);
      }
    }
  }

  // Dividing, part 1: K_o = facts with both endpoints in the member set.
  // Entities of the member set that end up with no K_o fact are treated as
  // new entities, so every original entity is backed by original facts.
  std::vector<std::size_t> ko_facts;
  std::vector<char> in_ko(n_entities, 0);
  for (std::size_t i = 0; i < g.facts.size(); ++i) {
    const Fact& f = g.facts[i];
    if (member[f.head] && member[f.tail]) {
      ko_facts.push_back(i);
      in_ko[f.head] = 1;
      in_ko[f.tail] = 1;
    }
  }
  if (ko_facts.empty()) throw data_error("build: no facts with both endpoints in the original set");

  // 4:1 split with a covering constraint: every K_o entity keeps at least
  // one train fact, so E_V ⊆ E_T holds without dropping validation facts.
  std::vector<std::size_t> shuffled = ko_facts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::unordered_set<std::size_t> must_train;
  {
    std::unordered_set<EntityId> covered;
    for (std::size_t fi : shuffled) {
      const Fact& f = g.facts[fi];
      if (!covered.count(f.head) || !covered.count(f.tail)) {
        must_train.insert(fi);
        covered.insert(f.head);
        covered.insert(f.tail);
      }
    }
  }
  const std::size_t total = ko_facts.size();
  const std::size_t denom = cfg.split_train + cfg.split_valid;
  const std::size_t n_valid =
      static_cast<std::size_t>(static_cast<double>(total) * cfg.split_valid / denom + 0.5);
  const std::size_t n_train_target = total - n_valid;

  std::unordered_set<std::size_t> train_set(must_train);
  for (std::size_t fi : shuffled) {
    if (train_set.size() >= n_train_target) break;
    train_set.insert(fi);
  }

  MbeDataset ds;
  ds.vocab = g.vocab;
  for (std::size_t fi : ko_facts) {
    Fact f = g.facts[fi];
    if (train_set.count(fi)) {
      f.provenance = Provenance::OriginalTrain;
      ds.train.push_back(f);
    } else {
      f.provenance = Provenance::OriginalValid;
      ds.valid.push_back(f);
    }
  }

  // Dividing, part 2: batch membership of new entities in BFS-discovery
  // order from the original set; unreached entities follow in id order.
  std::vector<EntityId> discovery;
  {
    std::vector<char> visited(n_entities, 0);
    std::deque<EntityId> queue;
    for (EntityId e = 0; e < n_entities; ++e)
      if (in_ko[e]) {
        visited[e] = 1;
        queue.push_back(e);
      }
    while (!queue.empty()) {
      EntityId u = queue.front();
      queue.pop_front();
      for (auto [v, fi] : g.adj[u]) {
        if (visited[v]) continue;
        visited[v] = 1;
        discovery.push_back(v);
        queue.push_back(v);
      }
    }
    for (EntityId e = 0; e < n_entities; ++e)
      if (!visited[e] && !g.adj[e].empty()) discovery.push_back(e);
  }

  const std::size_t nb = cfg.num_batches;
  std::vector<std::size_t> emergence(n_entities, 0);  // 0 = original, i = batch i
  ds.batch_entities.resize(nb);
  {
    std::size_t per = discovery.size() / nb, rem = discovery.size() % nb, pos = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      std::size_t count = per + (i < rem ? 1 : 0);
      for (std::size_t k = 0; k < count; ++k) {
        EntityId e = discovery[pos++];
        emergence[e] = i + 1;
        ds.batch_entities[i].push_back(e);
      }
    }
  }

  // A fact joins the latest batch among its endpoints (chronological
  // correctness forces a fact onto its later entity).
  std::vector<std::vector<Fact>> batch_facts(nb);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < g.facts.size(); ++i) {
    const Fact& f = g.facts[i];
    if (member[f.head] && member[f.tail]) continue;  // K_o
    std::size_t b = std::max(emergence[f.head], emergence[f.tail]);
    if (b == 0) {
      ++dropped;  // both endpoints factless-original: isolated, unreachable
      continue;
    }
    batch_facts[b - 1].push_back(f);
  }

  // Spanning split per batch.
  std::unordered_set<RelationId> train_rels;
  for (const Fact& f : ds.train) train_rels.insert(f.relation);

  std::vector<EntityId> known;
  for (EntityId e = 0; e < n_entities; ++e)
    if (in_ko[e]) known.push_back(e);
  for (std::size_t i = 0; i < nb; ++i) {
    auto [support, query] = spanning_split(batch_facts[i], known, ds.batch_entities[i]);
    for (Fact& f : support) f.batch = static_cast<std::uint16_t>(i + 1);
    for (Fact& f : query) f.batch = static_cast<std::uint16_t>(i + 1);
    ds.batches.push_back({std::move(support), std::move(query)});
    known.insert(known.end(), ds.batch_entities[i].begin(), ds.batch_entities[i].end());
  }

  // Cleaning. Dropping a support fact can strip an entity's coverage, so
  // iterate to a fixpoint.
  std::unordered_set<EntityId> removed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < nb; ++i) {
      auto& batch = ds.batches[i];
      auto bad = [&](const Fact& f) {
        return !train_rels.count(f.relation) || removed.count(f.head) || removed.count(f.tail);
      };
      for (auto* facts : {&batch.support, &batch.query}) {
        auto it = std::remove_if(facts->begin(), facts->end(), bad);
        if (it != facts->end()) {
          dropped += static_cast<std::size_t>(facts->end() - it);
          facts->erase(it, facts->end());
          changed = true;
        }
      }
      std::unordered_set<EntityId> in_support;
      for (const Fact& f : batch.support) {
        in_support.insert(f.head);
        in_support.insert(f.tail);
      }
      auto& ents = ds.batch_entities[i];
      auto eit = std::remove_if(ents.begin(), ents.end(), [&](EntityId e) {
        if (in_support.count(e)) return false;
        removed.insert(e);
        return true;
      });
      if (eit != ents.end()) {
        ents.erase(eit, ents.end());
        changed = true;
      }
    }
  }

  // Queries must stay inside the entities visible at their batch.
  {
    std::unordered_set<EntityId> visible;
    for (const Fact& f : ds.train) {
      visible.insert(f.head);
      visible.insert(f.tail);
    }
    for (std::size_t i = 0; i < nb; ++i) {
      for (const Fact& f : ds.batches[i].support) {
        visible.insert(f.head);
        visible.insert(f.tail);
      }
      auto& q = ds.batches[i].query;
      auto it = std::remove_if(q.begin(), q.end(), [&](const Fact& f) {
        return !visible.count(f.head) || !visible.count(f.tail);
      });
      dropped += static_cast<std::size_t>(q.end() - it);
      q.erase(it, q.end());
    }
  }

  std::unordered_set<EntityId> orig;
  for (const Fact& f : ds.train) {
    orig.insert(f.head);
    orig.insert(f.tail);
  }
  for (const Fact& f : ds.valid) {
    orig.insert(f.head);
    orig.insert(f.tail);
  }
  ds.original_entities.assign(orig.begin(), orig.end());
  std::sort(ds.original_entities.begin(), ds.original_entities.end());

  return {std::move(ds), dropped};
}

}  // namespace mbe
