#include "mbe/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "mbe/errors.hpp"

namespace mbe {

namespace fs = std::filesystem;

GraphSnapshot MbeDataset::train_snapshot() const {
  return GraphSnapshot(vocab, train);
}

GraphSnapshot MbeDataset::original_snapshot() const {
  std::vector<Fact> facts = train;
  facts.insert(facts.end(), valid.begin(), valid.end());
  return GraphSnapshot(vocab, facts);
}

GraphSnapshot MbeDataset::snapshot_through_batch(std::size_t i) const {
  if (i > batches.size()) throw data_error("batch index out of range");
  GraphSnapshot snap = original_snapshot();
  for (std::size_t b = 0; b < i; ++b) snap = snap.merge_batch(batches[b].support);
  return snap;
}

std::vector<TripleLine> read_triple_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path.string());
  std::vector<TripleLine> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw data_error(path.string() + ": malformed triple line: " + line);
    out.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
  }
  return out;
}

void write_triple_file(const fs::path& path, const MbeDataset& ds,
                       const std::vector<Fact>& facts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  for (const Fact& f : facts)
    out << ds.vocab->entity_label(f.head) << '\t' << ds.vocab->relation_label(f.relation)
        << '\t' << ds.vocab->entity_label(f.tail) << '\n';
}

namespace {

std::vector<Fact> parse_facts(const fs::path& path, Vocabulary& vocab, bool intern_relations,
                              Provenance prov, std::uint16_t batch) {
  auto lines = read_triple_file(path);
  std::vector<Fact> facts;
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    RelationId r;
    if (intern_relations) {
      r = vocab.intern(l.relation, Vocabulary::Kind::Relation);
    } else if (vocab.has_relation(l.relation)) {
      r = vocab.relation_id(l.relation);
    } else {
      bad.push_back(path.filename().string() + ":" + std::to_string(i + 1) + ": unknown relation '" +
                    l.relation + "'");
      continue;
    }
    EntityId h = vocab.intern(l.head, Vocabulary::Kind::Entity);
    EntityId t = vocab.intern(l.tail, Vocabulary::Kind::Entity);
    facts.push_back({h, r, t, prov, batch});
  }
  if (!bad.empty()) {
    std::string msg = "unknown relation labels:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw data_error(msg);
  }
  return facts;
}

void collect_entities(const std::vector<Fact>& facts, std::unordered_set<EntityId>& out) {
  for (const Fact& f : facts) {
    out.insert(f.head);
    out.insert(f.tail);
  }
}

}  // namespace

MbeDataset load_dataset(const fs::path& dir) {
  MbeDataset ds;
  ds.vocab = std::make_shared<Vocabulary>();
  ds.train = parse_facts(dir / "train.txt", *ds.vocab, true, Provenance::OriginalTrain, 0);
  ds.valid = parse_facts(dir / "valid.txt", *ds.vocab, false, Provenance::OriginalValid, 0);

  std::unordered_set<EntityId> seen;
  collect_entities(ds.train, seen);
  collect_entities(ds.valid, seen);
  ds.original_entities.assign(seen.begin(), seen.end());
  std::sort(ds.original_entities.begin(), ds.original_entities.end());

  for (std::uint16_t i = 1;; ++i) {
    fs::path bdir = dir / ("batch_" + std::to_string(i));
    if (!fs::exists(bdir / "support.txt")) break;
    MbeDataset::Batch batch;
    batch.support = parse_facts(bdir / "support.txt", *ds.vocab, false, Provenance::BatchSupport, i);
    batch.query = parse_facts(bdir / "test.txt", *ds.vocab, false, Provenance::BatchQuery, i);
    std::vector<EntityId> fresh;
    for (const Fact& f : batch.support)
      for (EntityId e : {f.head, f.tail})
        if (seen.insert(e).second) fresh.push_back(e);
    for (const Fact& f : batch.query)
      for (EntityId e : {f.head, f.tail})
        if (seen.insert(e).second) fresh.push_back(e);
    std::sort(fresh.begin(), fresh.end());
    ds.batch_entities.push_back(std::move(fresh));
    ds.batches.push_back(std::move(batch));
  }
  return ds;
}

void save_dataset(const MbeDataset& ds, const fs::path& dir, std::size_t dropped_facts) {
  fs::create_directories(dir);
  write_triple_file(dir / "train.txt", ds, ds.train);
  write_triple_file(dir / "valid.txt", ds, ds.valid);
  for (std::size_t i = 0; i < ds.batches.size(); ++i) {
    fs::path bdir = dir / ("batch_" + std::to_string(i + 1));
    fs::create_directories(bdir);
    write_triple_file(bdir / "support.txt", ds, ds.batches[i].support);
    write_triple_file(bdir / "test.txt", ds, ds.batches[i].query);
  }

  nlohmann::json meta;
  std::unordered_set<RelationId> rels;
  for (const Fact& f : ds.train) rels.insert(f.relation);
  meta["original"] = {{"train_facts", ds.train.size()},
                      {"valid_facts", ds.valid.size()},
                      {"entities", ds.original_entities.size()},
                      {"relations", rels.size()}};
  meta["dropped_facts"] = dropped_facts;
  nlohmann::json jb = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.batches.size(); ++i)
    jb.push_back({{"support_facts", ds.batches[i].support.size()},
                  {"query_facts", ds.batches[i].query.size()},
                  {"new_entities", ds.batch_entities[i].size()}});
  meta["batches"] = jb;
  std::ofstream out(dir / "meta.json", std::ios::binary);
  out << meta.dump(2) << '\n';
}

std::vector<std::string> validate_mbe(const MbeDataset& ds) {
  std::vector<std::string> report;

  std::unordered_set<RelationId> train_rels;
  std::unordered_set<EntityId> train_ents;
  for (const Fact& f : ds.train) {
    train_rels.insert(f.relation);
    train_ents.insert(f.head);
    train_ents.insert(f.tail);
  }

  // entity -> batch of first emergence (0 = original)
  std::unordered_map<EntityId, std::size_t> emergence;
  for (EntityId e : ds.original_entities) emergence[e] = 0;
  for (std::size_t i = 0; i < ds.batch_entities.size(); ++i)
    for (EntityId e : ds.batch_entities[i]) emergence[e] = i + 1;

  auto batch_of = [&](EntityId e) -> std::size_t {
    auto it = emergence.find(e);
    return it == emergence.end() ? SIZE_MAX : it->second;
  };

  for (std::size_t i = 0; i < ds.batches.size(); ++i) {
    const auto& b = ds.batches[i];
    for (const auto* facts : {&b.support, &b.query}) {
      for (const Fact& f : *facts) {
        if (!train_rels.count(f.relation))
          report.push_back("batch " + std::to_string(i + 1) + ": relation '" +
                           ds.vocab->relation_label(f.relation) + "' absent from train set");
        for (EntityId e : {f.head, f.tail}) {
          std::size_t eb = batch_of(e);
          if (eb == SIZE_MAX)
            report.push_back("batch " + std::to_string(i + 1) + ": entity '" +
                             ds.vocab->entity_label(e) + "' missing from all partitions");
          else if (eb > i + 1)
            report.push_back("chronological correctness: batch " + std::to_string(i + 1) +
                             " fact touches entity '" + ds.vocab->entity_label(e) +
                             "' of batch " + std::to_string(eb));
        }
      }
    }
  }

  for (const Fact& f : ds.valid)
    for (EntityId e : {f.head, f.tail})
      if (!train_ents.count(e))
        report.push_back("validation entity '" + ds.vocab->entity_label(e) +
                         "' does not appear in the train set");

  // entities(Q_i) ⊆ E_T ∪ E_S1 ∪ ... ∪ E_Si
  std::unordered_set<EntityId> visible = train_ents;
  for (std::size_t i = 0; i < ds.batches.size(); ++i) {
    collect_entities(ds.batches[i].support, visible);
    for (const Fact& f : ds.batches[i].query)
      for (EntityId e : {f.head, f.tail})
        if (!visible.count(e))
          report.push_back("support coverage: batch " + std::to_string(i + 1) +
                           " query entity '" + ds.vocab->entity_label(e) +
                           "' appears in no support/train fact up to this batch");
  }

  for (std::size_t i = 0; i < ds.batch_entities.size(); ++i) {
    std::unordered_set<EntityId> in_support;
    if (i < ds.batches.size()) collect_entities(ds.batches[i].support, in_support);
    for (EntityId e : ds.batch_entities[i])
      if (!in_support.count(e))
        report.push_back("support coverage: new entity '" + ds.vocab->entity_label(e) +
                         "' of batch " + std::to_string(i + 1) +
                         " appears in no fact of its support set");
  }

  return report;
}

}  // namespace mbe
