// Command-line front end: dataset construction, training, query answering,
// evaluation, and rule/attention import/export over one JSON config schema.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbe/attention.hpp"
#include "mbe/beam.hpp"
#include "mbe/builder.hpp"
#include "mbe/errors.hpp"
#include "mbe/eval.hpp"
#include "mbe/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0 = hardware concurrency

  mbe::EncoderConfig encoder;

  // training
  std::size_t lstm_layers = 3;
  std::size_t max_steps = 3;
  std::size_t beam_size = 128;
  double action_dropout = 0.1;
  double lr = 1e-3;
  std::size_t epochs = 100;
  std::size_t rollouts_per_query = 8;
  std::size_t batch_queries = 32;
  double gamma1 = 0.8;
  std::uint64_t gamma2 = 3;
  double epsilon = 1000.0;
  std::size_t max_new_per_pair = 50;
  std::size_t action_cap = 256;
  bool use_augmentation = true;
  bool use_baseline = false;
  std::string rules_overlay;  // pre-mined rule file; empty = learn rules

  // evaluation
  std::string eval_setting = "all";

  // dataset construction
  std::size_t n_seeds = 5000;
  double keep_prob = 0.5;
  std::size_t num_batches = 5;
};

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok |= it.key() == k;
    if (!ok) throw mbe::data_error("config: unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  expect_keys(j, {"schema_version", "seed", "workers", "encoder", "train", "eval", "build"},
              "top level");
  read_field(j, "schema_version", c.schema_version);
  if (c.schema_version != 1)
    throw mbe::data_error("config: unsupported schema_version " +
                          std::to_string(c.schema_version));
  read_field(j, "seed", c.seed);
  read_field(j, "workers", c.workers);
  if (j.contains("encoder")) {
    const json& e = j.at("encoder");
    expect_keys(e, {"dim", "layers", "degree_normalize"}, "encoder");
    read_field(e, "dim", c.encoder.dim);
    read_field(e, "layers", c.encoder.layers);
    read_field(e, "degree_normalize", c.encoder.degree_normalize);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    expect_keys(t,
                {"lstm_layers", "max_steps", "beam_size", "action_dropout", "lr", "epochs",
                 "rollouts_per_query", "batch_queries", "gamma1", "gamma2", "epsilon",
                 "max_new_per_pair", "action_cap", "use_augmentation", "use_baseline",
                 "rules_overlay"},
                "train");
    read_field(t, "lstm_layers", c.lstm_layers);
    read_field(t, "max_steps", c.max_steps);
    read_field(t, "beam_size", c.beam_size);
    read_field(t, "action_dropout", c.action_dropout);
    read_field(t, "lr", c.lr);
    read_field(t, "epochs", c.epochs);
    read_field(t, "rollouts_per_query", c.rollouts_per_query);
    read_field(t, "batch_queries", c.batch_queries);
    read_field(t, "gamma1", c.gamma1);
    read_field(t, "gamma2", c.gamma2);
    read_field(t, "epsilon", c.epsilon);
    read_field(t, "max_new_per_pair", c.max_new_per_pair);
    read_field(t, "action_cap", c.action_cap);
    read_field(t, "use_augmentation", c.use_augmentation);
    read_field(t, "use_baseline", c.use_baseline);
    read_field(t, "rules_overlay", c.rules_overlay);
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    expect_keys(e, {"setting"}, "eval");
    read_field(e, "setting", c.eval_setting);
    if (c.eval_setting != "all" && c.eval_setting != "sample100")
      throw mbe::data_error("config: eval.setting must be 'all' or 'sample100'");
  }
  if (j.contains("build")) {
    const json& b = j.at("build");
    expect_keys(b, {"n_seeds", "keep_prob", "num_batches"}, "build");
    read_field(b, "n_seeds", c.n_seeds);
    read_field(b, "keep_prob", c.keep_prob);
    read_field(b, "num_batches", c.num_batches);
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  return json{
      {"schema_version", c.schema_version},
      {"seed", c.seed},
      {"workers", c.workers},
      {"encoder",
       {{"dim", c.encoder.dim},
        {"layers", c.encoder.layers},
        {"degree_normalize", c.encoder.degree_normalize}}},
      {"train",
       {{"lstm_layers", c.lstm_layers},
        {"max_steps", c.max_steps},
        {"beam_size", c.beam_size},
        {"action_dropout", c.action_dropout},
        {"lr", c.lr},
        {"epochs", c.epochs},
        {"rollouts_per_query", c.rollouts_per_query},
        {"batch_queries", c.batch_queries},
        {"gamma1", c.gamma1},
        {"gamma2", c.gamma2},
        {"epsilon", c.epsilon},
        {"max_new_per_pair", c.max_new_per_pair},
        {"action_cap", c.action_cap},
        {"use_augmentation", c.use_augmentation},
        {"use_baseline", c.use_baseline},
        {"rules_overlay", c.rules_overlay}}},
      {"eval", {{"setting", c.eval_setting}}},
      {"build",
       {{"n_seeds", c.n_seeds}, {"keep_prob", c.keep_prob}, {"num_batches", c.num_batches}}},
  };
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  std::ifstream in(path);
  if (!in) throw mbe::data_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw mbe::data_error("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

void write_config_used(const fs::path& where, const RunConfig& c) {
  std::ofstream out(where);
  out << config_to_json(c).dump(2) << '\n';
}

mbe::MbeDataset load_validated(const std::string& dir) {
  mbe::MbeDataset ds = mbe::load_dataset(dir);
  std::vector<std::string> violations = mbe::validate_mbe(ds);
  if (!violations.empty()) {
    std::string msg = "dataset " + dir + " failed validation:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw mbe::data_error(msg);
  }
  return ds;
}

mbe::TrainConfig to_train_config(const RunConfig& c, const mbe::Vocabulary& vocab) {
  mbe::TrainConfig tc;
  tc.encoder = c.encoder;
  tc.lstm_layers = c.lstm_layers;
  tc.max_steps = c.max_steps;
  tc.beam_size = c.beam_size;
  tc.action_dropout = c.action_dropout;
  tc.lr = c.lr;
  tc.epochs = c.epochs;
  tc.rollouts_per_query = c.rollouts_per_query;
  tc.batch_queries = c.batch_queries;
  tc.gamma1 = c.gamma1;
  tc.gamma2 = c.gamma2;
  tc.epsilon = c.epsilon;
  tc.max_new_per_pair = c.max_new_per_pair;
  tc.action_cap = c.action_cap;
  tc.use_augmentation = c.use_augmentation;
  tc.use_baseline = c.use_baseline;
  tc.rng_seed = c.seed;
  if (!c.rules_overlay.empty()) {
    std::vector<std::string> warnings;
    tc.rules_overlay = mbe::import_rules(c.rules_overlay, vocab, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  }
  return tc;
}

RunConfig config_from_checkpoint(const mbe::Checkpoint& ckpt) {
  json meta;
  try {
    meta = json::parse(ckpt.metadata);
  } catch (const json::exception& e) {
    throw mbe::data_error(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  if (!meta.contains("config")) throw mbe::data_error("checkpoint metadata has no config");
  return parse_config(meta.at("config"));
}

mbe::RuleStore load_sidecar_rules(const std::string& ckpt_path, const mbe::Vocabulary& vocab) {
  fs::path rules_path = ckpt_path + ".rules";
  if (!fs::exists(rules_path)) return {};
  return mbe::import_rules(rules_path, vocab);
}

// ---- subcommands ----

int cmd_build_dataset(const std::string& source, const std::string& out, RunConfig cfg) {
  std::vector<mbe::TripleLine> triples = mbe::read_triple_file(source);
  mbe::BuildConfig bc;
  bc.n_seeds = cfg.n_seeds;
  bc.keep_prob = cfg.keep_prob;
  bc.num_batches = cfg.num_batches;
  bc.rng_seed = cfg.seed;
  mbe::BuildResult res = mbe::build_mbe(triples, bc);
  std::vector<std::string> violations = mbe::validate_mbe(res.dataset);
  if (!violations.empty()) {
    std::string msg = "built dataset failed validation:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw mbe::data_error(msg);
  }
  mbe::save_dataset(res.dataset, out, res.dropped_facts);
  write_config_used(fs::path(out) / "config_used.json", cfg);
  std::cout << "built dataset: train=" << res.dataset.train.size()
            << " valid=" << res.dataset.valid.size() << " batches=" << res.dataset.num_batches()
            << " dropped=" << res.dropped_facts << '\n';
  return kExitOk;
}

int cmd_train(const std::string& data, const std::string& out, RunConfig cfg) {
  mbe::MbeDataset ds = load_validated(data);
  mbe::TrainConfig tc = to_train_config(cfg, *ds.vocab);
  std::ofstream events(out + ".events.jsonl");
  mbe::TrainResult res = mbe::train(ds, tc, &events);

  json meta{{"schema_version", 1},
            {"num_relation_ids", ds.vocab->num_relation_ids()},
            {"best_epoch", res.best_epoch},
            {"best_valid_mrr", res.best_valid_mrr},
            {"config", config_to_json(cfg)}};
  mbe::save_checkpoint(out, res.params, meta.dump());
  mbe::export_rules(out + ".rules", res.rules, *ds.vocab);
  write_config_used(fs::path(out).parent_path() / "config_used.json", cfg);
  std::cout << "trained " << tc.epochs << " epochs; best valid MRR " << res.best_valid_mrr
            << " at epoch " << res.best_epoch << "; rules " << res.rules.size() << '\n';
  return kExitOk;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& data,
                 const std::string& setting, std::uint64_t seed, std::size_t workers,
                 const std::string& out) {
  mbe::Checkpoint ckpt = mbe::load_checkpoint(ckpt_path);
  RunConfig cfg = config_from_checkpoint(ckpt);
  mbe::MbeDataset ds = load_validated(data);
  mbe::RuleStore rules = load_sidecar_rules(ckpt_path, *ds.vocab);

  mbe::EvalConfig ec;
  ec.setting = setting == "sample100" ? mbe::EvalSetting::Sample100 : mbe::EvalSetting::All;
  ec.seed = seed;
  ec.encoder = cfg.encoder;
  ec.beam_size = cfg.beam_size;
  ec.max_steps = cfg.max_steps;
  ec.action_cap = cfg.action_cap;
  ec.epsilon = cfg.epsilon;
  ec.gamma1 = cfg.gamma1;
  ec.gamma2 = cfg.gamma2;
  ec.use_augmentation = cfg.use_augmentation;
  ec.max_new_per_pair = cfg.max_new_per_pair;
  ec.workers = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  mbe::EvalRun run = mbe::evaluate(ds, ckpt.params, rules, ec);

  json batches = json::array();
  std::cout << "batch  queries  hits@1   mrr\n";
  for (std::size_t i = 0; i < run.batches.size(); ++i) {
    const mbe::BatchEval& b = run.batches[i];
    json hist{{"1", 0}, {"2-3", 0}, {"4-10", 0}, {"11-100", 0}, {">100", 0}};
    for (double r : b.ranks) {
      if (r < 1.5)
        hist["1"] = hist["1"].get<int>() + 1;
      else if (r <= 3.0)
        hist["2-3"] = hist["2-3"].get<int>() + 1;
      else if (r <= 10.0)
        hist["4-10"] = hist["4-10"].get<int>() + 1;
      else if (r <= 100.0)
        hist["11-100"] = hist["11-100"].get<int>() + 1;
      else
        hist[">100"] = hist[">100"].get<int>() + 1;
    }
    batches.push_back(json{{"batch", i + 1},
                           {"queries", b.ranks.size()},
                           {"hits1", b.summary.hits1},
                           {"mrr", b.summary.mrr},
                           {"rank_histogram", hist}});
    char line[128];
    std::snprintf(line, sizeof line, "%5zu  %7zu  %.4f  %.4f\n", i + 1, b.ranks.size(),
                  b.summary.hits1, b.summary.mrr);
    std::cout << line;
  }

  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(ckpt.content_hash));
  json report{
      {"setting", setting},
      {"seed", seed},
      {"checkpoint_hash", hash},
      {"config", config_to_json(cfg)},
      // Published full-scale WN-MBE batch-1 figures, for context only;
      // desk-scale runs are not expected to match them.
      {"reference", {{"wn_mbe_batch1_1vs_all", {{"hits1", 0.845}, {"mrr", 0.866}}}}},
      {"batches", batches}};
  if (!out.empty()) {
    std::ofstream of(out);
    if (!of) throw mbe::data_error("cannot write report " + out);
    of << report.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_answer(const std::string& ckpt_path, const std::string& data, std::size_t batch,
               const std::string& query_text, std::size_t beam, std::size_t show_trajectories) {
  mbe::Checkpoint ckpt = mbe::load_checkpoint(ckpt_path);
  RunConfig cfg = config_from_checkpoint(ckpt);
  mbe::MbeDataset ds = load_validated(data);
  mbe::RuleStore rules = load_sidecar_rules(ckpt_path, *ds.vocab);
  if (batch < 1 || batch > ds.num_batches())
    throw mbe::data_error("batch index out of range [1," + std::to_string(ds.num_batches()) +
                          "]");

  auto tab = query_text.find('\t');
  if (tab == std::string::npos)
    throw mbe::data_error("query must be 'source<TAB>relation'");
  mbe::Query query{ds.vocab->entity_id(query_text.substr(0, tab)),
                   ds.vocab->relation_id(query_text.substr(tab + 1)), std::nullopt};

  mbe::GraphSnapshot snap = ds.snapshot_through_batch(batch);
  if (cfg.use_augmentation) {
    std::vector<mbe::Fact> extra =
        mbe::augment(snap, rules.trustworthy_rules(cfg.gamma1, cfg.gamma2), cfg.max_new_per_pair);
    if (!extra.empty()) snap = snap.with_augmented(extra);
  }
  mbe::AttentionTable attn(rules, cfg.epsilon);
  mbe::NoGradGuard guard;
  mbe::Embeddings emb = mbe::encode(snap, ckpt.params, cfg.encoder, attn, query.relation);
  mbe::BeamResult br =
      mbe::beam_answer(snap, ckpt.params, emb, query, beam, cfg.max_steps, cfg.action_cap);

  std::vector<std::pair<mbe::EntityId, double>> ranked(br.scores.begin(), br.scores.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::cout << "answers:\n";
  for (std::size_t i = 0; i < ranked.size() && i < 10; ++i)
    std::cout << "  " << ds.vocab->entity_label(ranked[i].first)
              << "  score=" << std::exp(ranked[i].second) << '\n';
  if (show_trajectories > 0) {
    std::cout << "trajectories:\n";
    for (std::size_t i = 0; i < br.trajectories.size() && i < show_trajectories; ++i) {
      const mbe::ScoredTrajectory& t = br.trajectories[i];
      std::cout << "  ";
      for (std::size_t s = 0; s < t.relations.size(); ++s) {
        if (s) std::cout << " -> ";
        std::cout << '(' << ds.vocab->relation_label(t.relations[s]) << ", "
                  << ds.vocab->entity_label(t.entities[s]) << ')';
      }
      std::cout << "  score=" << std::exp(t.log_prob) << '\n';
    }
  }
  return kExitOk;
}

int cmd_export_rules(const std::string& ckpt_path, const std::string& data,
                     const std::string& out) {
  mbe::MbeDataset ds = mbe::load_dataset(data);
  fs::path rules_path = ckpt_path + ".rules";
  if (!fs::exists(rules_path))
    throw mbe::data_error("no rule file next to checkpoint: " + rules_path.string());
  mbe::RuleStore store = mbe::import_rules(rules_path, *ds.vocab);
  mbe::export_rules(out, store, *ds.vocab);
  std::cout << "exported " << store.size() << " rules\n";
  return kExitOk;
}

int cmd_import_rules(const std::string& rules_path, const std::string& data,
                     const std::string& out) {
  mbe::MbeDataset ds = mbe::load_dataset(data);
  std::vector<std::string> warnings;
  mbe::RuleStore store = mbe::import_rules(rules_path, *ds.vocab, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (!out.empty()) mbe::export_rules(out, store, *ds.vocab);
  std::cout << "imported " << store.size() << " rules (" << warnings.size() << " warnings)\n";
  return kExitOk;
}

int cmd_export_attention(const std::string& ckpt_path, const std::string& data,
                         const std::string& out) {
  mbe::Checkpoint ckpt = mbe::load_checkpoint(ckpt_path);
  RunConfig cfg = config_from_checkpoint(ckpt);
  mbe::MbeDataset ds = mbe::load_dataset(data);
  mbe::RuleStore rules = load_sidecar_rules(ckpt_path, *ds.vocab);
  mbe::AttentionTable attn(rules, cfg.epsilon);

  std::ofstream of(out);
  if (!of) throw mbe::data_error("cannot write " + out);
  of << "query_relation,relation,alpha\n";
  of.setf(std::ios::fixed);
  of.precision(6);
  std::size_t n = ds.vocab->num_relation_ids();
  for (mbe::RelationId rq = 0; rq < ds.vocab->num_base_relations(); ++rq)
    for (mbe::RelationId r = 0; r < n; ++r)
      of << ds.vocab->relation_label(rq) << ',' << ds.vocab->relation_label(r) << ','
         << attn.alpha(rq, r) << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& data) {
  mbe::MbeDataset ds = mbe::load_dataset(data);
  std::vector<std::string> violations = mbe::validate_mbe(ds);
  for (const auto& v : violations) std::cout << v << '\n';
  if (!violations.empty()) {
    std::cerr << violations.size() << " violation(s)\n";
    return kExitData;
  }
  std::cout << "ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inductive query answering over expanding knowledge graphs"};
  app.require_subcommand(1);

  std::string config_path, data, out, source, ckpt, query_text, rules_path;
  std::string setting = "all";
  std::size_t batch = 1, beam = 128, show_trajectories = 0, workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false, workers_set = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "global RNG seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--workers", workers, "worker thread count")->each([&](const std::string&) {
      workers_set = true;
    });
  };

  CLI::App* build = app.add_subcommand("build-dataset", "construct an expanding-KG benchmark");
  build->add_option("--source", source, "static triple file")->required();
  build->add_option("--out", out, "output dataset directory")->required();
  std::size_t n_seeds = 0;
  double keep_prob = -1.0;
  std::size_t num_batches = 0;
  build->add_option("--seeds", n_seeds, "number of seed entities");
  build->add_option("--keep-prob", keep_prob, "BFS acceptance probability");
  build->add_option("--batches", num_batches, "number of emerging batches");
  add_common(build);

  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", data, "dataset directory")->required();
  train_cmd->add_option("--out", ckpt, "output checkpoint path")->required();
  add_common(train_cmd);

  CLI::App* answer = app.add_subcommand("answer", "answer one query with beam search");
  answer->add_option("--ckpt", ckpt, "checkpoint")->required();
  answer->add_option("--data", data, "dataset directory")->required();
  answer->add_option("--batch", batch, "batch index (1-based)")->required();
  answer->add_option("--query", query_text, "source<TAB>relation")->required();
  answer->add_option("--beam", beam, "beam width");
  answer->add_option("--show-trajectories", show_trajectories, "print top K trajectories");

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "filtered-rank evaluation per batch");
  eval_cmd->add_option("--ckpt", ckpt, "checkpoint")->required();
  eval_cmd->add_option("--data", data, "dataset directory")->required();
  eval_cmd->add_option("--setting", setting, "all|sample100")
      ->check(CLI::IsMember({"all", "sample100"}));
  eval_cmd->add_option("--out", out, "report JSON path");
  add_common(eval_cmd);

  CLI::App* exp_rules = app.add_subcommand("export-rules", "export learned rules");
  exp_rules->add_option("--ckpt", ckpt, "checkpoint")->required();
  exp_rules->add_option("--data", data, "dataset directory")->required();
  exp_rules->add_option("--out", out, "rule file to write")->required();

  CLI::App* imp_rules = app.add_subcommand("import-rules", "parse and normalize a rule file");
  imp_rules->add_option("--rules", rules_path, "rule file")->required();
  imp_rules->add_option("--data", data, "dataset directory")->required();
  imp_rules->add_option("--out", out, "normalized rule file to write");

  CLI::App* exp_attn = app.add_subcommand("export-attention", "dump the attention table as CSV");
  exp_attn->add_option("--ckpt", ckpt, "checkpoint")->required();
  exp_attn->add_option("--data", data, "dataset directory")->required();
  exp_attn->add_option("--out", out, "CSV path")->required();

  CLI::App* validate = app.add_subcommand("validate", "check dataset invariants");
  validate->add_option("--data", data, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (workers_set) cfg.workers = workers;

    if (build->parsed()) {
      if (n_seeds) cfg.n_seeds = n_seeds;
      if (keep_prob >= 0.0) cfg.keep_prob = keep_prob;
      if (num_batches) cfg.num_batches = num_batches;
      return cmd_build_dataset(source, out, cfg);
    }
    if (train_cmd->parsed()) return cmd_train(data, ckpt, cfg);
    if (answer->parsed())
      return cmd_answer(ckpt, data, batch, query_text, beam, show_trajectories);
    if (eval_cmd->parsed())
      return cmd_evaluate(ckpt, data, setting, seed_set ? seed : cfg.seed,
                          workers_set ? workers : cfg.workers, out);
    if (exp_rules->parsed()) return cmd_export_rules(ckpt, data, out);
    if (imp_rules->parsed()) return cmd_import_rules(rules_path, data, out);
    if (exp_attn->parsed()) return cmd_export_attention(ckpt, data, out);
    if (validate->parsed()) return cmd_validate(data);
  } catch (const mbe::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const mbe::data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
