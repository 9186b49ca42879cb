#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

const char* cli() {
  const char* p = std::getenv("MBE_CLI");
  REQUIRE_MESSAGE(p != nullptr, "MBE_CLI must point at the built binary");
  return p;
}

fs::path sandbox() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mbe_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  fs::path o = sandbox() / "stdout.txt", e = sandbox() / "stderr.txt";
  std::string cmd = std::string(cli()) + " " + args + " >" + o.string() + " 2>" + e.string();
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(o), slurp(e)};
}

// Static source graph: a reachability chain plus random chords.
void write_source(const fs::path& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::ofstream f(p);
  const std::size_t n = 90, r = 4;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> prev(0, i - 1);
    f << "e" << prev(rng) << "\tr" << rng() % r << "\te" << i << '\n';
  }
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  for (std::size_t i = 0; i < 220; ++i)
    f << "e" << any(rng) << "\tr" << rng() % r << "\te" << any(rng) << '\n';
}

void write_config(const fs::path& p) {
  json cfg{{"schema_version", 1},
           {"seed", 3},
           {"encoder", {{"dim", 4}, {"layers", 1}}},
           {"train",
            {{"lstm_layers", 1},
             {"max_steps", 2},
             {"beam_size", 8},
             {"epochs", 2},
             {"rollouts_per_query", 2},
             {"batch_queries", 8},
             {"lr", 0.01}}}};
  std::ofstream(p) << cfg.dump(2);
}

}  // namespace

TEST_CASE("end-to-end command pipeline") {
  fs::path box = sandbox();
  fs::path source = box / "source.txt";
  fs::path data = box / "data";
  fs::path ckpt = box / "model.bin";
  write_source(source, 11);
  write_config(box / "cfg.json");

  // build-dataset + validate
  RunResult b = run("build-dataset --source " + source.string() + " --out " + data.string() +
                    " --seeds 8 --keep-prob 0.6 --batches 2 --seed 5");
  CAPTURE(b.err);
  REQUIRE(b.exit_code == 0);
  CHECK(b.out.find("built dataset:") != std::string::npos);
  CHECK(fs::exists(data / "config_used.json"));
  CHECK_NOTHROW(json::parse(slurp(data / "config_used.json")));

  RunResult v = run("validate --data " + data.string());
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("ok") != std::string::npos);

  SUBCASE("identical build seeds give identical files") {
    fs::path data2 = box / "data2";
    RunResult b2 = run("build-dataset --source " + source.string() + " --out " + data2.string() +
                       " --seeds 8 --keep-prob 0.6 --batches 2 --seed 5");
    REQUIRE(b2.exit_code == 0);
    CHECK(slurp(data / "train.txt") == slurp(data2 / "train.txt"));
    CHECK(slurp(data / "batch_1" / "support.txt") == slurp(data2 / "batch_1" / "support.txt"));
  }

  // train
  RunResult t = run("train --data " + data.string() + " --out " + ckpt.string() + " --config " +
                    (box / "cfg.json").string());
  CAPTURE(t.err);
  REQUIRE(t.exit_code == 0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(ckpt.string() + ".rules"));
  std::istringstream events(slurp(ckpt.string() + ".events.jsonl"));
  std::string line;
  std::size_t epochs_logged = 0;
  while (std::getline(events, line)) {
    json ev = json::parse(line);
    CHECK(ev.contains("epoch"));
    CHECK(ev.contains("loss"));
    CHECK(ev.contains("valid_mrr"));
    ++epochs_logged;
  }
  CHECK(epochs_logged == 2);

  // evaluate
  fs::path report = box / "report.json";
  RunResult ev = run("evaluate --ckpt " + ckpt.string() + " --data " + data.string() +
                     " --setting sample100 --workers 2 --out " + report.string());
  CAPTURE(ev.err);
  REQUIRE(ev.exit_code == 0);
  json rep = json::parse(slurp(report));
  CHECK(rep.at("setting") == "sample100");
  CHECK(rep.at("batches").size() == 2);
  CHECK(rep.at("batches")[0].contains("rank_histogram"));
  CHECK(rep.contains("checkpoint_hash"));
  CHECK(rep.at("reference").contains("wn_mbe_batch1_1vs_all"));

  // answer: take a real query head from batch 1
  std::istringstream test_file(slurp(data / "batch_1" / "test.txt"));
  std::string head, rel, tail;
  {
    std::string first;
    REQUIRE(std::getline(test_file, first));
    std::istringstream cols(first);
    std::getline(cols, head, '\t');
    std::getline(cols, rel, '\t');
    std::getline(cols, tail, '\t');
  }
  RunResult ans = run("answer --ckpt " + ckpt.string() + " --data " + data.string() +
                      " --batch 1 --query \"" + head + "\t" + rel +
                      "\" --beam 8 --show-trajectories 3");
  CAPTURE(ans.err);
  REQUIRE(ans.exit_code == 0);
  CHECK(ans.out.find("answers:") != std::string::npos);
  CHECK(ans.out.find("score=") != std::string::npos);
  CHECK(ans.out.find("trajectories:") != std::string::npos);
  CHECK(ans.out.find("->") != std::string::npos);

  // rule import/export and attention dump
  RunResult xr = run("export-rules --ckpt " + ckpt.string() + " --data " + data.string() +
                     " --out " + (box / "rules_out.txt").string());
  CHECK(xr.exit_code == 0);

  std::ofstream(box / "handwritten.rules") << "r0 <= r1, r2 | conf=0.9 support=10\n";
  RunResult ir = run("import-rules --rules " + (box / "handwritten.rules").string() + " --data " +
                     data.string() + " --out " + (box / "normalized.rules").string());
  CHECK(ir.exit_code == 0);
  CHECK(slurp(box / "normalized.rules").find("r0 <= r1, r2") != std::string::npos);

  RunResult xa = run("export-attention --ckpt " + ckpt.string() + " --data " + data.string() +
                     " --out " + (box / "attn.csv").string());
  CHECK(xa.exit_code == 0);
  CHECK(slurp(box / "attn.csv").rfind("query_relation,relation,alpha\n", 0) == 0);
}

TEST_CASE("exit codes distinguish usage, data, and success") {
  fs::path box = sandbox();
  CHECK(run("train --data somewhere").exit_code == 1);  // missing --out
  CHECK(run("frobnicate").exit_code == 1);              // unknown subcommand
  CHECK(run("validate --data " + (box / "no_such_dir").string()).exit_code == 2);

  std::ofstream(box / "bad.json") << "{\"schema_version\": 1, \"no_such_key\": true}";
  fs::path src = box / "mini_source.txt";
  write_source(src, 4);
  RunResult r = run("build-dataset --source " + src.string() + " --out " +
                    (box / "never").string() + " --config " + (box / "bad.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("no_such_key") != std::string::npos);

  std::ofstream(box / "bad_schema.json") << "{\"schema_version\": 99}";
  CHECK(run("build-dataset --source " + src.string() + " --out " + (box / "never2").string() +
            " --config " + (box / "bad_schema.json").string())
            .exit_code == 2);
}
