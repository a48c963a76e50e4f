#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iterator>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "helpers.hpp"
#include "wrongsmith/corpus.hpp"
#include "wrongsmith/eval.hpp"
#include "wrongsmith/toy_language.hpp"

using namespace wrongsmith;
using testing::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with `args` (already shell-quoted) inside `dir`.
Run cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
  const std::string out = (dir / "stdout.txt").string(), err = (dir / "stderr.txt").string();
  const std::string cmd = "cd '" + dir.path().string() + "' && " + env + " '" WRONGSMITH_CLI "' " + args + " >'" + out +
                          "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out);
  r.err = read_text_file(err);
  return r;
}

std::string bytes(const TempDir& dir, const char* name) {
  std::ifstream in(dir / name, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small toy-language files in every input format the CLI reads.
void write_toy_files(const TempDir& dir) {
  toy::SplitSizes sizes;
  sizes.corruptor_train = 60;
  sizes.corruptor_dev = 20;
  sizes.real_train = 40;
  sizes.real_dev = 20;
  sizes.test = 20;
  sizes.clean_pool = 15;
  const toy::Split s = toy::make_split(21, sizes);
  write_parallel_tsv(s.corruptor_train, dir / "train.tsv");
  write_parallel_tsv(s.corruptor_dev, dir / "dev.tsv");
  write_labeled(s.real_train, dir / "real.txt");
  write_labeled(s.real_dev, dir / "real_dev.txt");
  write_labeled(s.test, dir / "test.txt");
  std::string clean;
  for (const Sentence& c : s.clean_pool) clean += join(c) + '\n';
  write_text_file(dir / "clean.txt", clean);
}

const char* kTinyCorruptor = "--cell-size 8 --emb-size 6 --max-epochs 3 --lr 0.5";
const char* kTinyDetector = "--cell-size 6 --emb-size 6 --max-epochs 4";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2, help exits 0") {
    TempDir dir;
    CHECK(cli(dir, "--help").code == 0);
    CHECK(cli(dir, "").code == 2);
    CHECK(cli(dir, "frobnicate").code == 2);
    CHECK(cli(dir, "corruptor train --parallel nope.tsv --dev nope.tsv --out m.bin").code == 2);
    write_toy_files(dir);
    CHECK(cli(dir, "corruptor train --parallel train.tsv --dev dev.tsv --out m.bin --patience 0").code == 2);
    CHECK(cli(dir, "corruptor generate --model missing.bin --input clean.txt --out x.tsv").code == 2);
    CHECK(cli(dir, "detector train --real real.txt --dev real_dev.txt --out d.bin --threshold 1.5").code == 2);
    CHECK(cli(dir, "detector train --real real.txt --dev real_dev.txt --out d.bin --alternate").code == 2);
    CHECK(cli(dir, "detector eval --model missing.bin --test test.txt").code == 2);
    CHECK(cli(dir, "turing serve --real nope.txt --synthetic clean.txt").code == 2);
    const Run bad_seed = cli(dir, "corruptor train --parallel train.tsv --dev dev.tsv --out m.bin", "WRONGSMITH_SEED=abc");
    CHECK(bad_seed.code == 2);
    CHECK(bad_seed.err.find("WRONGSMITH_SEED") != std::string::npos);
    const Run bad_strategy = cli(dir, "corruptor generate --model m.bin --input clean.txt --out x.tsv --strategy zz");
    CHECK(bad_strategy.code == 2);
  }

  TEST_CASE("pipeline reruns are byte-identical") {
    TempDir dir;
    write_toy_files(dir);
    const std::string train = std::string("corruptor train --parallel train.tsv --dev dev.tsv ") + kTinyCorruptor;
    const Run t1 = cli(dir, train + " --out m1.bin --seed 4");
    REQUIRE(t1.code == 0);
    CHECK(t1.out.find("epoch 1 train_loss") == 0);
    CHECK(t1.out.find("best epoch") != std::string::npos);
    const Run t2 = cli(dir, train + " --out m2.bin --seed 4");
    CHECK(t2.out.substr(0, t2.out.find("best epoch")) == t1.out.substr(0, t1.out.find("best epoch")));
    CHECK(bytes(dir, "m1.bin") == bytes(dir, "m2.bin"));
    // The seed may also come from the environment.
    REQUIRE(cli(dir, train + " --out m3.bin", "WRONGSMITH_SEED=4").code == 0);
    CHECK(bytes(dir, "m3.bin") == bytes(dir, "m1.bin"));

    for (const char* strategy : {"am", "ts", "bs"}) {
      const std::string gen = std::string("corruptor generate --model m1.bin --input clean.txt --samples 3 --strategy ") +
                              strategy + " --seed 2";
      REQUIRE(cli(dir, gen + " --out g1.tsv").code == 0);
      REQUIRE(cli(dir, gen + " --out g2.tsv --scores s2.tsv").code == 0);
      CHECK(bytes(dir, "g1.tsv") == bytes(dir, "g2.tsv"));
      CHECK(bytes(dir, "g1.tsv.scores.tsv") == bytes(dir, "s2.tsv"));

      REQUIRE(cli(dir, "dataset build --pairs g1.tsv --out l1.txt").code == 0);
      REQUIRE(cli(dir, "dataset build --pairs g2.tsv --out l2.txt").code == 0);
      CHECK(bytes(dir, "l1.txt") == bytes(dir, "l2.txt"));
    }
    CHECK(cli(dir, "corruptor generate --model m1.bin --input clean.txt --out w.tsv --tau 0.5").err.find("warning") !=
          std::string::npos);

    // Synthetic data here is the bs dataset built last.
    write_text_file(dir / "synthetic.txt", bytes(dir, "l1.txt"));
    const std::string det = std::string("detector train --real real.txt --dev real_dev.txt ") + kTinyDetector;
    for (const std::string& extra : {std::string(""), std::string(" --synthetic synthetic.txt --alternate")}) {
      const Run d1 = cli(dir, det + extra + " --out d1.bin --history h1.jsonl --seed 3");
      REQUIRE(d1.code == 0);
      REQUIRE(cli(dir, det + extra + " --out d2.bin --history h2.jsonl --seed 3").code == 0);
      CHECK(bytes(dir, "d1.bin") == bytes(dir, "d2.bin"));
      CHECK(bytes(dir, "h1.jsonl") == bytes(dir, "h2.jsonl"));
      const auto first = nlohmann::json::parse(d1.out.substr(0, d1.out.find('\n')));
      CHECK(first.at("epoch") == 1);
    }

    const Run e1 = cli(dir, "detector eval --model d1.bin --test test.txt --json");
    REQUIRE(e1.code == 0);
    const DetectionMetrics m = parse_metrics_json(e1.out);
    CHECK(m.beta == 0.5);
    CHECK(m.f >= 0.0);
    CHECK(m.f <= 1.0);
    CHECK(cli(dir, "detector eval --model d1.bin --test test.txt --json").out == e1.out);
    const Run human = cli(dir, "detector eval --model d1.bin --test test.txt");
    CHECK(human.out.rfind("P ", 0) == 0);
    CHECK(human.out.find("F0.5") != std::string::npos);
  }

  TEST_CASE("dataset build honours --max-errors and --no-dedup") {
    TempDir dir;
    write_text_file(dir / "p.tsv", "a b c\ta x c\na b c\ta x c\na b c\tx y z\na b\ta b\n");
    REQUIRE(cli(dir, "dataset build --pairs p.tsv --out all.txt").code == 0);
    CHECK(read_labeled(dir / "all.txt").size() == 3);
    REQUIRE(cli(dir, "dataset build --pairs p.tsv --out zero.txt --max-errors 0").code == 0);
    const auto zero = read_labeled(dir / "zero.txt");
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].tokens == std::vector<std::string>{"a", "b"});
    REQUIRE(cli(dir, "dataset build --pairs p.tsv --out dup.txt --no-dedup").code == 0);
    CHECK(read_labeled(dir / "dup.txt").size() == 4);
  }

  TEST_CASE("two-pair corpus round-trips through train and generate") {
    TempDir dir;
    write_text_file(dir / "two.tsv", "I want to go .\tI want go .\nMary sees the dog .\tMary see the dog .\n");
    write_text_file(dir / "clean.txt", "I want to go .\nMary sees the dog .\n");
    REQUIRE(cli(dir, "corruptor train --parallel two.tsv --dev two.tsv --out m.bin --cell-size 16 --emb-size 8 "
                     "--lr 1.0 --batch-size 1 --max-epochs 1000 --patience 1000")
                .code == 0);
    REQUIRE(cli(dir, "corruptor generate --model m.bin --input clean.txt --out out.tsv").code == 0);
    const auto pairs = read_parallel_tsv(dir / "out.tsv");
    REQUIRE(pairs.size() == 2);
    CHECK(join(pairs[0].target) == "I want go .");
    CHECK(join(pairs[1].target) == "Mary see the dog .");
  }

  TEST_CASE("turing serve runs a session and writes results on close") {
    TempDir dir;
    std::string real, fake;
    for (int i = 0; i < 5; ++i) {
      real += "real sentence " + std::to_string(i) + " .\n";
      fake += "fake sentence " + std::to_string(i) + " .\n";
    }
    write_text_file(dir / "real.txt", real);
    write_text_file(dir / "fake.txt", fake);
    const int port = 18000 + static_cast<int>(::getpid() % 2000);
    const std::string cmd = "cd '" + dir.path().string() + "' && { '" WRONGSMITH_CLI
                            "' turing serve --real real.txt --synthetic fake.txt --n 5 --port " +
                            std::to_string(port) + " --results res.json >serve.out 2>serve.log & echo $! > pid; }";
    REQUIRE(std::system(cmd.c_str()) == 0);
    httplib::Client client("127.0.0.1", port);
    httplib::Result res;
    for (int attempt = 0; attempt < 100 && !res; ++attempt) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      res = client.Get("/api/session");
    }
    REQUIRE(res);
    const auto items = nlohmann::json::parse(res->body).at("items");
    CHECK(items.size() == 10);
    for (const auto& item : items) {
      const bool flagged = item.at("text").get<std::string>().rfind("fake", 0) == 0;
      client.Post("/api/judgment", nlohmann::json{{"id", item.at("id")}, {"synthetic", flagged}}.dump(),
                  "application/json");
    }
    REQUIRE(client.Post("/api/close")->status == 200);
    const pid_t pid = static_cast<pid_t>(std::stol(read_text_file(dir / "pid")));
    ::kill(pid, SIGTERM);
    for (int attempt = 0; attempt < 100 && ::kill(pid, 0) == 0; ++attempt) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    const DetectionMetrics m = parse_metrics_json(read_text_file(dir / "res.json"));
    CHECK(m.f == 1.0);
    CHECK(m.tp == 5);
  }
}
