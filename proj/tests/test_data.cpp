#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "fedsim/data.hpp"
#include "fedsim/errors.hpp"

using namespace fedsim;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) s.push_back(' ');
        s += tokens[i];
    }
    return s;
}

}  // namespace

TEST_CASE("tokenize basics") {
    CHECK(tokenize("I want to END it.") ==
          std::vector<std::string>{"i", "want", "to", "end", "it"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("don't  stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize("...") == std::vector<std::string>{});
    CHECK(tokenize("(hello),\tworld!!") ==
          std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("a b") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("tokenize is idempotent through join") {
    for (const char* text :
         {"I want to END it.", "don't  stop", "a--b -- c!", "Caf\xC3\xA9 au lait,",
          "x  \t y\nz"}) {
        const auto once = tokenize(text);
        CHECK(tokenize(join(once)) == once);
    }
}

TEST_CASE("load_jsonl keeps file order and reports malformed lines") {
    const auto path = temp_file("fedsim_data_ok.jsonl");
    write_file(path,
               "{\"text\":\"one\",\"label\":0}\n"
               "{\"text\":\"two\",\"label\":1}\n"
               "{\"text\":\"three\",\"label\":0}\n");
    const auto loaded = load_jsonl(path, true);
    CHECK(loaded.examples.size() == 3);
    CHECK(loaded.malformed_lines == 0);
    CHECK(loaded.examples[0].text == "one");
    CHECK(loaded.examples[2].text == "three");

    const auto empty_path = temp_file("fedsim_data_empty.jsonl");
    write_file(empty_path, "");
    CHECK(load_jsonl(empty_path, true).examples.empty());

    const auto bad_path = temp_file("fedsim_data_bad.jsonl");
    write_file(bad_path,
               "{\"text\":\"one\",\"label\":0}\n"
               "{\"text\":\"missing\"}\n"
               "{\"text\":\"two\",\"label\":1}\n");
    const auto lax = load_jsonl(bad_path, false);
    CHECK(lax.examples.size() == 2);
    CHECK(lax.malformed_lines == 1);
    CHECK_THROWS_WITH_AS(load_jsonl(bad_path, true),
                         doctest::Contains("line 2"), ParseError);

    CHECK_THROWS_AS(load_jsonl(temp_file("fedsim_no_such_file.jsonl"), true),
                    IoError);
}

TEST_CASE("save_jsonl round-trips") {
    const auto path = temp_file("fedsim_data_rt.jsonl");
    const std::vector<LabeledExample> examples = {{"hello world", 0},
                                                  {"quoted \"text\"", 4}};
    save_jsonl(path, examples);
    const auto loaded = load_jsonl(path, true);
    REQUIRE(loaded.examples.size() == 2);
    CHECK(loaded.examples[0].text == "hello world");
    CHECK(loaded.examples[1].text == "quoted \"text\"");
    CHECK(loaded.examples[1].label == 4);
}

TEST_CASE("make_synthetic class balance tracks the configured priors") {
    const auto reddit_like = make_synthetic(1000, 2, 120, 0.4816, 7);
    double positives = 0;
    for (const auto& ex : reddit_like) positives += ex.label;
    CHECK(positives / 1000.0 == doctest::Approx(0.4816).epsilon(0.11));
    CHECK(std::abs(positives / 1000.0 - 0.4816) < 0.05);

    const auto twitter_like = make_synthetic(2000, 2, 120, 0.058, 8);
    positives = 0;
    for (const auto& ex : twitter_like) positives += ex.label;
    CHECK(std::abs(positives / 2000.0 - 0.058) < 0.02);
}

TEST_CASE("make_synthetic is deterministic and validates inputs") {
    const auto a = make_synthetic(50, 5, 200, 0.5, 3);
    const auto b = make_synthetic(50, 5, 200, 0.5, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].text == b[i].text);
        CHECK(a[i].label == b[i].label);
    }
    std::set<int> labels;
    for (const auto& ex : a) labels.insert(ex.label);
    CHECK(*labels.rbegin() <= 4);

    CHECK_THROWS_AS(make_synthetic(10, 2, 20, 0.5, 0), ConfigError);
    CHECK_THROWS_AS(make_synthetic(10, 2, 120, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(make_synthetic(10, 2, 120, 1.5, 0), ConfigError);
}

TEST_CASE("synthetic example lengths stay within [5, 30] tokens") {
    for (const auto& ex : make_synthetic(300, 2, 120, 0.5, 11)) {
        const auto n = tokenize(ex.text).size();
        CHECK(n >= 5);
        CHECK(n <= 30);
    }
}

TEST_CASE("partition_iid deals disjoint equal shards") {
    const auto shards = partition_iid(39600, 99, 400, 21);
    REQUIRE(shards.size() == 99);
    std::set<std::size_t> seen;
    for (const auto& s : shards) {
        CHECK(s.example_indices.size() == 400);
        for (auto idx : s.example_indices) {
            CHECK(idx < 39600);
            CHECK(seen.insert(idx).second);  // pairwise disjoint
        }
    }
    CHECK(seen.size() == 39600);  // no leftovers here

    const auto twitter = partition_iid(10200, 102, 100, 5);
    CHECK(twitter.size() == 102);

    const auto single = partition_iid(30, 1, 10, 9);
    REQUIRE(single.size() == 1);
    CHECK(single[0].example_indices.size() == 10);

    const auto p1 = partition_iid(100, 3, 30, 1);
    const auto p2 = partition_iid(100, 3, 30, 1);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].example_indices == p2[i].example_indices);
    }
    CHECK_THROWS_AS(partition_iid(100, 3, 40, 1), ConfigError);
}

TEST_CASE("split_train_test sizes, disjointness, determinism") {
    const auto s = split_train_test(100, 0.2, 17);
    CHECK(s.train.size() == 80);
    CHECK(s.test.size() == 20);
    std::set<std::size_t> train(s.train.begin(), s.train.end());
    for (auto idx : s.test) CHECK(train.count(idx) == 0);

    const auto again = split_train_test(100, 0.2, 17);
    CHECK(s.train == again.train);
    CHECK(s.test == again.test);

    CHECK_THROWS_AS(split_train_test(100, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split_train_test(100, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(split_train_test(3, 0.01, 1), ConfigError);
}

TEST_CASE("vocabulary: ids dense from 2, unknown maps to 1, train-only") {
    const std::vector<LabeledExample> examples = {
        {"alpha beta alpha", 0}, {"beta gamma alpha", 1}, {"delta!", 0}};
    const std::vector<std::size_t> train_idx = {0, 1};
    const auto vocab = Vocabulary::build(examples, train_idx, 2);
    // counts over train: alpha 3, beta 2, gamma 1, delta unseen
    CHECK(vocab.size() == 4);  // pad, unk, alpha, beta
    CHECK(vocab.id_of("alpha") == 2);
    CHECK(vocab.id_of("beta") == 3);
    CHECK(vocab.id_of("gamma") == Vocabulary::kUnkId);
    CHECK(vocab.id_of("delta") == Vocabulary::kUnkId);
}

TEST_CASE("vocabulary tie-break is lexicographic at equal counts") {
    const std::vector<LabeledExample> examples = {{"zeta acorn zeta acorn", 0}};
    const auto vocab = Vocabulary::build(examples, {0}, 1);
    CHECK(vocab.id_of("acorn") == 2);
    CHECK(vocab.id_of("zeta") == 3);
}

TEST_CASE("encode_tokens pads and truncates") {
    const std::vector<LabeledExample> examples = {{"a b c d e", 0}};
    const auto vocab = Vocabulary::build(examples, {0}, 1);
    const auto padded = encode_tokens(vocab, "a b", 4);
    REQUIRE(padded.size() == 4);
    CHECK(padded[0] == vocab.id_of("a"));
    CHECK(padded[2] == Vocabulary::kPadId);
    CHECK(padded[3] == Vocabulary::kPadId);
    const auto truncated = encode_tokens(vocab, "a b c d e", 3);
    CHECK(truncated.size() == 3);
    CHECK(truncated[2] == vocab.id_of("c"));
    const auto empty = encode_tokens(vocab, "", 3);
    CHECK(empty == std::vector<std::int32_t>{0, 0, 0});
}

TEST_CASE("encode_bow normalizes counts and routes unknowns to slot 1") {
    const std::vector<LabeledExample> examples = {{"a b a b c", 0}};
    const auto vocab = Vocabulary::build(examples, {0}, 2);  // keeps a, b
    const auto row = encode_bow(vocab, "a a b mystery");
    REQUIRE(row.size() == vocab.size());
    CHECK(row[Vocabulary::kPadId] == 0.0);
    CHECK(row[Vocabulary::kUnkId] == doctest::Approx(0.25));
    CHECK(row[static_cast<std::size_t>(vocab.id_of("a"))] ==
          doctest::Approx(0.5));
    CHECK(row[static_cast<std::size_t>(vocab.id_of("b"))] ==
          doctest::Approx(0.25));
    double total = 0.0;
    for (double v : row) total += v;
    CHECK(total == doctest::Approx(1.0));
}
