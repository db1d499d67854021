#include "fedsim/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_ascii_punct(char32_t cp) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

// Decodes one code point; invalid sequences fall back to the single byte
// value so the result is deterministic on any input.
char32_t decode_utf8(const std::string& s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    char32_t cp = b0;
    if (b0 >= 0xF0) {
        extra = 3;
        cp = b0 & 0x07u;
    } else if (b0 >= 0xE0) {
        extra = 2;
        cp = b0 & 0x0Fu;
    } else if (b0 >= 0xC0) {
        extra = 1;
        cp = b0 & 0x1Fu;
    } else {
        ++i;
        return cp;
    }
    if (i + extra >= s.size()) {
        ++i;
        return b0;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
        const auto bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xC0u) != 0x80u) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3Fu);
    }
    i += extra + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool whitespace_only(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_space_cp(decode_utf8(s, i))) return false;
    }
    return true;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::vector<char32_t> token;
    std::size_t i = 0;
    auto flush = [&] {
        // strip leading/trailing ASCII punctuation, keep interior
        std::size_t lo = 0, hi = token.size();
        while (lo < hi && is_ascii_punct(token[lo])) ++lo;
        while (hi > lo && is_ascii_punct(token[hi - 1])) --hi;
        if (lo < hi) {
            std::string s;
            for (std::size_t k = lo; k < hi; ++k) append_utf8(s, token[k]);
            out.push_back(std::move(s));
        }
        token.clear();
    };
    while (i < text.size()) {
        char32_t cp = decode_utf8(text, i);
        if (is_space_cp(cp)) {
            flush();
            continue;
        }
        if (cp >= 'A' && cp <= 'Z') cp += 32;
        token.push_back(cp);
    }
    flush();
    return out;
}

LoadResult load_jsonl(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    LoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string why;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            why = "not valid JSON";
        } else if (!j.is_object()) {
            why = "not a JSON object";
        } else if (!j.contains("text") || !j["text"].is_string()) {
            why = "missing string field \"text\"";
        } else if (!j.contains("label") || !j["label"].is_number_integer()) {
            why = "missing integer field \"label\"";
        } else if (j["label"].get<std::int64_t>() < 0) {
            why = "negative label";
        } else if (whitespace_only(j["text"].get<std::string>())) {
            why = "empty text";
        }
        if (!why.empty()) {
            if (strict) {
                throw ParseError(path + ": line " + std::to_string(line_no) +
                                 ": " + why);
            }
            ++result.malformed_lines;
            continue;
        }
        result.examples.push_back(
            {j["text"].get<std::string>(), j["label"].get<int>()});
    }
    return result;
}

void save_jsonl(const std::string& path,
                const std::vector<LabeledExample>& examples) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& ex : examples) {
        nlohmann::json j;
        j["text"] = ex.text;
        j["label"] = ex.label;
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<LabeledExample> make_synthetic(std::size_t num_examples,
                                           int num_classes, int vocab_size,
                                           double positive_rate,
                                           std::uint64_t seed) {
    if (num_examples == 0) throw ConfigError("synthetic: num_examples must be >= 1");
    if (num_classes < 2) throw ConfigError("synthetic: num_classes must be >= 2");
    if (vocab_size <= num_classes * 10) {
        throw ConfigError("synthetic: vocab_size must exceed 10 * num_classes");
    }
    if (num_classes == 2 && (positive_rate <= 0.0 || positive_rate >= 1.0)) {
        throw ConfigError("synthetic: positive_rate must be in (0, 1)");
    }
    const int background = vocab_size - 10 * num_classes;
    Rng rng(seed);
    std::vector<LabeledExample> out;
    out.reserve(num_examples);
    for (std::size_t i = 0; i < num_examples; ++i) {
        int label;
        if (num_classes == 2) {
            label = rng.bernoulli(positive_rate) ? 1 : 0;
        } else {
            label = static_cast<int>(
                rng.next_below(static_cast<std::uint64_t>(num_classes)));
        }
        const auto len = 5 + rng.next_below(26);
        std::string text;
        for (std::uint64_t t = 0; t < len; ++t) {
            if (t > 0) text.push_back(' ');
            if (rng.bernoulli(0.3)) {
                const auto j = rng.next_below(10);
                text += "mark" + std::to_string(label) + "_" + std::to_string(j);
            } else {
                const auto j =
                    rng.next_below(static_cast<std::uint64_t>(background));
                text += "w" + std::to_string(10 * num_classes + j);
            }
        }
        out.push_back({std::move(text), label});
    }
    return out;
}

Vocabulary Vocabulary::build(const std::vector<LabeledExample>& examples,
                             const std::vector<std::size_t>& indices,
                             int min_freq) {
    if (min_freq < 1) throw ConfigError("vocabulary: min_freq must be >= 1");
    std::map<std::string, std::int64_t> counts;
    for (std::size_t idx : indices) {
        for (auto& tok : tokenize(examples.at(idx).text)) ++counts[tok];
    }
    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (auto& [tok, cnt] : counts) {
        if (cnt >= min_freq) kept.emplace_back(tok, cnt);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary v;
    std::int32_t next_id = 2;
    for (auto& [tok, cnt] : kept) v.ids_.emplace(tok, next_id++);
    return v;
}

std::vector<std::int32_t> encode_tokens(const Vocabulary& vocab,
                                        const std::string& text, int max_len) {
    if (max_len < 1) throw ConfigError("encode: max_len must be >= 1");
    std::vector<std::int32_t> row(static_cast<std::size_t>(max_len),
                                  Vocabulary::kPadId);
    const auto tokens = tokenize(text);
    const auto n = std::min<std::size_t>(tokens.size(),
                                         static_cast<std::size_t>(max_len));
    for (std::size_t i = 0; i < n; ++i) row[i] = vocab.id_of(tokens[i]);
    return row;
}

std::vector<double> encode_bow(const Vocabulary& vocab,
                               const std::string& text) {
    std::vector<double> row(vocab.size(), 0.0);
    const auto tokens = tokenize(text);
    if (tokens.empty()) return row;
    for (const auto& tok : tokens) {
        row[static_cast<std::size_t>(vocab.id_of(tok))] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (double& x : row) x *= inv;
    return row;
}

std::vector<ClientShard> partition_iid(std::size_t num_examples, int k,
                                       std::size_t per_client,
                                       std::uint64_t seed) {
    if (k < 1) throw ConfigError("partition: k must be >= 1");
    if (per_client < 1) throw ConfigError("partition: per_client must be >= 1");
    if (static_cast<std::size_t>(k) * per_client > num_examples) {
        throw ConfigError("partition: need k * per_client <= examples (" +
                          std::to_string(k) + " * " +
                          std::to_string(per_client) + " > " +
                          std::to_string(num_examples) + ")");
    }
    std::vector<std::size_t> order(num_examples);
    for (std::size_t i = 0; i < num_examples; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<ClientShard> shards(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        auto& shard = shards[static_cast<std::size_t>(c)];
        shard.client_id = c;
        const auto base = static_cast<std::size_t>(c) * per_client;
        shard.example_indices.assign(order.begin() + base,
                                     order.begin() + base + per_client);
    }
    return shards;
}

TrainTestSplit split_train_test(std::size_t num_examples, double test_fraction,
                                std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("split: test_fraction must be in (0, 1)");
    }
    const auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(num_examples) * test_fraction));
    if (n_test == 0 || n_test >= num_examples) {
        throw ConfigError("split: degenerate sizes for " +
                          std::to_string(num_examples) + " examples");
    }
    std::vector<std::size_t> order(num_examples);
    for (std::size_t i = 0; i < num_examples; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    TrainTestSplit split;
    split.train.assign(order.begin(), order.end() - static_cast<long>(n_test));
    split.test.assign(order.end() - static_cast<long>(n_test), order.end());
    return split;
}

}  // namespace fedsim
