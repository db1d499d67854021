#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedsim/model.hpp"

namespace fedsim {

struct LabeledExample {
    std::string text;
    int label = 0;
};

struct LoadResult {
    std::vector<LabeledExample> examples;
    std::size_t malformed_lines = 0;
};

// One JSON object per line, fields "text" (string) and "label" (int >= 0).
// Blank lines are skipped. With strict=true the first malformed line raises
// ParseError naming the line number; otherwise malformed lines are counted
// and dropped.
LoadResult load_jsonl(const std::string& path, bool strict);

void save_jsonl(const std::string& path,
                const std::vector<LabeledExample>& examples);

// Lowercases ASCII letters, splits on Unicode whitespace, strips leading and
// trailing ASCII punctuation from each token. Empty result is allowed.
std::vector<std::string> tokenize(const std::string& text);

// Class-marker corpus: token ids [10*c, 10*c+10) of the synthetic vocabulary
// are markers for class c; each token of a class-c example is a marker with
// probability 0.3, otherwise uniform background. Lengths are uniform on
// [5, 30]. Binary labels follow positive_rate, multiclass labels are uniform.
std::vector<LabeledExample> make_synthetic(std::size_t num_examples,
                                           int num_classes, int vocab_size,
                                           double positive_rate,
                                           std::uint64_t seed);

// Token table built from the training split only. id 0 = padding,
// id 1 = unknown; remaining ids dense from 2, assigned by descending
// frequency (ties broken lexicographically).
class Vocabulary {
public:
    static constexpr std::int32_t kPadId = 0;
    static constexpr std::int32_t kUnkId = 1;

    static Vocabulary build(const std::vector<LabeledExample>& examples,
                            const std::vector<std::size_t>& indices,
                            int min_freq);

    std::int32_t id_of(const std::string& token) const {
        auto it = ids_.find(token);
        return it == ids_.end() ? kUnkId : it->second;
    }

    // Total id range, sentinels included.
    std::size_t size() const { return ids_.size() + 2; }

private:
    std::unordered_map<std::string, std::int32_t> ids_;
};

// Token ids padded/truncated to max_len (empty text encodes to all padding).
std::vector<std::int32_t> encode_tokens(const Vocabulary& vocab,
                                        const std::string& text, int max_len);

// Normalized bag-of-words over the full id range (unknowns land in slot 1).
std::vector<double> encode_bow(const Vocabulary& vocab,
                               const std::string& text);

struct ClientShard {
    int client_id = 0;
    std::vector<std::size_t> example_indices;
};

// Seeded shuffle of [0, num_examples), then contiguous per_client slices for
// clients 0..k-1. Leftover examples belong to no shard.
std::vector<ClientShard> partition_iid(std::size_t num_examples, int k,
                                       std::size_t per_client,
                                       std::uint64_t seed);

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded shuffle, then the first n - round(n*test_fraction) indices train,
// the rest test.
TrainTestSplit split_train_test(std::size_t num_examples, double test_fraction,
                                std::uint64_t seed);

}  // namespace fedsim
