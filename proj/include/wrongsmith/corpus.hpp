#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wrongsmith {

using TokenId = std::uint32_t;

// Ordered word tokens with their original surface forms.
struct Sentence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Tokens joined with single spaces; tokenize(join(s)) == s for tokenized s.
std::string join(const Sentence& sentence);

// Clean source u and (possibly erroneous) target v. `score` is the decoder's
// joint log-probability in nats; absent for human data.
struct ParallelPair {
  Sentence source;
  Sentence target;
  std::optional<double> score;

  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

enum class Label : char { kCorrect = 'c', kIncorrect = 'i' };

struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<Label> labels;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

// Splits on Unicode whitespace, then detaches each leading and trailing
// character from .,!?;:'"() as its own token. Case is preserved.
// Throws EmptyInput for empty or whitespace-only text.
Sentence tokenize(std::string_view text);

class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBos = 2;
  static constexpr TokenId kEos = 3;
  static constexpr std::size_t kNumReserved = 4;

  // Only the reserved entries.
  Vocabulary();

  // Ids are assigned by descending frequency, ties broken lexicographically.
  // Throws EmptyInput on an empty corpus, ConfigError for min_count < 1.
  static Vocabulary build(const std::vector<Sentence>& corpus, std::size_t min_count = 1);

  // Restores a vocabulary from its non-reserved tokens in id order.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return token_of_.size(); }

  std::vector<TokenId> encode(const Sentence& sentence) const;
  Sentence decode(const std::vector<TokenId>& ids) const;

  // Non-reserved tokens in id order.
  std::vector<std::string> tokens() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.token_of_ == b.token_of_; }

 private:
  void add(const std::string& token);

  std::vector<std::string> token_of_;
  std::unordered_map<std::string, TokenId> id_of_;
};

// Reading functions throw IoError when the file cannot be opened and
// ParseError (with a 1-based line number) on malformed content, invalid UTF-8
// or a byte-order mark.

// One `source<TAB>target` pair per line; blank lines are skipped.
std::vector<ParallelPair> read_parallel_tsv(const std::filesystem::path& path);
void write_parallel_tsv(const std::vector<ParallelPair>& pairs, const std::filesystem::path& path);

// `token<TAB>label` per line, blank line after each sentence.
std::vector<LabeledSentence> read_labeled(const std::filesystem::path& path);
void write_labeled(const std::vector<LabeledSentence>& dataset, const std::filesystem::path& path);

// One sentence per line. When a line carries a TAB the last field is used,
// so parallel TSV files can be read as their target side.
std::vector<Sentence> read_sentences(const std::filesystem::path& path);

// String forms used by the readers; exposed for in-memory round trips.
std::string format_labeled(const std::vector<LabeledSentence>& dataset);
std::vector<LabeledSentence> parse_labeled(std::string_view content);
std::string format_parallel(const std::vector<ParallelPair>& pairs);
std::vector<ParallelPair> parse_parallel(std::string_view content);

// Whole-file helpers that validate encoding.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace wrongsmith
