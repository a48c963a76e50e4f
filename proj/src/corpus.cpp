#include "wrongsmith/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "wrongsmith/error.hpp"

namespace wrongsmith {
namespace {

constexpr std::string_view kPunctuation = ".,!?;:'\"()";

bool is_punct(char c) { return kPunctuation.find(c) != std::string_view::npos; }

// Decodes one code point at `pos`, advancing it. Returns -1 on malformed input.
long decode_utf8(std::string_view s, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  int extra;
  long cp;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    return -1;
  }
  for (int k = 1; k <= extra; ++k) {
    if (pos + k >= s.size()) return -1;
    const auto cont = static_cast<unsigned char>(s[pos + k]);
    if ((cont & 0xC0) != 0x80) return -1;
    cp = (cp << 6) | (cont & 0x3F);
  }
  static constexpr long kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return -1;
  pos += extra + 1;
  return cp;
}

bool is_unicode_space(long cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Line-oriented view over validated file content.
std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

void validate_utf8(std::string_view content) {
  if (content.starts_with("\xEF\xBB\xBF")) throw ParseError(1, "byte-order mark is not allowed");
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos < content.size()) {
    if (content[pos] == '\n') ++line;
    if (decode_utf8(content, pos) < 0) throw ParseError(line, "invalid UTF-8");
  }
}

Sentence tokenize_line(std::string_view text, std::size_t line) {
  try {
    return tokenize(text);
  } catch (const EmptyInput&) {
    throw ParseError(line, "empty sentence");
  }
}

}  // namespace

std::string join(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (i) out += ' ';
    out += sentence.tokens[i];
  }
  return out;
}

Sentence tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const long cp = decode_utf8(text, pos);
    if (cp < 0) {
      // Not UTF-8; keep the byte so tokenization stays total.
      pos = start + 1;
      current += text[start];
      continue;
    }
    if (is_unicode_space(cp)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(start, pos - start));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  if (words.empty()) throw EmptyInput("text contains no tokens");

  Sentence out;
  for (const std::string& word : words) {
    std::size_t lo = 0;
    std::size_t hi = word.size();
    while (lo < hi && is_punct(word[lo])) ++lo;
    while (hi > lo && is_punct(word[hi - 1])) --hi;
    for (std::size_t k = 0; k < lo; ++k) out.tokens.emplace_back(1, word[k]);
    if (hi > lo) out.tokens.push_back(word.substr(lo, hi - lo));
    for (std::size_t k = hi; k < word.size(); ++k) out.tokens.emplace_back(1, word[k]);
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (const char* reserved : {"<pad>", "<unk>", "<s>", "</s>"}) add(reserved);
}

void Vocabulary::add(const std::string& token) {
  id_of_.emplace(token, static_cast<TokenId>(token_of_.size()));
  token_of_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<Sentence>& corpus, std::size_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  if (corpus.empty()) throw EmptyInput("vocabulary corpus");
  std::map<std::string, std::size_t> counts;
  for (const Sentence& s : corpus) {
    for (const std::string& t : s.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (auto& [token, count] : counts) {
    if (count >= min_count) entries.emplace_back(token, count);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& entry : entries) {
    if (!vocab.contains(entry.first)) vocab.add(entry.first);
  }
  return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary vocab;
  for (const std::string& t : tokens) {
    if (vocab.contains(t)) throw ConfigError("duplicate vocabulary token '" + t + "'");
    vocab.add(t);
  }
  return vocab;
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = id_of_.find(std::string(token));
  return it == id_of_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= token_of_.size()) throw ConfigError("token id " + std::to_string(id) + " out of range");
  return token_of_[id];
}

bool Vocabulary::contains(std::string_view token) const { return id_of_.count(std::string(token)) > 0; }

std::vector<TokenId> Vocabulary::encode(const Sentence& sentence) const {
  std::vector<TokenId> ids;
  ids.reserve(sentence.size());
  for (const std::string& t : sentence.tokens) ids.push_back(id(t));
  return ids;
}

Sentence Vocabulary::decode(const std::vector<TokenId>& ids) const {
  Sentence out;
  out.tokens.reserve(ids.size());
  for (TokenId i : ids) out.tokens.push_back(token(i));
  return out;
}

std::vector<std::string> Vocabulary::tokens() const {
  return {token_of_.begin() + kNumReserved, token_of_.end()};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  validate_utf8(content);
  return content;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<ParallelPair> parse_parallel(std::string_view content) {
  validate_utf8(content);
  std::vector<ParallelPair> pairs;
  const auto lines = split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(n + 1, "expected one TAB, found none");
    if (line.find('\t', tab + 1) != std::string_view::npos) throw ParseError(n + 1, "expected one TAB, found several");
    pairs.push_back({tokenize_line(line.substr(0, tab), n + 1), tokenize_line(line.substr(tab + 1), n + 1), {}});
  }
  return pairs;
}

std::string format_parallel(const std::vector<ParallelPair>& pairs) {
  std::string out;
  for (const ParallelPair& p : pairs) {
    out += join(p.source);
    out += '\t';
    out += join(p.target);
    out += '\n';
  }
  return out;
}

std::vector<ParallelPair> read_parallel_tsv(const std::filesystem::path& path) {
  return parse_parallel(read_text_file(path));
}

void write_parallel_tsv(const std::vector<ParallelPair>& pairs, const std::filesystem::path& path) {
  write_text_file(path, format_parallel(pairs));
}

std::vector<LabeledSentence> parse_labeled(std::string_view content) {
  validate_utf8(content);
  std::vector<LabeledSentence> dataset;
  LabeledSentence current;
  const auto lines = split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    if (line.empty()) {
      if (current.size() > 0) dataset.push_back(std::move(current));
      current = {};
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) throw ParseError(n + 1, "expected token<TAB>label");
    const std::string_view label = line.substr(tab + 1);
    if (label == "c") {
      current.labels.push_back(Label::kCorrect);
    } else if (label == "i") {
      current.labels.push_back(Label::kIncorrect);
    } else {
      throw ParseError(n + 1, "unknown label '" + std::string(label) + "'");
    }
    current.tokens.emplace_back(line.substr(0, tab));
  }
  if (current.size() > 0) dataset.push_back(std::move(current));
  return dataset;
}

std::string format_labeled(const std::vector<LabeledSentence>& dataset) {
  std::string out;
  for (const LabeledSentence& s : dataset) {
    for (std::size_t j = 0; j < s.tokens.size(); ++j) {
      out += s.tokens[j];
      out += '\t';
      out += static_cast<char>(s.labels[j]);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<LabeledSentence> read_labeled(const std::filesystem::path& path) {
  return parse_labeled(read_text_file(path));
}

void write_labeled(const std::vector<LabeledSentence>& dataset, const std::filesystem::path& path) {
  write_text_file(path, format_labeled(dataset));
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  const std::string content = read_text_file(path);
  std::vector<Sentence> out;
  const auto lines = split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    const std::size_t tab = line.rfind('\t');
    if (tab != std::string_view::npos) line = line.substr(tab + 1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    out.push_back(tokenize_line(line, n + 1));
  }
  return out;
}

}  // namespace wrongsmith
