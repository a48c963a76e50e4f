#include "wrongsmith/toy_language.hpp"

#include <array>
#include <string_view>

#include "wrongsmith/align.hpp"

namespace wrongsmith::toy {
namespace {

struct Inflected {
  std::string_view singular;
  std::string_view plural;
};

constexpr std::array<Inflected, 6> kNouns{{
    {"dog", "dogs"}, {"cat", "cats"}, {"child", "children"}, {"teacher", "teachers"}, {"book", "books"}, {"box", "boxes"},
}};

// {third person singular, base form}
constexpr std::array<Inflected, 4> kTransitive{{
    {"sees", "see"}, {"likes", "like"}, {"finds", "find"}, {"wants", "want"},
}};

constexpr std::array<Inflected, 3> kIntransitive{{
    {"sleeps", "sleep"}, {"runs", "run"}, {"waits", "wait"},
}};

constexpr std::array<std::string_view, 3> kAdjectives{"big", "small", "old"};

constexpr std::array<std::string_view, 4> kPrepositions{"in", "on", "at", "with"};
// Learner confusion for each preposition above.
constexpr std::array<std::string_view, 4> kPrepositionSwap{"on", "in", "in", "at"};

constexpr std::array<std::string_view, 3> kSingularDeterminers{"the", "a", "this"};
constexpr std::array<std::string_view, 3> kPluralDeterminers{"the", "some", "many"};
constexpr std::array<std::string_view, 2> kNames{"John", "Mary"};

template <class T, std::size_t N>
std::size_t pick(const std::array<T, N>&, Rng& rng) {
  return static_cast<std::size_t>(rng.below(N));
}

void noun_phrase(Parse& out, bool plural, Rng& rng) {
  const auto& dets = plural ? kPluralDeterminers : kSingularDeterminers;
  const std::size_t d = pick(dets, rng);
  out.push_back({std::string(dets[d]), Pos::kDeterminer, static_cast<int>(d), plural});
  if (rng.bernoulli(0.2)) {
    const std::size_t a = pick(kAdjectives, rng);
    out.push_back({std::string(kAdjectives[a]), Pos::kAdjective, static_cast<int>(a), plural});
  }
  const std::size_t n = pick(kNouns, rng);
  out.push_back({std::string(plural ? kNouns[n].plural : kNouns[n].singular), Pos::kNoun, static_cast<int>(n), plural});
}

bool is_transitive(const Word& verb) { return verb.lemma < static_cast<int>(kTransitive.size()); }

const Inflected& verb_forms(const Word& verb) {
  return is_transitive(verb) ? kTransitive[static_cast<std::size_t>(verb.lemma)]
                             : kIntransitive[static_cast<std::size_t>(verb.lemma) - kTransitive.size()];
}

}  // namespace

Parse generate(Rng& rng) {
  Parse out;
  bool plural_subject = false;
  if (rng.bernoulli(0.2)) {
    const std::size_t n = pick(kNames, rng);
    out.push_back({std::string(kNames[n]), Pos::kName, static_cast<int>(n), false});
  } else {
    plural_subject = rng.bernoulli(0.4);
    noun_phrase(out, plural_subject, rng);
  }

  if (rng.bernoulli(0.6)) {
    const std::size_t v = pick(kTransitive, rng);
    const auto& forms = kTransitive[v];
    out.push_back({std::string(plural_subject ? forms.plural : forms.singular), Pos::kVerb, static_cast<int>(v),
                   plural_subject});
    noun_phrase(out, rng.bernoulli(0.4), rng);
  } else {
    const std::size_t v = pick(kIntransitive, rng);
    const auto& forms = kIntransitive[v];
    out.push_back({std::string(plural_subject ? forms.plural : forms.singular), Pos::kVerb,
                   static_cast<int>(kTransitive.size() + v), plural_subject});
  }

  if (rng.bernoulli(0.3)) {
    const std::size_t p = pick(kPrepositions, rng);
    out.push_back({std::string(kPrepositions[p]), Pos::kPreposition, static_cast<int>(p), false});
    noun_phrase(out, rng.bernoulli(0.4), rng);
  }
  out.push_back({".", Pos::kPunct, -1, false});
  return out;
}

Sentence surface(const Parse& parse) {
  Sentence s;
  for (const Word& w : parse) s.tokens.push_back(w.text);
  return s;
}

Sentence inject_errors(const Parse& parse, Rng& rng, const ErrorRates& rates) {
  Sentence out;
  const bool name_subject = !parse.empty() && parse.front().pos == Pos::kName;
  bool verb_seen = false;
  for (std::size_t k = 0; k < parse.size(); ++k) {
    const Word& w = parse[k];
    switch (w.pos) {
      case Pos::kVerb: {
        const bool first_verb = !verb_seen;
        verb_seen = true;
        const double rate = first_verb && name_subject ? rates.agreement_after_name : rates.agreement;
        if (rng.bernoulli(rate)) {
          const Inflected& forms = verb_forms(w);
          out.tokens.emplace_back(w.plural ? forms.singular : forms.plural);
          continue;
        }
        break;
      }
      case Pos::kNoun: {
        const bool after_many = k > 0 && parse[k - 1].text == "many";
        const double rate = after_many ? rates.number_after_quantifier : rates.number;
        if (rng.bernoulli(rate)) {
          const Inflected& forms = kNouns[static_cast<std::size_t>(w.lemma)];
          out.tokens.emplace_back(w.plural ? forms.singular : forms.plural);
          continue;
        }
        break;
      }
      case Pos::kDeterminer:
        if ((w.text == "the" || w.text == "a") && rng.bernoulli(rates.determiner_drop)) continue;
        break;
      case Pos::kPreposition:
        if (rng.bernoulli(rates.preposition_drop)) continue;
        if (rng.bernoulli(rates.preposition_swap)) {
          out.tokens.emplace_back(kPrepositionSwap[static_cast<std::size_t>(w.lemma)]);
          continue;
        }
        break;
      default:
        break;
    }
    out.tokens.push_back(w.text);
  }
  return out;
}

Split make_split(std::uint64_t seed, const SplitSizes& sizes, const ErrorRates& rates) {
  Rng rng(seed);
  const auto pair = [&] {
    const Parse p = generate(rng);
    return ParallelPair{surface(p), inject_errors(p, rng, rates), {}};
  };
  const auto labeled = [&] {
    const ParallelPair p = pair();
    return label_tokens(p.source, p.target);
  };
  Split split;
  for (std::size_t i = 0; i < sizes.corruptor_train; ++i) split.corruptor_train.push_back(pair());
  for (std::size_t i = 0; i < sizes.corruptor_dev; ++i) split.corruptor_dev.push_back(pair());
  for (std::size_t i = 0; i < sizes.real_train; ++i) split.real_train.push_back(labeled());
  for (std::size_t i = 0; i < sizes.real_dev; ++i) split.real_dev.push_back(labeled());
  for (std::size_t i = 0; i < sizes.test; ++i) split.test.push_back(labeled());
  for (std::size_t i = 0; i < sizes.clean_pool; ++i) split.clean_pool.push_back(surface(generate(rng)));
  return split;
}

}  // namespace wrongsmith::toy
