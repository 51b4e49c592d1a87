#include "synthetic.hpp"

#include <set>

namespace causalx::testing {

Sentence make_sentence(std::string id, std::vector<std::string> words, std::vector<int> heads,
                       std::vector<std::string> rels, std::string_view labels,
                       std::string dataset) {
  Sentence s;
  s.id = std::move(id);
  s.dataset = std::move(dataset);
  for (std::size_t i = 0; i < words.size(); ++i) {
    s.tokens.push_back({words[i], heads[i], rels[i]});
  }
  for (char c : labels) s.labels.push_back(parse_label(std::string(1, c)));
  return s;
}

Sentence chain_sentence(std::string id, std::vector<std::string> words, std::string_view labels,
                        std::string dataset) {
  const int n = static_cast<int>(words.size());
  std::vector<int> heads;
  for (int i = 0; i < n; ++i) heads.push_back(i + 1 < n ? i + 1 : kRootHead);
  return make_sentence(std::move(id), std::move(words), heads,
                       std::vector<std::string>(words.size(), "dep"), labels, std::move(dataset));
}

Sentence random_sentence(Rng& rng, std::string id, std::size_t max_len, std::string dataset) {
  static const std::vector<std::string> rels = {"compound", "amod", "nsubj", "dobj", "det"};
  const std::size_t n = 1 + rng.uniform_index(max_len);
  // Attach each node of a random order to a node earlier in that order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  Sentence s;
  s.id = std::move(id);
  s.dataset = std::move(dataset);
  s.tokens.resize(n);
  s.labels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Token& t = s.tokens[order[k]];
    t.surface = "t" + std::to_string(rng.uniform_index(20));
    t.head = k == 0 ? kRootHead : static_cast<int>(order[rng.uniform_index(k)]);
    t.rel = k == 0 ? "root" : rels[rng.uniform_index(rels.size())];
  }
  for (auto& l : s.labels) l = kAllLabels[rng.uniform_index(kNumLabels)];
  return s;
}

Corpus overfit_corpus() {
  Rng rng(2024);
  std::vector<Sentence> sentences;
  for (int i = 0; i < 32; ++i) {
    const std::size_t n = 5 + rng.uniform_index(5);
    std::vector<std::string> words;
    std::string labels;
    for (std::size_t t = 0; t < n; ++t) {
      words.push_back("w" + std::to_string(rng.uniform_index(12)));
      labels += 'O';
    }
    const std::size_t x = rng.uniform_index(n);
    std::size_t y = rng.uniform_index(n - 1);
    if (y >= x) ++y;
    words[x] = "X";
    labels[x] = 'C';
    words[y] = "Y";
    labels[y] = 'E';
    sentences.push_back(chain_sentence("s" + std::to_string(i), words, labels, "overfit"));
  }
  return Corpus("overfit", std::move(sentences));
}

namespace {

Sentence render(const std::string& id, const std::string& dataset, Template t,
                const std::string& cause, const std::string& effect, const std::string& adj) {
  switch (t) {
    case Template::Caused:
      // 0 the, 1 adj, 2 N1, 3 caused, 4 the, 5 N2, 6 .
      return make_sentence(id, {"the", adj, cause, "caused", "the", effect, "."},
                           {2, 2, 3, kRootHead, 5, 3, 3},
                           {"det", "amod", "nsubj", "root", "det", "dobj", "punct"}, "OCCOOEO",
                           dataset);
    case Template::LeadsTo:
      // 0 the, 1 N1, 2 leads, 3 to, 4 the, 5 N2, 6 .
      return make_sentence(id, {"the", cause, "leads", "to", "the", effect, "."},
                           {1, 2, kRootHead, 2, 5, 3, 2},
                           {"det", "nsubj", "root", "prep", "det", "pobj", "punct"}, "OCOOOEO",
                           dataset);
    case Template::BecauseOf:
      // 0 the, 1 N2, 2 happened, 3 because, 4 of, 5 the, 6 N1, 7 .
      return make_sentence(id, {"the", effect, "happened", "because", "of", "the", cause, "."},
                           {1, 2, kRootHead, 4, 2, 6, 4, 2},
                           {"det", "nsubj", "root", "mark", "prep", "det", "pobj", "punct"},
                           "OEOOOOCO", dataset);
    case Template::Followed:
      // 0 the, 1 N2, 2 followed, 3 the, 4 N1, 5 .
      return make_sentence(id, {"the", effect, "followed", "the", cause, "."},
                           {1, 2, kRootHead, 4, 2, 2},
                           {"det", "nsubj", "root", "det", "dobj", "punct"}, "OEOOCO", dataset);
    case Template::CameAfter:
      // 0 the, 1 N2, 2 came, 3 after, 4 the, 5 N1, 6 .
      return make_sentence(id, {"the", effect, "came", "after", "the", cause, "."},
                           {1, 2, kRootHead, 2, 5, 3, 2},
                           {"det", "nsubj", "root", "prep", "det", "pobj", "punct"}, "OEOOOCO",
                           dataset);
  }
  return {};
}

}  // namespace

Corpus template_corpus(const std::string& name, const std::vector<Template>& templates,
                       std::size_t n, std::uint64_t seed, const std::string& vocab) {
  Rng rng(seed);
  std::vector<Sentence> sentences;
  std::set<std::string> seen;
  while (sentences.size() < n) {
    const Template t = templates[sentences.size() % templates.size()];
    const std::string cause = vocab + "n" + std::to_string(rng.uniform_index(40));
    std::string effect = vocab + "n" + std::to_string(rng.uniform_index(40));
    if (effect == cause) continue;
    const std::string adj = vocab + "a" + std::to_string(rng.uniform_index(8));
    Sentence s = render(name + "-" + std::to_string(sentences.size()), name, t, cause, effect, adj);
    std::string key;
    for (const auto& tok : s.tokens) key += tok.surface + " ";
    if (!seen.insert(key).second) continue;
    sentences.push_back(std::move(s));
  }
  return Corpus(name, std::move(sentences));
}

Dataset with_hash_embeddings(Corpus corpus, std::size_t dim, std::uint64_t seed) {
  EmbeddingStore store = hash_embeddings(corpus, dim, seed);
  return {std::move(corpus), std::move(store)};
}

}  // namespace causalx::testing
