#include "varicart/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "varicart/utf8.hpp"
#include "varicart/delimited.hpp"

namespace varicart {

namespace detail {
extern const char* const kSpanishStopwords;
}

namespace {

WordSet parse_stopwords(std::istream& in) {
  WordSet out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t");
    out.insert(utf8::encode(utf8::to_lower(utf8::decode(line.substr(b, e - b + 1)))));
  }
  return out;
}

std::string lowered(std::string_view s) { return utf8::encode(utf8::to_lower(utf8::decode(s))); }

}  // namespace

const WordSet& spanish_stopwords() {
  static const WordSet words = [] {
    std::istringstream in(detail::kSpanishStopwords);
    return parse_stopwords(in);
  }();
  return words;
}

WordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword file '" + path.string() + "'");
  return parse_stopwords(in);
}

ErrorSlice error_slice(const RankedList& ranked, const Dataset& dataset, std::size_t n) {
  if (n < 1 || n > ranked.size())
    throw ConfigError("N=" + std::to_string(n) + " is outside [1, " + std::to_string(ranked.size()) + "]");
  ErrorSlice s;
  s.n = n;
  for (std::size_t k = 0; k < n; ++k) {
    const Instance* inst = dataset.find(ranked.id(k));
    if (!inst) throw DataError("ranked id '" + ranked.id(k) + "' is not in the dataset");
    if (!inst->is_common) s.error_ids.push_back(inst->id);
  }
  return s;
}

std::vector<WordCount> top_error_words(const RankedList& ranked, const Dataset& dataset, std::size_t n,
                                       const WordSet& stopwords, const NormalizationConfig& normalization) {
  WordSet special = {"emoji"};
  for (const auto* tok : {&normalization.mention_token, &normalization.url_token})
    for (const auto& t : Featurizer::tokenize(*tok)) special.insert(t.text);

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& id : error_slice(ranked, dataset, n).error_ids)
    for (const auto& t : Featurizer::tokenize(dataset.at(id).text()))
      if (!stopwords.count(t.text) && !special.count(t.text)) ++counts[t.text];

  std::vector<WordCount> out;
  out.reserve(counts.size());
  for (auto& [w, c] : counts) out.push_back({w, c});
  std::sort(out.begin(), out.end(), [](const WordCount& a, const WordCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });
  return out;
}

namespace {

bool has_token(const std::string& text, const std::string& keyword) {
  for (const auto& t : Featurizer::tokenize(text))
    if (t.text == keyword) return true;
  return false;
}

std::string keyword_token(const std::string& keyword) {
  const auto k = lowered(keyword);
  if (k.empty()) throw ConfigError("keyword must not be empty");
  return k;
}

}  // namespace

std::vector<KeywordFraction> keyword_error_fraction(const RankedList& ranked, const Dataset& dataset,
                                                    const std::string& keyword, const std::vector<std::size_t>& grid) {
  const auto k = keyword_token(keyword);
  std::vector<KeywordFraction> out;
  for (auto n : grid) {
    const auto slice = error_slice(ranked, dataset, n);
    KeywordFraction f;
    f.n = n;
    f.errors = slice.error_ids.size();
    for (const auto& id : slice.error_ids) f.with_keyword += has_token(dataset.at(id).text(), k);
    if (f.errors) f.fraction = static_cast<double>(f.with_keyword) / static_cast<double>(f.errors);
    out.push_back(f);
  }
  return out;
}

std::optional<double> corpus_keyword_fraction(const Dataset& dataset, const std::string& keyword) {
  const auto k = keyword_token(keyword);
  std::size_t total = 0, hits = 0;
  for (const auto& i : dataset.instances()) {
    if (i.is_common) continue;
    ++total;
    hits += has_token(i.text(), k);
  }
  if (!total) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

AgreementProfile agreement_error_profile(const RankedList& ranked, const Dataset& dataset,
                                         const std::vector<std::size_t>& grid) {
  auto kind = [&](const Instance& i) -> std::optional<AgreementKind> {
    if (i.annotations.size() < 2) return std::nullopt;
    try {
      return agreement_of(i.annotations, dataset.labels());
    } catch (const DataError&) {
      return std::nullopt;  // fewer than two usable records
    }
  };
  AgreementProfile p;
  for (auto n : grid) {
    AgreementPoint pt;
    pt.n = n;
    for (const auto& id : error_slice(ranked, dataset, n).error_ids) {
      const auto k = kind(dataset.at(id));
      if (!k) {
        ++pt.unannotated;
        continue;
      }
      ++pt.errors;
      pt.partial += *k == AgreementKind::partial;
    }
    if (pt.errors) pt.fraction_partial = static_cast<double>(pt.partial) / static_cast<double>(pt.errors);
    p.points.push_back(pt);
  }
  std::size_t annotated = 0, full = 0;
  for (const auto& i : dataset.instances()) {
    if (i.is_common) continue;
    const auto k = kind(i);
    if (!k) continue;
    ++annotated;
    full += *k == AgreementKind::full;
  }
  if (annotated) p.corpus_full_rate = static_cast<double>(full) / static_cast<double>(annotated);
  return p;
}

Attribution token_attribution(const LinearModel& model, std::string_view text, const VarietyLabel& target) {
  const auto& order = model.label_order();
  const auto it = std::find(order.begin(), order.end(), target);
  if (it == order.end()) throw ConfigError("label '" + target.code() + "' is not in the model");
  const auto t = static_cast<std::size_t>(it - order.begin());
  const double k = static_cast<double>(order.size());

  auto centred_weight = [&](std::uint32_t f) {
    double mean = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) mean += model.weight(j, f);
    return model.weight(t, f) - mean / k;
  };

  Attribution a;
  double mean_bias = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) mean_bias += model.bias(j);
  a.centered_bias = model.bias(t) - mean_bias / k;

  const auto b = model.featurizer().breakdown(text);
  for (const auto& tok : b.tokens) a.tokens.push_back({tok.text, tok.begin, tok.end, 0.0});
  if (b.tokens.empty() && !b.occurrences.empty()) {
    const auto cps = utf8::to_lower(utf8::decode(text));
    a.tokens.push_back({utf8::encode(cps), 0, cps.size(), 0.0});
  }
  for (const auto& o : b.occurrences) {
    const std::size_t slot = o.owner < 0 ? 0 : static_cast<std::size_t>(o.owner);
    a.tokens[slot].contribution += o.value * centred_weight(o.index);
  }

  const auto z = model.logits(model.featurizer().extract(text));
  double mean_z = 0.0;
  for (double v : z) mean_z += v;
  a.centered_logit = z[t] - mean_z / k;
  return a;
}

void write_word_counts_csv(std::ostream& out, const std::vector<WordCount>& counts) {
  write_row(out, {"word", "count"}, ',');
  for (const auto& c : counts) write_row(out, {c.word, std::to_string(c.count)}, ',');
}

void write_keyword_fraction_csv(std::ostream& out, const std::vector<KeywordFraction>& rows) {
  write_row(out, {"n", "fraction", "errors", "with_keyword"}, ',');
  for (const auto& r : rows)
    write_row(out,
              {std::to_string(r.n), r.fraction ? format_double(*r.fraction) : "", std::to_string(r.errors),
               std::to_string(r.with_keyword)},
              ',');
}

void write_agreement_profile_csv(std::ostream& out, const AgreementProfile& profile) {
  write_row(out, {"n", "fraction_partial", "errors", "partial", "unannotated", "corpus_full_rate"}, ',');
  const std::string corpus = profile.corpus_full_rate ? format_double(*profile.corpus_full_rate) : "";
  for (const auto& p : profile.points)
    write_row(out,
              {std::to_string(p.n), p.fraction_partial ? format_double(*p.fraction_partial) : "",
               std::to_string(p.errors), std::to_string(p.partial), std::to_string(p.unannotated), corpus},
              ',');
}

void write_attribution_jsonl(std::ostream& out, const Attribution& a) {
  for (const auto& t : a.tokens) {
    nlohmann::json j = {{"token", t.token}, {"begin", t.begin}, {"end", t.end}, {"score", t.contribution}};
    out << j.dump() << '\n';
  }
}

}  // namespace varicart
