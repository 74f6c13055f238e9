#include "varicart/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "varicart/config.hpp"

namespace varicart {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (l2 < 0.0) throw ConfigError("l2 must be >= 0");
  features.validate();
}

void TrainConfig::apply(const KeyValueConfig& kv, const std::string& prefix) {
  if (auto v = kv.get_int(prefix + "epochs")) epochs = static_cast<int>(*v);
  if (auto v = kv.get_double(prefix + "learning_rate")) learning_rate = *v;
  if (auto v = kv.get_int(prefix + "seed")) seed = static_cast<std::uint64_t>(*v);
  if (auto v = kv.get_double(prefix + "l2")) l2 = *v;
  if (auto v = kv.get_bool(prefix + "full_dataset")) full_dataset = *v;
  if (auto v = kv.get_int(prefix + "hash_dim")) features.hash_dim = static_cast<std::uint64_t>(*v);
  auto range = [&](const std::string& key, NgramRange& r) {
    if (auto v = kv.get_int_list(prefix + key)) {
      if (v->size() != 2) throw ConfigError(prefix + key + " must be [min, max]");
      r = {static_cast<int>((*v)[0]), static_cast<int>((*v)[1])};
    }
  };
  range("word_ngrams", features.word_ngrams);
  range("char_ngrams", features.char_ngrams);
  validate();
}

LinearModel::LinearModel(std::vector<VarietyLabel> label_order, FeatureConfig features)
    : labels_(std::move(label_order)), features_(features) {
  if (labels_.size() < 2) throw ConfigError("a model needs at least two labels");
  weights_.assign(labels_.size() * features.hash_dim, 0.0);
  bias_.assign(labels_.size(), 0.0);
}

std::vector<double> LinearModel::logits(const FeatureVector& x) const {
  std::vector<double> z(bias_);
  const std::uint64_t d = hash_dim();
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    const double* w = weights_.data() + k * d;
    double acc = z[k];
    for (std::size_t n = 0; n < x.nnz(); ++n) acc += w[x.index[n]] * x.value[n];
    z[k] = acc;
  }
  return z;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - m);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> LinearModel::predict_proba(const FeatureVector& x) const { return softmax(logits(x)); }

std::size_t LinearModel::predict(const FeatureVector& x) const {
  const auto z = logits(x);
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

std::vector<double> predict_proba(const LinearModel& model, std::string_view text) {
  return model.predict_proba(model.featurizer().extract(text));
}

// ------------------------------------------------------------ checkpoint

namespace {

constexpr char kMagic[4] = {'V', 'C', 'M', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    int c = in.get();
    if (c == std::char_traits<char>::eof()) throw DataError("model checkpoint is truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}
std::uint32_t get_u32(std::istream& in) { return static_cast<std::uint32_t>(get_le(in, 4)); }
std::uint64_t get_u64(std::istream& in) { return get_le(in, 8); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

// Layout, all little-endian: "VCM1", u32 label count, per label u32 length
// + UTF-8 bytes, u64 hash_dim, u32 word min/max, u32 char min/max,
// f64 bias[labels], f64 weights[labels][hash_dim].
void LinearModel::save(std::ostream& out) const {
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(labels_.size()));
  for (const auto& l : labels_) {
    put_u32(out, static_cast<std::uint32_t>(l.code().size()));
    out.write(l.code().data(), static_cast<std::streamsize>(l.code().size()));
  }
  const auto& fc = features_.config();
  put_u64(out, fc.hash_dim);
  put_u32(out, static_cast<std::uint32_t>(fc.word_ngrams.min));
  put_u32(out, static_cast<std::uint32_t>(fc.word_ngrams.max));
  put_u32(out, static_cast<std::uint32_t>(fc.char_ngrams.min));
  put_u32(out, static_cast<std::uint32_t>(fc.char_ngrams.max));
  for (double b : bias_) put_f64(out, b);
  for (double w : weights_) put_f64(out, w);
  if (!out) throw DataError("failed to write model checkpoint");
}

LinearModel LinearModel::load(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || !std::equal(magic, magic + 4, kMagic)) throw DataError("not a VCM1 model checkpoint");
  const std::uint32_t n = get_u32(in);
  if (n < 2 || n > 1024) throw DataError("model checkpoint has an implausible label count");
  std::vector<VarietyLabel> labels;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t len = get_u32(in);
    if (len > 4096) throw DataError("model checkpoint label is too long");
    std::string code(len, '\0');
    in.read(code.data(), len);
    if (!in) throw DataError("model checkpoint is truncated");
    labels.emplace_back(code);
  }
  FeatureConfig fc;
  fc.hash_dim = get_u64(in);
  fc.word_ngrams.min = static_cast<int>(get_u32(in));
  fc.word_ngrams.max = static_cast<int>(get_u32(in));
  fc.char_ngrams.min = static_cast<int>(get_u32(in));
  fc.char_ngrams.max = static_cast<int>(get_u32(in));
  try {
    fc.validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("model checkpoint: ") + e.what());
  }
  LinearModel m(std::move(labels), fc);
  for (auto& b : m.bias_) b = get_f64(in);
  for (auto& w : m.weights_) w = get_f64(in);
  return m;
}

void LinearModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model '" + path.string() + "'");
  save(out);
}

LinearModel LinearModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model '" + path.string() + "'");
  return load(in);
}

// ------------------------------------------------------------ gradients

namespace {

// p - onehot(y)
std::vector<double> residual(const LinearModel& m, const FeatureVector& x, std::size_t y) {
  auto r = m.predict_proba(x);
  r[y] -= 1.0;
  return r;
}

void sgd_step(LinearModel& m, const FeatureVector& x, std::size_t y, double lr, double l2) {
  const auto r = residual(m, x, y);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      double& w = m.weight(k, x.index[n]);
      w -= lr * (r[k] * x.value[n] + l2 * w);
    }
  }
  for (std::size_t k = 0; k < r.size(); ++k) m.bias(k) -= lr * r[k];
}

}  // namespace

double example_loss(const LinearModel& m, const FeatureVector& x, std::size_t y, double l2) {
  const auto z = m.logits(x);
  const double zmax = *std::max_element(z.begin(), z.end());
  double lse = 0.0;
  for (double v : z) lse += std::exp(v - zmax);
  lse = zmax + std::log(lse);
  double reg = 0.0;
  for (std::size_t k = 0; k < m.num_labels(); ++k)
    for (std::uint32_t f = 0; f < m.hash_dim(); ++f) reg += m.weight(k, f) * m.weight(k, f);
  return lse - z[y] + 0.5 * l2 * reg;
}

Gradient example_gradient(const LinearModel& m, const FeatureVector& x, std::size_t y, double l2) {
  const auto r = residual(m, x, y);
  const std::uint64_t d = m.hash_dim();
  Gradient g;
  g.weights.assign(m.num_labels() * d, 0.0);
  g.bias = r;
  for (std::size_t k = 0; k < m.num_labels(); ++k)
    for (std::uint32_t f = 0; f < d; ++f) g.weights[k * d + f] = l2 * m.weight(k, f);
  for (std::size_t n = 0; n < x.nnz(); ++n)
    for (std::size_t k = 0; k < m.num_labels(); ++k) g.weights[k * d + x.index[n]] += r[k] * x.value[n];
  return g;
}

// ------------------------------------------------------------ probability pass

void probability_pass(const LinearModel& model, const std::vector<FeatureVector>& xs, double* out) {
  const std::size_t k = model.num_labels();
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto p = model.predict_proba(xs[static_cast<std::size_t>(i)]);
    std::copy(p.begin(), p.end(), out + static_cast<std::size_t>(i) * k);
  }
}

namespace serial {
void probability_pass(const LinearModel& model, const std::vector<FeatureVector>& xs, double* out) {
  const std::size_t k = model.num_labels();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto p = model.predict_proba(xs[i]);
    std::copy(p.begin(), p.end(), out + i * k);
  }
}
}  // namespace serial

// ------------------------------------------------------------ training

namespace {

std::vector<FeatureVector> featurize_all(const Featurizer& f, const std::vector<const Instance*>& inst) {
  std::vector<FeatureVector> xs(inst.size());
  const auto n = static_cast<std::ptrdiff_t>(inst.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) xs[i] = f.extract(inst[i]->text());
  return xs;
}

std::vector<VarietyLabel> sorted_varieties(const LabelSet& labels) {
  std::vector<VarietyLabel> v = {labels.variety_a, labels.variety_b};
  std::sort(v.begin(), v.end());
  return v;
}

template <typename AfterEpoch>
void fit(LinearModel& model, const std::vector<FeatureVector>& xs, const std::vector<std::size_t>& ys,
         const TrainConfig& config, AfterEpoch&& after_epoch) {
  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 1; e <= config.epochs; ++e) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);
    for (std::size_t i : order) sgd_step(model, xs[i], ys[i], config.learning_rate, config.l2);
    after_epoch(e);
  }
}

std::vector<const Instance*> training_instances(const Dataset& dataset, bool full) {
  std::vector<const Instance*> out;
  for (const auto& inst : dataset.instances())
    if (full || inst.split == Split::train) out.push_back(&inst);
  return out;
}

std::vector<std::size_t> label_indices(const std::vector<const Instance*>& inst,
                                       const std::vector<VarietyLabel>& order) {
  std::vector<std::size_t> ys;
  ys.reserve(inst.size());
  for (const auto* i : inst) {
    if (!i->train_label) throw DataError("instance '" + i->id + "' has no train label; assign single labels first");
    ys.push_back(static_cast<std::size_t>(std::find(order.begin(), order.end(), *i->train_label) - order.begin()));
  }
  return ys;
}

void require_two_classes(const std::vector<std::size_t>& ys) {
  if (ys.empty()) throw DataError("cannot train on an empty dataset");
  if (std::set<std::size_t>(ys.begin(), ys.end()).size() < 2)
    throw DataError("training data covers a single class");
}

}  // namespace

TrainResult train_with_dynamics(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  const auto inst = training_instances(dataset, config.full_dataset);
  const auto order = sorted_varieties(dataset.labels());
  const auto ys = label_indices(inst, order);
  require_two_classes(ys);

  LinearModel model(order, config.features);
  const auto xs = featurize_all(model.featurizer(), inst);

  std::vector<std::string> ids;
  ids.reserve(inst.size());
  for (const auto* i : inst) ids.push_back(i->id);
  EpochProbabilityLog log(order, std::move(ids), ys, config.epochs);

  std::vector<double> buffer(xs.size() * order.size());
  fit(model, xs, ys, config, [&](int epoch) {
    probability_pass(model, xs, buffer.data());
    for (std::size_t i = 0; i < xs.size(); ++i)
      std::copy_n(buffer.data() + i * order.size(), order.size(), log.mutable_row(i, epoch));
  });
  return {std::move(model), std::move(log)};
}

std::vector<GroupF1> per_group_f1(const EpochProbabilityLog& log, const Dataset& dataset) {
  const std::size_t k = log.num_labels();
  std::vector<char> common(log.num_instances());
  std::vector<std::size_t> gold(log.num_instances());
  for (std::size_t i = 0; i < log.num_instances(); ++i) {
    const Instance& inst = dataset.at(log.instance_ids()[i]);
    if (!inst.train_label) throw DataError("instance '" + inst.id + "' has no train label");
    auto it = std::find(log.label_order().begin(), log.label_order().end(), *inst.train_label);
    if (it == log.label_order().end()) throw DataError("train label of '" + inst.id + "' is not in the log");
    gold[i] = static_cast<std::size_t>(it - log.label_order().begin());
    common[i] = inst.is_common;
  }

  std::vector<GroupF1> out;
  for (int e = 1; e <= log.epochs(); ++e) {
    // [group][label] counts
    std::vector<std::vector<std::size_t>> tp(2, std::vector<std::size_t>(k)), fp = tp, fn = tp;
    std::size_t group_size[2] = {0, 0};
    for (std::size_t i = 0; i < log.num_instances(); ++i) {
      const double* p = log.row(i, e);
      const auto pred = static_cast<std::size_t>(std::max_element(p, p + k) - p);
      const int g = common[i] ? 0 : 1;
      ++group_size[g];
      if (pred == gold[i]) {
        ++tp[g][pred];
      } else {
        ++fp[g][pred];
        ++fn[g][gold[i]];
      }
    }
    auto macro = [&](int g) -> std::optional<double> {
      if (group_size[g] == 0) return std::nullopt;
      double sum = 0.0;
      int used = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t denom = 2 * tp[g][j] + fp[g][j] + fn[g][j];
        if (denom == 0) continue;
        sum += 2.0 * static_cast<double>(tp[g][j]) / static_cast<double>(denom);
        ++used;
      }
      return sum / used;
    };
    out.push_back({e, macro(0), macro(1)});
  }
  return out;
}

// ------------------------------------------------------------ one-vs-rest

namespace {

// truth/pred: bit j set when variety j (sorted order) is in the set.
ClassificationScores multilabel_scores(const std::vector<unsigned>& truth, const std::vector<unsigned>& pred) {
  ClassificationScores s;
  const double n = static_cast<double>(truth.size());
  std::size_t exact = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) exact += truth[i] == pred[i];
  s.accuracy = n > 0 ? 100.0 * static_cast<double>(exact) / n : 0.0;
  for (unsigned bit = 0; bit < 2; ++bit) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool t = (truth[i] >> bit) & 1u;
      const bool p = (pred[i] >> bit) & 1u;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double prec = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double rec = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    s.precision += 50.0 * prec;
    s.recall += 50.0 * rec;
    s.f1 += 50.0 * f1;
  }
  return s;
}

}  // namespace

OneVsRestReport train_one_vs_rest(const Dataset& input, const TrainConfig& config) {
  config.validate();
  bool unassigned = false;
  for (const auto& i : input.instances()) unassigned |= !i.train_label.has_value();
  const Dataset dataset = unassigned ? assign_single_labels(input, config.seed) : input;
  if (dataset.empty()) throw DataError("cannot train on an empty dataset");

  const auto order = sorted_varieties(dataset.labels());
  std::vector<const Instance*> train, eval;
  OneVsRestReport report;
  const auto test = dataset.in_split(Split::test);
  if (!test.empty()) {
    eval = test;
    for (const auto& i : dataset.instances())
      if (i.split != Split::test) train.push_back(&i);
    report.eval_source = "test split";
  } else if (dataset.size() >= 20) {
    std::vector<const Instance*> all;
    for (const auto& i : dataset.instances()) all.push_back(&i);
    SplitMix64 rng(config.seed ^ 0x5EEDF00DULL);
    for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[rng.next_below(i)]);
    const std::size_t holdout = all.size() / 5;
    eval.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(holdout));
    train.assign(all.begin() + static_cast<std::ptrdiff_t>(holdout), all.end());
    report.eval_source = "holdout";
  } else {
    for (const auto& i : dataset.instances()) train.push_back(&i);
    eval = train;
    report.eval_source = "training data";
  }
  report.train_count = train.size();
  report.eval_count = eval.size();

  const auto ys = label_indices(train, order);
  require_two_classes(ys);
  auto truth_bits = [&](const Instance* i) -> unsigned {
    if (i->is_common) return 3u;
    return *i->train_label == order[0] ? 1u : 2u;
  };

  const Featurizer featurizer(config.features);
  const auto train_x = featurize_all(featurizer, train);
  const auto eval_x = featurize_all(featurizer, eval);

  std::vector<unsigned> truth;
  for (const auto* i : eval) truth.push_back(truth_bits(i));

  // Three independent models: the multinomial one and one binary per variety.
  std::vector<LinearModel> models;
  models.emplace_back(order, config.features);
  for (const auto& l : order) models.emplace_back(std::vector<VarietyLabel>{l, VarietyLabel("rest:" + l.code())}, config.features);
  std::vector<std::vector<std::size_t>> targets(3);
  targets[0] = ys;
  for (std::size_t j = 0; j < 2; ++j)
    for (const auto* i : train) targets[j + 1].push_back(((truth_bits(i) >> j) & 1u) ? 0 : 1);

#pragma omp parallel for schedule(static, 1)
  for (int m = 0; m < 3; ++m) fit(models[static_cast<std::size_t>(m)], train_x, targets[static_cast<std::size_t>(m)], config, [](int) {});

  std::vector<unsigned> single, multi;
  for (const auto& x : eval_x) {
    single.push_back(1u << models[0].predict(x));
    unsigned bits = 0;
    for (std::size_t j = 0; j < 2; ++j)
      if (models[j + 1].predict_proba(x)[0] > 0.5) bits |= 1u << j;
    multi.push_back(bits);
  }
  report.single_class = multilabel_scores(truth, single);
  report.multi_class = multilabel_scores(truth, multi);
  return report;
}

}  // namespace varicart
