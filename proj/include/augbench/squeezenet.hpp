#pragma once

// SqueezeNet-style classifier for 64x64 sign images. A stride-2 3x3 stem and
// max pool, a stack of fire modules with a max pool after every second one
// (three pooling stages in total), then a 1x1 class convolution, global
// average pooling and softmax.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "augbench/checkpoint.hpp"
#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/nn/adam.hpp"
#include "augbench/nn/layers.hpp"
#include "augbench/nn/loss.hpp"
#include "augbench/rng.hpp"

namespace augbench {

struct FireWidth {
  int squeeze;
  int expand;  // each of the 1x1 and 3x3 branches; the module outputs 2 * expand channels
  bool operator==(const FireWidth&) const = default;
};

inline std::vector<FireWidth> default_fire_widths() { return {{16, 32}, {16, 32}, {32, 64}, {32, 64}, {48, 96}}; }

struct ClassifierConfig {
  int num_classes = kCircularClasses;
  std::vector<FireWidth> fire_module_widths = default_fire_widths();
  int input_size = kImageSize;
  int stem_channels = 32;
};

struct TrainHyperparams {
  int epochs = 100;
  double learning_rate = 0.01;
  int batch_size = 64;
};

struct TrainHistory {
  std::vector<double> loss;
  std::vector<double> accuracy;
};

inline void validate(const ClassifierConfig& c) {
  if (c.num_classes < 2) throw ConfigError("classifier num_classes must be >= 2, got " + std::to_string(c.num_classes));
  if (c.fire_module_widths.empty()) throw ConfigError("classifier needs at least one fire module");
  for (std::size_t i = 0; i < c.fire_module_widths.size(); ++i) {
    const auto& f = c.fire_module_widths[i];
    if (f.squeeze < 1 || f.expand < 1) {
      throw ConfigError("fire module " + std::to_string(i) + " has non-positive width (" + std::to_string(f.squeeze) +
                        ", " + std::to_string(f.expand) + ")");
    }
  }
  if (c.stem_channels < 1) throw ConfigError("classifier stem_channels must be >= 1");
  if (c.input_size < 16) throw ConfigError("classifier input_size must be >= 16");
}

inline void validate(const TrainHyperparams& h) {
  if (h.epochs < 1) throw ConfigError("classifier epochs must be >= 1");
  if (!(h.learning_rate > 0.0)) throw ConfigError("classifier learning_rate must be > 0");
  if (h.batch_size < 1) throw ConfigError("classifier batch_size must be >= 1");
}

template <typename T>
class FireModule {
 public:
  struct Cache {
    typename nn::Conv2d<T>::Cache squeeze, expand1, expand3;
    nn::Tensor<T> squeezed, out;
  };

  FireModule() = default;
  FireModule(int in, FireWidth w, const std::string& name)
      : squeeze_(in, w.squeeze, 1, 1, 0, name + ".squeeze"),
        expand1_(w.squeeze, w.expand, 1, 1, 0, name + ".expand1x1"),
        expand3_(w.squeeze, w.expand, 3, 1, 1, name + ".expand3x3") {}

  int out_channels() const { return expand1_.out_channels() + expand3_.out_channels(); }

  void collect(nn::ParameterList<T>& out) {
    squeeze_.collect(out);
    expand1_.collect(out);
    expand3_.collect(out);
  }

  nn::Tensor<T> forward(const nn::Tensor<T>& x, Cache* cache) const {
    nn::Tensor<T> s = nn::relu(squeeze_.forward(x, cache ? &cache->squeeze : nullptr));
    nn::Tensor<T> out = nn::relu(nn::concat_channels(expand1_.forward(s, cache ? &cache->expand1 : nullptr),
                                                     expand3_.forward(s, cache ? &cache->expand3 : nullptr)));
    if (cache) {
      cache->squeezed = std::move(s);
      cache->out = out;
    }
    return out;
  }

  nn::Tensor<T> backward(const nn::Tensor<T>& grad, const Cache& cache) {
    nn::Tensor<T> g = nn::relu_backward(grad, cache.out);
    nn::Tensor<T> g1, g3;
    nn::split_channels(g, expand1_.out_channels(), g1, g3);
    nn::Tensor<T> gs = expand1_.backward(g1, cache.expand1);
    nn::add_into(gs, expand3_.backward(g3, cache.expand3));
    gs = nn::relu_backward(gs, cache.squeezed);
    return squeeze_.backward(gs, cache.squeeze);
  }

 private:
  nn::Conv2d<T> squeeze_, expand1_, expand3_;
};

template <typename T>
class SqueezeNet {
 public:
  static constexpr int kPoolingStages = 3;

  struct Cache {
    typename nn::Conv2d<T>::Cache stem;
    nn::Tensor<T> stem_out;
    std::vector<typename nn::MaxPool2x2<T>::Cache> pool;
    std::vector<typename FireModule<T>::Cache> fire;
    typename nn::Conv2d<T>::Cache classifier;
    int final_h = 0, final_w = 0;
  };

  SqueezeNet() = default;
  SqueezeNet(const ClassifierConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    validate(cfg);
    stem_ = nn::Conv2d<T>(3, cfg.stem_channels, 3, 2, 1, "classifier.stem");
    int in = cfg.stem_channels;
    for (std::size_t i = 0; i < cfg.fire_module_widths.size(); ++i) {
      fire_.emplace_back(in, cfg.fire_module_widths[i], "classifier.fire" + std::to_string(i));
      in = fire_.back().out_channels();
    }
    head_ = nn::Conv2d<T>(in, cfg.num_classes, 1, 1, 0, "classifier.head");
    // Kaiming-uniform weights for ReLU networks, zero biases.
    Rng rng(derive_seed(seed, 0x5E7));
    for (auto* p : parameters()) {
      if (!p->name.ends_with(".weight")) continue;
      const double fan_in = static_cast<double>(p->value.c) * p->value.h * p->value.w;
      nn::init_uniform(p->value, rng, std::sqrt(6.0 / fan_in));
    }
  }

  const ClassifierConfig& config() const { return cfg_; }

  nn::ParameterList<T> parameters() {
    nn::ParameterList<T> out;
    stem_.collect(out);
    for (auto& f : fire_) f.collect(out);
    head_.collect(out);
    return out;
  }

  /// Fire modules followed by a pooling stage (the stem is always followed by one).
  bool pool_after_fire(std::size_t i) const {
    return i % 2 == 1 && static_cast<int>(i / 2) + 1 < kPoolingStages && i + 1 < fire_.size();
  }

  /// x: (N,3,S,S) in [-1,1]. Returns class logits (N,K,1,1).
  nn::Tensor<T> forward(const nn::Tensor<T>& x, Cache* cache) const {
    if (x.c != 3 || x.h != cfg_.input_size || x.w != cfg_.input_size) {
      throw ValidationError("classifier expects (N,3," + std::to_string(cfg_.input_size) + "," +
                            std::to_string(cfg_.input_size) + ") input, got " + x.shape_string());
    }
    if (cache) {
      cache->pool.clear();
      cache->fire.assign(fire_.size(), {});
    }
    auto pool = [&](const nn::Tensor<T>& t) {
      if (!cache) return nn::MaxPool2x2<T>::forward(t, nullptr);
      cache->pool.emplace_back();
      return nn::MaxPool2x2<T>::forward(t, &cache->pool.back());
    };
    nn::Tensor<T> h = nn::relu(stem_.forward(x, cache ? &cache->stem : nullptr));
    if (cache) cache->stem_out = h;
    h = pool(h);
    for (std::size_t i = 0; i < fire_.size(); ++i) {
      h = fire_[i].forward(h, cache ? &cache->fire[i] : nullptr);
      if (pool_after_fire(i)) h = pool(h);
    }
    nn::Tensor<T> z = head_.forward(h, cache ? &cache->classifier : nullptr);
    if (cache) {
      cache->final_h = z.h;
      cache->final_w = z.w;
    }
    return nn::global_average_pool(z);
  }

  void backward(const nn::Tensor<T>& grad_logits, const Cache& cache) {
    nn::Tensor<T> g = nn::global_average_pool_backward(grad_logits, cache.final_h, cache.final_w);
    g = head_.backward(g, cache.classifier);
    std::size_t pool_index = cache.pool.size();
    for (std::size_t i = fire_.size(); i-- > 0;) {
      if (pool_after_fire(i)) g = nn::MaxPool2x2<T>::backward(g, cache.pool[--pool_index]);
      g = fire_[i].backward(g, cache.fire[i]);
    }
    g = nn::MaxPool2x2<T>::backward(g, cache.pool[--pool_index]);
    g = nn::relu_backward(g, cache.stem_out);
    stem_.backward(g, cache.stem, false);
  }

  std::vector<std::vector<double>> probabilities(const nn::Tensor<T>& x) const {
    return nn::softmax_rows(forward(x, nullptr));
  }

 private:
  ClassifierConfig cfg_;
  nn::Conv2d<T> stem_;
  std::vector<FireModule<T>> fire_;
  nn::Conv2d<T> head_;
};

struct ClassifierModel {
  ClassifierConfig config;
  TrainHyperparams hyper;
  SqueezeNet<float> network;
  TrainHistory history;
};

/// Argmax; ties go to the lowest index.
inline int predict(std::span<const double> probabilities) {
  if (probabilities.empty()) throw ValidationError("predict: empty probability vector");
  int best = 0;
  for (std::size_t k = 1; k < probabilities.size(); ++k) {
    if (probabilities[k] > probabilities[best]) best = static_cast<int>(k);
  }
  return best;
}

inline int predict(const std::vector<double>& probabilities) { return predict(std::span<const double>(probabilities)); }

namespace detail {

inline nn::Tensor<float> classifier_batch(const std::vector<const Image*>& images) {
  const int h = images.front()->height(), w = images.front()->width();
  nn::Tensor<float> t(static_cast<int>(images.size()), 3, h, w);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image& img = *images[i];
    if (img.height() != h || img.width() != w) throw ValidationError("batch images differ in size");
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) t.at(static_cast<int>(i), c, y, x) = 2.0f * img.at(y, x, c) - 1.0f;
      }
    }
  }
  return t;
}

}  // namespace detail

/// Batch prediction; returns one class index per image, in order.
inline std::vector<int> predict(const ClassifierModel& model, std::span<const Image* const> images,
                                int chunk = 64) {
  std::vector<int> out;
  out.reserve(images.size());
  for (std::size_t start = 0; start < images.size(); start += chunk) {
    const std::size_t end = std::min(images.size(), start + static_cast<std::size_t>(chunk));
    std::vector<const Image*> batch(images.begin() + start, images.begin() + end);
    for (const auto& p : model.network.probabilities(detail::classifier_batch(batch))) out.push_back(predict(p));
  }
  return out;
}

inline int predict(const ClassifierModel& model, const Image& image) {
  const Image* p = &image;
  return predict(model, std::span<const Image* const>(&p, 1)).front();
}

/// Predictions for every sample of `d` (all splits), in order.
inline std::vector<int> predict(const ClassifierModel& model, const Dataset& d) {
  std::vector<const Image*> images;
  images.reserve(d.size());
  for (const auto& s : d.samples) images.push_back(s.pixels.get());
  return predict(model, std::span<const Image* const>(images));
}

using ClassifierProgress = std::function<void(int epoch, double loss, double accuracy)>;

/// Adam with softmax cross-entropy on the train split of `dataset`.
/// Initialisation and batch order derive from `seed`.
inline ClassifierModel train_classifier(const Dataset& dataset, const ClassifierConfig& config,
                                        const TrainHyperparams& hyper, std::uint64_t seed,
                                        const ClassifierProgress& progress = {}) {
  validate(config);
  validate(hyper);
  std::vector<const ImageSample*> train;
  for (const auto& s : dataset.samples) {
    if (s.split == Split::train) train.push_back(&s);
  }
  if (train.empty()) throw ValidationError("train_classifier: the training split is empty");
  for (const auto* s : train) {
    if (s->class_index < 0 || s->class_index >= config.num_classes) {
      throw ValidationError("train_classifier: label " + std::to_string(s->class_index) + " outside [0, " +
                            std::to_string(config.num_classes) + ")");
    }
  }

  ClassifierModel model{config, hyper, SqueezeNet<float>(config, derive_seed(seed, 1)), {}};
  nn::Adam<float> opt(model.network.parameters(), {hyper.learning_rate, 0.9, 0.999, 1e-8});
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  SqueezeNet<float>::Cache cache;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      std::vector<const Image*> images;
      std::vector<int> labels;
      for (std::size_t k = start; k < end; ++k) {
        images.push_back(train[order[k]]->pixels.get());
        labels.push_back(train[order[k]]->class_index);
      }
      opt.zero_grad();
      const auto logits = model.network.forward(detail::classifier_batch(images), &cache);
      const auto ce = nn::softmax_cross_entropy(logits, labels);
      if (!std::isfinite(ce.value)) {
        throw TrainingError("non-finite classifier loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                            std::to_string(start) + " (learning rate " + std::to_string(hyper.learning_rate) + ")");
      }
      model.network.backward(ce.grad, cache);
      opt.step();
      loss_sum += ce.value * static_cast<double>(end - start);
      for (std::size_t k = 0; k < labels.size(); ++k) correct += predict(ce.probabilities[k]) == labels[k];
    }
    const double n = static_cast<double>(order.size());
    model.history.loss.push_back(loss_sum / n);
    model.history.accuracy.push_back(static_cast<double>(correct) / n);
    if (progress) progress(epoch, model.history.loss.back(), model.history.accuracy.back());
  }
  return model;
}

inline void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
  Archive a;
  a.meta["kind"] = "squeezenet";
  auto widths = nlohmann::json::array();
  for (const auto& f : model.config.fire_module_widths) widths.push_back({f.squeeze, f.expand});
  a.meta["config"] = {{"num_classes", model.config.num_classes},
                      {"fire_module_widths", widths},
                      {"input_size", model.config.input_size},
                      {"stem_channels", model.config.stem_channels}};
  a.meta["hyper"] = {{"epochs", model.hyper.epochs},
                     {"learning_rate", model.hyper.learning_rate},
                     {"batch_size", model.hyper.batch_size}};
  a.meta["history"] = {{"loss", model.history.loss}, {"accuracy", model.history.accuracy}};
  append_parameters(a, const_cast<ClassifierModel&>(model).network.parameters());
  write_archive(path, a);
}

inline ClassifierModel load_classifier(const std::filesystem::path& path) {
  const Archive a = read_archive(path);
  if (a.meta.value("kind", std::string{}) != "squeezenet") {
    throw ValidationError("'" + path.string() + "' is not a classifier checkpoint");
  }
  try {
    ClassifierModel m;
    const auto& c = a.meta.at("config");
    m.config.num_classes = c.at("num_classes").get<int>();
    m.config.fire_module_widths.clear();
    for (const auto& w : c.at("fire_module_widths")) m.config.fire_module_widths.push_back({w.at(0), w.at(1)});
    m.config.input_size = c.at("input_size").get<int>();
    m.config.stem_channels = c.at("stem_channels").get<int>();
    const auto& h = a.meta.at("hyper");
    m.hyper = {h.at("epochs").get<int>(), h.at("learning_rate").get<double>(), h.at("batch_size").get<int>()};
    m.history.loss = a.meta.at("history").at("loss").get<std::vector<double>>();
    m.history.accuracy = a.meta.at("history").at("accuracy").get<std::vector<double>>();
    m.network = SqueezeNet<float>(m.config, 0);
    restore_parameters(a, m.network.parameters());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("corrupt classifier checkpoint metadata: " + std::string(e.what()));
  }
}

}  // namespace augbench
