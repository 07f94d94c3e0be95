#pragma once

// Conditional image-to-image GAN: U-Net style encoder-decoder generator and a
// patch discriminator, trained with a conditional adversarial loss plus a
// weighted L1 reconstruction term. There is no noise input, so generation is
// a deterministic function of the condition image.
//
// Architecture defaults (LeakyReLU 0.2 in the encoder, ReLU in the decoder,
// instance normalisation on inner layers, tanh output, N(0, 0.02) weights,
// Adam lr 2e-4 betas (0.5, 0.999), L1 weight 100) follow common pix2pix
// practice.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augbench/checkpoint.hpp"
#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/nn/adam.hpp"
#include "augbench/nn/layers.hpp"
#include "augbench/nn/loss.hpp"
#include "augbench/rng.hpp"
#include "augbench/sign_renderer.hpp"

namespace augbench {

struct GeneratorConfig {
  int n_conv_layers = 4;
  int base_channels = 32;
  int input_size = kImageSize;
};

struct DiscriminatorConfig {
  int n_conv_layers = 3;
  int base_channels = 32;
};

struct GanHyperparams {
  double learning_rate = 2e-4;
  double l1_weight = 100.0;
  int epochs = 20;
  int batch_size = 16;
  double beta1 = 0.5;
  double beta2 = 0.999;
};

inline bool is_sweep_generator_depth(int n) { return n == 2 || n == 4 || n == 6 || n == 8 || n == 10; }

inline void validate(const GeneratorConfig& c) {
  if (c.n_conv_layers < 2 || c.n_conv_layers % 2 != 0) {
    throw ConfigError("generator n_conv_layers must be an even number >= 2, got " + std::to_string(c.n_conv_layers));
  }
  if (!is_sweep_generator_depth(c.n_conv_layers)) {
    std::clog << "warning: generator depth " << c.n_conv_layers << " is outside the sweep grid {2,4,6,8,10}\n";
  }
  if (c.base_channels < 1) throw ConfigError("generator base_channels must be >= 1");
  if (c.input_size < 4 || (c.input_size & (c.input_size - 1)) != 0) {
    throw ConfigError("generator input_size must be a power of two >= 4");
  }
}

inline void validate(const DiscriminatorConfig& c) {
  if (c.n_conv_layers != 3 && c.n_conv_layers != 4) {
    throw ConfigError("discriminator n_conv_layers must be 3 or 4, got " + std::to_string(c.n_conv_layers));
  }
  if (c.base_channels < 1) throw ConfigError("discriminator base_channels must be >= 1");
}

inline void validate(const GanHyperparams& h) {
  if (h.epochs < 1) throw ConfigError("GAN epochs must be >= 1");
  if (h.batch_size < 1) throw ConfigError("GAN batch_size must be >= 1");
  if (!(h.learning_rate > 0.0)) throw ConfigError("GAN learning_rate must be > 0");
  if (!(h.l1_weight >= 0.0)) throw ConfigError("GAN l1_weight must be >= 0");
}

// Image <-> tensor, mapping [0,1] pixels to [-1,1] network range.
template <typename T>
nn::Tensor<T> images_to_tensor(const std::vector<const Image*>& images) {
  const int h = images.front()->height(), w = images.front()->width();
  nn::Tensor<T> t(static_cast<int>(images.size()), 3, h, w);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image& img = *images[i];
    if (img.height() != h || img.width() != w) throw ValidationError("batch images differ in size");
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) t.at(static_cast<int>(i), c, y, x) = static_cast<T>(2.0f * img.at(y, x, c) - 1.0f);
      }
    }
  }
  return t;
}

template <typename T>
Image tensor_to_image(const nn::Tensor<T>& t, int index) {
  Image img(t.h, t.w);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < t.h; ++y) {
      for (int x = 0; x < t.w; ++x) img.at(y, x, c) = static_cast<float>((t.at(index, c, y, x) + T(1)) / T(2));
    }
  }
  img.clip();
  return img;
}

/// Encoder-decoder generator with skip connections. Encoder layer i halves the
/// resolution with a 4x4 stride-2 convolution while the resolution allows it;
/// once the bottleneck reaches 1x1, further layers are 3x3 stride-1. The
/// decoder mirrors the encoder layer for layer.
template <typename T>
class Generator {
 public:
  struct Level {
    int channels;
    int spatial;
    bool strided;
  };

  struct Cache {
    std::vector<typename nn::Conv2d<T>::Cache> enc_conv;
    std::vector<typename nn::InstanceNorm2d<T>::Cache> enc_norm;
    std::vector<nn::Tensor<T>> enc_out;
    std::vector<nn::Tensor<T>> dec_in;
    std::vector<typename nn::ConvTranspose2d<T>::Cache> dec_up;
    std::vector<typename nn::Conv2d<T>::Cache> dec_same;
    std::vector<typename nn::InstanceNorm2d<T>::Cache> dec_norm;
    nn::Tensor<T> output;
  };

  Generator() = default;
  Generator(const GeneratorConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    validate(cfg);
    const int n = cfg.n_conv_layers;
    int spatial = cfg.input_size;
    for (int i = 0; i < n; ++i) {
      const bool strided = spatial >= 2 && spatial % 2 == 0;
      if (strided) spatial /= 2;
      levels_.push_back({cfg.base_channels * std::min(1 << std::min(i, 3), 8), spatial, strided});
    }
    enc_conv_.resize(n);
    enc_norm_.resize(n);
    dec_up_.resize(n);
    dec_same_.resize(n);
    dec_norm_.resize(n);
    for (int i = 0; i < n; ++i) {
      const std::string name = "generator.enc" + std::to_string(i);
      const int in = i == 0 ? 3 : levels_[i - 1].channels;
      const auto& lv = levels_[i];
      enc_conv_[i] = lv.strided ? nn::Conv2d<T>(in, lv.channels, 4, 2, 1, name)
                                : nn::Conv2d<T>(in, lv.channels, 3, 1, 1, name);
      if (i > 0 && i < n - 1 && lv.spatial > 1) enc_norm_[i].emplace(lv.channels, name + ".norm");
    }
    for (int i = n - 1; i >= 0; --i) {
      const std::string name = "generator.dec" + std::to_string(i);
      const int in = i == n - 1 ? levels_[i].channels : 2 * levels_[i].channels;
      const int out = i == 0 ? 3 : levels_[i - 1].channels;
      const int out_spatial = i == 0 ? cfg.input_size : levels_[i - 1].spatial;
      if (levels_[i].strided) {
        dec_up_[i].emplace(in, out, 4, 2, 1, name);
      } else {
        dec_same_[i].emplace(in, out, 3, 1, 1, name);
      }
      if (i > 0 && out_spatial > 1) dec_norm_[i].emplace(out, name + ".norm");
    }
    Rng rng(derive_seed(seed, 0x6E6));
    for (auto* p : parameters()) {
      if (p->name.ends_with(".weight")) nn::init_normal(p->value, rng, 0.02);
    }
  }

  const GeneratorConfig& config() const { return cfg_; }
  const std::vector<Level>& levels() const { return levels_; }
  int bottleneck_size() const { return levels_.back().spatial; }

  nn::ParameterList<T> parameters() {
    nn::ParameterList<T> out;
    for (std::size_t i = 0; i < enc_conv_.size(); ++i) {
      enc_conv_[i].collect(out);
      if (enc_norm_[i]) enc_norm_[i]->collect(out);
    }
    for (std::size_t k = dec_up_.size(); k-- > 0;) {
      if (dec_up_[k]) dec_up_[k]->collect(out);
      if (dec_same_[k]) dec_same_[k]->collect(out);
      if (dec_norm_[k]) dec_norm_[k]->collect(out);
    }
    return out;
  }

  /// x in [-1,1]; returns tanh output in [-1,1] with the same shape.
  nn::Tensor<T> forward(const nn::Tensor<T>& x, Cache* cache) const {
    const int n = static_cast<int>(levels_.size());
    if (x.c != 3 || x.h != cfg_.input_size || x.w != cfg_.input_size) {
      throw ValidationError("generator expects (N,3," + std::to_string(cfg_.input_size) + "," +
                            std::to_string(cfg_.input_size) + ") input, got " + x.shape_string());
    }
    if (cache) {
      cache->enc_conv.assign(n, {});
      cache->enc_norm.assign(n, {});
      cache->dec_in.assign(n, {});
      cache->dec_up.assign(n, {});
      cache->dec_same.assign(n, {});
      cache->dec_norm.assign(n, {});
    }
    std::vector<nn::Tensor<T>> enc(n);
    for (int i = 0; i < n; ++i) {
      const nn::Tensor<T>& prev = i == 0 ? x : enc[i - 1];
      nn::Tensor<T> a = i == 0 ? prev : nn::leaky_relu(prev, T(0.2));
      nn::Tensor<T> z = enc_conv_[i].forward(a, cache ? &cache->enc_conv[i] : nullptr);
      enc[i] = enc_norm_[i] ? enc_norm_[i]->forward(z, cache ? &cache->enc_norm[i] : nullptr) : std::move(z);
    }
    nn::Tensor<T> u = enc[n - 1];
    nn::Tensor<T> out;
    for (int i = n - 1; i >= 0; --i) {
      nn::Tensor<T> r = nn::relu(u);
      if (cache) cache->dec_in[i] = std::move(u);
      nn::Tensor<T> z = dec_up_[i] ? dec_up_[i]->forward(r, cache ? &cache->dec_up[i] : nullptr)
                                   : dec_same_[i]->forward(r, cache ? &cache->dec_same[i] : nullptr);
      if (i == 0) {
        out = nn::tanh(z);
        break;
      }
      nn::Tensor<T> d = dec_norm_[i] ? dec_norm_[i]->forward(z, cache ? &cache->dec_norm[i] : nullptr) : std::move(z);
      u = nn::concat_channels(d, enc[i - 1]);
    }
    if (cache) {
      cache->enc_out = std::move(enc);
      cache->output = out;
    }
    return out;
  }

  /// Accumulates parameter gradients given d(loss)/d(output).
  void backward(const nn::Tensor<T>& grad_out, const Cache& cache) {
    const int n = static_cast<int>(levels_.size());
    std::vector<nn::Tensor<T>> grad_enc(n);
    nn::Tensor<T> grad_d;
    nn::Tensor<T> gz = nn::tanh_backward(grad_out, cache.output);
    for (int i = 0; i < n; ++i) {
      if (i > 0) gz = dec_norm_[i] ? dec_norm_[i]->backward(grad_d, cache.dec_norm[i]) : grad_d;
      nn::Tensor<T> gr = dec_up_[i] ? dec_up_[i]->backward(gz, cache.dec_up[i]) : dec_same_[i]->backward(gz, cache.dec_same[i]);
      nn::Tensor<T> gu = nn::relu_backward(gr, cache.dec_in[i]);
      if (i == n - 1) {
        nn::add_into(grad_enc[i], gu);
      } else {
        nn::Tensor<T> skip;
        nn::split_channels(gu, levels_[i].channels, grad_d, skip);
        nn::add_into(grad_enc[i], skip);
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      nn::Tensor<T> g = enc_norm_[i] ? enc_norm_[i]->backward(grad_enc[i], cache.enc_norm[i]) : grad_enc[i];
      nn::Tensor<T> ga = enc_conv_[i].backward(g, cache.enc_conv[i], i > 0);
      if (i > 0) nn::add_into(grad_enc[i - 1], nn::leaky_relu_backward(ga, cache.enc_out[i - 1], T(0.2)));
    }
  }

 private:
  GeneratorConfig cfg_;
  std::vector<Level> levels_;
  std::vector<nn::Conv2d<T>> enc_conv_;
  std::vector<std::optional<nn::InstanceNorm2d<T>>> enc_norm_;
  std::vector<std::optional<nn::ConvTranspose2d<T>>> dec_up_;
  std::vector<std::optional<nn::Conv2d<T>>> dec_same_;
  std::vector<std::optional<nn::InstanceNorm2d<T>>> dec_norm_;
};

/// Patch discriminator over the channel-wise (condition, candidate) pair.
/// Every layer is a 4x4 stride-2 convolution, so n layers on an SxS input
/// score an (S/2^n)x(S/2^n) grid of patches; the last layer emits one logit
/// per patch.
template <typename T>
class Discriminator {
 public:
  struct Cache {
    std::vector<typename nn::Conv2d<T>::Cache> conv;
    std::vector<typename nn::InstanceNorm2d<T>::Cache> norm;
    std::vector<nn::Tensor<T>> pre_activation;
  };

  Discriminator() = default;
  Discriminator(const DiscriminatorConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    validate(cfg);
    const int n = cfg.n_conv_layers;
    int in = 6;
    for (int i = 0; i < n; ++i) {
      const std::string name = "discriminator.conv" + std::to_string(i);
      const int out = i == n - 1 ? 1 : cfg.base_channels * std::min(1 << i, 8);
      conv_.emplace_back(in, out, 4, 2, 1, name);
      norm_.emplace_back();
      if (i > 0 && i < n - 1) norm_.back().emplace(out, name + ".norm");
      in = out;
    }
    Rng rng(derive_seed(seed, 0xD15C));
    for (auto* p : parameters()) {
      if (p->name.ends_with(".weight")) nn::init_normal(p->value, rng, 0.02);
    }
  }

  const DiscriminatorConfig& config() const { return cfg_; }

  int patch_grid_size(int input_size) const {
    int s = input_size;
    for (const auto& c : conv_) s = c.output_size(s);
    return s;
  }

  nn::ParameterList<T> parameters() {
    nn::ParameterList<T> out;
    for (std::size_t i = 0; i < conv_.size(); ++i) {
      conv_[i].collect(out);
      if (norm_[i]) norm_[i]->collect(out);
    }
    return out;
  }

  /// pair: (N, 6, S, S) = condition channels then candidate channels. Returns patch logits (N, 1, m, m).
  nn::Tensor<T> forward(const nn::Tensor<T>& pair, Cache* cache) const {
    const int n = static_cast<int>(conv_.size());
    if (cache) {
      cache->conv.assign(n, {});
      cache->norm.assign(n, {});
      cache->pre_activation.assign(n, {});
    }
    nn::Tensor<T> h = pair;
    for (int i = 0; i < n; ++i) {
      nn::Tensor<T> z = conv_[i].forward(h, cache ? &cache->conv[i] : nullptr);
      if (norm_[i]) z = norm_[i]->forward(z, cache ? &cache->norm[i] : nullptr);
      if (i == n - 1) return z;
      h = nn::leaky_relu(z, T(0.2));
      if (cache) cache->pre_activation[i] = std::move(z);
    }
    return h;
  }

  /// Accumulates parameter gradients and returns d(loss)/d(pair) when requested.
  nn::Tensor<T> backward(const nn::Tensor<T>& grad_logits, const Cache& cache, bool input_grad) {
    const int n = static_cast<int>(conv_.size());
    nn::Tensor<T> g = grad_logits;
    for (int i = n - 1; i >= 0; --i) {
      if (i < n - 1) g = nn::leaky_relu_backward(g, cache.pre_activation[i], T(0.2));
      if (norm_[i]) g = norm_[i]->backward(g, cache.norm[i]);
      g = conv_[i].backward(g, cache.conv[i], i > 0 || input_grad);
    }
    return g;
  }

  /// Per-patch real/fake probabilities (sigmoid of the logits).
  nn::Tensor<T> patch_scores(const nn::Tensor<T>& pair) const {
    nn::Tensor<T> s = forward(pair, nullptr);
    for (auto& v : s.data) v = nn::sigmoid(v);
    return s;
  }

  /// Scalar decision per sample: arithmetic mean of its patch scores.
  std::vector<double> decide(const nn::Tensor<T>& pair) const {
    const nn::Tensor<T> s = patch_scores(pair);
    std::vector<double> out(s.n, 0.0);
    for (int i = 0; i < s.n; ++i) {
      const T* p = s.sample(i);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.sample_size(); ++k) acc += p[k];
      out[i] = acc / static_cast<double>(s.sample_size());
    }
    return out;
  }

 private:
  DiscriminatorConfig cfg_;
  std::vector<nn::Conv2d<T>> conv_;
  std::vector<std::optional<nn::InstanceNorm2d<T>>> norm_;
};

struct GanEpochStats {
  double adversarial = 0.0;    // generator's adversarial BCE
  double l1 = 0.0;             // mean |G(x) - y| on the [0,1] pixel scale, unweighted
  double discriminator = 0.0;  // 0.5 * (BCE(real, 1) + BCE(fake, 0))
};

struct GanModel {
  GeneratorConfig generator_config;
  DiscriminatorConfig discriminator_config;
  GanHyperparams hyper;
  Generator<float> generator;
  Discriminator<float> discriminator;
  std::vector<GanEpochStats> history;
};

using GanProgress = std::function<void(int epoch, const GanEpochStats&)>;

namespace detail {

inline void require_finite(double v, const char* what, int epoch, std::size_t batch) {
  if (!std::isfinite(v)) {
    throw TrainingError(std::string("non-finite ") + what + " loss at epoch " + std::to_string(epoch) + ", batch " +
                        std::to_string(batch));
  }
}

}  // namespace detail

/// Alternates one discriminator and one generator Adam update per batch.
/// Batch order and weight initialisation are derived from `seed`.
inline GanModel train_gan(std::span<const PairedSample> pairs, const GeneratorConfig& g_cfg,
                          const DiscriminatorConfig& d_cfg, const GanHyperparams& hyper, std::uint64_t seed,
                          const GanProgress& progress = {}) {
  validate(hyper);
  if (pairs.empty()) throw ValidationError("train_gan: no training pairs");
  for (const auto& p : pairs) {
    if (p.symbolic->height() != g_cfg.input_size || p.symbolic->width() != g_cfg.input_size ||
        !p.symbolic->same_shape(*p.real)) {
      throw ValidationError("train_gan: every pair must be " + std::to_string(g_cfg.input_size) + "x" +
                            std::to_string(g_cfg.input_size));
    }
  }
  GanModel model{g_cfg, d_cfg, hyper, Generator<float>(g_cfg, derive_seed(seed, 1)),
                 Discriminator<float>(d_cfg, derive_seed(seed, 2)), {}};
  nn::AdamOptions opt{hyper.learning_rate, hyper.beta1, hyper.beta2, 1e-8};
  nn::Adam<float> g_opt(model.generator.parameters(), opt);
  nn::Adam<float> d_opt(model.discriminator.parameters(), opt);

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Generator<float>::Cache g_cache;
  Discriminator<float>::Cache d_cache;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    GanEpochStats stats;
    std::size_t seen = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += hyper.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      std::vector<const Image*> cond, real;
      for (std::size_t k = start; k < end; ++k) {
        cond.push_back(pairs[order[k]].symbolic.get());
        real.push_back(pairs[order[k]].real.get());
      }
      const auto x = images_to_tensor<float>(cond);
      const auto y = images_to_tensor<float>(real);
      const auto fake = model.generator.forward(x, &g_cache);

      // Discriminator update.
      d_opt.zero_grad();
      const auto real_logits = model.discriminator.forward(nn::concat_channels(x, y), &d_cache);
      auto loss_real = nn::bce_with_logits(real_logits, 1.0f);
      for (auto& v : loss_real.grad.data) v *= 0.5f;
      model.discriminator.backward(loss_real.grad, d_cache, false);
      const auto fake_logits = model.discriminator.forward(nn::concat_channels(x, fake), &d_cache);
      auto loss_fake = nn::bce_with_logits(fake_logits, 0.0f);
      for (auto& v : loss_fake.grad.data) v *= 0.5f;
      model.discriminator.backward(loss_fake.grad, d_cache, false);
      const double d_loss = 0.5 * (loss_real.value + loss_fake.value);
      detail::require_finite(d_loss, "discriminator", epoch, batch);
      d_opt.step();

      // Generator update through the refreshed discriminator.
      g_opt.zero_grad();
      const auto logits = model.discriminator.forward(nn::concat_channels(x, fake), &d_cache);
      const auto adv = nn::bce_with_logits(logits, 1.0f);
      const auto grad_pair = model.discriminator.backward(adv.grad, d_cache, true);
      nn::Tensor<float> unused, grad_fake;
      nn::split_channels(grad_pair, 3, unused, grad_fake);
      // Network range is [-1,1]; halve to report and weight L1 on the [0,1] pixel scale.
      const auto l1 = nn::l1_loss(fake, y);
      const double l1_unit = 0.5 * l1.value;
      const float w = static_cast<float>(0.5 * hyper.l1_weight);
      for (std::size_t k = 0; k < grad_fake.size(); ++k) grad_fake.data[k] += w * l1.grad.data[k];
      detail::require_finite(adv.value, "adversarial", epoch, batch);
      detail::require_finite(l1_unit, "L1", epoch, batch);
      model.generator.backward(grad_fake, g_cache);
      g_opt.step();

      const double bs = static_cast<double>(end - start);
      stats.adversarial += adv.value * bs;
      stats.l1 += l1_unit * bs;
      stats.discriminator += d_loss * bs;
      seen += end - start;
    }
    stats.adversarial /= static_cast<double>(seen);
    stats.l1 /= static_cast<double>(seen);
    stats.discriminator /= static_cast<double>(seen);
    model.history.push_back(stats);
    if (progress) progress(epoch, stats);
  }
  return model;
}

/// Translates a symbolic image. Deterministic; values clipped to [0,1].
inline Image generate(const GanModel& model, const Image& symbolic) {
  const int s = model.generator_config.input_size;
  if (symbolic.height() != s || symbolic.width() != s) {
    throw ValidationError("generate: expected a " + std::to_string(s) + "x" + std::to_string(s) + " image, got " +
                          std::to_string(symbolic.height()) + "x" + std::to_string(symbolic.width()));
  }
  const auto out = model.generator.forward(images_to_tensor<float>({&symbolic}), nullptr);
  return tensor_to_image(out, 0);
}

/// One generated sample per input sample (same label and split). The
/// condition image depends only on the class template, so each class is
/// generated once and the raster is shared.
inline Dataset generate_for_samples(const GanModel& model, const Dataset& dataset, const TemplateLibrary& templates) {
  std::map<int, std::shared_ptr<const Image>> per_class;
  Dataset out = dataset.with_samples({});
  out.samples.reserve(dataset.size());
  for (const auto& s : dataset.samples) {
    auto it = per_class.find(s.class_index);
    if (it == per_class.end()) {
      if (!templates.contains(s.class_index)) {
        throw ValidationError("no template for class " + std::to_string(s.class_index) + " in library '" +
                              templates.family + "'");
      }
      const PairedSample pair = compose_pair(s, templates.at(s.class_index));
      it = per_class.emplace(s.class_index, std::make_shared<const Image>(generate(model, *pair.symbolic))).first;
    }
    ImageSample g;
    g.pixels = it->second;
    g.class_index = s.class_index;
    g.split = s.split;
    out.samples.push_back(std::move(g));
  }
  return out;
}

/// Original samples followed by one generated sample each (n -> 2n).
inline Dataset gan_augment_dataset(const GanModel& model, const Dataset& dataset, const TemplateLibrary& templates) {
  if (dataset.empty()) throw ValidationError("gan_augment_dataset: dataset is empty");
  return merge_datasets(dataset, generate_for_samples(model, dataset, templates));
}

/// Pairs every sample with its class template (the symbolic condition).
inline std::vector<PairedSample> make_pairs(const Dataset& d, const TemplateLibrary& templates) {
  std::vector<PairedSample> out;
  out.reserve(d.size());
  for (const auto& s : d.samples) out.push_back(compose_pair(s, templates.at(s.class_index)));
  return out;
}

// Checkpoints --------------------------------------------------------------------

inline nlohmann::json to_json(const GeneratorConfig& c) {
  return {{"n_conv_layers", c.n_conv_layers}, {"base_channels", c.base_channels}, {"input_size", c.input_size}};
}
inline nlohmann::json to_json(const DiscriminatorConfig& c) {
  return {{"n_conv_layers", c.n_conv_layers}, {"base_channels", c.base_channels}};
}
inline nlohmann::json to_json(const GanHyperparams& h) {
  return {{"learning_rate", h.learning_rate}, {"l1_weight", h.l1_weight}, {"epochs", h.epochs},
          {"batch_size", h.batch_size},       {"beta1", h.beta1},         {"beta2", h.beta2}};
}

inline void save_gan(const GanModel& model, const std::filesystem::path& path) {
  Archive a;
  a.meta["kind"] = "pix2pix";
  a.meta["generator"] = to_json(model.generator_config);
  a.meta["discriminator"] = to_json(model.discriminator_config);
  a.meta["hyper"] = to_json(model.hyper);
  auto hist = nlohmann::json::array();
  for (const auto& h : model.history) {
    hist.push_back({{"adversarial", h.adversarial}, {"l1", h.l1}, {"discriminator", h.discriminator}});
  }
  a.meta["history"] = hist;
  auto& m = const_cast<GanModel&>(model);
  append_parameters(a, m.generator.parameters());
  append_parameters(a, m.discriminator.parameters());
  write_archive(path, a);
}

inline GanModel load_gan(const std::filesystem::path& path) {
  const Archive a = read_archive(path);
  if (a.meta.value("kind", std::string{}) != "pix2pix") {
    throw ValidationError("'" + path.string() + "' is not a pix2pix checkpoint");
  }
  try {
    GanModel m;
    const auto& g = a.meta.at("generator");
    m.generator_config = {g.at("n_conv_layers").get<int>(), g.at("base_channels").get<int>(), g.at("input_size").get<int>()};
    const auto& d = a.meta.at("discriminator");
    m.discriminator_config = {d.at("n_conv_layers").get<int>(), d.at("base_channels").get<int>()};
    const auto& h = a.meta.at("hyper");
    m.hyper = {h.at("learning_rate").get<double>(), h.at("l1_weight").get<double>(), h.at("epochs").get<int>(),
               h.at("batch_size").get<int>(),       h.at("beta1").get<double>(),     h.at("beta2").get<double>()};
    for (const auto& e : a.meta.at("history")) {
      m.history.push_back({e.at("adversarial").get<double>(), e.at("l1").get<double>(), e.at("discriminator").get<double>()});
    }
    m.generator = Generator<float>(m.generator_config, 0);
    m.discriminator = Discriminator<float>(m.discriminator_config, 0);
    restore_parameters(a, m.generator.parameters());
    restore_parameters(a, m.discriminator.parameters());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("corrupt pix2pix checkpoint metadata: " + std::string(e.what()));
  }
}

}  // namespace augbench
