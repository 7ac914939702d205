// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/world/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "terra/common/digest.hpp"
#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/render/float_image.hpp"

namespace terra {

namespace {

constexpr std::int64_t kTagGenerator = 0x67656e;
constexpr std::int64_t kTagDecoder = 0x646563;
constexpr std::int64_t kTagRefiner = 0x726566;
constexpr std::int64_t kTagProjection = 0x70726f;
constexpr std::int64_t kTagNoise = 0x6e6f69;
constexpr std::int64_t kTagSky = 0x736b79;

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// Shifts the offset so the mean color seen looking straight down on a seeded
// probe layout maps to a neutral landscape tone.
ProjectionP calibrate_offset(ProjectionP p, const DecoderWeights& w, const GeneratorStack& stack,
                             std::uint64_t seed) {
  constexpr int kProbeStride = 16;
  constexpr int kSteps = 33;
  constexpr std::array<float, 3> kTone{0.42f, 0.45f, 0.34f};
  const DecoderConfig& cfg = w.config();
  const LayoutGrid grid =
      synthesize_layout(LatentCode::draw(CounterRng::derive(seed, {0x63616c}), stack.config().latent_dim), stack);
  std::vector<float> feats, ys;
  for (int r = 0; r < grid.height(); r += kProbeStride)
    for (int c = 0; c < grid.width(); c += kProbeStride)
      for (int k = 0; k < kSteps; ++k) {
        const auto cell = grid.cell(r, c);
        feats.insert(feats.end(), cell.begin(), cell.end());
        ys.push_back(cfg.surface_amplitude * (1.0f - 2.0f * static_cast<float>(k) / (kSteps - 1)));
      }
  const std::size_t count = ys.size();
  std::vector<float> color(count * cfg.color_dim), sigma(count);
  decode_batch(w, count, feats.data(), ys.data(), color.data(), sigma.data());
  const double delta = 2.0 * cfg.surface_amplitude / (kSteps - 1);
  std::vector<double> mean(static_cast<std::size_t>(cfg.color_dim), 0.0);
  double total = 0.0;
  for (std::size_t ray = 0; ray < count / kSteps; ++ray) {
    double optical = 0.0;
    for (int k = 0; k < kSteps; ++k) {
      const std::size_t i = ray * kSteps + k;
      const double wt = -std::expm1(-sigma[i] * delta) * std::exp(-optical);
      optical += sigma[i] * delta;
      for (int ch = 0; ch < cfg.color_dim; ++ch) mean[ch] += wt * color[i * cfg.color_dim + ch];
      total += wt;
    }
  }
  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (int k = 0; k < cfg.color_dim; ++k)
      acc += static_cast<double>(p.matrix[static_cast<std::size_t>(c) * cfg.color_dim + k]) * mean[k];
    p.offset[c] = static_cast<float>(kTone[c] - (total > 0.0 ? acc / total : 0.0));
  }
  return p;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

WorldSpec WorldSpec::from_seed(std::uint64_t seed) {
  WorldSpec s;
  s.world_seed = seed;
  s.generator_seed = CounterRng::derive(seed, {kTagGenerator});
  s.decoder_seed = CounterRng::derive(seed, {kTagDecoder});
  s.refiner_seed = CounterRng::derive(seed, {kTagRefiner});
  s.projection_seed = CounterRng::derive(seed, {kTagProjection});
  s.noise_seed = CounterRng::derive(seed, {kTagNoise});
  s.sky_seed = CounterRng::derive(seed, {kTagSky});
  return s;
}

nlohmann::json WorldSpec::to_json() const {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["world_seed"] = world_seed;
  j["generator"] = {{"config", generator}, {"seed", generator_seed}, {"layout_resolution", generator_config().output_resolution}};
  j["backend"] = backend;
  j["decoder"] = {{"seed", decoder_seed},
                  {"feature_dim", decoder.feature_dim},
                  {"hidden", decoder.hidden},
                  {"layers", decoder.layers},
                  {"color_dim", decoder.color_dim},
                  {"surface_amplitude", decoder.surface_amplitude},
                  {"sharpness", decoder.sharpness},
                  {"density_scale", decoder.density_scale}};
  j["refiner"] = {{"kind", refiner}, {"seed", refiner_seed}, {"factor", refine_factor}};
  j["projection_seed"] = projection_seed;
  j["noise_seed"] = noise_seed;
  j["sky"] = {{"source", sky},
              {"seed", sky_seed},
              {"min_elevation", sky_min_elevation},
              {"max_elevation", sky_max_elevation}};
  j["render"] = {{"near", render.near},
                 {"far", render.far},
                 {"samples", render.samples},
                 {"strict", render.strict},
                 {"termination", render.termination},
                 {"fov_y_deg", 60.0},
                 {"lr_width", lr_width},
                 {"lr_height", lr_height},
                 {"cell_width", cell_width}};
  j["extension"] = {{"auto_extend", auto_extend}, {"margin", extend_margin}};
  return j;
}

WorldSpec WorldSpec::from_json(const nlohmann::json& j) {
  try {
    WorldSpec s;
    if (j.contains("format_version")) {
      const auto v = j.at("format_version").get<std::uint32_t>();
      require(v == kFormatVersion, ErrorCode::version,
              "world spec version " + std::to_string(v) + " is not supported (expected " +
                  std::to_string(kFormatVersion) + ")");
    }
    read_opt(j, "world_seed", s.world_seed);
    if (j.contains("generator")) {
      read_opt(j.at("generator"), "config", s.generator);
      read_opt(j.at("generator"), "seed", s.generator_seed);
    }
    read_opt(j, "backend", s.backend);
    if (j.contains("decoder")) {
      const auto& d = j.at("decoder");
      read_opt(d, "seed", s.decoder_seed);
      read_opt(d, "feature_dim", s.decoder.feature_dim);
      read_opt(d, "hidden", s.decoder.hidden);
      read_opt(d, "layers", s.decoder.layers);
      read_opt(d, "color_dim", s.decoder.color_dim);
      read_opt(d, "surface_amplitude", s.decoder.surface_amplitude);
      read_opt(d, "sharpness", s.decoder.sharpness);
      read_opt(d, "density_scale", s.decoder.density_scale);
    }
    if (j.contains("refiner")) {
      read_opt(j.at("refiner"), "kind", s.refiner);
      read_opt(j.at("refiner"), "seed", s.refiner_seed);
      read_opt(j.at("refiner"), "factor", s.refine_factor);
    }
    read_opt(j, "projection_seed", s.projection_seed);
    read_opt(j, "noise_seed", s.noise_seed);
    if (j.contains("sky")) {
      read_opt(j.at("sky"), "source", s.sky);
      read_opt(j.at("sky"), "seed", s.sky_seed);
      read_opt(j.at("sky"), "min_elevation", s.sky_min_elevation);
      read_opt(j.at("sky"), "max_elevation", s.sky_max_elevation);
    }
    if (j.contains("render")) {
      const auto& r = j.at("render");
      read_opt(r, "near", s.render.near);
      read_opt(r, "far", s.render.far);
      read_opt(r, "samples", s.render.samples);
      read_opt(r, "strict", s.render.strict);
      read_opt(r, "termination", s.render.termination);
      read_opt(r, "lr_width", s.lr_width);
      read_opt(r, "lr_height", s.lr_height);
      read_opt(r, "cell_width", s.cell_width);
    }
    if (j.contains("extension")) {
      read_opt(j.at("extension"), "auto_extend", s.auto_extend);
      read_opt(j.at("extension"), "margin", s.extend_margin);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::configuration, std::string("malformed world spec: ") + e.what());
  }
}

GeneratorConfig WorldSpec::generator_config() const {
  return generator == "small" ? GeneratorConfig::small() : GeneratorConfig::standard();
}

void WorldSpec::validate() const {
  require(one_of(generator, {"standard", "small"}), ErrorCode::configuration, "unknown generator '" + generator + "'");
  require(one_of(backend, {"neural", "oracle_flat", "oracle_hills"}), ErrorCode::configuration,
          "unknown backend '" + backend + "'");
  require(one_of(refiner, {"identity", "conv", "file"}), ErrorCode::configuration,
          "unknown refiner '" + refiner + "'");
  require(one_of(sky, {"procedural", "file"}), ErrorCode::configuration, "unknown sky source '" + sky + "'");
  require(render.near > 0.0 && render.far > render.near, ErrorCode::configuration, "need 0 < near < far");
  require(render.samples >= 2, ErrorCode::configuration, "need at least two samples per ray");
  require(render.termination >= 0.0 && render.termination < 1.0, ErrorCode::configuration,
          "termination threshold must lie in [0, 1)");
  require(lr_width > 0 && lr_height > 0, ErrorCode::configuration, "low-resolution size must be positive");
  require(refine_factor >= 1 && (refine_factor & (refine_factor - 1)) == 0, ErrorCode::configuration,
          "refine factor must be a power of two");
  require(cell_width > 0.0 && std::isfinite(cell_width), ErrorCode::configuration, "cell width must be positive");
  require(extend_margin >= 0.0 && std::isfinite(extend_margin), ErrorCode::configuration,
          "extension margin must be non-negative");
  require(decoder.feature_dim == generator_config().output_channels(), ErrorCode::configuration,
          "decoder feature width does not match the generator output");
}

Frame FrameOutput::frame() const {
  Frame f;
  f.rgb = full;
  for (float& v : f.rgb.data) v = std::clamp(v, 0.0f, 1.0f);
  f.disparity = hr.disparity;
  f.mask = hr.mask;
  return f;
}

World::World(WorldSpec spec, WorldAssets assets)
    : spec_(std::move(spec)), noise_(spec_.noise_seed, spec_.cell_width) {
  spec_.validate();
  stack_ = std::make_shared<const GeneratorStack>(spec_.generator_config(), spec_.generator_seed);
  layout_ = std::make_unique<LayoutWorld>(stack_, spec_.world_seed, spec_.cell_width);
  if (assets.layout) layout_->install(assets.layout->first, std::move(assets.layout->second));

  if (assets.decoder) {
    require(assets.decoder->config() == spec_.decoder, ErrorCode::configuration,
            "decoder weights do not match the world's decoder config");
    decoder_ = std::make_shared<const DecoderWeights>(std::move(*assets.decoder));
  } else {
    decoder_ = std::make_shared<const DecoderWeights>(DecoderWeights::seeded(spec_.decoder, spec_.decoder_seed));
  }

  const int channels = spec_.decoder.color_dim;
  if (spec_.backend == "oracle_flat") {
    oracle_ = std::make_shared<const HeightfieldOracle>(
        HeightfieldOracle::flat(0.0, spec_.decoder_seed, 0.3, spec_.decoder.color_dim));
  } else if (spec_.backend == "oracle_hills") {
    oracle_ = std::make_shared<const HeightfieldOracle>(
        HeightfieldOracle::hills(spec_.decoder_seed, 4, 0.5, spec_.decoder.color_dim));
  }
  projection_ = oracle_ ? ProjectionP::select_rgb(channels)
                        : calibrate_offset(ProjectionP::seeded(channels, spec_.projection_seed), *decoder_, *stack_,
                                           spec_.projection_seed);

  if (spec_.refiner == "identity") {
    refiner_ = std::make_unique<const IdentityRefiner>(spec_.refine_factor);
  } else {
    require(spec_.refiner == "conv" || assets.refiner.has_value(), ErrorCode::configuration,
            "refiner 'file' needs refiner weights");
    auto conv = std::make_unique<const ConvRefiner>(
        assets.refiner ? ConvRefiner::from_container(*assets.refiner)
                       : ConvRefiner::seeded(channels, spec_.refiner_seed, spec_.refine_factor));
    require(conv->feature_channels() == channels, ErrorCode::configuration,
            "refiner feature width does not match the decoder color width");
    require(conv->factor() == spec_.refine_factor, ErrorCode::configuration,
            "refiner upsampling factor does not match the world spec");
    conv_ = conv.get();
    refiner_ = std::move(conv);
  }

  if (assets.sky_panorama) {
    sky_ = std::make_unique<const SkyDome>(std::move(*assets.sky_panorama), spec_.sky_min_elevation,
                                           spec_.sky_max_elevation);
  } else {
    require(spec_.sky == "procedural", ErrorCode::configuration, "sky source 'file' needs a panorama");
    sky_ = std::make_unique<const SkyDome>(SkyDome::procedural(spec_.sky_seed, 512, 128, {}, spec_.sky_min_elevation,
                                                               spec_.sky_max_elevation));
  }
}

ChunkRect World::extent() const { return oracle_ ? ChunkRect{} : layout_->snapshot()->extent(); }

ChunkRect World::extend(const ChunkRect& rect) {
  if (oracle_) return {};
  return layout_->materialize(rect)->extent();
}

void World::prepare(const Camera& camera) {
  if (oracle_ || !spec_.auto_extend) return;
  const auto box = frustum_footprint(camera, spec_.render);
  const double m = spec_.extend_margin;
  const ChunkRect need = layout_->chunks_for_box(box[0] - m, box[1] - m, box[2] + m, box[3] + m);
  // Only the frustum itself must be covered; the margin is materialized
  // together with it so regions grow ahead of the camera.
  const ChunkRect core = layout_->chunks_for_box(box[0], box[1], box[2], box[3]);
  if (!layout_->snapshot()->extent().contains(core)) layout_->materialize(need);
}

std::shared_ptr<const RadianceField> World::field() const {
  if (oracle_) return oracle_;
  return std::make_shared<const NeuralField>(layout_->snapshot(), decoder_);
}

FrameOutput World::render(const Camera& camera, int supersample) {
  camera.validate();
  const int f = refiner_->factor();
  require(camera.width % f == 0 && camera.height % f == 0, ErrorCode::argument,
          "output resolution " + std::to_string(camera.width) + "x" + std::to_string(camera.height) +
              " is not a multiple of the refine factor " + std::to_string(f));
  require(supersample >= 1 && supersample <= 16, ErrorCode::argument, "supersample factor must lie in [1, 16]");
  const Camera lr_camera = camera.with_resolution(camera.width / f, camera.height / f);
  prepare(lr_camera);
  const auto fld = field();
  FrameOutput out;
  out.lr = supersample > 1 ? supersample_render(*fld, lr_camera, spec_.render, projection_, noise_, supersample)
                           : render_frame(*fld, lr_camera, spec_.render, projection_, noise_);
  out.hr = refiner_->refine(out.lr);
  out.dome = render_dome_view(*sky_, camera);
  out.full = composite_sky(out.hr.rgb, out.hr.mask, out.dome);
  out.extent = extent();
  return out;
}

FrameRenderer World::frame_renderer(int supersample) {
  return [this, supersample](const Camera& c) { return render(c, supersample).frame(); };
}

nlohmann::json World::digests() const {
  nlohmann::json d;
  d["spec"] = sha256_hex(spec_.to_json().dump());
  d["decoder"] = sha256_hex(decoder_->to_container().serialize());
  d["refiner"] = conv_ ? sha256_hex(conv_->to_container().serialize()) : sha256_hex(std::string("identity"));
  d["sky"] = sha256_hex(encode_float_image(sky_->panorama()));
  return d;
}

std::string World::identity() const { return sha256_hex(digests().dump()); }

}  // namespace terra
