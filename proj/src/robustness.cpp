// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "wavecnet/error.hpp"
#include "wavecnet/rng.hpp"

namespace wavecnet {
namespace {

constexpr std::array<NoiseKind, 3> kNoiseKinds{NoiseKind::Gaussian, NoiseKind::Shot, NoiseKind::Impulse};

const std::array<std::string, 3> kNoise{"gaussian_noise", "shot_noise", "impulse_noise"};
const std::array<std::string, 4> kBlur{"defocus_blur", "glass_blur", "motion_blur", "zoom_blur"};
const std::array<std::string, 4> kWeather{"snow", "frost", "fog", "brightness"};
const std::array<std::string, 4> kDigital{"contrast", "elastic_transform", "pixelate", "jpeg_compression"};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void check_severity(int severity) {
  if (severity < 1 || severity > 5) {
    throw Error(Errc::BadSeverity, "severity must be 1..5, got " + std::to_string(severity));
  }
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

std::array<double, 5> read_row(const nlohmann::json& j, const char* key, std::array<double, 5> fallback) {
  if (!j.contains(key)) return fallback;
  try {
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != 5) throw Error(Errc::InvalidConfig, std::string(key) + " needs five values");
    std::array<double, 5> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("bad severity row '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(NoiseKind kind) { return kNoise[static_cast<std::size_t>(kind)]; }

NoiseKind parse_noise_kind(std::string_view name) {
  for (std::size_t i = 0; i < kNoise.size(); ++i) {
    if (name == kNoise[i]) return kNoiseKinds[i];
  }
  throw Error(Errc::InvalidArgument, "unknown noise corruption '" + std::string(name) + "'");
}

std::span<const NoiseKind> all_noise_kinds() { return kNoiseKinds; }

double SeverityTable::parameter(NoiseKind kind, int severity) const {
  check_severity(severity);
  const auto i = static_cast<std::size_t>(severity - 1);
  switch (kind) {
    case NoiseKind::Gaussian: return gaussian[i];
    case NoiseKind::Shot: return shot[i];
    case NoiseKind::Impulse: return impulse[i];
  }
  return 0.0;
}

void SeverityTable::validate() const {
  for (int s = 0; s < 5; ++s) {
    if (!(gaussian[s] >= 0.0)) throw Error(Errc::InvalidConfig, "gaussian sigma must be non-negative");
    if (!(shot[s] > 0.0)) throw Error(Errc::InvalidConfig, "shot photon count must be positive");
    if (!(impulse[s] >= 0.0 && impulse[s] <= 1.0)) throw Error(Errc::InvalidConfig, "impulse amount must be in [0,1]");
  }
}

nlohmann::json SeverityTable::to_json() const {
  return {{"gaussian_noise", gaussian}, {"shot_noise", shot}, {"impulse_noise", impulse}};
}

SeverityTable SeverityTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "severity table must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "gaussian_noise" && key != "shot_noise" && key != "impulse_noise") {
      throw Error(Errc::InvalidConfig, "unknown key '" + key + "' in severity table");
    }
  }
  SeverityTable t;
  t.gaussian = read_row(j, "gaussian_noise", t.gaussian);
  t.shot = read_row(j, "shot_noise", t.shot);
  t.impulse = read_row(j, "impulse_noise", t.impulse);
  t.validate();
  return t;
}

template <class T>
Tensor<T> corrupt(const Tensor<T>& images, NoiseKind kind, int severity, std::uint64_t seed,
                  const CorruptOptions& options) {
  check_severity(severity);
  options.table.validate();
  const double p = options.table.parameter(kind, severity);
  const std::size_t count = images.rank() == 4 ? images.dim(0) : 1;
  const std::size_t per = images.size() / count;
  Tensor<T> out = images;
  parallel_for(count, options.threads, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    T* px = out.data().data() + i * per;
    switch (kind) {
      case NoiseKind::Gaussian: {
        if (p == 0.0) break;
        std::normal_distribution<double> noise(0.0, p);
        for (std::size_t k = 0; k < per; ++k) px[k] = static_cast<T>(px[k] + noise(rng));
        break;
      }
      case NoiseKind::Shot:
        for (std::size_t k = 0; k < per; ++k) {
          const double mean = std::max(0.0, static_cast<double>(px[k])) * p;
          const double photons = mean > 0.0 ? static_cast<double>(std::poisson_distribution<long>(mean)(rng)) : 0.0;
          px[k] = static_cast<T>(photons / p);
        }
        break;
      case NoiseKind::Impulse: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t k = 0; k < per; ++k) {
          if (u(rng) < p) px[k] = u(rng) < 0.5 ? T{0} : T{1};
        }
        break;
      }
    }
    if (options.clip) {
      for (std::size_t k = 0; k < per; ++k) px[k] = std::clamp(px[k], T{0}, T{1});
    }
  });
  return out;
}

template Tensor<float> corrupt(const Tensor<float>&, NoiseKind, int, std::uint64_t, const CorruptOptions&);
template Tensor<double> corrupt(const Tensor<double>&, NoiseKind, int, std::uint64_t, const CorruptOptions&);

double corruption_error(std::span<const double> errors, std::span<const double> reference) {
  if (errors.size() != 5 || reference.size() != 5) {
    throw Error(Errc::InvalidArgument, "corruption error needs five severities per model");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < 5; ++s) {
    num += errors[s];
    den += reference[s];
  }
  if (!(den > 0.0)) throw Error(Errc::ZeroReference, "reference errors sum to zero");
  return 100.0 * (num / den);
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::Noise: return "noise";
    case Category::Blur: return "blur";
    case Category::Weather: return "weather";
    case Category::Digital: return "digital";
  }
  return "?";
}

Category parse_category(std::string_view name) {
  for (auto c : {Category::Noise, Category::Blur, Category::Weather, Category::Digital}) {
    if (to_string(c) == name) return c;
  }
  throw Error(Errc::InvalidArgument, "unknown corruption category '" + std::string(name) + "'");
}

std::span<const std::string> category_members(Category category) {
  switch (category) {
    case Category::Noise: return kNoise;
    case Category::Blur: return kBlur;
    case Category::Weather: return kWeather;
    case Category::Digital: return kDigital;
  }
  return {};
}

double mean_ce(const std::map<std::string, double>& ces, Category category) {
  const auto members = category_members(category);
  std::string missing;
  double sum = 0.0;
  for (const auto& m : members) {
    const auto it = ces.find(m);
    if (it == ces.end()) {
      missing += (missing.empty() ? "" : ", ") + m;
    } else {
      sum += it->second;
    }
  }
  if (!missing.empty()) {
    throw Error(Errc::MissingCorruption, std::string(to_string(category)) + " mCE is missing " + missing);
  }
  return sum / static_cast<double>(members.size());
}

// ErrorMatrix

const ErrorMatrix::Row* ErrorMatrix::find(std::string_view corruption) const {
  for (const auto& r : rows) {
    if (r.corruption == corruption) return &r;
  }
  return nullptr;
}

void ErrorMatrix::set(const std::string& corruption, const std::array<double, 5>& errors) {
  for (double e : errors) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw Error(Errc::InvalidArgument, "error rate " + fmt(e) + " for " + corruption + " is outside [0,1]");
    }
  }
  for (auto& r : rows) {
    if (r.corruption == corruption) {
      r.errors = errors;
      return;
    }
  }
  rows.push_back({corruption, errors});
}

void ErrorMatrix::validate() const {
  ErrorMatrix copy;
  for (const auto& r : rows) copy.set(r.corruption, r.errors);
  if (copy.rows.size() != rows.size()) throw Error(Errc::InvalidArgument, "duplicate corruption rows");
}

std::string ErrorMatrix::to_csv() const {
  std::string out = "corruption,s1,s2,s3,s4,s5\n";
  for (const auto& r : rows) {
    out += r.corruption;
    for (double e : r.errors) out += "," + fmt(e);
    out += "\n";
  }
  return out;
}

ErrorMatrix ErrorMatrix::from_csv(std::string_view text, std::string model) {
  ErrorMatrix m;
  m.model = std::move(model);
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      header = false;
      if (cells.size() != 6 || cells[0] != "corruption") {
        throw Error(Errc::Format, "error matrix CSV must start with corruption,s1,...,s5");
      }
      continue;
    }
    if (cells.size() != 6) throw Error(Errc::Format, "line " + std::to_string(line_no) + " needs 6 cells");
    std::array<double, 5> e{};
    for (std::size_t s = 0; s < 5; ++s) {
      try {
        std::size_t used = 0;
        e[s] = std::stod(cells[s + 1], &used);
        if (used != cells[s + 1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(Errc::Format, "line " + std::to_string(line_no) + ": bad number '" + cells[s + 1] + "'");
      }
    }
    m.set(cells[0], e);
  }
  if (header) throw Error(Errc::Format, "empty error matrix CSV");
  return m;
}

nlohmann::json ErrorMatrix::to_json() const {
  nlohmann::json rows_json = nlohmann::json::object();
  nlohmann::json order = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json[r.corruption] = r.errors;
    order.push_back(r.corruption);
  }
  return {{"model", model}, {"order", order}, {"errors", rows_json}};
}

ErrorMatrix ErrorMatrix::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::Format, "error matrix must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "model" && key != "order" && key != "errors") {
      throw Error(Errc::Format, "unknown key '" + key + "' in error matrix");
    }
  }
  ErrorMatrix m;
  try {
    m.model = j.value("model", std::string{});
    const auto& errors = j.at("errors");
    std::vector<std::string> order;
    if (j.contains("order")) {
      order = j.at("order").get<std::vector<std::string>>();
    } else {
      for (const auto& [key, value] : errors.items()) order.push_back(key);
    }
    for (const auto& name : order) {
      const auto v = errors.at(name).get<std::vector<double>>();
      if (v.size() != 5) throw Error(Errc::Format, name + " needs five severities");
      std::array<double, 5> e{};
      std::copy(v.begin(), v.end(), e.begin());
      m.set(name, e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Format, std::string("bad error matrix JSON: ") + e.what());
  }
  return m;
}

bool ErrorMatrix::operator==(const ErrorMatrix& other) const {
  if (model != other.model || rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].corruption != other.rows[i].corruption || rows[i].errors != other.rows[i].errors) return false;
  }
  return true;
}

ErrorMatrix noise_error_matrix(const Classifier& model, const Dataset& data, std::span<const NoiseKind> kinds,
                               std::uint64_t seed, const CorruptOptions& options, std::string name) {
  ErrorMatrix m;
  m.model = std::move(name);
  for (const auto kind : kinds) {
    std::array<double, 5> errors{};
    for (int s = 1; s <= 5; ++s) {
      const std::uint64_t stream = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(kind)), s);
      Dataset noisy{corrupt(data.images, kind, s, stream, options), data.labels};
      errors[s - 1] = error_rate(model, noisy, 256, options.threads);
    }
    m.set(std::string(to_string(kind)), errors);
  }
  return m;
}

RobustnessReport robustness_report(const ErrorMatrix& errors, const ErrorMatrix& reference,
                                   const std::map<std::string, double>& external_ces) {
  errors.validate();
  reference.validate();
  RobustnessReport r;
  r.errors = errors;
  r.reference = reference;
  std::map<std::string, double> all;
  for (const auto& row : errors.rows) {
    const auto* ref = reference.find(row.corruption);
    if (!ref) continue;
    const double ce = corruption_error(row.errors, ref->errors);
    r.ce.emplace_back(row.corruption, ce);
    all[row.corruption] = ce;
  }
  for (const auto& [name, value] : external_ces) {
    if (!(value >= 0.0)) throw Error(Errc::InvalidArgument, "CE for " + name + " must be non-negative");
    if (!all.count(name)) all[name] = value;
  }
  for (auto cat : {Category::Noise, Category::Blur, Category::Weather, Category::Digital}) {
    const auto members = category_members(cat);
    const bool complete = std::all_of(members.begin(), members.end(), [&](const std::string& m) { return all.count(m); });
    if (!complete) continue;
    r.mce.emplace_back(cat, mean_ce(all, cat));
    if (cat != Category::Noise) r.external.push_back(cat);
  }
  return r;
}

std::string RobustnessReport::to_csv() const {
  std::string out = "corruption,s1,s2,s3,s4,s5,ce\n";
  for (const auto& [name, ce] : this->ce) {
    out += name;
    for (double e : errors.find(name)->errors) out += "," + fmt(e);
    out += "," + fmt(ce) + "\n";
  }
  for (const auto& [cat, value] : mce) {
    out += "mce_" + std::string(to_string(cat)) + ",,,,,," + fmt(value) + "\n";
  }
  return out;
}

nlohmann::json RobustnessReport::to_json() const {
  nlohmann::json ce_json = nlohmann::json::object(), mce_json = nlohmann::json::object();
  for (const auto& [name, v] : ce) ce_json[name] = v;
  for (const auto& [cat, v] : mce) mce_json[std::string(to_string(cat))] = v;
  nlohmann::json ext = nlohmann::json::array();
  for (auto c : external) ext.push_back(std::string(to_string(c)) + ": external CE inputs only");
  return {{"ce", ce_json}, {"mce", mce_json}, {"notes", ext}, {"errors", errors.to_json()},
          {"reference", reference.to_json()}};
}

template <class T>
Tensor<T> shift_images(const Tensor<T>& images, int dh, int dw) {
  if (images.rank() < 2) throw Error(Errc::ShapeMismatch, "shift needs at least [H,W]");
  const std::size_t h = images.dim(images.rank() - 2), w = images.dim(images.rank() - 1);
  if (static_cast<std::size_t>(std::abs(dh)) >= h || static_cast<std::size_t>(std::abs(dw)) >= w) {
    throw Error(Errc::ShiftOutOfRange, "shift (" + std::to_string(dh) + ", " + std::to_string(dw) +
                                           ") does not fit a " + std::to_string(h) + "x" + std::to_string(w) +
                                           " image");
  }
  auto reflect = [](long i, long n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
  };
  Tensor<T> out(images.shape());
  const std::size_t planes = images.size() / (h * w);
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = images.data().data() + p * h * w;
    T* dst = out.data().data() + p * h * w;
    for (std::size_t i = 0; i < h; ++i) {
      const auto si = static_cast<std::size_t>(reflect(static_cast<long>(i) - dh, static_cast<long>(h)));
      for (std::size_t j = 0; j < w; ++j) {
        const auto sj = static_cast<std::size_t>(reflect(static_cast<long>(j) - dw, static_cast<long>(w)));
        dst[i * w + j] = src[si * w + sj];
      }
    }
  }
  return out;
}

template Tensor<float> shift_images(const Tensor<float>&, int, int);
template Tensor<double> shift_images(const Tensor<double>&, int, int);

double shift_consistency(const Classifier& model, const Tensor<float>& images, const ShiftTrialConfig& cfg) {
  if (images.rank() != 4) throw Error(Errc::ShapeMismatch, "shift consistency needs [N,C,H,W] images");
  std::vector<ShiftPair> pairs = cfg.explicit_pairs;
  if (pairs.empty()) {
    if (cfg.range < 1) throw Error(Errc::ShiftOutOfRange, "shift range must be at least 1");
    if (cfg.pairs == 0) throw Error(Errc::InvalidArgument, "need at least one shift pair");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> d(-cfg.range, cfg.range);
    for (std::size_t k = 0; k < cfg.pairs; ++k) {
      ShiftPair p;
      p.h0 = d(rng);
      p.w0 = d(rng);
      p.h1 = d(rng);
      p.w1 = d(rng);
      pairs.push_back(p);
    }
  }
  // Reject out-of-range shifts before any model evaluation.
  const int limit = static_cast<int>(std::min(images.dim(2), images.dim(3)));
  for (const auto& p : pairs) {
    for (int v : {p.h0, p.w0, p.h1, p.w1}) {
      if (std::abs(v) >= limit) {
        throw Error(Errc::ShiftOutOfRange, "shift " + std::to_string(v) + " does not fit the image size");
      }
    }
  }
  std::size_t agree = 0;
  for (const auto& p : pairs) {
    const auto a = predict_all(model, shift_images(images, p.h0, p.w0), 256, cfg.threads);
    const auto b = predict_all(model, shift_images(images, p.h1, p.w1), 256, cfg.threads);
    for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
  }
  return 100.0 * static_cast<double>(agree) / static_cast<double>(pairs.size() * images.dim(0));
}

}  // namespace wavecnet
