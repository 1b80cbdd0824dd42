//
// Copyright 2026 The sqfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "sqfl/data_synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sqfl::synth {
namespace {

using nlohmann::json;

// Jitter fraction applied to the hypercube-corner class means, relative
// to class_sep.
constexpr double kCornerJitter = 0.3;

// Marsaglia-Tsang gamma sampler; the alpha < 1 case is boosted through
// Gamma(alpha + 1) * U^(1/alpha).
double sample_gamma(double alpha, RngStream& rng) {
  if (alpha < 1.0) {
    const double u = rng.next_double();
    return sample_gamma(alpha + 1.0, rng) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = rng.next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

int sample_categorical(const std::vector<double>& probs, RngStream& rng) {
  double u = rng.next_double();
  for (std::size_t k = 0; k < probs.size(); ++k) {
    u -= probs[k];
    if (u < 0.0) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

// Class means: distinct corners of {-1, +1}^n_informative scaled by
// class_sep, plus uniform jitter of magnitude kCornerJitter * class_sep.
std::vector<std::vector<double>> sample_class_means(const SynthConfig& cfg,
                                                    RngStream& rng) {
  std::set<std::vector<int>> used;
  std::vector<std::vector<double>> means;
  means.reserve(cfg.n_classes);
  for (int k = 0; k < cfg.n_classes; ++k) {
    std::vector<int> corner(cfg.n_informative);
    do {
      for (int d = 0; d < cfg.n_informative; ++d) {
        corner[d] = rng.next_bool() ? 1 : -1;
      }
    } while (!used.insert(corner).second);
    std::vector<double> mu(cfg.n_informative);
    for (int d = 0; d < cfg.n_informative; ++d) {
      const double jitter =
          kCornerJitter * cfg.class_sep * (2.0 * rng.next_double() - 1.0);
      mu[d] = cfg.class_sep * corner[d] + jitter;
    }
    means.push_back(std::move(mu));
  }
  return means;
}

ClientDataset make_client(const SynthConfig& cfg, int client_id, double alpha,
                          const std::vector<std::vector<double>>& means,
                          const std::vector<double>& redundant_mix,
                          RngStream& rng) {
  ClientDataset c;
  c.client_id = client_id;
  c.n_samples = cfg.samples_per_client;
  c.dim = cfg.input_dim;
  c.features.resize(static_cast<std::size_t>(c.n_samples) * cfg.input_dim);
  c.labels.resize(c.n_samples);

  const std::vector<double> label_probs =
      sample_dirichlet(cfg.n_classes, alpha, rng);
  const int n_noise = cfg.input_dim - cfg.n_informative - cfg.n_redundant;

  for (int s = 0; s < c.n_samples; ++s) {
    const int y = sample_categorical(label_probs, rng);
    c.labels[s] = y;
    float* row = &c.features[static_cast<std::size_t>(s) * cfg.input_dim];
    std::vector<double> inf(cfg.n_informative);
    for (int d = 0; d < cfg.n_informative; ++d) {
      inf[d] = means[y][d] + rng.next_gaussian();
      row[d] = static_cast<float>(inf[d]);
    }
    for (int r = 0; r < cfg.n_redundant; ++r) {
      double v = 0.0;
      for (int d = 0; d < cfg.n_informative; ++d) {
        v += redundant_mix[r * cfg.n_informative + d] * inf[d];
      }
      row[cfg.n_informative + r] = static_cast<float>(v);
    }
    for (int d = 0; d < n_noise; ++d) {
      row[cfg.n_informative + cfg.n_redundant + d] =
          static_cast<float>(rng.next_gaussian());
    }
  }
  return c;
}

void assign_weights(std::vector<ClientDataset>& clients) {
  double total = 0.0;
  for (const auto& c : clients) total += c.n_samples;
  for (auto& c : clients) c.weight = c.n_samples / total;
}

void write_binary(const std::filesystem::path& path, const void* data,
                  std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void read_binary_exact(const std::filesystem::path& path, void* data,
                       std::size_t bytes) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != bytes) {
    std::ostringstream msg;
    msg << path.string() << ": expected " << bytes << " bytes, found " << size
        << " (mismatch at byte offset " << std::min(size, bytes) << ")";
    throw std::runtime_error(msg.str());
  }
  in.seekg(0);
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("short read from " + path.string());
}

json split_meta(const std::vector<ClientDataset>& clients) {
  json arr = json::array();
  for (const auto& c : clients) {
    arr.push_back({{"id", c.client_id},
                   {"n_samples", c.n_samples},
                   {"weight", c.weight}});
  }
  return arr;
}

const char* split_name(int s) {
  static const char* names[] = {"train", "val", "test"};
  return names[s];
}

}  // namespace

void SynthConfig::validate() const {
  if (n_classes < 2) throw std::invalid_argument("need at least 2 classes");
  if (n_informative < 1 || n_redundant < 0 ||
      n_informative + n_redundant > input_dim) {
    throw std::invalid_argument(
        "need n_informative + n_redundant <= input_dim");
  }
  if (samples_per_client < 1) {
    throw std::invalid_argument("samples_per_client must be >= 1");
  }
  if (n_train_clients < 1 || n_val_clients < 0 || n_test_clients < 0) {
    throw std::invalid_argument("invalid client counts");
  }
  if (!(dirichlet_alpha_train > 0.0) || !(dirichlet_alpha_eval > 0.0)) {
    throw std::invalid_argument("Dirichlet concentrations must be > 0");
  }
  if (!(class_sep > 0.0)) throw std::invalid_argument("class_sep must be > 0");
  // The informative corners must be able to host n_classes distinct means.
  if (n_informative < 31 && (1 << n_informative) < n_classes) {
    throw std::invalid_argument("too many classes for the informative dim");
  }
}

void ClientDataset::validate(int n_classes) const {
  if (labels.size() != static_cast<std::size_t>(n_samples) ||
      features.size() != static_cast<std::size_t>(n_samples) * dim) {
    throw std::invalid_argument("client dataset shape mismatch");
  }
  for (std::int32_t y : labels) {
    if (y < 0 || y >= n_classes) {
      throw std::invalid_argument("label out of range");
    }
  }
}

std::vector<double> sample_dirichlet(int k, double alpha, RngStream& rng) {
  if (k < 1 || !(alpha > 0.0)) {
    throw std::invalid_argument("sample_dirichlet: need k >= 1, alpha > 0");
  }
  std::vector<double> g(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    g[i] = sample_gamma(alpha, rng);
    total += g[i];
  }
  if (total <= 0.0) {
    // All gamma draws underflowed (tiny alpha); fall back to a point mass.
    std::vector<double> p(k, 0.0);
    p[rng.next_below(static_cast<std::uint64_t>(k))] = 1.0;
    return p;
  }
  for (double& v : g) v /= total;
  return g;
}

FederatedDataset generate(const SynthConfig& config, RngStream& rng) {
  config.validate();
  FederatedDataset ds;
  ds.config = config;

  RngStream mean_rng = rng.split(0);
  const auto means = sample_class_means(config, mean_rng);

  RngStream mix_rng = rng.split(1);
  std::vector<double> redundant_mix(
      static_cast<std::size_t>(config.n_redundant) * config.n_informative);
  for (double& v : redundant_mix) v = 2.0 * mix_rng.next_double() - 1.0;

  const int counts[3] = {config.n_train_clients, config.n_val_clients,
                         config.n_test_clients};
  std::vector<ClientDataset>* splits[3] = {&ds.train, &ds.val, &ds.test};
  int next_id = 0;
  for (int s = 0; s < 3; ++s) {
    const double alpha = (s == 0) ? config.dirichlet_alpha_train
                                  : config.dirichlet_alpha_eval;
    splits[s]->reserve(counts[s]);
    for (int i = 0; i < counts[s]; ++i) {
      RngStream client_rng = rng.split(2 + s, i);
      splits[s]->push_back(
          make_client(config, next_id++, alpha, means, redundant_mix,
                      client_rng));
    }
    assign_weights(*splits[s]);
  }
  return ds;
}

void save(const FederatedDataset& dataset, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const SynthConfig& cfg = dataset.config;
  fs::create_directories(dir);

  json meta;
  meta["format"] = "sqfl-dataset-v1";
  meta["config"] = {{"n_classes", cfg.n_classes},
                    {"input_dim", cfg.input_dim},
                    {"n_informative", cfg.n_informative},
                    {"n_redundant", cfg.n_redundant},
                    {"class_sep", cfg.class_sep},
                    {"n_train_clients", cfg.n_train_clients},
                    {"n_val_clients", cfg.n_val_clients},
                    {"n_test_clients", cfg.n_test_clients},
                    {"samples_per_client", cfg.samples_per_client},
                    {"dirichlet_alpha_train", cfg.dirichlet_alpha_train},
                    {"dirichlet_alpha_eval", cfg.dirichlet_alpha_eval},
                    {"seed", cfg.seed}};
  const std::vector<ClientDataset>* splits[3] = {&dataset.train, &dataset.val,
                                                 &dataset.test};
  for (int s = 0; s < 3; ++s) {
    meta["splits"][split_name(s)] = split_meta(*splits[s]);
    const fs::path split_dir = dir / "clients" / split_name(s);
    fs::create_directories(split_dir);
    for (const auto& c : *splits[s]) {
      const std::string stem = std::to_string(c.client_id);
      write_binary(split_dir / (stem + ".feat"), c.features.data(),
                   c.features.size() * sizeof(float));
      write_binary(split_dir / (stem + ".lab"), c.labels.data(),
                   c.labels.size() * sizeof(std::int32_t));
    }
  }
  std::ofstream out(dir / "meta.json");
  if (!out) throw std::runtime_error("cannot write meta.json");
  out << meta.dump(2) << "\n";
}

FederatedDataset load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path meta_path = dir / "meta.json";
  std::ifstream in(meta_path);
  if (!in) throw std::runtime_error("missing dataset: " + meta_path.string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << meta_path.string() << ": parse error at byte offset " << e.byte
        << ": " << e.what();
    throw std::runtime_error(msg.str());
  }
  if (meta.value("format", "") != "sqfl-dataset-v1") {
    throw std::runtime_error(meta_path.string() + ": unknown format");
  }

  FederatedDataset ds;
  const json& jc = meta.at("config");
  SynthConfig& cfg = ds.config;
  cfg.n_classes = jc.at("n_classes").get<int>();
  cfg.input_dim = jc.at("input_dim").get<int>();
  cfg.n_informative = jc.at("n_informative").get<int>();
  cfg.n_redundant = jc.at("n_redundant").get<int>();
  cfg.class_sep = jc.at("class_sep").get<double>();
  cfg.n_train_clients = jc.at("n_train_clients").get<int>();
  cfg.n_val_clients = jc.at("n_val_clients").get<int>();
  cfg.n_test_clients = jc.at("n_test_clients").get<int>();
  cfg.samples_per_client = jc.at("samples_per_client").get<int>();
  cfg.dirichlet_alpha_train = jc.at("dirichlet_alpha_train").get<double>();
  cfg.dirichlet_alpha_eval = jc.at("dirichlet_alpha_eval").get<double>();
  cfg.seed = jc.at("seed").get<std::uint64_t>();

  std::vector<ClientDataset>* splits[3] = {&ds.train, &ds.val, &ds.test};
  for (int s = 0; s < 3; ++s) {
    for (const json& entry : meta.at("splits").at(split_name(s))) {
      ClientDataset c;
      c.client_id = entry.at("id").get<int>();
      c.n_samples = entry.at("n_samples").get<int>();
      c.weight = entry.at("weight").get<double>();
      c.dim = cfg.input_dim;
      c.features.resize(static_cast<std::size_t>(c.n_samples) * c.dim);
      c.labels.resize(c.n_samples);
      const fs::path split_dir = dir / "clients" / split_name(s);
      const std::string stem = std::to_string(c.client_id);
      read_binary_exact(split_dir / (stem + ".feat"), c.features.data(),
                        c.features.size() * sizeof(float));
      read_binary_exact(split_dir / (stem + ".lab"), c.labels.data(),
                        c.labels.size() * sizeof(std::int32_t));
      c.validate(cfg.n_classes);
      splits[s]->push_back(std::move(c));
    }
  }
  return ds;
}

}  // namespace sqfl::synth
