#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtilink/error.hpp"
#include "mtilink/jsonio.hpp"
#include "mtilink/model.hpp"
#include "mtilink/train.hpp"

namespace mtilink {

inline constexpr int kCheckpointFormatVersion = 1;

// Index-order vocabularies baked into the encoders; stored in every
// checkpoint so an incompatible file is rejected instead of silently
// re-interpreted.
inline const std::vector<std::string>& node_role_names() {
  static const std::vector<std::string> names{"center_molecule", "center_target",
                                              "neighbor_target", "neighbor_molecule"};
  return names;
}

inline const std::vector<std::string>& molecule_attribute_names() {
  static const std::vector<std::string> names{"element",   "degree",        "charge", "chirality",
                                              "hydrogens", "hybridization", "aromatic"};
  return names;
}

// Everything needed to score new pairs later: the trained tensors, the
// configs that shaped them, the id vocabularies of the training network, and
// the structures of the molecules seen in training.
struct Checkpoint {
  ModelConfig model;
  TrainConfig train;
  std::vector<std::string> molecule_ids;
  std::vector<std::string> target_ids;
  std::map<std::string, std::string> smiles;  // molecule id -> SMILES
  ModelParams params;
};

namespace detail {

inline void append_string_array(std::string& out, const std::vector<std::string>& items) {
  out += '[';
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += json_string(items[i]);
  }
  out += ']';
}

}  // namespace detail

// Fixed key order and 17-significant-digit floats: the same checkpoint always
// serializes to the same bytes, and every double survives the round trip.
inline void save_checkpoint(std::ostream& out, Checkpoint& ckpt) {
  using detail::json_number;
  using detail::json_string;
  std::string s = "{\"format_version\": " + std::to_string(kCheckpointFormatVersion);
  s += ", \"model\": {\"K\": " + std::to_string(ckpt.model.K);
  s += ", \"d\": " + std::to_string(ckpt.model.d);
  s += ", \"head_hidden1\": " + std::to_string(ckpt.model.head_hidden1);
  s += ", \"head_hidden2\": " + std::to_string(ckpt.model.head_hidden2);
  s += ", \"bond_embedding\": ";
  s += ckpt.model.bond_embedding ? "true" : "false";
  s += "}, \"train\": {\"learning_rate\": " + json_number(ckpt.train.learning_rate);
  s += ", \"adam_epsilon\": " + json_number(ckpt.train.adam_epsilon);
  s += ", \"beta0\": " + json_number(ckpt.train.beta0);
  s += ", \"beta1\": " + json_number(ckpt.train.beta1);
  s += ", \"weight_decay\": " + json_number(ckpt.train.weight_decay);
  s += ", \"batch_size\": " + std::to_string(ckpt.train.batch_size);
  s += ", \"epochs\": " + std::to_string(ckpt.train.epochs);
  s += ", \"seed\": " + std::to_string(ckpt.train.seed);
  s += ", \"rebalance\": ";
  s += ckpt.train.rebalance ? "true" : "false";
  s += ", \"negative_sampling_ratio\": " + json_number(ckpt.train.negative_sampling_ratio);
  s += "}, \"molecule_ids\": ";
  detail::append_string_array(s, ckpt.molecule_ids);
  s += ", \"target_ids\": ";
  detail::append_string_array(s, ckpt.target_ids);
  s += ", \"roles\": ";
  detail::append_string_array(s, node_role_names());
  s += ", \"attributes\": ";
  detail::append_string_array(s, molecule_attribute_names());
  s += ", \"smiles\": {";
  bool first = true;
  for (const auto& [id, smi] : ckpt.smiles) {
    if (!first) s += ", ";
    first = false;
    s += json_string(id) + ": " + json_string(smi);
  }
  s += "}, \"tensors\": {";
  first = true;
  for (const NamedParam& np : param_list(ckpt.params)) {
    if (!np.tensor->finite()) {
      raise(Errc::NonFiniteValue, "tensor " + np.name + " has non-finite entries");
    }
    if (!first) s += ", ";
    first = false;
    s += json_string(np.name) + ": {\"shape\": [";
    for (std::size_t i = 0; i < np.tensor->shape.size(); ++i) {
      if (i > 0) s += ", ";
      s += std::to_string(np.tensor->shape[i]);
    }
    s += "], \"data\": [";
    for (std::size_t i = 0; i < np.tensor->data.size(); ++i) {
      if (i > 0) s += ", ";
      s += json_number(np.tensor->data[i]);
    }
    s += "]}";
  }
  s += "}}\n";
  out << s;
}

inline Checkpoint load_checkpoint(std::istream& in, const std::string& source = "<stream>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    raise(Errc::DeserializeError,
          source + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
      raise(Errc::DeserializeError, source + ": missing integer format_version");
    }
    const auto version = j["format_version"].get<long long>();
    if (version != kCheckpointFormatVersion) {
      raise(Errc::UnsupportedVersion, source + ": format_version " + std::to_string(version) +
                                          ", this reader handles " +
                                          std::to_string(kCheckpointFormatVersion));
    }

    Checkpoint ckpt;
    const nlohmann::json& jm = j.at("model");
    ckpt.model.K = jm.at("K").get<int>();
    ckpt.model.d = jm.at("d").get<int>();
    ckpt.model.head_hidden1 = jm.at("head_hidden1").get<int>();
    ckpt.model.head_hidden2 = jm.at("head_hidden2").get<int>();
    ckpt.model.bond_embedding = jm.at("bond_embedding").get<bool>();
    if (ckpt.model.K < 1 || ckpt.model.d < 1 || ckpt.model.head_hidden1 < 1 ||
        ckpt.model.head_hidden2 < 1) {
      raise(Errc::DeserializeError, source + ": non-positive model dimensions");
    }

    const nlohmann::json& jt = j.at("train");
    ckpt.train.learning_rate = jt.at("learning_rate").get<double>();
    ckpt.train.adam_epsilon = jt.at("adam_epsilon").get<double>();
    ckpt.train.beta0 = jt.at("beta0").get<double>();
    ckpt.train.beta1 = jt.at("beta1").get<double>();
    ckpt.train.weight_decay = jt.at("weight_decay").get<double>();
    ckpt.train.batch_size = jt.at("batch_size").get<int>();
    ckpt.train.epochs = jt.at("epochs").get<int>();
    ckpt.train.seed = jt.at("seed").get<std::uint64_t>();
    ckpt.train.rebalance = jt.at("rebalance").get<bool>();
    ckpt.train.negative_sampling_ratio = jt.at("negative_sampling_ratio").get<double>();

    ckpt.molecule_ids = j.at("molecule_ids").get<std::vector<std::string>>();
    ckpt.target_ids = j.at("target_ids").get<std::vector<std::string>>();
    if (j.at("roles").get<std::vector<std::string>>() != node_role_names()) {
      raise(Errc::DeserializeError, source + ": role vocabulary mismatch");
    }
    if (j.at("attributes").get<std::vector<std::string>>() != molecule_attribute_names()) {
      raise(Errc::DeserializeError, source + ": attribute vocabulary mismatch");
    }
    for (const auto& [id, smi] : j.at("smiles").items()) {
      ckpt.smiles[id] = smi.get<std::string>();
    }

    ckpt.params = init_params(ckpt.model, 0);
    const nlohmann::json& tensors = j.at("tensors");
    const std::vector<NamedParam> named = param_list(ckpt.params);
    for (const NamedParam& np : named) {
      if (!tensors.contains(np.name)) {
        raise(Errc::DeserializeError, source + ": missing tensor " + np.name);
      }
      const nlohmann::json& tj = tensors.at(np.name);
      const auto shape = tj.at("shape").get<std::vector<std::size_t>>();
      if (shape != np.tensor->shape) {
        raise(Errc::DeserializeError, source + ": tensor " + np.name + " has shape " +
                                          nlohmann::json(shape).dump() + ", expected " +
                                          np.tensor->shape_str());
      }
      const nlohmann::json& data = tj.at("data");
      if (!data.is_array() || data.size() != np.tensor->data.size()) {
        raise(Errc::DeserializeError,
              source + ": tensor " + np.name + " data length does not match its shape");
      }
      for (std::size_t i = 0; i < np.tensor->data.size(); ++i) {
        const double v = data[i].get<double>();
        if (!std::isfinite(v)) {
          raise(Errc::DeserializeError, source + ": tensor " + np.name + " has non-finite entries");
        }
        np.tensor->data[i] = v;
      }
    }
    if (tensors.size() != named.size()) {
      for (const auto& [name, value] : tensors.items()) {
        (void)value;
        bool known = false;
        for (const NamedParam& np : named) known = known || np.name == name;
        if (!known) raise(Errc::DeserializeError, source + ": unexpected tensor " + name);
      }
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::DeserializeError, source + ": " + e.what());
  }
}

inline void save_checkpoint_file(const std::string& path, Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
  save_checkpoint(out, ckpt);
  out.flush();
  if (!out) raise(Errc::IoError, "failed while writing " + path);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path);
  return load_checkpoint(in, path);
}

}  // namespace mtilink
