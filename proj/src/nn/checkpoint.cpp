#include "nn/checkpoint.hpp"

#include <cstring>
#include <map>

#include "core/binio.hpp"
#include "core/errors.hpp"

namespace framecast::nn {

namespace {

constexpr char kMagic[8] = {'F', 'C', 'K', 'P', 'T', '0', '0', '1'};

nlohmann::json shape_json(const Shape& s) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < s.rank; ++i) a.push_back(s[i]);
  return a;
}

Shape shape_from_json(const nlohmann::json& a) {
  std::vector<int> dims = a.get<std::vector<int>>();
  Shape s;
  if (dims.empty() || dims.size() > 5) throw IoError("checkpoint: bad tensor shape");
  s.rank = static_cast<int>(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] <= 0) throw IoError("checkpoint: bad tensor shape");
    s.d[i] = dims[i];
  }
  return s;
}

void append_tensor(std::string& out, const Tensor& t) {
  out.append(reinterpret_cast<const char*>(t.data()), t.v.size() * sizeof(float));
}

}  // namespace

void save_checkpoint(const CheckpointData& data, const std::string& path) {
  nlohmann::json header;
  header["kind"] = data.kind;
  header["meta"] = data.meta;
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& [name, t] : data.params) pj.push_back({{"name", name}, {"shape", shape_json(t.shape)}});
  header["params"] = pj;
  nlohmann::json aj = nlohmann::json::array();
  for (const auto& e : data.adam) aj.push_back({{"name", e.name}, {"shape", shape_json(e.m.shape)}});
  header["adam"] = {{"t", data.adam_t}, {"entries", aj}};

  std::string bytes;
  bytes.append(kMagic, sizeof(kMagic));
  const std::string hs = header.dump();
  put_u32(bytes, static_cast<uint32_t>(hs.size()));
  bytes += hs;
  for (const auto& [name, t] : data.params) append_tensor(bytes, t);
  for (const auto& e : data.adam) {
    append_tensor(bytes, e.m);
    append_tensor(bytes, e.v);
  }
  write_file_bytes(path, bytes);
}

namespace {

std::pair<nlohmann::json, ByteReader> open_checkpoint(const std::string& bytes,
                                                      const std::string& path) {
  ByteReader r(bytes.data(), bytes.size());
  const std::string magic = r.bytes(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a checkpoint file: " + path);
  const uint32_t hlen = r.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.bytes(hlen));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint header unreadable: " + std::string(e.what()));
  }
  return {header, r};
}

}  // namespace

CheckpointData load_checkpoint(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  auto [header, r] = open_checkpoint(bytes, path);
  CheckpointData data;
  try {
    data.kind = header.at("kind").get<std::string>();
    data.meta = header.value("meta", nlohmann::json::object());
    for (const auto& pj : header.at("params")) {
      Tensor t(shape_from_json(pj.at("shape")));
      r.floats(t.data(), t.v.size());
      data.params.emplace_back(pj.at("name").get<std::string>(), std::move(t));
    }
    const auto& aj = header.at("adam");
    data.adam_t = aj.at("t").get<int64_t>();
    for (const auto& ej : aj.at("entries")) {
      CheckpointData::AdamEntry e;
      e.name = ej.at("name").get<std::string>();
      const Shape s = shape_from_json(ej.at("shape"));
      e.m = Tensor(s);
      e.v = Tensor(s);
      r.floats(e.m.data(), e.m.v.size());
      r.floats(e.v.data(), e.v.v.size());
      data.adam.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint header malformed: " + std::string(e.what()));
  }
  return data;
}

std::pair<std::string, nlohmann::json> peek_checkpoint(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  auto [header, r] = open_checkpoint(bytes, path);
  try {
    return {header.at("kind").get<std::string>(), header.value("meta", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint header malformed: " + std::string(e.what()));
  }
}

CheckpointData snapshot_checkpoint(const std::string& kind, const nlohmann::json& meta,
                                   const std::vector<Param*>& params, const Adam* adam) {
  CheckpointData data;
  data.kind = kind;
  data.meta = meta;
  for (const Param* p : params) data.params.emplace_back(p->name, p->value);
  if (adam) {
    data.adam_t = adam->step_count();
    for (const auto& [name, mo] : adam->state()) {
      CheckpointData::AdamEntry e;
      e.name = name;
      e.m = mo.m;
      e.v = mo.v;
      data.adam.push_back(std::move(e));
    }
  }
  return data;
}

void restore_params(const CheckpointData& data, const std::vector<Param*>& params,
                    bool allow_missing, bool allow_extra) {
  std::map<std::string, Param*> by_name;
  for (Param* p : params) by_name[p->name] = p;
  size_t matched = 0;
  for (const auto& [name, t] : data.params) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      if (!allow_extra) throw IoError("checkpoint has unknown parameter: " + name);
      continue;
    }
    if (!(it->second->value.shape == t.shape))
      throw IoError("checkpoint shape mismatch for parameter: " + name);
    it->second->value = t;
    ++matched;
  }
  if (!allow_missing && matched != params.size())
    throw IoError("checkpoint is missing parameters for this model");
}

void restore_adam(const CheckpointData& data, Adam& adam) {
  adam.set_step_count(data.adam_t);
  adam.state().clear();
  for (const auto& e : data.adam) adam.state()[e.name] = {e.m, e.v};
}

}  // namespace framecast::nn
