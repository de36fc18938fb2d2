#pragma once

#include "surfsketch/session.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace surfsketch {

struct ServiceConfig {
  std::filesystem::path model_dir = ".";
  int layer_size = kDefaultLayerSize;
  VectorizeOptions vectorize;
};

// Session registry. Commands on one session are serialized; different
// sessions run concurrently. Meshes are loaded once per reference and shared.
class Service {
 public:
  explicit Service(ServiceConfig config);

  const ServiceConfig& config() const { return config_; }

  // Makes an in-memory mesh available under `ref` without touching disk.
  void register_mesh(const std::string& ref, std::shared_ptr<const Mesh> mesh);
  std::shared_ptr<const SpatialIndex> mesh_index(const std::string& ref);
  // Mesh file contents for a reference (OBJ text).
  std::string mesh_source(const std::string& ref);

  std::string create_session(const std::string& mesh_ref);
  void close_session(const std::string& id);
  std::vector<std::string> session_ids() const;

  template <class F>
  decltype(auto) with_session(const std::string& id, F&& f) {
    const std::shared_ptr<Slot> slot = find(id);
    std::lock_guard lock(slot->mutex);
    return f(*slot->session);
  }

 private:
  struct Slot {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    std::string mesh_ref;
  };

  std::shared_ptr<Slot> find(const std::string& id) const;
  std::filesystem::path resolve(const std::string& ref) const;

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::map<std::string, std::shared_ptr<const SpatialIndex>> indices_;
  std::map<std::string, std::shared_ptr<const Mesh>> registered_;
  std::uint64_t next_session_ = 1;
};

}  // namespace surfsketch
