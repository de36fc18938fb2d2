#include "surfsketch/service.hpp"

#include "surfsketch/error.hpp"
#include "surfsketch/io/obj.hpp"

#include <fstream>
#include <sstream>

namespace surfsketch {

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.layer_size <= 0) fail(ErrorCode::kArgument, "layer size must be positive");
}

void Service::register_mesh(const std::string& ref, std::shared_ptr<const Mesh> mesh) {
  std::lock_guard lock(mutex_);
  registered_[ref] = std::move(mesh);
  indices_.erase(ref);
}

std::filesystem::path Service::resolve(const std::string& ref) const {
  const std::filesystem::path rel(ref);
  if (ref.empty() || rel.is_absolute()) fail(ErrorCode::kNotFound, "unknown mesh '" + ref + "'");
  for (const auto& part : rel) {
    if (part == "..") fail(ErrorCode::kNotFound, "unknown mesh '" + ref + "'");
  }
  return config_.model_dir / rel;
}

std::shared_ptr<const SpatialIndex> Service::mesh_index(const std::string& ref) {
  std::lock_guard lock(mutex_);
  if (auto it = indices_.find(ref); it != indices_.end()) return it->second;
  std::shared_ptr<const Mesh> mesh;
  if (auto it = registered_.find(ref); it != registered_.end()) {
    mesh = it->second;
  } else {
    mesh = std::make_shared<const Mesh>(io::load_obj(resolve(ref)));
  }
  auto index = std::make_shared<const SpatialIndex>(mesh);
  indices_[ref] = index;
  return index;
}

std::string Service::mesh_source(const std::string& ref) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = registered_.find(ref); it != registered_.end()) return io::write_obj(*it->second);
  }
  const std::filesystem::path path = resolve(ref);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "unknown mesh '" + ref + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Service::create_session(const std::string& mesh_ref) {
  const auto index = mesh_index(mesh_ref);
  std::lock_guard lock(mutex_);
  const std::string id = "s" + std::to_string(next_session_++);
  auto slot = std::make_shared<Slot>();
  slot->session = std::make_unique<Session>(id, index, config_.layer_size, config_.vectorize);
  slot->mesh_ref = mesh_ref;
  sessions_[id] = std::move(slot);
  return id;
}

void Service::close_session(const std::string& id) {
  const std::shared_ptr<Slot> slot = find(id);
  std::lock_guard lock(slot->mutex);
  if (slot->session->closed()) fail(ErrorCode::kSessionClosed, "session " + id + " is closed");
  slot->session->close();
}

std::vector<std::string> Service::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, slot] : sessions_) out.push_back(id);
  return out;
}

std::shared_ptr<Service::Slot> Service::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ErrorCode::kNotFound, "no session '" + id + "'");
  return it->second;
}

}  // namespace surfsketch
