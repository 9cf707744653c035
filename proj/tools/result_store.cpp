#include "result_store.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <thread>

#include <openssl/evp.h>
#include <unistd.h>

#include "hklab/io.hpp"

namespace hklab::cli {

namespace fs = std::filesystem;

ResultStore::ResultStore(fs::path root, Warn warn) : root_(std::move(root)), warn_(std::move(warn)) {
  fs::create_directories(root_);
}

std::string ResultStore::key(std::uint64_t p, int n, const std::string& ring_canonical, const std::string& ideal_canonical,
                             const std::string& version) {
  const std::string material = "colength\n" + version + "\np=" + std::to_string(p) + "\nn=" + std::to_string(n) + "\nring=" +
                               ring_canonical + "\nideal=" + ideal_canonical + "\n";
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

fs::path ResultStore::path_for(const std::string& key) const {
  if (key.size() < 3) throw std::invalid_argument("store key too short");
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::mutex& ResultStore::stripe(const std::string& key) {
  return stripes_[std::hash<std::string>{}(key) % stripes_.size()];
}

std::optional<ColengthRecord> ResultStore::get(const std::string& key) const {
  const fs::path path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    Json entry = Json::parse(in);
    if (entry.at("key").get<std::string>() != key) throw MathError("key mismatch");
    return colength_record_from_json(entry.at("record"));
  } catch (const std::exception& e) {
    if (warn_) warn_("ignoring corrupt cache entry " + path.string() + ": " + e.what());
    return std::nullopt;
  }
}

void ResultStore::put(const std::string& key, const ColengthRecord& record) {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path path = path_for(key);
  fs::create_directories(path.parent_path());

  std::ostringstream tag;
  tag << ".tmp." << ::getpid() << '.' << std::this_thread::get_id() << '.' << counter.fetch_add(1);
  const fs::path tmp = path.string() + tag.str();

  std::lock_guard lock(stripe(key));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << Json{{"key", key}, {"record", to_json(record)}}.dump() << '\n';
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("cannot write cache entry " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace hklab::cli
