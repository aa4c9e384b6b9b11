#include "xalign/adapter.hpp"

#include <fstream>

#include "xalign/blob.hpp"

namespace xalign {

namespace {
constexpr char kMagic[9] = "XALNADPT";
constexpr std::uint32_t kVersion = 1;
}  // namespace

const LoraFactor* AdapterWeights::find(const std::string& target) const {
  for (const auto& f : factors)
    if (f.target == target) return &f;
  return nullptr;
}

AdapterWeights AdapterWeights::zeros_like() const {
  AdapterWeights out = *this;
  for (auto& f : out.factors) {
    std::fill(f.a.begin(), f.a.end(), 0.0);
    std::fill(f.b.begin(), f.b.end(), 0.0);
  }
  return out;
}

void save_adapter(const std::filesystem::path& path, const AdapterWeights& adapter) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write adapter '" + path.string() + "'");
  out.write(kMagic, 8);
  blob::put<std::uint32_t>(out, kVersion);
  blob::put_string(out, adapter.architecture);
  blob::put_string(out, adapter.config_fingerprint);
  blob::put<std::uint64_t>(out, adapter.rank);
  blob::put<double>(out, adapter.alpha);
  blob::put<std::uint32_t>(out, static_cast<std::uint32_t>(adapter.factors.size()));
  for (const auto& f : adapter.factors) {
    blob::put_string(out, f.target);
    blob::put<std::uint64_t>(out, f.out_dim);
    blob::put<std::uint64_t>(out, f.in_dim);
    blob::put_doubles(out, f.a);
    blob::put_doubles(out, f.b);
  }
  if (!out) throw DataError("failed writing adapter '" + path.string() + "'");
}

AdapterWeights load_adapter(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open adapter '" + path.string() + "'");
  blob::expect_magic(in, kMagic, kVersion);
  AdapterWeights adapter;
  adapter.architecture = blob::get_string(in);
  adapter.config_fingerprint = blob::get_string(in);
  adapter.rank = blob::get<std::uint64_t>(in);
  adapter.alpha = blob::get<double>(in);
  const auto n = blob::get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    LoraFactor f;
    f.target = blob::get_string(in);
    f.out_dim = blob::get<std::uint64_t>(in);
    f.in_dim = blob::get<std::uint64_t>(in);
    f.a = blob::get_doubles(in, adapter.rank * f.in_dim);
    f.b = blob::get_doubles(in, f.out_dim * adapter.rank);
    adapter.factors.push_back(std::move(f));
  }
  return adapter;
}

}  // namespace xalign
