#include "rootmle/record_store.hpp"

#include <cstring>
#include <sstream>

#include "rootmle/io.hpp"

namespace rootmle {
namespace {

namespace fs = std::filesystem;

constexpr const char* kManifestName = "manifest.txt";
constexpr const char* kRecordsName = "records.bin";
constexpr std::size_t kHeaderBytes = 8 + 4 + 8 + 8 + 4;

// Multi-line tables are stored on one manifest line with ';' between rows.
std::string one_line(const std::string& table) {
  std::string out = table;
  while (!out.empty() && out.back() == '\n') out.pop_back();
  for (char& c : out)
    if (c == '\n') c = ';';
  return out;
}

std::string multi_line(const std::string& line) {
  std::string out = line;
  for (char& c : out)
    if (c == ';') c = '\n';
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T take(const char*& p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  p += sizeof(T);
  return value;
}

}  // namespace

std::string StoreManifest::canonical_text() const {
  std::ostringstream out;
  out << "format = 1\n"
      << "states = " << counts.states() << '\n'
      << "counts = " << one_line(format_counts_csv(counts)) << '\n'
      << "mask = " << one_line(format_mask_csv(mask)) << '\n'
      << "cycles = " << cycles << '\n'
      << "denominators = ";
  for (std::size_t i = 0; i < denominators.size(); ++i) out << (i ? "," : "") << denominators[i];
  out << '\n' << "grid_size = " << grid_size << '\n' << format_settings(settings);
  return out.str();
}

std::string StoreManifest::fingerprint() const { return fnv1a_hex(canonical_text()); }

std::string StoreManifest::to_text() const {
  return "# rootmle grid-search store\n" + canonical_text() + "fingerprint = " + fingerprint() + '\n';
}

StoreManifest StoreManifest::parse(const std::string& text) {
  auto kv = parse_key_values(text);
  auto take_key = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InputError("store manifest lacks '" + key + "'");
    std::string value = it->second;
    kv.erase(it);
    return value;
  };
  if (take_key("format") != "1") throw InputError("unsupported store format");
  StoreManifest m{parse_counts_csv(multi_line(take_key("counts"))),
                  parse_mask_csv(multi_line(take_key("mask"))),
                  1, {}, {}, 0};
  if (std::stoll(take_key("states")) != m.counts.states())
    throw InputError("store manifest state count disagrees with counts");
  m.cycles = parse_int_list(take_key("cycles")).at(0);
  m.denominators = parse_int_list(take_key("denominators"));
  m.grid_size = static_cast<std::uint64_t>(parse_int64_list(take_key("grid_size")).at(0));
  const std::string stored = take_key("fingerprint");
  std::ostringstream rest;
  for (const auto& [key, value] : kv) rest << key << " = " << value << '\n';
  m.settings = parse_settings(rest.str());
  if (m.fingerprint() != stored) throw InputError("store manifest fingerprint does not match its contents");
  return m;
}

RecordStore::RecordStore(fs::path dir, StoreManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

bool RecordStore::exists(const fs::path& dir) { return fs::exists(dir / kManifestName); }

std::size_t RecordStore::record_size() const {
  return kHeaderBytes + 8 * static_cast<std::size_t>(manifest_.mask.free_count());
}

RecordStore RecordStore::create(const fs::path& dir, const StoreManifest& manifest) {
  if (exists(dir)) throw InputError("a store already exists at " + dir.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create store directory " + dir.string() + ": " + ec.message());
  write_text_file(dir / kManifestName, manifest.to_text());
  write_text_file(dir / kRecordsName, "");
  RecordStore store(dir, manifest);
  store.open_for_append();
  return store;
}

RecordStore RecordStore::open(const fs::path& dir) {
  if (!exists(dir)) throw InputError("no store at " + dir.string());
  RecordStore store(dir, StoreManifest::parse(read_text_file(dir / kManifestName)));
  const fs::path records_path = dir / kRecordsName;
  const std::string bytes = fs::exists(records_path) ? read_text_file(records_path) : std::string();
  const std::size_t size = store.record_size();
  const std::size_t whole = bytes.size() / size;
  if (whole * size != bytes.size()) fs::resize_file(records_path, whole * size);

  const auto entries = store.manifest_.mask.free_entries();
  const char* p = bytes.data();
  store.records_.reserve(whole);
  for (std::size_t r = 0; r < whole; ++r) {
    ConvergenceRecord rec;
    rec.start_id = take<std::uint64_t>(p);
    const auto status = take<std::uint32_t>(p);
    if (status > 2) throw Error("corrupt record in " + records_path.string());
    rec.status = static_cast<ConvergenceStatus>(status);
    rec.loglik = take<double>(p);
    rec.grad_linf = take<double>(p);
    rec.outer_iters = take<std::uint32_t>(p);
    Eigen::MatrixXd theta = store.manifest_.mask.fixed_template();
    for (const auto& [i, j] : entries) theta(i, j) = take<double>(p);
    rec.theta_final = ThetaParam(theta, store.manifest_.mask);
    store.records_.push_back(std::move(rec));
  }
  store.open_for_append();
  return store;
}

void RecordStore::open_for_append() {
  out_.open(dir_ / kRecordsName, std::ios::binary | std::ios::app);
  if (!out_) throw Error("cannot open " + (dir_ / kRecordsName).string() + " for writing");
}

void RecordStore::append(const ConvergenceRecord& record) {
  std::string buf;
  buf.reserve(record_size());
  put<std::uint64_t>(buf, record.start_id);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(record.status));
  put<double>(buf, record.loglik);
  put<double>(buf, record.grad_linf);
  put<std::uint32_t>(buf, record.outer_iters);
  for (const auto& [i, j] : manifest_.mask.free_entries()) put<double>(buf, record.theta_final(i, j));
  out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out_) throw Error("write failed for store " + dir_.string());
  records_.push_back(record);
}

void RecordStore::flush() {
  out_.flush();
  if (!out_) throw Error("flush failed for store " + dir_.string());
}

}  // namespace rootmle
