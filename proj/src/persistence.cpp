#include "pagets/persistence.hpp"

#include "pagets/error.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <zlib.h>

namespace pagets {

namespace fs = std::filesystem;

namespace {

std::uint32_t crc_of(const std::string& bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void throw_errno(const std::string& what, int err) {
  const ErrorCode code = err == ENOSPC || err == EDQUOT ? ErrorCode::DiskFull : ErrorCode::IoError;
  throw Error(code, what + ": " + std::strerror(err));
}

void write_file(const fs::path& file, const std::string& bytes) {
  const int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("cannot create " + file.string(), errno);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + off, bytes.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw_errno("cannot write " + file.string(), err);
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw_errno("cannot sync " + file.string(), err);
  }
  if (::close(fd) != 0) throw_errno("cannot close " + file.string(), errno);
}

std::string read_file(const fs::path& file, ErrorCode missing) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(missing, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

template <class T>
void put(std::string& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), bytes.size());
  } else {
    out.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get(const std::string& in, std::size_t& off) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in.data() + off, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  off += sizeof(T);
  return std::bit_cast<T>(bytes);
}

std::string encode_array(const Eigen::MatrixXd& m) {
  std::string out;
  out.reserve(16 + static_cast<std::size_t>(m.size()) * 8);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.size(); ++i) put<double>(out, m.data()[i]);
  return out;
}

Eigen::MatrixXd decode_array(const std::string& bytes, const std::string& name) {
  if (bytes.size() < 16) throw Error(ErrorCode::ChecksumMismatch, name + " is truncated");
  std::size_t off = 0;
  const auto rows = get<std::uint64_t>(bytes, off);
  const auto cols = get<std::uint64_t>(bytes, off);
  if (rows != 0 && cols > (bytes.size() - 16) / 8 / rows)
    throw Error(ErrorCode::ChecksumMismatch, name + " is shorter than its dimensions");
  if (bytes.size() != 16 + rows * cols * 8) throw Error(ErrorCode::ChecksumMismatch, name + " has the wrong size");
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = get<double>(bytes, off);
  return m;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else if (c == '\r') out += "\\r";
    else out += c;
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    const char c = s[++i];
    out += c == 'n' ? '\n' : c == 'r' ? '\r' : c;
  }
  return out;
}

std::string opt_str(const std::optional<Index>& v) { return v ? std::to_string(*v) : "none"; }

// Key/value view of a manifest with typed, error-reporting accessors.
class Fields {
 public:
  explicit Fields(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::CorruptManifest, "malformed line '" + line + "'");
      kv_[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  bool has(const std::string& k) const { return kv_.count(k) != 0; }
  const std::string& str(const std::string& k) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) throw Error(ErrorCode::CorruptManifest, "missing key '" + k + "'");
    return it->second;
  }
  std::int64_t integer(const std::string& k) const {
    const std::string& v = str(k);
    std::int64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw Error(ErrorCode::CorruptManifest, "key '" + k + "' is not an integer");
    return out;
  }
  double real(const std::string& k) const {
    const std::string& v = str(k);
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw Error(ErrorCode::CorruptManifest, "key '" + k + "' is not a number");
    return out;
  }
  std::optional<Index> opt(const std::string& k) const {
    if (str(k) == "none") return std::nullopt;
    return static_cast<Index>(integer(k));
  }
  bool flag(const std::string& k) const { return integer(k) != 0; }
  const std::map<std::string, std::string>& all() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

fs::path sibling(const fs::path& dir, const std::string& suffix) {
  return dir.parent_path() / ("." + dir.filename().string() + suffix);
}

fs::path normalise_dir(const fs::path& dir) {
  fs::path p = dir.lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  if (p.is_relative()) p = fs::current_path() / p;
  return p;
}

void sweep_stale(const fs::path& dir) {
  std::error_code ec;
  const std::string prefix = "." + dir.filename().string() + ".staging-";
  for (const auto& e : fs::directory_iterator(dir.parent_path(), ec)) {
    if (e.path().filename().string().rfind(prefix, 0) == 0) fs::remove_all(e.path(), ec);
  }
}

}  // namespace

void write_array(const fs::path& file, const Eigen::MatrixXd& m) { write_file(file, encode_array(m)); }

Eigen::MatrixXd read_array(const fs::path& file) {
  return decode_array(read_file(file, ErrorCode::IoError), file.string());
}

struct ModelCodec {
  struct Writer {
    fs::path root;
    std::map<std::string, std::uint32_t> checksums;
    std::map<std::string, std::size_t> sizes;

    void array(const std::string& rel, const Eigen::MatrixXd& m) {
      const std::string bytes = encode_array(m);
      write_file(root / rel, bytes);
      checksums[rel] = crc_of(bytes);
      sizes[rel] = bytes.size();
    }
  };

  static void write_factor(Writer& w, const std::string& dir, const FactorModel& f, const std::string& sfx) {
    w.array(dir + "/U" + sfx + ".f64", f.full.U);
    w.array(dir + "/S" + sfx + ".f64", f.full.s);
    w.array(dir + "/V" + sfx + ".f64", f.full.V);
    w.array(dir + "/Uf" + sfx + ".f64", f.tilde.U);
    w.array(dir + "/Sf" + sfx + ".f64", f.tilde.s);
    w.array(dir + "/Vf" + sfx + ".f64", f.tilde.V);
    w.array(dir + "/Z" + sfx + ".f64", f.last_row);
  }

  static std::string manifest_text(const PredictionModel& m, const Writer& w) {
    std::ostringstream os;
    const HyperParams& hp = m.hp_;
    os << "format=pagets-model\n";
    os << "version=" << kFormatVersion << "\n";
    os << "series=" << m.num_series() << "\n";
    for (std::size_t i = 0; i < m.names_.size(); ++i) os << "series." << i << "=" << escape(m.names_[i]) << "\n";
    os << "hp.T0=" << hp.T0 << "\n";
    os << "hp.Tprime=" << hp.Tprime << "\n";
    os << "hp.gamma=" << fmt_double(hp.gamma) << "\n";
    os << "hp.L=" << opt_str(hp.L) << "\n";
    os << "hp.k1=" << opt_str(hp.k1) << "\n";
    os << "hp.k2=" << opt_str(hp.k2) << "\n";
    os << "hp.coeff_window=" << hp.coeff_window << "\n";
    os << "length=" << m.length_ << "\n";
    os << "observations=" << m.observations() << "\n";
    os << "raw_offset=" << m.raw_offset_ << "\n";
    os << "time_origin=" << m.time_origin_ << "\n";
    os << "time_step=" << m.time_step_ << "\n";
    os << "revision=" << m.revision_ << "\n";
    os << "coeff.models=" << m.coeff_cache_.models << "\n";
    os << "submodels=" << m.submodels_.size() << "\n";
    for (const SubModel& s : m.submodels_) {
      const std::string p = "sub." + std::to_string(s.index) + ".";
      os << p << "start=" << s.start << "\n";
      os << p << "L=" << s.L << "\n";
      os << p << "P0=" << s.P0 << "\n";
      os << p << "P=" << s.P << "\n";
      os << p << "obs_count=" << s.obs_count << "\n";
      os << p << "trained=" << int(s.trained) << "\n";
      os << p << "pending=" << int(s.pending_retrain) << "\n";
      os << p << "k1=" << s.mean.rank << "\n";
      os << p << "k1_tilde=" << s.mean.tilde_rank << "\n";
      os << p << "k2=" << s.var.rank << "\n";
      os << p << "k2_tilde=" << s.var.tilde_rank << "\n";
      os << p << "degenerate_mean=" << int(s.mean.degenerate) << "\n";
      os << p << "degenerate_var=" << int(s.var.degenerate) << "\n";
    }
    os << "events=" << m.events_.size() << "\n";
    for (std::size_t i = 0; i < m.events_.size(); ++i) {
      const RetrainEvent& e = m.events_[i];
      os << "event." << i << "=" << e.submodel << " " << e.observations << " " << e.segment_obs << " " << e.L << " "
         << e.k1 << " " << e.k2 << "\n";
    }
    for (const auto& [rel, crc] : w.checksums) os << "file." << rel << "=" << hex32(crc) << " " << w.sizes.at(rel) << "\n";
    std::string body = os.str();
    body += "checksum=" + hex32(crc_of(body)) + "\n";
    return body;
  }

  static void write_all(const PredictionModel& m, const fs::path& staging, const SaveOptions& opts) {
    Writer w{staging, {}, {}};
    const Index N = m.num_series();
    Eigen::MatrixXd stats(N, 3);
    stats.col(0) = m.sum_;
    stats.col(1) = m.sumsq_;
    stats.col(2) = m.count_;
    w.array("stats.f64", stats);
    w.array("raw.f64", Eigen::Map<const Eigen::MatrixXd>(m.raw_.data(), N, m.length_ - m.raw_offset_));
    Eigen::MatrixXd coeff(m.coeff_cache_.mean.size(), 2);
    coeff.col(0) = m.coeff_cache_.mean;
    coeff.col(1) = m.coeff_cache_.var;
    w.array("coeff_avg.f64", coeff);
    for (const SubModel& s : m.submodels_) {
      if (!s.trained) continue;
      const std::string dir = "sub_" + std::to_string(s.index);
      fs::create_directory(staging / dir);
      write_factor(w, dir, s.mean, "");
      write_factor(w, dir, s.var, "_var");
      w.array(dir + "/beta_mean.f64", s.mean.beta);
      w.array(dir + "/beta_var.f64", s.var.beta);
    }
    if (opts.fault_hook) opts.fault_hook(SaveStage::ArraysWritten);
    write_file(staging / "manifest.txt", manifest_text(m, w));
    sync_dir(staging);
    if (opts.fault_hook) opts.fault_hook(SaveStage::ManifestWritten);
  }

  static Fields verified_manifest(const fs::path& dir) {
    const std::string text = read_file(dir / "manifest.txt", ErrorCode::CorruptManifest);
    const Fields f(text);
    if (!f.has("format") || f.str("format") != "pagets-model")
      throw Error(ErrorCode::CorruptManifest, "not a model manifest");
    const auto version = f.integer("version");
    if (version > kFormatVersion)
      throw Error(ErrorCode::VersionUnsupported,
                  "format version " + std::to_string(version) + " is newer than " + std::to_string(kFormatVersion));
    if (version < 1) throw Error(ErrorCode::CorruptManifest, "invalid format version");
    const auto pos = text.rfind("checksum=");
    if (pos == std::string::npos || (pos != 0 && text[pos - 1] != '\n'))
      throw Error(ErrorCode::CorruptManifest, "manifest checksum missing");
    if (hex32(crc_of(text.substr(0, pos))) != f.str("checksum"))
      throw Error(ErrorCode::CorruptManifest, "manifest checksum does not match");
    return f;
  }

  struct Reader {
    fs::path root;
    const Fields& f;

    Eigen::MatrixXd array(const std::string& rel) const {
      const std::string key = "file." + rel;
      if (!f.has(key)) throw Error(ErrorCode::CorruptManifest, "manifest does not list " + rel);
      const std::string& entry = f.str(key);
      const auto sp = entry.find(' ');
      if (sp == std::string::npos) throw Error(ErrorCode::CorruptManifest, "malformed entry for " + rel);
      const std::string bytes = read_file(root / rel, ErrorCode::ChecksumMismatch);
      if (std::to_string(bytes.size()) != entry.substr(sp + 1) || hex32(crc_of(bytes)) != entry.substr(0, sp))
        throw Error(ErrorCode::ChecksumMismatch, rel + " does not match its checksum");
      return decode_array(bytes, rel);
    }

    static TruncatedSVD svd(Eigen::MatrixXd U, const Eigen::MatrixXd& s, Eigen::MatrixXd V) {
      if (s.cols() != 1 || U.cols() != s.rows() || V.cols() != s.rows())
        throw Error(ErrorCode::CorruptManifest, "inconsistent factor shapes");
      TruncatedSVD out;
      out.U = std::move(U);
      out.s = s.col(0);
      out.V = std::move(V);
      return out;
    }

    void factor(FactorModel& fm, const std::string& dir, const std::string& sfx, const std::string& beta) const {
      fm.full = svd(array(dir + "/U" + sfx + ".f64"), array(dir + "/S" + sfx + ".f64"), array(dir + "/V" + sfx + ".f64"));
      fm.tilde =
          svd(array(dir + "/Uf" + sfx + ".f64"), array(dir + "/Sf" + sfx + ".f64"), array(dir + "/Vf" + sfx + ".f64"));
      fm.last_row = array(dir + "/Z" + sfx + ".f64").col(0);
      fm.beta = array(dir + "/" + beta + ".f64").col(0);
    }
  };

  static PredictionModel load(const fs::path& dir) {
    const Fields f = verified_manifest(dir);
    const Reader r{dir, f};

    const auto N = f.integer("series");
    if (N < 1) throw Error(ErrorCode::CorruptManifest, "series count must be >= 1");
    std::vector<std::string> names;
    for (std::int64_t i = 0; i < N; ++i) names.push_back(unescape(f.str("series." + std::to_string(i))));
    HyperParams hp;
    hp.T0 = f.integer("hp.T0");
    hp.Tprime = f.integer("hp.Tprime");
    hp.gamma = f.real("hp.gamma");
    hp.L = f.opt("hp.L");
    hp.k1 = f.opt("hp.k1");
    hp.k2 = f.opt("hp.k2");
    hp.coeff_window = static_cast<Index>(f.integer("hp.coeff_window"));

    PredictionModel m = [&] {
      try {
        return PredictionModel(std::move(names), hp);
      } catch (const Error& e) {
        throw Error(ErrorCode::CorruptManifest, std::string("invalid hyper-parameters: ") + e.what());
      }
    }();
    m.length_ = static_cast<Index>(f.integer("length"));
    m.raw_offset_ = static_cast<Index>(f.integer("raw_offset"));
    m.time_origin_ = f.integer("time_origin");
    m.time_step_ = f.integer("time_step");
    m.revision_ = static_cast<std::uint64_t>(f.integer("revision"));
    if (m.length_ < 0 || m.raw_offset_ < 0 || m.raw_offset_ > m.length_)
      throw Error(ErrorCode::CorruptManifest, "inconsistent stream length");

    const Eigen::MatrixXd stats = r.array("stats.f64");
    if (stats.rows() != N || stats.cols() != 3) throw Error(ErrorCode::CorruptManifest, "stats has the wrong shape");
    m.sum_ = stats.col(0);
    m.sumsq_ = stats.col(1);
    m.count_ = stats.col(2);
    const Eigen::MatrixXd raw = r.array("raw.f64");
    if (raw.rows() != N || raw.cols() != m.length_ - m.raw_offset_)
      throw Error(ErrorCode::CorruptManifest, "raw buffer has the wrong shape");
    m.raw_.assign(raw.data(), raw.data() + raw.size());

    const auto count = f.integer("submodels");
    for (std::int64_t i = 0; i < count; ++i) {
      const std::string p = "sub." + std::to_string(i) + ".";
      SubModel s;
      s.index = static_cast<Index>(i);
      s.start = static_cast<Index>(f.integer(p + "start"));
      s.L = static_cast<Index>(f.integer(p + "L"));
      s.P0 = static_cast<Index>(f.integer(p + "P0"));
      s.P = static_cast<Index>(f.integer(p + "P"));
      s.N = static_cast<Index>(N);
      s.obs_count = f.integer(p + "obs_count");
      s.trained = f.flag(p + "trained");
      s.pending_retrain = f.flag(p + "pending");
      s.mean.rank = static_cast<Index>(f.integer(p + "k1"));
      s.mean.tilde_rank = static_cast<Index>(f.integer(p + "k1_tilde"));
      s.var.rank = static_cast<Index>(f.integer(p + "k2"));
      s.var.tilde_rank = static_cast<Index>(f.integer(p + "k2_tilde"));
      s.mean.degenerate = f.flag(p + "degenerate_mean");
      s.var.degenerate = f.flag(p + "degenerate_var");
      if (s.trained) {
        const std::string d = "sub_" + std::to_string(i);
        r.factor(s.mean, d, "", "beta_mean");
        r.factor(s.var, d, "_var", "beta_var");
        if (s.mean.full.rows() != s.L || s.mean.full.cols() != N * s.P)
          throw Error(ErrorCode::CorruptManifest, "sub-model " + std::to_string(i) + " factors disagree with L, P");
      }
      m.submodels_.push_back(std::move(s));
    }

    const auto events = f.integer("events");
    for (std::int64_t i = 0; i < events; ++i) {
      std::istringstream in(f.str("event." + std::to_string(i)));
      RetrainEvent e;
      if (!(in >> e.submodel >> e.observations >> e.segment_obs >> e.L >> e.k1 >> e.k2))
        throw Error(ErrorCode::CorruptManifest, "malformed retrain event");
      m.events_.push_back(e);
    }

    const Eigen::MatrixXd coeff = r.array("coeff_avg.f64");
    CoefficientAverage fresh = m.coefficient_average(hp.coeff_window);
    const bool stale = coeff.cols() != 2 || coeff.rows() != fresh.mean.size() ||
                       f.integer("coeff.models") != fresh.models || coeff.col(0) != fresh.mean ||
                       coeff.col(1) != fresh.var;
    if (stale) {
      m.coeff_cache_ = std::move(fresh);
    } else {
      m.coeff_cache_.mean = coeff.col(0);
      m.coeff_cache_.var = coeff.col(1);
      m.coeff_cache_.models = fresh.models;
    }
    return m;
  }
};

ModelManifest read_manifest(const fs::path& dir_in) {
  fs::path dir = normalise_dir(dir_in);
  if (!fs::exists(dir / "manifest.txt") && fs::exists(sibling(dir, ".prev") / "manifest.txt"))
    dir = sibling(dir, ".prev");
  const Fields f = ModelCodec::verified_manifest(dir);
  ModelManifest out;
  out.version = static_cast<int>(f.integer("version"));
  for (std::int64_t i = 0; i < f.integer("series"); ++i) out.names.push_back(unescape(f.str("series." + std::to_string(i))));
  out.hp.T0 = f.integer("hp.T0");
  out.hp.Tprime = f.integer("hp.Tprime");
  out.hp.gamma = f.real("hp.gamma");
  out.hp.L = f.opt("hp.L");
  out.hp.k1 = f.opt("hp.k1");
  out.hp.k2 = f.opt("hp.k2");
  out.hp.coeff_window = static_cast<Index>(f.integer("hp.coeff_window"));
  out.length = static_cast<Index>(f.integer("length"));
  for (std::int64_t i = 0; i < f.integer("submodels"); ++i) {
    const std::string p = "sub." + std::to_string(i) + ".";
    out.submodels.push_back({static_cast<Index>(f.integer(p + "start")), static_cast<Index>(f.integer(p + "L")),
                             static_cast<Index>(f.integer(p + "P")), static_cast<Index>(f.integer(p + "k1")),
                             static_cast<Index>(f.integer(p + "k2")), f.integer(p + "obs_count")});
  }
  for (const auto& [k, v] : f.all()) {
    if (k.rfind("file.", 0) != 0) continue;
    out.checksums[k.substr(5)] = static_cast<std::uint32_t>(std::stoul(v.substr(0, v.find(' ')), nullptr, 16));
  }
  return out;
}

ModelManifest save_model(const PredictionModel& model, const fs::path& dir_in, const SaveOptions& opts) {
  const fs::path dir = normalise_dir(dir_in);
  std::error_code ec;
  fs::create_directories(dir.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.parent_path().string() + ": " + ec.message());
  sweep_stale(dir);

  static std::atomic<unsigned> counter{0};
  const fs::path staging =
      sibling(dir, ".staging-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  if (!fs::create_directory(staging, ec) || ec)
    throw Error(ErrorCode::IoError, "cannot create " + staging.string() + ": " + ec.message());

  try {
    ModelCodec::write_all(model, staging, opts);
  } catch (const Error&) {
    if (!opts.fault_hook) fs::remove_all(staging, ec);
    throw;
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw Error(ErrorCode::IoError, e.what());
  }

  if (opts.fault_hook) opts.fault_hook(SaveStage::BeforeSwap);
  const fs::path prev = sibling(dir, ".prev");
  if (!fs::exists(dir)) {
    if (std::rename(staging.c_str(), dir.c_str()) != 0) throw_errno("cannot publish " + dir.string(), errno);
  } else if (::renameat2(AT_FDCWD, staging.c_str(), AT_FDCWD, dir.c_str(), RENAME_EXCHANGE) == 0) {
    // `staging` now holds the previous version.
  } else if (errno == EINVAL || errno == ENOSYS) {
    fs::remove_all(prev, ec);
    if (std::rename(dir.c_str(), prev.c_str()) != 0) throw_errno("cannot retire " + dir.string(), errno);
    if (std::rename(staging.c_str(), dir.c_str()) != 0) throw_errno("cannot publish " + dir.string(), errno);
  } else {
    throw_errno("cannot swap " + dir.string(), errno);
  }
  sync_dir(dir.parent_path());
  if (opts.fault_hook) opts.fault_hook(SaveStage::AfterSwap);
  fs::remove_all(staging, ec);
  fs::remove_all(prev, ec);
  return read_manifest(dir);
}

PredictionModel load_model(const fs::path& dir_in) {
  const fs::path dir = normalise_dir(dir_in);
  if (!fs::exists(dir / "manifest.txt")) {
    // A fallback swap interrupted between its two renames leaves only the retired copy.
    const fs::path prev = sibling(dir, ".prev");
    if (fs::exists(prev / "manifest.txt")) return ModelCodec::load(prev);
    throw Error(ErrorCode::CorruptManifest, "no manifest in " + dir.string());
  }
  return ModelCodec::load(dir);
}

}  // namespace pagets
