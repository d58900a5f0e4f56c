// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "steerkit/io.hpp"

namespace steer::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    U bits;
    std::memcpy(&bits, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
    }
  }
  void magic(const char (&m)[5]) { out_.insert(out_.end(), m, m + 4); }
  void str(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void need(std::size_t n, std::string_view what) const {
    if (remaining() < n) {
      throw UnexpectedEof("unexpected end of data at byte offset " + std::to_string(data_.size()) +
                          " while reading " + std::string(what) + " starting at offset " +
                          std::to_string(pos_) + " (need " + std::to_string(n) + " bytes, have " +
                          std::to_string(remaining()) + ")");
    }
  }

  template <typename T>
  T get(std::string_view what) {
    need(sizeof(T), what);
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(U{data_[pos_ + i]} << (8 * i));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
  }

  double finite_f64(std::string_view what) {
    const std::size_t at = pos_;
    const double v = get<double>(what);
    if (!std::isfinite(v)) {
      throw InvalidValue("non-finite " + std::string(what) + " at byte offset " + std::to_string(at));
    }
    return v;
  }

  void magic(const char (&m)[5], std::string_view format) {
    need(4, "magic");
    if (std::memcmp(data_.data() + pos_, m, 4) != 0) {
      throw FormatError("bad magic at byte offset 0: not a " + std::string(format) + " file");
    }
    pos_ += 4;
    const std::size_t at = pos_;
    const auto version = get<std::uint32_t>("version");
    if (version != kVersion) {
      throw FormatError("unsupported " + std::string(format) + " version " + std::to_string(version) +
                        " at byte offset " + std::to_string(at));
    }
  }

  std::string str(std::string_view what) {
    const auto len = get<std::uint32_t>(what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), len);
    pos_ += len;
    return s;
  }

  void expect_end(std::string_view format) const {
    if (remaining() != 0) {
      throw FormatError(std::to_string(remaining()) + " trailing bytes after " + std::string(format) +
                        " payload at byte offset " + std::to_string(pos_));
    }
  }

  const std::uint8_t* cursor() const { return data_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

// Overflow-checked a * b.
bool mul_ok(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return false;
  out = a * b;
  return true;
}

}  // namespace

Bytes encode_actv(const ActivationSet& acts) {
  Writer w;
  w.magic("ACTV");
  w.put<std::uint32_t>(kVersion);
  w.str(acts.model_id());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(acts.layer_ids().size()));
  for (int id : acts.layer_ids()) w.put<std::int32_t>(id);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(acts.hidden_dim()));
  w.put<std::uint64_t>(acts.rows());
  std::vector<const MatrixXd*> layers;
  for (int id : acts.layer_ids()) layers.push_back(&acts.layer(id));
  for (std::size_t r = 0; r < acts.rows(); ++r) {
    w.put<std::uint64_t>(acts.prompt_ids()[r]);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(acts.stances()[r]));
    for (const MatrixXd* m : layers) {
      for (Eigen::Index j = 0; j < acts.hidden_dim(); ++j) {
        const auto f = static_cast<float>((*m)(static_cast<Eigen::Index>(r), j));
        if (!std::isfinite(f)) throw InvalidValue("encode_actv: value not representable as float32");
        w.put<float>(f);
      }
    }
  }
  return w.take();
}

ActivationSet decode_actv(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic("ACTV", "ACTV");
  std::string model_id = r.str("model_id");
  if (!valid_utf8(model_id)) throw FormatError("ACTV model_id is not valid UTF-8");
  const auto n_layers = r.get<std::uint32_t>("layer count");
  if (n_layers == 0) throw FormatError("ACTV layer count is zero");
  std::uint64_t layer_bytes = 0;
  mul_ok(n_layers, 4, layer_bytes);
  r.need(layer_bytes, "layer ids");
  std::vector<int> layer_ids;
  std::set<int> seen;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const int id = r.get<std::int32_t>("layer id");
    if (!seen.insert(id).second) throw FormatError("ACTV duplicate layer id " + std::to_string(id));
    layer_ids.push_back(id);
  }
  const auto d = r.get<std::uint32_t>("hidden_dim");
  if (d == 0) throw FormatError("ACTV hidden_dim is zero");
  const auto n_rows = r.get<std::uint64_t>("row count");

  std::uint64_t floats_per_row = 0, row_bytes = 0, total = 0;
  if (!mul_ok(n_layers, d, floats_per_row) || !mul_ok(floats_per_row, 4, row_bytes) ||
      (row_bytes += 9, !mul_ok(n_rows, row_bytes, total))) {
    throw FormatError("ACTV declared sizes overflow");
  }
  if (r.remaining() < total) {
    const std::uint64_t complete = r.remaining() / row_bytes;
    throw UnexpectedEof("ACTV truncated in row " + std::to_string(complete) + " of " +
                        std::to_string(n_rows) + ": data ends at byte offset " +
                        std::to_string(bytes.size()) + ", row starts at byte offset " +
                        std::to_string(r.offset() + complete * row_bytes));
  }
  if (r.remaining() > total) {
    throw FormatError("ACTV has " + std::to_string(r.remaining() - total) +
                      " trailing bytes after " + std::to_string(n_rows) + " rows");
  }

  const auto n = static_cast<Eigen::Index>(n_rows);
  std::vector<MatrixXd> layers(n_layers, MatrixXd(n, static_cast<Eigen::Index>(d)));
  std::vector<std::uint64_t> prompt_ids;
  std::vector<Stance> stances;
  for (Eigen::Index i = 0; i < n; ++i) {
    prompt_ids.push_back(r.get<std::uint64_t>("prompt id"));
    const std::size_t stance_at = r.offset();
    const auto stance = r.get<std::uint8_t>("stance");
    if (stance > 1) {
      throw FormatError("ACTV stance byte " + std::to_string(stance) + " at byte offset " +
                        std::to_string(stance_at));
    }
    stances.push_back(static_cast<Stance>(stance));
    for (std::uint32_t l = 0; l < n_layers; ++l) {
      for (std::uint32_t j = 0; j < d; ++j) {
        const std::size_t at = r.offset();
        const float f = r.get<float>("activation");
        if (!std::isfinite(f)) {
          throw InvalidValue("ACTV non-finite activation at byte offset " + std::to_string(at));
        }
        layers[l](i, j) = f;
      }
    }
  }
  ActivationSet acts = ActivationSet::from_layers(std::move(model_id), layer_ids,
                                                  std::move(prompt_ids), std::move(stances),
                                                  std::move(layers));
  r.expect_end("ACTV");
  return acts;
}

namespace {
enum SvecFlags : std::uint8_t {
  kHasEnsemble = 1 << 0,
  kHasScale = 1 << 1,
  kNotConverged = 1 << 2,
  kSignCorrected = 1 << 3,
};
}  // namespace

Bytes encode_svec(const SteeringVector& v) {
  const bool is_ensemble = v.method == VectorMethod::kEnsemble;
  if (is_ensemble != v.ensemble.has_value() || is_ensemble == v.layer_id.has_value()) {
    throw FormatError("encode_svec: ensemble vectors need provenance and no layer id; others the reverse");
  }
  Writer w;
  w.magic("SVEC");
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(v.method));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(v.axis));
  std::uint8_t flags = 0;
  if (v.ensemble) flags |= kHasEnsemble;
  if (v.destandardize_scale) flags |= kHasScale;
  if (!v.converged) flags |= kNotConverged;
  if (v.sign_corrected) flags |= kSignCorrected;
  w.put<std::uint8_t>(flags);
  w.put<std::uint8_t>(0);
  w.str(v.language.code());
  w.put<std::int32_t>(v.layer_id.value_or(-1));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(v.dim()));
  for (Eigen::Index i = 0; i < v.dim(); ++i) w.put<double>(v.direction(i));
  for (double q : {v.quality.accuracy, v.quality.separation, v.quality.mu_pos, v.quality.mu_neg,
                   v.quality.pooled_std, v.quality.q}) {
    w.put<double>(q);
  }
  if (v.ensemble) {
    const auto& e = *v.ensemble;
    if (e.weights.size() != e.layer_ids.size() || e.member_q.size() != e.layer_ids.size()) {
      throw FormatError("encode_svec: ensemble provenance lengths disagree");
    }
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.layer_ids.size()));
    for (int id : e.layer_ids) w.put<std::int32_t>(id);
    for (double x : e.weights) w.put<double>(x);
    for (double x : e.member_q) w.put<double>(x);
  }
  if (v.destandardize_scale) {
    if (v.destandardize_scale->size() != v.dim()) throw FormatError("encode_svec: scale length");
    for (Eigen::Index i = 0; i < v.dim(); ++i) w.put<double>((*v.destandardize_scale)(i));
  }
  return w.take();
}

SteeringVector decode_svec(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic("SVEC", "SVEC");
  SteeringVector v;
  const auto method = r.get<std::uint8_t>("method");
  if (method > 2) throw FormatError("SVEC method byte " + std::to_string(method) + " at byte offset 8");
  v.method = static_cast<VectorMethod>(method);
  const auto axis = r.get<std::uint8_t>("axis");
  if (axis > 1) throw FormatError("SVEC axis byte " + std::to_string(axis) + " at byte offset 9");
  v.axis = static_cast<BiasAxis>(axis);
  const auto flags = r.get<std::uint8_t>("flags");
  if (flags & ~0x0F) throw FormatError("SVEC unknown flag bits at byte offset 10");
  if (r.get<std::uint8_t>("reserved") != 0) throw FormatError("SVEC reserved byte not zero at offset 11");
  const std::string lang = r.str("language");
  if (!LanguageTag::is_valid(lang)) throw FormatError("SVEC invalid language tag '" + lang + "'");
  v.language = LanguageTag(lang);
  const std::size_t layer_at = r.offset();
  const auto layer = r.get<std::int32_t>("layer id");
  const bool is_ensemble = v.method == VectorMethod::kEnsemble;
  if (is_ensemble != (layer == -1) || is_ensemble != bool(flags & kHasEnsemble)) {
    throw FormatError("SVEC layer id / method / provenance inconsistent at byte offset " +
                      std::to_string(layer_at));
  }
  if (!is_ensemble) v.layer_id = layer;
  const auto d = r.get<std::uint32_t>("dim");
  if (d == 0) throw FormatError("SVEC dim is zero");
  r.need(std::uint64_t{d} * 8, "direction");
  v.direction.resize(d);
  for (std::uint32_t i = 0; i < d; ++i) v.direction(i) = r.finite_f64("direction value");
  const double norm = v.direction.norm();
  if (std::abs(norm - 1.0) > 1e-6) {
    throw FormatError("SVEC direction norm " + std::to_string(norm) + " is not 1 +- 1e-6");
  }
  auto& q = v.quality;
  q.accuracy = r.finite_f64("accuracy");
  q.separation = r.finite_f64("separation");
  q.mu_pos = r.finite_f64("mu_pos");
  q.mu_neg = r.finite_f64("mu_neg");
  q.pooled_std = r.finite_f64("pooled_std");
  q.q = r.finite_f64("q");
  if (q.accuracy < 0 || q.accuracy > 1 || q.q < 0 || q.q > 1 || q.separation < 0 ||
      !(q.pooled_std > 0)) {
    throw FormatError("SVEC quality block out of range");
  }
  if (flags & kHasEnsemble) {
    const auto m = r.get<std::uint32_t>("member count");
    if (m == 0) throw FormatError("SVEC ensemble with no members");
    r.need(std::uint64_t{m} * 20, "ensemble provenance");
    EnsembleProvenance e;
    for (std::uint32_t i = 0; i < m; ++i) e.layer_ids.push_back(r.get<std::int32_t>("member layer"));
    double sum = 0.0;
    for (std::uint32_t i = 0; i < m; ++i) {
      const double w = r.finite_f64("member weight");
      if (w < 0) throw FormatError("SVEC negative ensemble weight");
      sum += w;
      e.weights.push_back(w);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw FormatError("SVEC ensemble weights sum to " + std::to_string(sum));
    }
    for (std::uint32_t i = 0; i < m; ++i) e.member_q.push_back(r.finite_f64("member q"));
    v.ensemble = std::move(e);
  }
  if (flags & kHasScale) {
    r.need(std::uint64_t{d} * 8, "scale");
    HiddenVector s(d);
    for (std::uint32_t i = 0; i < d; ++i) {
      s(i) = r.finite_f64("scale value");
      if (!(s(i) > 0)) throw FormatError("SVEC non-positive scale value");
    }
    v.destandardize_scale = std::move(s);
  }
  v.converged = !(flags & kNotConverged);
  v.sign_corrected = flags & kSignCorrected;
  r.expect_end("SVEC");
  return v;
}

Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string read_file_text(const std::filesystem::path& path) {
  const Bytes b = read_file_bytes(path);
  return std::string(b.begin(), b.end());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                 text.size()));
}

ActivationSet read_actv(const std::filesystem::path& path) { return decode_actv(read_file_bytes(path)); }
void write_actv(const std::filesystem::path& path, const ActivationSet& acts) {
  write_file(path, encode_actv(acts));
}
SteeringVector read_svec(const std::filesystem::path& path) { return decode_svec(read_file_bytes(path)); }
void write_svec(const std::filesystem::path& path, const SteeringVector& vector) {
  write_file(path, encode_svec(vector));
}

}  // namespace steer::io
