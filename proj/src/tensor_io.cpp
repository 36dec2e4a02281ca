#include "hyperinv/ansatz.hpp"

#include <cstring>
#include <fstream>

namespace hyperinv {

namespace {

constexpr char kMagic[8] = {'H', 'Y', 'P', 'T', 'N', 'S', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw std::runtime_error("tensor file truncated");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void put_tensor(std::ostream& os, const Tensor& t) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
  for (Index d : t.shape()) put<std::uint64_t>(os, static_cast<std::uint64_t>(d));
  for (Index i = 0; i < t.size(); ++i) {
    put<double>(os, t.data()(i).real());
    put<double>(os, t.data()(i).imag());
  }
}

Tensor get_tensor(std::istream& is) {
  const auto rank = get<std::uint32_t>(is);
  if (rank > 16) throw std::runtime_error("tensor file: implausible rank");
  std::vector<Index> shape(rank);
  std::vector<Leg> legs(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape[i] = static_cast<Index>(get<std::uint64_t>(is));
    legs[i] = static_cast<Leg>(i);
  }
  Tensor t(shape, legs);
  for (Index i = 0; i < t.size(); ++i) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    t.data()(i) = cplx(re, im);
  }
  return t;
}

}  // namespace

// Host byte order is assumed little-endian (checked at load time through the magic/version).
void save_pair(const TensorPair& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, t.family == Family::F73 ? 73u : 54u);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.chi));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.thetas.size()));
  for (double th : t.thetas) put<double>(os, th);
  put<double>(os, t.scale_a);
  put<double>(os, t.scale_b);
  put_tensor(os, t.A);
  put_tensor(os, t.B);
  if (!os) throw std::runtime_error("write failed for " + path);
}

TensorPair load_pair(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error(path + ": not a tensor file");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error(path + ": unsupported version");
  TensorPair t;
  const auto fam = get<std::uint32_t>(is);
  if (fam != 73 && fam != 54) throw std::runtime_error(path + ": bad family");
  t.family = fam == 73 ? Family::F73 : Family::F54;
  t.chi = static_cast<int>(get<std::uint32_t>(is));
  const auto nt = get<std::uint32_t>(is);
  if (nt > 16) throw std::runtime_error(path + ": bad angle count");
  for (std::uint32_t i = 0; i < nt; ++i) t.thetas.push_back(get<double>(is));
  t.scale_a = get<double>(is);
  t.scale_b = get<double>(is);
  t.A = get_tensor(is);
  t.B = get_tensor(is);
  if (t.A.rank() != family_q(t.family) || t.B.rank() != 2) throw std::runtime_error(path + ": tensor ranks do not match family");
  return t;
}

}  // namespace hyperinv
