#include "l1solve/problem_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace l1solve {

static_assert(std::endian::native == std::endian::little,
              "the L1PROBv1 container is little-endian; big-endian hosts need byte swaps");

namespace {

constexpr std::array<char, 8> kMagic = {'L', '1', 'P', 'R', 'O', 'B', 'v', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

[[noreturn]] void io_fail(const std::filesystem::path& path, const char* what) {
  throw std::runtime_error(std::string(what) + ": " + path.string());
}

void write_body(std::ostream& out, const GeneratedProblem& prob) {
  const Matrix& k = prob.op->matrix();
  const auto n = static_cast<std::uint64_t>(k.rows());
  const auto p = static_cast<std::uint64_t>(k.cols());
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, n);
  put_u64(out, p);
  put_u64(out, prob.seed);
  put_f64(out, prob.noise_level);
  // K row-major
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor krm = k;
  out.write(reinterpret_cast<const char*>(krm.data()),
            static_cast<std::streamsize>(sizeof(double) * n * p));
  out.write(reinterpret_cast<const char*>(prob.y.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
  out.write(reinterpret_cast<const char*>(prob.x_true.data()),
            static_cast<std::streamsize>(sizeof(double) * p));
}

}  // namespace

void save_problem(const GeneratedProblem& prob, const std::filesystem::path& path) {
  if (!prob.op) throw std::invalid_argument("save_problem: problem has no operator");
  if (prob.y.size() != prob.op->rows() || prob.x_true.size() != prob.op->cols())
    throw std::invalid_argument("save_problem: inconsistent problem dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail(path, "cannot open problem file for writing");
  write_body(out, prob);
  out.flush();
  if (!out) io_fail(path, "short write while saving problem");
}

GeneratedProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open problem file");
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) io_fail(path, "not an L1PROBv1 problem file");
  const auto n = static_cast<Index>(get_u64(in));
  const auto p = static_cast<Index>(get_u64(in));
  GeneratedProblem prob;
  prob.seed = get_u64(in);
  prob.noise_level = get_f64(in);
  if (!in || n < 1 || p < 1) io_fail(path, "corrupt problem header");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor krm(n, p);
  in.read(reinterpret_cast<char*>(krm.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(n * p)));
  prob.y.resize(n);
  in.read(reinterpret_cast<char*>(prob.y.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(n)));
  prob.x_true.resize(p);
  in.read(reinterpret_cast<char*>(prob.x_true.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p)));
  if (!in) io_fail(path, "truncated problem file");
  prob.op = std::make_shared<DenseOperator>(Matrix(krm));
  return prob;
}

std::uint64_t problem_hash(const GeneratedProblem& prob) {
  std::ostringstream buf(std::ios::binary);
  write_body(buf, prob);
  const std::string bytes = buf.str();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace l1solve
