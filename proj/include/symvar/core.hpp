/*
 Copyright 2026 The symvar authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace symvar {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base error. `HypothesisError` marks violations of a theorem's standing
/// assumptions (the CLI maps those to exit code 2, everything else to 1).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HypothesisError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NonFiniteValue : Error {
  using Error::Error;
};
struct NotInvariantStart : HypothesisError {
  using HypothesisError::HypothesisError;
};

enum class Norm { L1, L2, Linf };

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::L1: return "l1";
    case Norm::Linf: return "linf";
    default: return "l2";
  }
}

inline Norm norm_from_name(const std::string& s) {
  if (s == "l1") return Norm::L1;
  if (s == "l2") return Norm::L2;
  if (s == "linf") return Norm::Linf;
  throw Error("unknown norm tag: " + s);
}

inline double norm_of(std::span<const double> x, Norm tag) {
  double acc = 0.0;
  switch (tag) {
    case Norm::L1:
      for (double v : x) acc += std::abs(v);
      return acc;
    case Norm::Linf:
      for (double v : x) acc = std::max(acc, std::abs(v));
      return acc;
    case Norm::L2:
    default:
      for (double v : x) acc += v * v;
      return std::sqrt(acc);
  }
}

/// Real coordinate vector carrying its norm tag. Entries are finite by
/// construction.
class Vector {
 public:
  Vector() = default;
  Vector(std::vector<double> xs, Norm tag = Norm::L2) : x_(std::move(xs)), tag_(tag) {
    for (double v : x_)
      if (!std::isfinite(v)) throw NonFiniteValue("Vector: non-finite coordinate");
  }
  Vector(std::initializer_list<double> xs, Norm tag = Norm::L2)
      : Vector(std::vector<double>(xs), tag) {}

  static Vector zeros(std::size_t n, Norm tag = Norm::L2) {
    return Vector(std::vector<double>(n, 0.0), tag);
  }

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  double& operator[](std::size_t i) { return x_[i]; }
  const std::vector<double>& coords() const { return x_; }
  std::span<const double> span() const { return {x_.data(), x_.size()}; }
  Norm norm_tag() const { return tag_; }
  double norm() const { return norm_of(span(), tag_); }

  friend Vector operator+(const Vector& a, const Vector& b) {
    check_same(a, b);
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
    return Vector(std::move(r), a.tag_);
  }
  friend Vector operator-(const Vector& a, const Vector& b) {
    check_same(a, b);
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
    return Vector(std::move(r), a.tag_);
  }
  friend Vector operator*(double s, const Vector& a) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = s * a[i];
    return Vector(std::move(r), a.tag_);
  }
  friend bool operator==(const Vector& a, const Vector& b) {
    return a.tag_ == b.tag_ && a.x_ == b.x_;
  }

 private:
  static void check_same(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
      throw DimensionMismatch("Vector arithmetic: sizes " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
  }
  std::vector<double> x_;
  Norm tag_ = Norm::L2;
};

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Norm-induced metric; both vectors must carry the same tag.
inline double distance(const Vector& a, const Vector& b) {
  if (a.norm_tag() != b.norm_tag()) throw Error("distance: norm tags differ");
  return (a - b).norm();
}

/// Dual of the declared primal norm (l1 <-> linf, l2 self-dual).
inline Norm dual_norm(Norm tag) {
  switch (tag) {
    case Norm::L1: return Norm::Linf;
    case Norm::Linf: return Norm::L1;
    default: return Norm::L2;
  }
}

/// Deterministic RNG with portable uniforms (raw mt19937_64 draws scaled by
/// 2^-53, so results do not depend on libstdc++ distribution internals).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1.0));
  }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline unsigned max_threads() {
  if (const char* env = std::getenv("SYMVAR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Parallel map over [0, n). Workers own disjoint index chunks; callers
/// reduce sequentially afterwards, so results are independent of the thread
/// count (SYMVAR_THREADS=1 forces a plain loop).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned threads = std::min<std::size_t>(max_threads(), n);
  if (threads <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace symvar
