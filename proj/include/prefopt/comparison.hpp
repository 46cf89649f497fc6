#pragma once

#include <chrono>
#include <cctype>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefopt/objective.hpp"

namespace prefopt {

// Raised when an interactive trial is cancelled (three malformed responses
// or end of input).
class AbortTrial : public std::runtime_error {
 public:
  explicit AbortTrial(const std::string& what) : std::runtime_error(what) {}
};

// Tie rule: sgn(0) = +1, so outcomes are always in {+1, -1} and traces stay
// reproducible. Ties have probability zero under continuous noise.
template <typename Scalar>
inline int sign_plus(Scalar v) {
  return v >= Scalar(0) ? +1 : -1;
}

// One-bit preference feedback: sgn(f(x1, xi) - f(x2, zeta)) with xi and zeta
// drawn from separate streams. Exactly one evaluate call per argument.
template <typename Scalar>
int compare(const StochasticObjective<Scalar>& obj, const Vector<Scalar>& x1,
            const Vector<Scalar>& x2, SplitMix64& rng1, SplitMix64& rng2) {
  if (x1.size() != obj.dimension() || x2.size() != obj.dimension())
    throw std::invalid_argument("compare: dimension mismatch");
  const Scalar f1 = obj.evaluate(x1, rng1);
  const Scalar f2 = obj.evaluate(x2, rng2);
  return sign_plus(f1 - f2);
}

// Binary preference oracle abstraction. The pairwise form wraps a stochastic
// objective; the interactive form asks a human on a text channel.
template <typename Scalar>
class Comparator {
 public:
  virtual ~Comparator() = default;
  // Returns +1 when x1 compares worse-or-tied, -1 when x1 compares better.
  virtual int compare_points(const Vector<Scalar>& x1, const Vector<Scalar>& x2,
                             long t) = 0;
};

template <typename Scalar>
class PairwiseComparator final : public Comparator<Scalar> {
 public:
  PairwiseComparator(const StochasticObjective<Scalar>& obj, SplitMix64& rng1,
                     SplitMix64& rng2)
      : obj_(obj), rng1_(rng1), rng2_(rng2) {}

  int compare_points(const Vector<Scalar>& x1, const Vector<Scalar>& x2,
                     long /*t*/) override {
    return compare(obj_, x1, x2, rng1_, rng2_);
  }

 private:
  const StochasticObjective<Scalar>& obj_;
  SplitMix64& rng1_;
  SplitMix64& rng2_;
};

namespace detail {
template <typename Scalar>
std::string format_point(const Vector<Scalar>& x) {
  std::ostringstream os;
  os.precision(6);
  if (x.size() == 1) {
    os << x[0];
  } else {
    os << '(';
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (i) os << ", ";
      os << x[i];
    }
    os << ')';
  }
  return os.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
#if defined(_WIN32)
  gmtime_s(&tm, &tt);
#else
  gmtime_r(&tt, &tm);
#endif
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}
}  // namespace detail

// Terminal oracle. Presents both candidates and reads one character:
// "A" means the first point is better (outcome -1), "B" means the second
// is better (outcome +1). Malformed input re-prompts; the third malformed
// response aborts the trial. Responses are logged with timestamps.
template <typename Scalar>
class InteractiveComparator final : public Comparator<Scalar> {
 public:
  InteractiveComparator(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  int compare_points(const Vector<Scalar>& x1, const Vector<Scalar>& x2,
                     long t) override {
    int malformed = 0;
    for (;;) {
      out_ << "t=" << t << " | A: f(" << detail::format_point(x1) << ") vs B: f("
           << detail::format_point(x2) << ") — better? [A/B] " << std::flush;
      std::string line;
      if (!std::getline(in_, line)) {
        log_.push_back(detail::utc_timestamp() + " t=" + std::to_string(t) +
                       " response=<eof> outcome=abort");
        throw AbortTrial("interactive oracle: end of input");
      }
      std::string trimmed;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
      if (trimmed == "A" || trimmed == "a") {
        log_.push_back(detail::utc_timestamp() + " t=" + std::to_string(t) +
                       " response=A outcome=-1");
        return -1;
      }
      if (trimmed == "B" || trimmed == "b") {
        log_.push_back(detail::utc_timestamp() + " t=" + std::to_string(t) +
                       " response=B outcome=+1");
        return +1;
      }
      ++malformed;
      log_.push_back(detail::utc_timestamp() + " t=" + std::to_string(t) +
                     " response=" + (trimmed.empty() ? "<empty>" : trimmed) +
                     " outcome=malformed");
      if (malformed >= 3)
        throw AbortTrial("interactive oracle: three malformed responses");
      out_ << "please answer A or B\n";
    }
  }

  const std::vector<std::string>& response_log() const { return log_; }

 private:
  std::istream& in_;
  std::ostream& out_;
  std::vector<std::string> log_;
};

}  // namespace prefopt
