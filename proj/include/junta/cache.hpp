#pragma once

// Process-wide cache of the deterministic designs the learners consume. Every
// entry is built from a fixed seed and verified before it is stored, so a
// cached design is a pure function of its parameters.

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "junta/bcf.hpp"
#include "junta/designs.hpp"

namespace junta {

class DesignCache {
 public:
  /// Verified d-wise bipartite connected family on n variables.
  std::shared_ptr<const AssignmentSet> bcf(std::size_t n, std::size_t d) {
    std::lock_guard lock(mu_);
    auto& slot = bcf_[{n, d}];
    if (!slot) {
      auto res = greedy_bcf(n, d, default_bcf_pool(n, d));
      if (verify_bcf(res.rows, d)) throw ConstructionError("design cache: greedy family failed verification");
      slot = std::make_shared<const AssignmentSet>(std::move(res.rows));
    }
    return slot;
  }

  /// Verified (n,d)-universal set drawn at the delta = 0.01 size.
  std::shared_ptr<const AssignmentSet> universal(std::size_t n, std::size_t d) {
    std::lock_guard lock(mu_);
    auto& slot = universal_[{n, d}];
    if (!slot) {
      for (std::uint64_t k = 0;; ++k) {
        require(k < 1000, "design cache: no universal set found");
        Rng rng(derive_seed(0x756e6976, k));
        auto s = random_universal_set(n, d, 0.01, rng);
        if (!verify_universal(s, d)) {
          slot = std::make_shared<const AssignmentSet>(std::move(s));
          break;
        }
      }
    }
    return slot;
  }

  /// Verified (n,q,d)-perfect hash family; the identity map when n <= q.
  std::shared_ptr<const HashFamily> phf(std::size_t n, std::size_t q, std::size_t d) {
    std::lock_guard lock(mu_);
    auto& slot = phf_[{n, q, d}];
    if (!slot) {
      if (n <= q) {
        slot = std::make_shared<const HashFamily>(identity_family(n, q));
      } else {
        Rng rng(derive_seed(0x706866, n * 1'000'003 + q * 101 + d));
        slot = std::make_shared<const HashFamily>(phf_build(n, q, d, rng));
      }
    }
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<std::size_t, std::size_t>, std::shared_ptr<const AssignmentSet>> bcf_;
  std::map<std::tuple<std::size_t, std::size_t>, std::shared_ptr<const AssignmentSet>> universal_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::shared_ptr<const HashFamily>> phf_;
};

inline DesignCache& design_cache() {
  static DesignCache cache;
  return cache;
}

}  // namespace junta
