#pragma once

// Capped-proportional (water-filling) allocation of one item's supply
// among subordinate units.

#include <optional>
#include <string>
#include <vector>

#include "epidss/case_data.hpp"
#include "epidss/error.hpp"

namespace epidss {

struct ResourceItem {
  std::string name;
  std::string unit;    // "MT", "count", ...
  double kappa = 0.0;  // item units per active case per day

  friend bool operator==(const ResourceItem&, const ResourceItem&) = default;
};

struct UnitClaim {
  RegionId unit;
  double demand = 0.0;       // declared, item units
  double peak_active = 0.0;  // max predicted active cases over the next 7 days
};

struct AllocationProblem {
  ResourceItem item;
  double supply = 0.0;
  std::vector<UnitClaim> claims;
  double blend = 0.5;  // weight on declared demand
};

struct AllocationResult {
  std::vector<double> awards;             // same order as claims
  std::vector<double> effective_demands;  // same order as claims
  bool exhausted = false;                 // supply was scarce and fully used
  // Common scale on effective demand; unset when every claim is met.
  std::optional<double> scale;
};

class AllocationError : public Error {
 public:
  enum class Kind { invalid_problem, degenerate };

  AllocationError(Kind kind, std::string message, std::string item = {});

  Kind kind() const { return kind_; }
  const std::string& item() const { return item_; }

 private:
  Kind kind_;
  std::string item_;
};

// e_i = blend * d_i + (1 - blend) * (a_i / total_active) * total_demand,
// or d_i when total_active == 0.
double effective_demand(const UnitClaim& claim, const ResourceItem& item, double blend, double total_demand,
                        double total_active);

// Throws AllocationError(invalid_problem) when the problem violates its invariants.
void validate(const AllocationProblem& problem);

// Awards x_i = min(d_i, scale * e_i) with the scale chosen so that
// sum x_i = min(S, sum d_i). Units whose effective demand is zero are only
// served from supply left once every other unit is capped at its demand.
AllocationResult allocate(const AllocationProblem& problem);

// Items are independent; errors are re-thrown tagged with the item name.
std::vector<AllocationResult> allocate_multi(const std::vector<AllocationProblem>& problems);

}  // namespace epidss
