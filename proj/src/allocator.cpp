#include "epidss/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace epidss {

AllocationError::AllocationError(Kind kind, std::string message, std::string item)
    : Error(std::move(message)), kind_(kind), item_(std::move(item)) {}

double effective_demand(const UnitClaim& claim, const ResourceItem& /*item*/, double blend, double total_demand,
                        double total_active) {
  if (!(total_demand > 0.0) && !(total_active > 0.0)) {
    throw AllocationError(AllocationError::Kind::degenerate, "total demand and total active cases are both zero");
  }
  if (!(total_active > 0.0)) {
    return claim.demand;
  }
  return blend * claim.demand + (1.0 - blend) * (claim.peak_active / total_active) * total_demand;
}

void validate(const AllocationProblem& problem) {
  auto fail = [&](const std::string& message) {
    throw AllocationError(AllocationError::Kind::invalid_problem, message, problem.item.name);
  };
  if (!std::isfinite(problem.supply) || problem.supply < 0.0) {
    fail("supply must be finite and non-negative");
  }
  if (!(problem.blend >= 0.0 && problem.blend <= 1.0)) {
    fail("blend must be within [0, 1]");
  }
  if (!std::isfinite(problem.item.kappa) || problem.item.kappa < 0.0) {
    fail("kappa must be finite and non-negative");
  }
  if (problem.claims.empty()) {
    fail("at least one claim is required");
  }
  std::set<std::string> codes;
  for (const auto& c : problem.claims) {
    if (c.unit.code.empty()) {
      fail("claim with empty unit code");
    }
    if (!codes.insert(c.unit.code).second) {
      fail("duplicate unit '" + c.unit.code + "'");
    }
    if (!std::isfinite(c.demand) || c.demand < 0.0) {
      fail("demand of '" + c.unit.code + "' must be finite and non-negative");
    }
    if (!std::isfinite(c.peak_active) || c.peak_active < 0.0) {
      fail("peak_active of '" + c.unit.code + "' must be finite and non-negative");
    }
  }
}

AllocationResult allocate(const AllocationProblem& problem) {
  validate(problem);
  const auto& claims = problem.claims;
  const std::size_t n = claims.size();

  AllocationResult result;
  result.awards.assign(n, 0.0);
  result.effective_demands.assign(n, 0.0);

  double total_demand = 0.0;
  double total_active = 0.0;
  for (const auto& c : claims) {
    total_demand += c.demand;
    total_active += c.peak_active;
  }
  if (!(total_demand > 0.0)) {
    return result;  // nothing requested
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.effective_demands[i] =
        effective_demand(claims[i], problem.item, problem.blend, total_demand, total_active);
  }

  if (problem.supply >= total_demand) {
    for (std::size_t i = 0; i < n; ++i) {
      result.awards[i] = claims[i].demand;
    }
    return result;
  }
  result.exhausted = true;

  // Breakpoints: unit i saturates once scale >= d_i / e_i.
  std::vector<std::size_t> order;
  std::vector<std::size_t> unprioritized;
  for (std::size_t i = 0; i < n; ++i) {
    if (claims[i].demand <= 0.0) {
      continue;
    }
    (result.effective_demands[i] > 0.0 ? order : unprioritized).push_back(i);
  }
  const auto& e = result.effective_demands;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = claims[a].demand / e[a];
    const double rb = claims[b].demand / e[b];
    if (ra != rb) {
      return ra < rb;
    }
    return claims[a].unit.code < claims[b].unit.code;
  });

  double remaining = problem.supply;
  double open_weight = 0.0;
  for (auto i : order) {
    open_weight += e[i];
  }
  std::size_t capped = 0;
  for (; capped < order.size(); ++capped) {
    const auto i = order[capped];
    const double ratio = claims[i].demand / e[i];
    if (remaining < ratio * open_weight) {
      break;
    }
    result.awards[i] = claims[i].demand;
    remaining -= claims[i].demand;
    open_weight -= e[i];
  }

  if (capped < order.size()) {
    const double scale = remaining / open_weight;
    result.scale = scale;
    for (std::size_t k = capped; k < order.size(); ++k) {
      const auto i = order[k];
      result.awards[i] = std::min(claims[i].demand, scale * e[i]);
    }
    return result;
  }

  // Every prioritized unit is capped; the rest goes to zero-priority units
  // in proportion to their declared demand.
  if (!order.empty()) {
    result.scale = claims[order.back()].demand / e[order.back()];
  }
  double zero_demand = 0.0;
  for (auto i : unprioritized) {
    zero_demand += claims[i].demand;
  }
  if (zero_demand > 0.0) {
    const double share = std::max(remaining, 0.0) / zero_demand;
    for (auto i : unprioritized) {
      result.awards[i] = std::min(claims[i].demand, share * claims[i].demand);
    }
  }
  return result;
}

std::vector<AllocationResult> allocate_multi(const std::vector<AllocationProblem>& problems) {
  std::set<std::string> names;
  for (const auto& p : problems) {
    if (!names.insert(p.item.name).second) {
      throw AllocationError(AllocationError::Kind::invalid_problem, "duplicate item '" + p.item.name + "'",
                            p.item.name);
    }
  }
  std::vector<AllocationResult> results;
  results.reserve(problems.size());
  for (const auto& p : problems) {
    try {
      results.push_back(allocate(p));
    } catch (const AllocationError& err) {
      throw AllocationError(err.kind(), p.item.name + ": " + err.what(), p.item.name);
    }
  }
  return results;
}

}  // namespace epidss
