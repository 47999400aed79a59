#ifndef ADDM_PARTITION_HPP
#define ADDM_PARTITION_HPP

#include <string>
#include <vector>

#include "addm/mesh.hpp"

namespace addm {

// Element-to-subdomain map with an optional subdomain-to-coarse-element
// split. Subdomains and coarse elements are connected in the element graph;
// coarse element c lies inside subdomain c / s (ids are subdomain-major).
struct DecompPlan {
  int num_subdomains = 0;            // M
  int splitting = 0;                 // s; 0 until split_coarse ran
  std::vector<int> subdomain_of;     // element -> 0..M-1
  std::vector<int> coarse_of;        // element -> 0..s*M-1; empty before split
  std::vector<long long> subdomain_weight;
  bool balance_warning = false;
  unsigned long long seed = 0;

  int num_coarse_elements() const { return splitting > 0 ? num_subdomains * splitting : 0; }
  std::vector<std::vector<int>> subdomain_elements() const;
  std::vector<std::vector<int>> coarse_element_members() const;
};

// Greedy graph growing from spread seeds plus weight-balancing boundary
// moves that preserve connectivity. Guarantees M connected parts; sets
// balance_warning when the heaviest part exceeds (1+balance_tol) of the
// mean after refinement.
DecompPlan partition_elements(const ElementGraph& graph, int num_subdomains,
                              double balance_tol = 0.10, unsigned long long seed = 0);

// Split every subdomain into `splitting` connected coarse elements with the
// same growing procedure.
DecompPlan split_coarse(const DecompPlan& plan, int splitting, const ElementGraph& graph);

// Contiguous per-subdomain index ranges in the subdomain-major element
// ordering.
struct SubdomainLayout {
  std::vector<long long> offsets;   // size M+1
  std::vector<long long> sizes;     // N_i
  std::vector<int> element_order;   // elements sorted by (subdomain, id)
  long long max_local_size = 0;
};
SubdomainLayout subdomain_block_layout(const DecompPlan& plan, const ElementGraph& graph);

// CSV with columns element_id, subdomain, coarse_element.
void write_plan_csv(const DecompPlan& plan, const std::string& path);

}  // namespace addm

#endif
