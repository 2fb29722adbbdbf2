#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ccdist/group.hpp"

namespace ccdist {

// H(q/2, 1): q even, single generator block-diag(J, ..., J) with
// J = [[0, 1], [-1, 0]].
Group make_heisenberg(Eigen::Index q);

// Generalized Heisenberg group (one vertical direction) with horizontal blocks
// of size 2*k_j scaled by a_j: single generator block-diag(a_j * J_{2 k_j}).
// Used as the explicit model of a generalized H-type group with m = 1.
Group make_generalized_heisenberg(const std::vector<std::pair<double, Eigen::Index>>& blocks);

// Star graph group K_{1,n}: q = n + 1, m = n,
// u_tilde(tau) = [[0, tau^T], [-tau, 0]].
Group make_star(Eigen::Index n);

// Free step-two group on three generators: q = 3, m = 3,
// u_tilde(tau) x = x cross tau.
Group make_n32();

// Parses "heisenberg:q", "htype:a1xk1,a2xk2,...", "star:n", "n32", or a path
// to a JSON file {"q":.., "m":.., "U":[[[row],...],...]}.
Group group_from_string(const std::string& name_or_path);

Group group_from_json_text(const std::string& text);
std::string group_to_json_text(const Group& g);

}  // namespace ccdist
