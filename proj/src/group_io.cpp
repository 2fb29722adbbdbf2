#include "ccdist/group_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccdist {
namespace {

Mat rotation_block(Eigen::Index n, double scale) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    J(2 * i, 2 * i + 1) = scale;
    J(2 * i + 1, 2 * i) = -scale;
  }
  return J;
}

}  // namespace

Group make_heisenberg(Eigen::Index q) {
  if (q < 2 || q % 2 != 0) throw ValidationError("heisenberg: q must be even and >= 2");
  GroupSpec spec;
  spec.q = q;
  spec.m = 1;
  spec.generators.push_back(rotation_block(q / 2, 1.0));
  return validate_group(std::move(spec));
}

Group make_generalized_heisenberg(const std::vector<std::pair<double, Eigen::Index>>& blocks) {
  if (blocks.empty()) throw ValidationError("htype: need at least one block");
  Eigen::Index q = 0;
  for (const auto& [a, k] : blocks) {
    if (!(a > 0.0) || a > 1.0) throw ValidationError("htype: block scale must be in (0, 1]");
    if (k < 1) throw ValidationError("htype: block multiplicity must be >= 1");
    q += 2 * k;
  }
  GroupSpec spec;
  spec.q = q;
  spec.m = 1;
  Mat U = Mat::Zero(q, q);
  Eigen::Index off = 0;
  for (const auto& [a, k] : blocks) {
    U.block(off, off, 2 * k, 2 * k) = rotation_block(k, a);
    off += 2 * k;
  }
  spec.generators.push_back(U);
  return validate_group(std::move(spec));
}

Group make_star(Eigen::Index n) {
  if (n < 1) throw ValidationError("star: n must be >= 1");
  GroupSpec spec;
  spec.q = n + 1;
  spec.m = n;
  for (Eigen::Index j = 0; j < n; ++j) {
    Mat U = Mat::Zero(n + 1, n + 1);
    U(0, j + 1) = 1.0;
    U(j + 1, 0) = -1.0;
    spec.generators.push_back(U);
  }
  return validate_group(std::move(spec));
}

Group make_n32() {
  GroupSpec spec;
  spec.q = 3;
  spec.m = 3;
  // u_tilde(tau) x = x cross tau.
  Mat U1 = Mat::Zero(3, 3), U2 = Mat::Zero(3, 3), U3 = Mat::Zero(3, 3);
  U1(1, 2) = 1.0; U1(2, 1) = -1.0;
  U2(0, 2) = -1.0; U2(2, 0) = 1.0;
  U3(0, 1) = 1.0; U3(1, 0) = -1.0;
  spec.generators = {U1, U2, U3};
  return validate_group(std::move(spec));
}

Group group_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("group file is not valid JSON: ") + e.what());
  }
  if (!j.contains("q") || !j.contains("m") || !j.contains("U"))
    throw ValidationError("group file needs fields q, m, U");
  GroupSpec spec;
  spec.q = j.at("q").get<Eigen::Index>();
  spec.m = j.at("m").get<Eigen::Index>();
  const auto& us = j.at("U");
  if (!us.is_array()) throw ValidationError("U must be an array of matrices");
  for (const auto& mat : us) {
    if (!mat.is_array() || static_cast<Eigen::Index>(mat.size()) != spec.q)
      throw DimensionMismatch("generator row count does not match q");
    Mat U(spec.q, spec.q);
    for (Eigen::Index r = 0; r < spec.q; ++r) {
      const auto& row = mat.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != spec.q)
        throw DimensionMismatch("generator column count does not match q");
      for (Eigen::Index c = 0; c < spec.q; ++c)
        U(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    spec.generators.push_back(std::move(U));
  }
  return validate_group(std::move(spec));
}

std::string group_to_json_text(const Group& g) {
  nlohmann::json j;
  j["q"] = g.q();
  j["m"] = g.m();
  auto us = nlohmann::json::array();
  for (Eigen::Index k = 0; k < g.m(); ++k) {
    auto mat = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.q(); ++r) {
      auto row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < g.q(); ++c) row.push_back(g.generator(k)(r, c));
      mat.push_back(std::move(row));
    }
    us.push_back(std::move(mat));
  }
  j["U"] = std::move(us);
  return j.dump();
}

Group group_from_string(const std::string& name_or_path) {
  const auto colon = name_or_path.find(':');
  const std::string head = name_or_path.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : name_or_path.substr(colon + 1);

  auto parse_index = [&](const std::string& s) -> Eigen::Index {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size()) throw ValidationError("trailing characters");
      return static_cast<Eigen::Index>(v);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse integer in group name: " + name_or_path);
    }
  };

  if (head == "heisenberg") return make_heisenberg(parse_index(rest));
  if (head == "star") return make_star(parse_index(rest));
  if (head == "n32" && rest.empty()) return make_n32();
  if (head == "htype") {
    std::vector<std::pair<double, Eigen::Index>> blocks;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto x = item.find('x');
      if (x == std::string::npos) throw ValidationError("htype blocks look like a x k, e.g. 0.5x1");
      try {
        blocks.emplace_back(std::stod(item.substr(0, x)), parse_index(item.substr(x + 1)));
      } catch (const ValidationError&) {
        throw;
      } catch (const std::exception&) {
        throw ValidationError("cannot parse htype block: " + item);
      }
    }
    return make_generalized_heisenberg(blocks);
  }

  std::ifstream in(name_or_path);
  if (!in) throw ValidationError("unknown group name and no such file: " + name_or_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return group_from_json_text(buf.str());
}

}  // namespace ccdist
