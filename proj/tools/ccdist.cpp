// Command-line front end: distance, geodesics, cut-locus tests, heat-kernel
// Varadhan estimates, and the built-in invariant suites.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccdist/closed_form.hpp"
#include "ccdist/errors.hpp"
#include "ccdist/geodesics.hpp"
#include "ccdist/group.hpp"
#include "ccdist/group_io.hpp"
#include "ccdist/heat_kernel.hpp"
#include "ccdist/selftest.hpp"
#include "ccdist/solver.hpp"

namespace {

using namespace ccdist;

// Fixed-width significand formatting keeps the JSON byte-identical across
// runs; integral values keep one decimal so they read as numbers, not ints.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  std::string s = buf;
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

std::string num_list(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num(v[i]);
  }
  return s + "]";
}

std::string num_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num(v[i]);
  }
  return s + "]";
}

std::string json_quote(const std::string& raw) {
  std::string s = "\"";
  for (char c : raw) {
    switch (c) {
      case '"': s += "\\\""; break;
      case '\\': s += "\\\\"; break;
      case '\n': s += "\\n"; break;
      case '\t': s += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof esc, "\\u%04x", c);
          s += esc;
        } else {
          s += c;
        }
    }
  }
  return s + "\"";
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string item =
        text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError(std::string("cannot parse ") + what +
                            " entry: '" + item + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

Vec parse_vec(const std::string& text, const char* what) {
  const std::vector<double> vals = parse_numbers(text, what);
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

// Closed-form family referenced by a group name, if any.
enum class Family { GENERIC, HTYPE, STAR, N32 };

struct FamilyInfo {
  Family family = Family::GENERIC;
  HTypeSpec htype;
  Eigen::Index star_n = 0;
};

FamilyInfo family_of(const std::string& name) {
  FamilyInfo info;
  if (name == "n32") {
    info.family = Family::N32;
  } else if (name.rfind("star:", 0) == 0) {
    info.family = Family::STAR;
    info.star_n = static_cast<Eigen::Index>(std::stol(name.substr(5)));
  } else if (name.rfind("heisenberg:", 0) == 0) {
    info.family = Family::HTYPE;
    const Eigen::Index q = static_cast<Eigen::Index>(std::stol(name.substr(11)));
    info.htype.blocks = {{1.0, q / 2}};
    info.htype.m = 1;
  } else if (name.rfind("htype:", 0) == 0) {
    info.family = Family::HTYPE;
    std::string rest = name.substr(6);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const std::size_t next = rest.find(',', pos);
      const std::string item =
          rest.substr(pos, next == std::string::npos ? next : next - pos);
      const std::size_t x = item.find('x');
      if (x == std::string::npos) break;
      info.htype.blocks.push_back(
          {std::stod(item.substr(0, x)),
           static_cast<Eigen::Index>(std::stol(item.substr(x + 1)))});
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    info.htype.m = 1;
  }
  return info;
}

// Distance through the exact family solver when the group is one of the
// closed-form families (and --generic was not given), otherwise through the
// reference-function maximizer.
DistanceResult dispatch_distance(const Group& group, const FamilyInfo& info,
                                 const Vec& x, const Vec& t, bool generic,
                                 bool* used_closed_form) {
  *used_closed_form = false;
  if (!generic) {
    switch (info.family) {
      case Family::HTYPE: {
        bool usable = true;
        try {
          info.htype.validate();
        } catch (const ValidationError&) {
          usable = false;  // e.g. blocks not normalized; fall back
        }
        if (usable) {
          *used_closed_form = true;
          return htype_distance(info.htype, x, t);
        }
        break;
      }
      case Family::STAR:
        if (info.star_n >= 2) {
          *used_closed_form = true;
          return star_distance(info.star_n, x, t);
        }
        break;
      case Family::N32:
        *used_closed_form = true;
        return n32_distance(x, t);
      case Family::GENERIC:
        break;
    }
  }
  return distance_squared(group, Point{x, t});
}

const char* certificate_label(const DistanceResult& r, bool closed_form) {
  if (closed_form) return "EXACT";  // the family solvers are exact by construction
  return to_string(r.certificate);
}

int cmd_dist(const std::string& gstr, const std::string& xs, const std::string& ts,
             bool generic) {
  const Group group = group_from_string(gstr);
  const Vec x = parse_vec(xs, "--x");
  const Vec t = parse_vec(ts, "--t");
  bool closed = false;
  const DistanceResult r =
      dispatch_distance(group, family_of(gstr), x, t, generic, &closed);
  std::printf("{\"d2\": %s, \"theta\": %s, \"certificate\": \"%s\"}\n",
              num(r.d_squared).c_str(), num_list(r.theta).c_str(),
              certificate_label(r, closed));
  return 0;
}

int cmd_cut_test(const std::string& gstr, const std::string& xs,
                 const std::string& ts, bool generic) {
  const Group group = group_from_string(gstr);
  const Vec x = parse_vec(xs, "--x");
  const Vec t = parse_vec(ts, "--t");
  bool closed = false;
  const DistanceResult r =
      dispatch_distance(group, family_of(gstr), x, t, generic, &closed);
  if (closed && r.on_cut_locus.has_value()) {
    std::printf("{\"cut_locus\": %s, \"d2\": %s}\n",
                *r.on_cut_locus ? "true" : "false", num(r.d_squared).c_str());
  } else {
    const PointClass pc = classify_point(group, Point{x, t});
    std::printf("{\"class\": \"%s\", \"d2\": %s}\n", to_string(pc),
                num(r.d_squared).c_str());
  }
  return 0;
}

int cmd_geodesic(const std::string& gstr, const std::string& xs,
                 const std::string& ts, int seeds) {
  const Group group = group_from_string(gstr);
  const Vec x = parse_vec(xs, "--x");
  const Vec t = parse_vec(ts, "--t");
  const auto candidates = normal_geodesics_through(group, Point{x, t}, seeds);
  std::string out = "{\"candidates\": [";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (i) out += ", ";
    out += "{\"theta\": " + num_list(c.covector.theta0) +
           ", \"zeta0\": " + num_list(c.covector.zeta0) +
           ", \"length_sq\": " + num(c.length_sq) +
           ", \"endpoint_error\": " + num(c.endpoint_error) + "}";
  }
  out += "]}";
  std::printf("%s\n", out.c_str());
  return 0;
}

int cmd_expmap(const std::string& gstr, const std::string& zs,
               const std::string& ths, int samples) {
  const Group group = group_from_string(gstr);
  Covector cv;
  cv.zeta0 = parse_vec(zs, "--zeta");
  cv.theta0 = parse_vec(ths, "--theta");
  const Geodesic geo = exp_map(group, cv, samples);
  std::string header = "s";
  for (Eigen::Index i = 0; i < group.q(); ++i)
    header += ",x" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < group.m(); ++i)
    header += ",t" + std::to_string(i + 1);
  std::printf("%s\n", header.c_str());
  for (std::size_t k = 0; k < geo.times.size(); ++k) {
    std::string row;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", geo.times[k]);
    row += buf;
    const Point& p = geo.samples[k];
    for (Eigen::Index i = 0; i < p.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", p.x[i]);
      row += buf;
    }
    for (Eigen::Index i = 0; i < p.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", p.t[i]);
      row += buf;
    }
    std::printf("%s\n", row.c_str());
  }
  return 0;
}

int cmd_varadhan(const std::string& gstr, const std::string& xs,
                 const std::string& ts, const std::string& hs, double tol,
                 const std::string& shift) {
  const Group group = group_from_string(gstr);
  const Vec x = parse_vec(xs, "--x");
  const Vec t = parse_vec(ts, "--t");
  const std::vector<double> h_list = parse_numbers(hs, "--h-list");
  QuadratureConfig cfg;
  if (tol > 0.0) cfg.rel_tol = tol;
  if (!shift.empty()) cfg.contour_shift = parse_vec(shift, "--shift");
  const VaradhanResult r = varadhan_estimate(group, Point{x, t}, h_list, cfg);
  std::printf("{\"h\": %s, \"neg4h_log_p\": %s, \"extrapolated\": %s}\n",
              num_list(r.h).c_str(), num_list(r.neg4h_log_p).c_str(),
              num(r.extrapolated).c_str());
  return 0;
}

int cmd_selftest() {
  const SelfTestReport rep = run_selftest();
  for (const auto& line : rep.lines) std::printf("%s\n", line.c_str());
  for (const auto& f : rep.failures) std::printf("  failed: %s\n", f.c_str());
  std::printf("%d checks, %zu failures\n", rep.checks, rep.failures.size());
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carnot-Caratheodory distance on step-two groups"};
  app.require_subcommand(1);

  std::string gstr, xs, ts, zs, ths, hs, shift;
  bool generic = false;
  int seeds = 48;
  int samples = 32;
  double tol = 0.0;

  auto add_point_opts = [&](CLI::App* cmd) {
    cmd->add_option("--group", gstr, "group name (heisenberg:q, htype:a1xk1,..., star:n, n32) or JSON file")->required();
    cmd->add_option("--x", xs, "horizontal coordinates, comma separated")->required();
    cmd->add_option("--t", ts, "vertical coordinates, comma separated")->required();
  };

  CLI::App* dist = app.add_subcommand("dist", "squared distance from the identity");
  add_point_opts(dist);
  dist->add_flag("--generic", generic, "force the generic maximizer");

  CLI::App* cut = app.add_subcommand("cut-test", "cut-locus membership / point class");
  add_point_opts(cut);
  cut->add_flag("--generic", generic, "force the generic maximizer");

  CLI::App* geo = app.add_subcommand("geodesic", "normal geodesics reaching a point");
  add_point_opts(geo);
  geo->add_option("--seeds", seeds, "multistart seed count");

  CLI::App* expm = app.add_subcommand("expmap", "integrate a normal geodesic (CSV)");
  expm->add_option("--group", gstr, "group name or JSON file")->required();
  expm->add_option("--zeta", zs, "initial horizontal velocity")->required();
  expm->add_option("--theta", ths, "vertical covector")->required();
  expm->add_option("--samples", samples, "number of output rows minus one");

  CLI::App* var = app.add_subcommand("varadhan", "-4h log p_h sequence and extrapolation");
  add_point_opts(var);
  var->add_option("--h-list", hs, "descending h values, comma separated")->required();
  var->add_option("--tol", tol, "relative quadrature tolerance");
  var->add_option("--shift", shift, "contour shift override, comma separated");

  app.add_subcommand("selftest", "run the built-in invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("dist")) return cmd_dist(gstr, xs, ts, generic);
    if (app.got_subcommand("cut-test")) return cmd_cut_test(gstr, xs, ts, generic);
    if (app.got_subcommand("geodesic")) return cmd_geodesic(gstr, xs, ts, seeds);
    if (app.got_subcommand("expmap")) return cmd_expmap(gstr, zs, ths, samples);
    if (app.got_subcommand("varadhan")) return cmd_varadhan(gstr, xs, ts, hs, tol, shift);
    if (app.got_subcommand("selftest")) return cmd_selftest();
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "{\"error\": \"validation\", \"message\": %s}\n",
                 json_quote(e.what()).c_str());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "{\"error\": \"numerical\", \"message\": %s}\n",
                 json_quote(e.what()).c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\": \"internal\", \"message\": %s}\n",
                 json_quote(e.what()).c_str());
    return 3;
  }
  return 0;
}
