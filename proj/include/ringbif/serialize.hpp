#pragma once

// JSON and CSV encodings of spectra, bifurcation tables, branches and
// classifications. JSON keys keep insertion order, so identical inputs give
// byte-identical files. Doubles use shortest round-trip form in both formats.
// Requires the single-header nlohmann json.hpp on the include path.

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "ringbif/bifurcation.hpp"
#include "ringbif/continuation.hpp"
#include "ringbif/potentials.hpp"
#include "ringbif/symmetry.hpp"

namespace ringbif {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that parses back to exactly `v`; empty for non-finite.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON has no NaN or infinity; those become null.
inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline json to_json(const SystemSpec& spec) {
  json j;
  j["family"] = spec.family_name();
  if (spec.is_celestial()) {
    j["alpha"] = spec.alpha();
  } else {
    j["potential"] = to_string(spec.potential().kind);
  }
  j["n"] = spec.n;
  return j;
}

inline json points_json(const Configuration& x) {
  json arr = json::array();
  for (int p = 0; p < x.num_points(); ++p) arr.push_back(json::array({x.coords(2 * p), x.coords(2 * p + 1)}));
  return arr;
}

inline Configuration configuration_from_json(const json& j) {
  const json& pts = j.at("x");
  Configuration x = Configuration::zeros(static_cast<int>(pts.size()), j.value("has_center", true));
  for (std::size_t p = 0; p < pts.size(); ++p) {
    x.coords(static_cast<Eigen::Index>(2 * p)) = pts[p].at(0).get<double>();
    x.coords(static_cast<Eigen::Index>(2 * p + 1)) = pts[p].at(1).get<double>();
  }
  return x;
}

// ---- spectrum ----

struct SpectrumRow {
  int k = 0;
  Eigen::MatrixXcd block;
  Eigen::VectorXd eigenvalues;
  std::optional<Sign> sigma;
};

struct SpectrumReport {
  SystemSpec spec;
  std::vector<SpectrumRow> rows;
  std::vector<std::pair<int, int>> n_index_by_h;
};

/// Blocks extracted from the analytic Hessian at the polygon, with their
/// eigenvalues, sign indices and n_h for every divisor h of n.
inline SpectrumReport compute_spectrum(const SystemSpec& spec) {
  SpectrumReport rep{spec, {}, {}};
  const BlockSpectrum bs = extract_blocks(hessian(spec, polygon_points(spec)), spec.n, spec.has_center());
  for (const auto& b : bs.blocks) {
    SpectrumRow row;
    row.k = b.k;
    row.block = b.B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.B, Eigen::EigenvaluesOnly);
    row.eigenvalues = es.eigenvalues();
    if (b.k == spec.n || (b.k >= 1 && 2 * b.k <= spec.n)) row.sigma = sigma(spec, b.k, spec.mu).sigma;
    rep.rows.push_back(std::move(row));
  }
  for (int h = 1; h <= spec.n; ++h) {
    if (spec.n % h == 0) rep.n_index_by_h.emplace_back(h, n_index(spec, h, spec.mu));
  }
  return rep;
}

inline json to_json(const SpectrumReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["spec"] = to_json(rep.spec);
  j["mu"] = rep.spec.mu;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json jr;
    jr["k"] = r.k;
    json block = json::array();
    for (int i = 0; i < r.block.rows(); ++i) {
      json line = json::array();
      for (int c = 0; c < r.block.cols(); ++c) line.push_back(json::array({r.block(i, c).real(), r.block(i, c).imag()}));
      block.push_back(line);
    }
    jr["block"] = block;
    json ev = json::array();
    for (int i = 0; i < r.eigenvalues.size(); ++i) ev.push_back(r.eigenvalues(i));
    jr["eigenvalues"] = ev;
    jr["sigma"] = r.sigma ? json(to_int(*r.sigma)) : json(nullptr);
    rows.push_back(jr);
  }
  j["blocks"] = rows;
  json nh = json::array();
  for (const auto& [h, v] : rep.n_index_by_h) nh.push_back(json{{"h", h}, {"n_index", v}});
  j["n_index"] = nh;
  return j;
}

/// Long format: one row per eigenvalue, sign index and n_h value.
inline std::string spectrum_csv(const SpectrumReport& rep) {
  std::ostringstream os;
  os << "kind,id,index,value\n";
  for (const auto& r : rep.rows) {
    for (int i = 0; i < r.eigenvalues.size(); ++i) {
      os << "eigenvalue," << r.k << ',' << i << ',' << format_double(r.eigenvalues(i)) << '\n';
    }
    if (r.sigma) os << "sigma," << r.k << ",0," << to_int(*r.sigma) << '\n';
  }
  for (const auto& [h, v] : rep.n_index_by_h) os << "n_index," << h << ",0," << v << '\n';
  return os.str();
}

// ---- bifurcation table ----

inline json to_json(const BifurcationPoint& p) {
  json j;
  j["k"] = p.k;
  j["h"] = p.h;
  j["mu"] = json_number(p.mu);
  j["eta"] = p.eta;
  j["provenance"] = to_string(p.provenance);
  j["physical"] = p.physical;
  j["trivial"] = p.trivial;
  j["degenerate"] = p.degenerate;
  j["simple"] = p.simple;
  j["note"] = p.note;
  return j;
}

inline json to_json(const AsymptoticRow& r) {
  return json{{"n", r.n},           {"s1", r.s1},       {"mu_k", r.mu_k},
              {"ratio", r.ratio},   {"limit", r.limit}, {"gap", r.gap}};
}

inline json bifpoints_json(const SystemSpec& spec, const std::vector<BifurcationPoint>& pts,
                           const std::vector<std::pair<int, std::vector<AsymptoticRow>>>& asymptotics = {}) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["spec"] = to_json(spec);
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(to_json(p));
  j["points"] = arr;
  if (!asymptotics.empty()) {
    json a = json::array();
    for (const auto& [k, rows] : asymptotics) {
      json jr = json::array();
      for (const auto& r : rows) jr.push_back(to_json(r));
      a.push_back(json{{"k", k}, {"rows", jr}});
    }
    j["asymptotics"] = a;
  }
  return j;
}

inline std::string bifpoints_csv(const std::vector<BifurcationPoint>& pts) {
  std::ostringstream os;
  os << "k,h,mu,eta,provenance,physical,note\n";
  for (const auto& p : pts) {
    os << p.k << ',' << p.h << ',' << format_double(p.mu) << ',' << p.eta << ',' << to_string(p.provenance) << ','
       << (p.physical ? "true" : "false") << ',' << csv_field(p.note) << '\n';
  }
  return os.str();
}

// ---- branches ----

inline json to_json(const VerificationReport& r) {
  json j;
  j["max_residual"] = json_number(r.max_residual);
  j["max_symmetry_dev"] = json_number(r.max_symmetry_dev);
  j["maximality_margin"] = json_number(r.maximality_margin);
  j["maximality_pass"] = r.maximality_pass;
  j["classification_pass"] = r.classification_pass;
  j["eta_sum"] = r.eta_sum ? json(*r.eta_sum) : json(nullptr);
  if (!r.first_failure.empty()) j["first_failure"] = r.first_failure;
  return j;
}

inline json branch_json(const SystemSpec& spec, const Branch& br, const VerificationReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["spec"] = to_json(spec);
  j["origin"] = json{{"k", br.origin.k}, {"h", br.origin.h}, {"mu", br.origin.mu}, {"eta", br.origin.eta}};
  json pts = json::array();
  for (const auto& p : br.points) {
    json jp;
    jp["mu"] = p.mu;
    jp["x"] = points_json(p.x);
    jp["residual"] = json_number(p.residual);
    jp["min_singular"] = json_number(p.min_singular);
    pts.push_back(jp);
  }
  j["points"] = pts;
  j["termination"] = to_string(br.termination);
  j["steps"] = br.steps;
  if (br.mu_end) j["mu_end"] = *br.mu_end;
  if (!br.diagnostics.empty()) j["diagnostics"] = br.diagnostics;
  j["max_symmetry_verified"] = br.max_symmetry_verified;
  j["verification"] = to_json(rep);
  return j;
}

/// Plotting table: step 0 is the branch-switch point.
inline std::string branch_csv(const Branch& br) {
  std::ostringstream os;
  os << "step,mu,norm,min_distance\n";
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const auto& p = br.points[i];
    os << i << ',' << format_double(p.mu) << ',' << format_double(p.y.norm()) << ','
       << format_double(min_pairwise_distance(p.x)) << '\n';
  }
  return os.str();
}

// ---- classification ----

inline json to_json(const Classification& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = c.n;
  j["h"] = c.h;
  j["has_center"] = c.has_center;
  if (c.has_center) j["center"] = json::array({c.center.real(), c.center.imag()});
  j["symmetry_residual"] = c.symmetry_residual;
  j["center_ok"] = c.center_ok;
  j["parity_ok"] = c.parity_ok;
  json comps = json::array();
  for (const auto& p : c.components) {
    comps.push_back(json{{"kind", p.kind == PolygonComponent::Kind::h_gon ? "h_gon" : "two_h_gon"},
                         {"representative", p.representative},
                         {"r", p.r},
                         {"phi", p.phi}});
  }
  j["components"] = comps;
  return j;
}

inline std::string classification_csv(const Classification& c) {
  std::ostringstream os;
  os << "kind,representative,r,phi\n";
  for (const auto& p : c.components) {
    os << (p.kind == PolygonComponent::Kind::h_gon ? "h_gon" : "two_h_gon") << ',' << p.representative << ','
       << format_double(p.r) << ',' << format_double(p.phi) << '\n';
  }
  return os.str();
}

} // namespace ringbif
