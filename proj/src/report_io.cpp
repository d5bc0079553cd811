#include "chargelab/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chargelab {
namespace {

using nlohmann::ordered_json;

// NaN and infinities are not JSON numbers; they go out as strings.
ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ordered_json named_values(const std::vector<NamedValue>& values) {
  ordered_json out = ordered_json::object();
  for (const auto& nv : values) out[nv.name] = json_number(nv.value);
  return out;
}

ordered_json to_json(const InequalityReport& r) {
  ordered_json j;
  j["case"] = r.case_id;
  j["kind"] = r.kind;
  j["d"] = r.d;
  j["m"] = r.m;
  j["h"] = json_number(r.h);
  j["grid"] = r.grid;
  j["lhs"] = json_number(r.lhs);
  j["rhs_terms"] = named_values(r.rhs_terms);
  j["rhs"] = json_number(r.rhs);
  j["slack"] = json_number(r.slack);
  if (!std::isnan(r.chain)) {
    j["chain"] = json_number(r.chain);
    j["chain_terms"] = named_values(r.chain_terms);
  }
  j["expect_equality"] = r.expect_equality;
  j["equality"] = r.equality;
  j["tolerance"] = r.tolerance;
  ordered_json argmax = ordered_json::object();
  for (const auto& [name, x] : r.argmax) argmax[name] = x;
  j["argmax"] = argmax;
  j["coverage"] = json_number(r.coverage);
  j["warnings"] = r.warnings;
  j["passed"] = r.passed();
  j["failures"] = r.failures();
  return j;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() { return "case,d,m,h,grid,lhs,rhs,slack,equality,coverage"; }

std::string csv_row(const InequalityReport& r) {
  std::string id = r.case_id.empty() ? r.kind : r.case_id + "/" + r.kind;
  std::ostringstream os;
  os << id << ',' << r.d << ',' << r.m << ',' << format_double(r.h) << ',' << r.grid << ',' << format_double(r.lhs)
     << ',' << format_double(r.rhs) << ',' << format_double(r.slack) << ',' << (r.equality ? "true" : "false") << ','
     << format_double(r.coverage);
  return os.str();
}

std::string report_json(const InequalityReport& r) { return to_json(r).dump(2); }

std::string reports_json(const std::vector<InequalityReport>& reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string svg_loglog(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series) {
  constexpr double W = 800, H = 600, left = 90, right = 30, top = 50, bottom = 70;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) xmin = 0.1, xmax = 10.0;
  if (!(ymin <= ymax)) ymin = 0.1, ymax = 10.0;
  const double lx0 = std::floor(std::log10(xmin)), lx1 = std::max(lx0 + 1, std::ceil(std::log10(xmax)));
  const double ly0 = std::floor(std::log10(ymin)), ly1 = std::max(ly0 + 1, std::ceil(std::log10(ymax)));
  auto px = [&](double x) { return left + (std::log10(x) - lx0) / (lx1 - lx0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (std::log10(y) - ly0) / (ly1 - ly0) * (H - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
     << escape_xml(title) << "</text>\n";
  os << "<g stroke=\"#cccccc\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double e = lx0; e <= lx1 + 0.5; e += 1.0) {
    const double x = px(std::pow(10.0, e));
    os << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(x) << "\" y2=\""
       << fixed(H - bottom) << "\"/>\n";
    os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(H - bottom + 18) << "\" text-anchor=\"middle\" stroke=\"none\">1e"
       << static_cast<int>(e) << "</text>\n";
  }
  for (double e = ly0; e <= ly1 + 0.5; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    os << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(W - right) << "\" y2=\""
       << fixed(y) << "\"/>\n";
    os << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\" stroke=\"none\">1e"
       << static_cast<int>(e) << "</text>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(W - left - right)
     << "\" height=\"" << fixed(H - top - bottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fixed((left + W - right) / 2) << "\" y=\"" << fixed(H - 20)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(x_label) << "</text>\n";
  os << "<text x=\"20\" y=\"" << fixed((top + H - bottom) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"14\" transform=\"rotate(-90 20 " << fixed((top + H - bottom) / 2) << ")\">" << escape_xml(y_label)
     << "</text>\n";

  int legend = 0;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : s.points)
      if (x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y)) pts.emplace_back(px(x), py(y));
    if (s.line) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << fixed(pts[i].first) << ',' << fixed(pts[i].second);
      os << "\"/>\n";
    } else {
      for (const auto& [x, y] : pts)
        os << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
    }
    const double ly = top + 18 + 18 * legend++;
    os << "<rect x=\"" << fixed(W - right - 190) << "\" y=\"" << fixed(ly - 10) << "\" width=\"12\" height=\"12\" fill=\""
       << s.color << "\"/>\n";
    os << "<text x=\"" << fixed(W - right - 172) << "\" y=\"" << fixed(ly) << "\" font-family=\"sans-serif\" "
       << "font-size=\"12\">" << escape_xml(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace chargelab
