#include "enacode/report.hpp"

#include "enacode/csv.hpp"
#include "enacode/numfmt.hpp"
#include "enacode/pipeline.hpp"
#include "enacode/topics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace enacode::report {

using nlohmann::json;
namespace files = pipeline::files;

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

namespace {

std::string inline_svg(const std::string& svg) {
  // drop the XML prolog; keep the metadata comment
  if (svg.rfind("<?xml", 0) == 0)
    return svg.substr(svg.find('\n') + 1);
  return svg;
}

void topics_section(std::string& out, const pipeline::Workspace& ws) {
  const auto summaries = topics::parse_summaries_csv(ws.require(files::topics, "topics"));
  const auto scheme = ws.require_json(files::scheme, "code");
  std::map<std::string, std::string> topic_map;
  if (scheme.contains("topic_map"))
    for (const auto& [k, v] : scheme["topic_map"].items())
      topic_map[k] = v.get<std::string>();

  out += "<section id=\"topics\">\n<h2>Topics</h2>\n<table class=\"topics\">\n<thead><tr>";
  std::size_t rows = 0;
  for (const auto& s : summaries) {
    out += fmt::format("<th>Topic {}</th>", s.topic_id);
    rows = std::max(rows, s.terms.size());
  }
  out += "</tr></thead>\n<tbody>\n";
  for (std::size_t r = 0; r < rows; ++r) {
    out += "<tr>";
    for (const auto& s : summaries)
      out += "<td>" + (r < s.terms.size() ? html_escape(s.terms[r]) : std::string()) + "</td>";
    out += "</tr>\n";
  }
  out += "</tbody>\n<tfoot><tr>";
  for (const auto& s : summaries) {
    auto it = topic_map.find(std::to_string(s.topic_id));
    out += "<td>" + (it == topic_map.end() ? std::string("(no code)") : html_escape(it->second)) +
           "</td>";
  }
  out += "</tr></tfoot>\n</table>\n";

  out += "<table class=\"coherence\">\n<thead><tr><th>K</th><th>UMass coherence</th><th>selected</th>"
         "</tr></thead>\n<tbody>\n";
  const auto records = csv::parse(ws.require(files::coherence, "topics"));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    out += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td></tr>\n", f[0], f[1],
                       f[2] == "1" ? "yes" : "");
  }
  out += "</tbody>\n</table>\n</section>\n";
}

void kappa_table(std::string& out, const json& doc, const std::string& caption) {
  out += "<table class=\"kappa\">\n<caption>" + html_escape(caption) + "</caption>\n";
  out += "<thead><tr><th>Code</th><th>Cohen's &kappa;</th><th>Agreement</th><th>a</th><th>b</th>"
         "<th>c</th><th>d</th></tr></thead>\n<tbody>\n";
  for (const auto& r : doc.at("per_code"))
    out += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td>"
                       "<td>{}</td></tr>\n",
                       html_escape(r.at("code").get<std::string>()), fixed2(r.at("kappa").get<double>()),
                       r.at("band").get<std::string>(), r.at("a").get<long>(), r.at("b").get<long>(),
                       r.at("c").get<long>(), r.at("d").get<long>());
  out += "</tbody>\n</table>\n";
}

void strengths_table(std::string& out, const json& networks) {
  struct Row {
    std::string connection;
    double a, h;
  };
  std::vector<Row> rows;
  const auto& ea = networks.at("algorithm").at("edges");
  const auto& eh = networks.at("human").at("edges");
  for (std::size_t p = 0; p < ea.size(); ++p)
    rows.push_back({ea[p].at("a").get<std::string>() + " and " + ea[p].at("b").get<std::string>(),
                    ea[p].at("weight").get<double>(), eh[p].at("weight").get<double>()});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return x.a != y.a ? x.a > y.a : x.h > y.h;
  });
  out += "<table class=\"strengths\">\n<caption>Strength of connections: automated + instructor "
         "keywords (A+HK) vs human (H)</caption>\n";
  out += "<thead><tr><th>Connection</th><th>Strength (A+HK)</th><th>Strength (H)</th></tr></thead>\n"
         "<tbody>\n";
  for (const auto& r : rows)
    out += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td></tr>\n", html_escape(r.connection),
                       fixed2(r.a), fixed2(r.h));
  out += "</tbody>\n</table>\n";
}

} // namespace

std::string render_html(const pipeline::Workspace& ws) {
  const auto cfg = ws.config();
  const auto networks = ws.require_json(files::networks, "ena");
  const auto stats = ws.require_json(files::stats_json, "stats");
  const auto accumulation = networks.at("accumulation").get<std::string>();

  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
         "<title>enacode report</title>\n<style>\n"
         "body{font-family:sans-serif;max-width:1100px;margin:2em auto;color:#222}\n"
         "table{border-collapse:collapse;margin:1em 0}\n"
         "th,td{border-bottom:1px solid #ccc;padding:4px 10px;text-align:left}\n"
         "caption{font-weight:bold;text-align:left;padding:4px 0}\n"
         ".networks{display:flex;flex-wrap:wrap;gap:1em}\n"
         "</style>\n</head>\n<body>\n";
  out += "<h1>Automated coding and network analysis</h1>\n";
  out += fmt::format("<p class=\"meta\">enacode {} &middot; run {} &middot; accumulation: {} &middot; "
                     "units: {} &middot; seed {}</p>\n",
                     pipeline::kToolVersion, pipeline::run_id(ws), html_escape(accumulation),
                     to_string(cfg.unit_key), cfg.topics.seed);

  topics_section(out, ws);

  out += "<section id=\"kappa\">\n<h2>Interrater reliability</h2>\n";
  kappa_table(out, ws.require_json(files::kappa_lda_json, "agreement"),
              "Automated coding (LDA keywords) vs human coding");
  kappa_table(out, ws.require_json(files::kappa_json, "agreement"),
              "Automated + instructor keywords (A+HK) vs human coding");
  out += "</section>\n";

  out += "<section id=\"networks\">\n<h2>Group networks</h2>\n<div class=\"networks\">\n";
  out += "<figure>" + inline_svg(ws.require(files::svg_algorithm, "ena")) +
         "<figcaption>algorithm (A+HK) mean network</figcaption></figure>\n";
  out += "<figure>" + inline_svg(ws.require(files::svg_human, "ena")) +
         "<figcaption>human mean network</figcaption></figure>\n";
  out += "</div>\n";
  strengths_table(out, networks);
  out += "</section>\n";

  out += "<section id=\"difference\">\n<h2>Difference network</h2>\n<figure>" +
         inline_svg(ws.require(files::svg_difference, "ena")) +
         "<figcaption>algorithm minus human: red edges are stronger for algorithm, blue for "
         "human</figcaption></figure>\n</section>\n";

  out += "<section id=\"stats\">\n<h2>Mann-Whitney tests</h2>\n";
  for (const auto& r : stats.at("results"))
    out += "<p class=\"mw\">" + html_escape(r.at("line").get<std::string>()) + "</p>\n";
  out += "</section>\n</body>\n</html>\n";
  return out;
}

} // namespace enacode::report
