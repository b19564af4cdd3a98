#pragma once

#include <string>

namespace enacode::pipeline {
class Workspace;
}

namespace enacode::report {

/// Single-file HTML summary: topics, kappa tables, group networks with the
/// strengths table, the difference plot, then the Mann-Whitney lines.
std::string render_html(const pipeline::Workspace& ws);

std::string html_escape(const std::string& s);

} // namespace enacode::report
