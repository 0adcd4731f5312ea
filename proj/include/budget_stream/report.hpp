#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "budget_stream/harness.hpp"

namespace budget_stream {

/// Parses `policy,alpha,mean_auc,std_auc`. Throws ParseError (with the
/// 1-based file row) on a malformed line and SchemaError on an empty table.
std::vector<SweepAggregate> read_aggregate_csv(std::istream& in);

/// Budget-vs-AUC line chart: x = alpha, y = mean AUC, one polyline per
/// policy, plus a legend. Self-contained SVG.
std::string render_svg(const std::vector<SweepAggregate>& aggregates);

/// Markdown table, one row per policy and one column per alpha.
std::string render_markdown(const std::vector<SweepAggregate>& aggregates);

}  // namespace budget_stream
