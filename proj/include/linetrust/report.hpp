#pragma once

#include <string>

#include "linetrust/dep_assess.hpp"
#include "linetrust/eval.hpp"
#include "linetrust/serialize.hpp"

namespace linetrust {

// One entry per explanation line kept for scoring, ascending by line.
Json assessment_to_json(const Assessment& a);

// Per-line table plus a totals/verdict footer, rendered from the JSON form so
// stored assessments can be re-rendered.
std::string render_assessment(const Json& assessment);

Json metrics_table_to_json(const MetricsTable& t);
Json eval_report_to_json(const EvalReport& r);

// Columns in the order Acc AUC Pre Sen F1 Spe Gm; absent values print as "-".
std::string render_metrics_table(const MetricsTable& t);

}  // namespace linetrust
