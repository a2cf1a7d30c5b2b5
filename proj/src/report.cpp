#include "maltopic/pipeline.hpp"

#include <iomanip>
#include <sstream>

namespace maltopic {

namespace {

std::string fixed(double value, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : ", ") + w;
  return out;
}

}  // namespace

std::string render_report(const RunArtifacts& a) {
  std::ostringstream out;
  out << "# Topic modeling report\n\n";
  if (!a.target_field.empty()) out << "Free-text field: `" << a.target_field << "`\n\n";

  std::size_t excluded = 0;
  for (const auto& r : a.enriched) excluded += r.excluded;
  out << "- Responses: " << a.enriched.size() << " (" << excluded << " excluded)\n";
  out << "- Batches: " << a.batches.size() << "\n";
  if (a.dedup) out << "- Deduplication: " << to_string(a.dedup->method) << "\n";
  out << "\n## Topics\n\n";

  const auto* topics = a.dedup ? &a.dedup->topics : nullptr;
  if (!topics || topics->empty()) {
    out << "No topics were produced; metrics are omitted.\n";
  } else {
    for (std::size_t i = 0; i < topics->size(); ++i) {
      const auto& t = (*topics)[i];
      out << "### " << (i + 1) << ". " << t.name << "\n\n";
      out << "- Description: " << t.description << "\n";
      out << "- Respondent profile: " << t.respondent_profile << "\n";
      out << "- Representative words: " << join_words(t.representative_words) << "\n\n";
    }
    out << "## Metrics\n\n";
    if (!a.metrics) {
      out << "Metrics were not computed.\n";
    } else {
      const auto& m = *a.metrics;
      out << "| Metric | Value |\n|---|---|\n";
      out << "| Word coherence (mean PMI) | " << fixed(m.coherence) << " |\n";
      out << "| Word diversity | " << fixed(m.diversity) << " |\n";
      out << "| Average topic similarity | "
          << (m.avg_similarity ? fixed(*m.avg_similarity) : std::string("n/a (fewer than two topics)")) << " |\n";
      out << "| Document coverage (theta = " << fixed(m.theta, 2) << ") | " << fixed(m.coverage) << " |\n";
      if (!m.flags.empty()) {
        out << "\nFlags:\n\n";
        for (const auto& f : m.flags) out << "- " << f << "\n";
      }
    }
  }

  out << "\n## Cost\n\n";
  out << "| Exchanges | Cached | Input tokens | Output tokens | USD |\n|---|---|---|---|---|\n";
  out << "| " << a.cost.exchanges << " | " << a.cost.cached_exchanges << " | " << a.cost.input_tokens << " | "
      << a.cost.output_tokens << " | " << fixed(a.cost.total_usd, 6) << " |\n";
  return out.str();
}

}  // namespace maltopic
