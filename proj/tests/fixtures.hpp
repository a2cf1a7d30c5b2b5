#pragma once

#include "maltopic/survey.hpp"
#include "maltopic/topic.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace maltopic::testing {

// Ten workplace-AI concern topics used as a shared reference list.
// Descriptions and profiles are placeholders written for these tests.
inline std::vector<Topic> reference_concern_topics() {
  auto topic = [](std::string name, std::vector<std::string> words) {
    return Topic{name, "Concerns grouped under " + name + ".", "Respondents across roles.", std::move(words)};
  };
  return {
      topic("Job Displacement Concerns", {"displacement", "automation", "job loss", "security", "anxiety"}),
      topic("Skill Gaps and Training Needs", {"skills", "training", "gap", "upskill", "education"}),
      topic("Data Privacy and Security Issues", {"privacy", "security", "data", "protection", "risk"}),
      topic("Reliability and Trust in AI Tools", {"reliability", "trust", "accuracy", "hallucinations", "skepticism"}),
      topic("Ethical Implications of AI", {"ethics", "bias", "fairness", "responsibility", "implications"}),
      topic("Impact on Job Market Dynamics", {"job market", "hiring", "availability", "competition", "dynamics"}),
      topic("Integration Challenges of AI Tools", {"integration", "challenges", "workflows", "adoption", "resistance"}),
      topic("Cost Implications of AI Adoption", {"cost", "financial", "budget", "investment", "implications"}),
      topic("Changing Role of Human Input", {"human input", "creativity", "relevance", "skills", "automation"}),
      topic("Resistance to AI Adoption", {"Resistance", "adoption", "culture", "innovation", "productivity"}),
  };
}

inline std::vector<FieldSchema> survey_schema() {
  return {{"job_title", FieldKind::structured, std::nullopt},
          {"years_of_experience", FieldKind::structured, std::nullopt},
          {"concerns", FieldKind::free_text, std::nullopt}};
}

/// Deterministic synthetic survey: `n` rows with an id column, a job title,
/// years of experience and a concerns answer. Every `blank_every`-th answer
/// is left empty (0 disables).
inline SurveyDataset synthetic_survey(std::size_t n, std::size_t blank_every = 0) {
  static const std::vector<std::string> titles = {"Data Scientist", "Software Engineer", "Product Manager",
                                                  "Project Manager", "Engineering Lead", "Data Analyst", "Student"};
  static const std::vector<std::string> concerns = {
      "worried about job loss as automation spreads",
      "privacy and security of company data shared with AI tools",
      "hallucinations make me distrust the accuracy of outputs",
      "juniors may never learn the skills if AI does the work",
      "bias and fairness in generated decisions",
      "the cost of licences and integration into workflows",
      "hiring is slowing down and the job market is tough for students",
      "leadership expects productivity gains that are not realistic",
  };
  SurveyDataset d;
  d.schema = survey_schema();
  for (std::size_t i = 0; i < n; ++i) {
    SurveyRecord r;
    r.record_id = "r" + std::to_string(i);
    r.values["job_title"] = titles[i % titles.size()];
    r.values["years_of_experience"] = std::to_string(1 + (i * 7) % 25);
    const bool blank = blank_every > 0 && i % blank_every == blank_every - 1;
    r.values["concerns"] = blank ? "" : concerns[(i * 3) % concerns.size()];
    d.records.push_back(std::move(r));
  }
  return d;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path() / ("maltopic-" + name + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace maltopic::testing
