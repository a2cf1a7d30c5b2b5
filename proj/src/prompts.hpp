#pragma once

// Fixed prompt fragments shared by the prompt builders and the mock backend's
// shape recognisers.

namespace maltopic::prompts {

inline constexpr const char* kPreamble = "You are an AI language assistant.\n\nYour task: ";

inline constexpr const char* kEnrichVerb = "Enrich the free text response ";
inline constexpr const char* kEnrichWith = " with the respondent's ";
inline constexpr const char* kEnrichRules =
    "Add context where ever necessary. Maintain the original sentiment and meaning of the response. Do not "
    "introduce any new opinions, assumptions, conclusions or extrapolations which were not present in the "
    "original response. Keep the language generic and standardized. Only respond with the enriched response.";
inline constexpr const char* kEnrichAnswer = "\n\nEnriched response:";

inline constexpr const char* kTopicTask =
    "A set of survey responses, each enriched with the respondent's profile, is given below. Identify unique, "
    "non-overlapping and exhaustive topics across these responses. For each topic generate the following:\n"
    "- Topic Name: A concise and descriptive name for the topic.\n"
    "- Description: A one line summary of what the topic encompasses.\n"
    "- Respondent Profile: Which respondent profiles are particularly relevant to this topic.\n"
    "- Representative words: List of top words which represent this topic.\n";
inline constexpr const char* kTopicFormat =
    "\nRespond with only a JSON array. Each element must be an object with the keys \"name\", "
    "\"description\", \"respondent_profile\" and \"representative_words\" (an array of strings). Do not add "
    "any other text.\n";
inline constexpr const char* kResponsesHeader = "\nResponses:\n";
inline constexpr const char* kTopicAnswer = "\nTopics (JSON array):";

inline constexpr const char* kDedupTask =
    "The topics below were extracted from separate batches of survey responses, so several of them may "
    "describe the same theme. Merge duplicate or overlapping topics into one deduplicated list and keep "
    "distinct topics as they are. For every output topic give a concise name, a one line description, the "
    "respondent profiles it is relevant to and its representative words, and list in \"source_topics\" the "
    "exact names of all input topics it was built from.\n";
inline constexpr const char* kDedupFormat =
    "\nRespond with only a JSON array. Each element must be an object with the keys \"name\", "
    "\"description\", \"respondent_profile\", \"representative_words\" (an array of strings) and "
    "\"source_topics\" (an array of input topic names). Do not add any other text.\n";
inline constexpr const char* kDedupInputHeader = "\nInput topics (JSON):\n";
inline constexpr const char* kDedupAnswer = "\n\nDeduplicated topics (JSON array):";

inline constexpr const char* kFormatReminder =
    "\n\nYour previous answer could not be read. Reply with the JSON array only, exactly in the format "
    "described above, with no surrounding text.";

}  // namespace maltopic::prompts
