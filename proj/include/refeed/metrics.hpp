#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refeed::metrics {

/// Answer-string normalization: lowercase, strip ASCII punctuation, drop the
/// articles "a"/"an"/"the" as whole tokens, collapse whitespace, trim.
/// Idempotent. Non-ASCII bytes pass through untouched.
std::string normalize_answer(std::string_view text);

/// 1 iff the normalized prediction equals any normalized gold. golds must be
/// non-empty.
int exact_match(std::string_view prediction, const std::vector<std::string>& golds);

/// Bag-of-tokens F1 over normalized strings, maximized over golds. Multiset
/// overlap; 1.0 when both token lists are empty, 0.0 when overlap is empty.
double token_f1(std::string_view prediction, const std::vector<std::string>& golds);

/// LCS F-measure (beta = 1) over whitespace tokens of the lowercased strings.
/// No other normalization. 0.0 when the LCS is empty or either side is empty.
double rouge_l(std::string_view prediction, std::string_view reference);

/// 1 iff any of the first min(k, size) texts contains some normalized gold as
/// a token-boundary phrase. Golds that normalize to nothing never match.
/// `ranked_texts` is the merged retrieval pool's passage texts in rank order.
int recall_hit_at_k(const std::vector<std::string>& ranked_texts,
                    const std::vector<std::string>& golds, int k);

struct PerExample {
    std::string id;
    double em = 0.0;
    double f1 = 0.0;
    std::optional<double> rouge_l;
    std::map<int, int> hit_at_k;  // K -> 0/1, QA runs only
};

struct MetricsReport {
    double em = 0.0;
    double f1 = 0.0;
    std::optional<double> rouge_l;       // dialogue runs
    std::map<int, double> recall_at_k;   // QA runs; non-decreasing in K
    std::vector<PerExample> per_example;
    std::uint64_t num_examples = 0;
    std::vector<std::string> missing_ids;           // dataset ids with no trace
    std::map<std::string, std::string> metadata;    // config fingerprint etc.
};

/// What the scorer needs from one pipeline trace.
struct ScoredTraceView {
    std::string id;
    std::string final_text;
    std::vector<std::string> ranked_passage_texts;  // merged pool order
};

struct QaRef {
    std::string id;
    std::vector<std::string> answers;
};

struct DialogueRef {
    std::string id;
    std::string reference;
};

/// Aggregates = means over per-example rows; dataset ids without a trace
/// score 0 on every metric and are listed in missing_ids. A trace whose id is
/// not in the dataset raises an error listing the offending ids.
MetricsReport evaluate_qa(const std::vector<ScoredTraceView>& traces,
                          const std::vector<QaRef>& dataset, const std::vector<int>& ks);
MetricsReport evaluate_dialogue(const std::vector<ScoredTraceView>& traces,
                                const std::vector<DialogueRef>& dataset);

}  // namespace refeed::metrics
