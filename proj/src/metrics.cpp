#include "refeed/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "refeed/errors.hpp"

namespace refeed::metrics {

namespace {

bool is_ascii_punct(unsigned char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
}

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower_ascii(unsigned char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return static_cast<char>(c);
}

bool is_article(const std::string& token) {
    return token == "a" || token == "an" || token == "the";
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (unsigned char c : text) {
        if (is_ascii_space(c)) {
            if (!current.empty()) {
                out.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(c));
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
    return split_ws(normalize_answer(text));
}

double f_measure(double overlap, double pred_size, double gold_size) {
    if (pred_size == 0.0 && gold_size == 0.0) return 1.0;
    if (overlap == 0.0) return 0.0;
    const double precision = overlap / pred_size;
    const double recall = overlap / gold_size;
    return 2.0 * precision * recall / (precision + recall);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return true;
    }
    return false;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string lowered_stripped;
    lowered_stripped.reserve(text.size());
    for (unsigned char c : text) {
        if (is_ascii_punct(c)) continue;
        lowered_stripped.push_back(lower_ascii(c));
    }
    const auto tokens = split_ws(lowered_stripped);
    std::string out;
    for (const auto& token : tokens) {
        if (is_article(token)) continue;
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

int exact_match(std::string_view prediction, const std::vector<std::string>& golds) {
    if (golds.empty()) throw std::invalid_argument("exact_match requires non-empty golds");
    const std::string norm_pred = normalize_answer(prediction);
    for (const auto& gold : golds) {
        if (norm_pred == normalize_answer(gold)) return 1;
    }
    return 0;
}

double token_f1(std::string_view prediction, const std::vector<std::string>& golds) {
    if (golds.empty()) throw std::invalid_argument("token_f1 requires non-empty golds");
    const auto pred_tokens = normalized_tokens(prediction);
    std::unordered_map<std::string, int> pred_counts;
    for (const auto& t : pred_tokens) ++pred_counts[t];

    double best = 0.0;
    for (const auto& gold : golds) {
        const auto gold_tokens = normalized_tokens(gold);
        std::unordered_map<std::string, int> gold_counts;
        for (const auto& t : gold_tokens) ++gold_counts[t];
        double overlap = 0.0;
        for (const auto& [token, count] : pred_counts) {
            auto it = gold_counts.find(token);
            if (it != gold_counts.end()) overlap += std::min(count, it->second);
        }
        best = std::max(best, f_measure(overlap, static_cast<double>(pred_tokens.size()),
                                        static_cast<double>(gold_tokens.size())));
    }
    return best;
}

double rouge_l(std::string_view prediction, std::string_view reference) {
    std::string pred_lower(prediction);
    std::string ref_lower(reference);
    for (auto& c : pred_lower) c = lower_ascii(static_cast<unsigned char>(c));
    for (auto& c : ref_lower) c = lower_ascii(static_cast<unsigned char>(c));
    const auto pred_tokens = split_ws(pred_lower);
    const auto ref_tokens = split_ws(ref_lower);
    if (pred_tokens.empty() || ref_tokens.empty()) return 0.0;
    const double lcs = static_cast<double>(lcs_length(pred_tokens, ref_tokens));
    if (lcs == 0.0) return 0.0;
    return f_measure(lcs, static_cast<double>(pred_tokens.size()),
                     static_cast<double>(ref_tokens.size()));
}

int recall_hit_at_k(const std::vector<std::string>& ranked_texts,
                    const std::vector<std::string>& golds, int k) {
    if (k < 1) throw std::invalid_argument("recall requires K >= 1");
    if (golds.empty()) throw std::invalid_argument("recall requires non-empty golds");

    std::vector<std::vector<std::string>> gold_tokens;
    gold_tokens.reserve(golds.size());
    for (const auto& gold : golds) {
        auto tokens = normalized_tokens(gold);
        if (!tokens.empty()) gold_tokens.push_back(std::move(tokens));
    }
    if (gold_tokens.empty()) return 0;

    const std::size_t limit = std::min(ranked_texts.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < limit; ++i) {
        const auto text_tokens = normalized_tokens(ranked_texts[i]);
        for (const auto& needle : gold_tokens) {
            if (contains_phrase(text_tokens, needle)) return 1;
        }
    }
    return 0;
}

namespace {

template <typename Ref>
std::unordered_map<std::string, const Ref*> index_dataset(const std::vector<Ref>& dataset) {
    std::unordered_map<std::string, const Ref*> by_id;
    for (const auto& ref : dataset) by_id.emplace(ref.id, &ref);
    return by_id;
}

template <typename Ref>
void check_trace_ids(const std::vector<ScoredTraceView>& traces,
                     const std::unordered_map<std::string, const Ref*>& by_id) {
    std::string unknown;
    for (const auto& trace : traces) {
        if (by_id.find(trace.id) == by_id.end()) {
            if (!unknown.empty()) unknown += ", ";
            unknown += trace.id;
        }
    }
    if (!unknown.empty()) {
        throw Error("trace ids not present in dataset: " + unknown);
    }
}

}  // namespace

MetricsReport evaluate_qa(const std::vector<ScoredTraceView>& traces,
                          const std::vector<QaRef>& dataset, const std::vector<int>& ks) {
    auto by_id = index_dataset(dataset);
    check_trace_ids(traces, by_id);
    std::unordered_map<std::string, const ScoredTraceView*> trace_by_id;
    for (const auto& t : traces) trace_by_id.emplace(t.id, &t);

    MetricsReport report;
    report.num_examples = dataset.size();
    double em_sum = 0.0, f1_sum = 0.0;
    std::map<int, double> hit_sums;
    for (int k : ks) hit_sums[k] = 0.0;

    for (const auto& ref : dataset) {
        PerExample row;
        row.id = ref.id;
        auto it = trace_by_id.find(ref.id);
        if (it == trace_by_id.end()) {
            report.missing_ids.push_back(ref.id);
            for (int k : ks) row.hit_at_k[k] = 0;
        } else {
            const auto& trace = *it->second;
            row.em = exact_match(trace.final_text, ref.answers);
            row.f1 = token_f1(trace.final_text, ref.answers);
            for (int k : ks) {
                row.hit_at_k[k] = recall_hit_at_k(trace.ranked_passage_texts, ref.answers, k);
            }
        }
        em_sum += row.em;
        f1_sum += row.f1;
        for (int k : ks) hit_sums[k] += row.hit_at_k[k];
        report.per_example.push_back(std::move(row));
    }

    const double n = report.num_examples > 0 ? static_cast<double>(report.num_examples) : 1.0;
    if (report.num_examples > 0) {
        report.em = em_sum / n;
        report.f1 = f1_sum / n;
        for (int k : ks) report.recall_at_k[k] = hit_sums[k] / n;
    } else {
        for (int k : ks) report.recall_at_k[k] = 0.0;
    }
    return report;
}

MetricsReport evaluate_dialogue(const std::vector<ScoredTraceView>& traces,
                                const std::vector<DialogueRef>& dataset) {
    auto by_id = index_dataset(dataset);
    check_trace_ids(traces, by_id);
    std::unordered_map<std::string, const ScoredTraceView*> trace_by_id;
    for (const auto& t : traces) trace_by_id.emplace(t.id, &t);

    MetricsReport report;
    report.num_examples = dataset.size();
    double em_sum = 0.0, f1_sum = 0.0, rouge_sum = 0.0;

    for (const auto& ref : dataset) {
        PerExample row;
        row.id = ref.id;
        auto it = trace_by_id.find(ref.id);
        if (it == trace_by_id.end()) {
            report.missing_ids.push_back(ref.id);
            row.rouge_l = 0.0;
        } else {
            const auto& trace = *it->second;
            const std::vector<std::string> golds{ref.reference};
            row.em = exact_match(trace.final_text, golds);
            row.f1 = token_f1(trace.final_text, golds);
            row.rouge_l = rouge_l(trace.final_text, ref.reference);
        }
        em_sum += row.em;
        f1_sum += row.f1;
        rouge_sum += row.rouge_l.value_or(0.0);
        report.per_example.push_back(std::move(row));
    }

    if (report.num_examples > 0) {
        const double n = static_cast<double>(report.num_examples);
        report.em = em_sum / n;
        report.f1 = f1_sum / n;
        report.rouge_l = rouge_sum / n;
    } else {
        report.rouge_l = 0.0;
    }
    return report;
}

}  // namespace refeed::metrics
