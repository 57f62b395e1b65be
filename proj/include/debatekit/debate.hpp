#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "debatekit/tokenizer.hpp"

namespace debatekit {

enum class ConsensusMode { majority };
enum class AnswerMode { boxed, final_number, multiple_choice };

struct DebateConfig {
    int num_agents = 3;
    int num_rounds = 5;
    int max_response_tokens = 1024;
    ConsensusMode consensus_mode = ConsensusMode::majority;
    AnswerMode answer_mode = AnswerMode::boxed;

    void validate() const;
};

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> gold_answer;
};

struct AgentResponse {
    int agent_index = 0;  // 1..K
    int round = 0;        // 1..R
    std::string text;
    int token_count = 0;
    double elapsed_ms = 0.0;
};

/// Immutable snapshot of the debate history. The history before round r
/// holds exactly K*(r-1) responses, grouped by round.
class DebateState {
public:
    DebateState() = default;
    explicit DebateState(int num_agents) : num_agents_(num_agents) {}

    int num_agents() const { return num_agents_; }
    int current_round() const { return current_round_; }
    const std::vector<std::vector<AgentResponse>>& rounds() const { return rounds_; }
    std::size_t response_count() const;
    bool empty() const { return rounds_.empty(); }

    /// Appends one full round of responses, returning the successor state.
    /// The receiver is left untouched (value semantics).
    DebateState advanced(std::vector<AgentResponse> responses) const;

private:
    int num_agents_ = 0;
    int current_round_ = 1;
    std::vector<std::vector<AgentResponse>> rounds_;
};

DebateState advance_round(const DebateState& state, std::vector<AgentResponse> responses);

/// Canonical form used for answer comparison: trimmed, commas stripped from
/// numbers, single option letters uppercased.
std::string canonicalize_answer(std::string_view raw);

inline constexpr const char* kNoAnswer = "<no-answer>";

/// Extracts the final answer from a response. Absence is reported as
/// kNoAnswer, never as an error.
std::string extract_answer(std::string_view text, AnswerMode mode);

/// Majority vote with a deterministic tie-break: among tied answers, the one
/// held by the lowest agent index wins.
std::string majority_vote(const std::vector<std::pair<int, std::string>>& answers);

/// Tokens consumed by history replication at round r: K^2 * (r-1) * L.
double round_cost(int num_agents, int round, double avg_solution_tokens);

/// Cumulative history tokens over R rounds: K^2 * L * R * (R-1) / 2.
double total_cost(int num_agents, int num_rounds, double avg_solution_tokens);

struct CostReport {
    std::vector<double> per_round_cost;
    double total = 0.0;
    double avg_solution_length = 0.0;
};

CostReport cost_report(int num_agents, int num_rounds, double avg_solution_tokens);

struct TranscriptRecord {
    std::string query_id;
    int round = 0;
    int agent = 0;
    std::string text;
    int token_count = 0;
    std::string strategy;
    double elapsed_ms = 0.0;
};

struct DebateOutcome {
    std::vector<std::string> final_answers;  // canonical, indexed by agent order
    std::string consensus;
    DebateState transcript;
    long long measured_input_tokens = 0;       // prompt + context, all requests
    long long measured_history_tokens = 0;     // context portion only
    std::vector<long long> per_round_context_tokens;  // K * context tokens, per round
    double wall_time_seconds = 0.0;
    bool truncated = false;   // context-limit hit, oldest rounds dropped
    bool aborted = false;     // backend failure after retries; transcript partial
};

class ChatBackendIface;     // backend.hpp
class CompressionStrategy;  // memory.hpp

/// Runs the full R-round protocol: compress history, fan out K requests,
/// advance state, majority-vote the final round.
DebateOutcome run_debate(const DebateConfig& config, const Query& query,
                         ChatBackendIface& backend, CompressionStrategy& strategy,
                         const Tokenizer& tokenizer = default_tokenizer(),
                         const std::function<void(const TranscriptRecord&)>& sink = nullptr);

}  // namespace debatekit
