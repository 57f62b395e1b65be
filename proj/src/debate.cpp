#include "debatekit/debate.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <set>

#include "debatekit/backend.hpp"
#include "debatekit/errors.hpp"
#include "debatekit/memory.hpp"

namespace debatekit {

void DebateConfig::validate() const {
    if (num_agents < 1) throw UsageError("num_agents must be >= 1");
    if (num_rounds < 1) throw UsageError("num_rounds must be >= 1");
    if (max_response_tokens < 1) throw UsageError("max_response_tokens must be >= 1");
}

std::size_t DebateState::response_count() const {
    std::size_t n = 0;
    for (const auto& round : rounds_) n += round.size();
    return n;
}

DebateState DebateState::advanced(std::vector<AgentResponse> responses) const {
    if (num_agents_ < 1) throw ProtocolError("state has no agent count configured");
    if (static_cast<int>(responses.size()) != num_agents_)
        throw ProtocolError("expected " + std::to_string(num_agents_) + " responses, got " +
                            std::to_string(responses.size()));
    std::set<int> seen;
    for (const auto& resp : responses) {
        if (resp.round != current_round_)
            throw ProtocolError("response for round " + std::to_string(resp.round) +
                                " while state is at round " + std::to_string(current_round_));
        if (resp.agent_index < 1 || resp.agent_index > num_agents_)
            throw ProtocolError("agent index " + std::to_string(resp.agent_index) +
                                " out of range 1.." + std::to_string(num_agents_));
        if (!seen.insert(resp.agent_index).second)
            throw ProtocolError("duplicate agent index " + std::to_string(resp.agent_index));
    }
    std::sort(responses.begin(), responses.end(),
              [](const AgentResponse& a, const AgentResponse& b) {
                  return a.agent_index < b.agent_index;
              });
    DebateState next = *this;
    next.rounds_.push_back(std::move(responses));
    next.current_round_ = current_round_ + 1;
    return next;
}

DebateState advance_round(const DebateState& state, std::vector<AgentResponse> responses) {
    return state.advanced(std::move(responses));
}

namespace {

bool is_number_token(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    bool digit = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit = true;
        } else if (c == ',' && digit) {
            continue;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            return false;
        }
    }
    return digit;
}

std::string strip_commas(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (c != ',') out.push_back(c);
    return out;
}

}  // namespace

std::string canonicalize_answer(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string_view trimmed = raw.substr(b, e - b);
    if (trimmed.empty()) return std::string(kNoAnswer);
    if (is_number_token(trimmed)) {
        std::string num = strip_commas(trimmed);
        if (!num.empty() && num.front() == '+') num.erase(num.begin());
        return num;
    }
    if (trimmed.size() == 1 && std::isalpha(static_cast<unsigned char>(trimmed[0])))
        return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(trimmed[0]))));
    return std::string(trimmed);
}

namespace {

std::string extract_boxed(std::string_view text) {
    const std::string_view marker = "\\boxed{";
    std::size_t pos = text.rfind(marker);
    if (pos == std::string_view::npos) return std::string(kNoAnswer);
    std::size_t i = pos + marker.size();
    int depth = 1;
    std::string content;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '{') ++depth;
        if (c == '}') {
            if (--depth == 0) break;
        }
        content.push_back(c);
    }
    if (depth != 0) return std::string(kNoAnswer);
    return canonicalize_answer(content);
}

std::string extract_final_number(std::string_view text) {
    std::string best;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '+' || c == '-') && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            if (c == '+' || c == '-') ++j;
            bool dot = false;
            std::size_t end = j;
            while (end < text.size()) {
                char d = text[end];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    ++end;
                } else if (d == ',' && end + 1 < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[end + 1]))) {
                    ++end;
                } else if (d == '.' && !dot && end + 1 < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[end + 1]))) {
                    dot = true;
                    ++end;
                } else {
                    break;
                }
            }
            best = std::string(text.substr(i, end - i));
            i = end;
        } else {
            ++i;
        }
    }
    if (best.empty()) return std::string(kNoAnswer);
    return canonicalize_answer(best);
}

std::string extract_option_letter(std::string_view text) {
    auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
    std::string best;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (upper < 'A' || upper > 'E') continue;
        bool left_ok = (i == 0) || !is_alpha(text[i - 1]);
        bool right_ok = (i + 1 == text.size()) || !is_alpha(text[i + 1]);
        if (left_ok && right_ok) best = std::string(1, upper);
    }
    if (best.empty()) return std::string(kNoAnswer);
    return best;
}

}  // namespace

std::string extract_answer(std::string_view text, AnswerMode mode) {
    switch (mode) {
        case AnswerMode::boxed:
            return extract_boxed(text);
        case AnswerMode::final_number:
            return extract_final_number(text);
        case AnswerMode::multiple_choice:
            return extract_option_letter(text);
    }
    return std::string(kNoAnswer);
}

std::string majority_vote(const std::vector<std::pair<int, std::string>>& answers) {
    if (answers.empty()) throw UsageError("majority_vote: empty answer list");
    std::map<std::string, int> counts;        // answer -> votes
    std::map<std::string, int> first_holder;  // answer -> lowest agent index
    for (const auto& [agent, answer] : answers) {
        std::string canon = canonicalize_answer(answer);
        ++counts[canon];
        auto it = first_holder.find(canon);
        if (it == first_holder.end() || agent < it->second) first_holder[canon] = agent;
    }
    std::string winner;
    int best_count = -1, best_holder = 0;
    for (const auto& [answer, count] : counts) {
        int holder = first_holder[answer];
        if (count > best_count || (count == best_count && holder < best_holder)) {
            winner = answer;
            best_count = count;
            best_holder = holder;
        }
    }
    return winner;
}

double round_cost(int num_agents, int round, double avg_solution_tokens) {
    if (num_agents < 1) throw UsageError("round_cost: num_agents must be >= 1");
    if (round < 1) throw UsageError("round_cost: round must be >= 1");
    if (avg_solution_tokens < 0) throw UsageError("round_cost: avg length must be >= 0");
    return static_cast<double>(num_agents) * num_agents * (round - 1) * avg_solution_tokens;
}

double total_cost(int num_agents, int num_rounds, double avg_solution_tokens) {
    if (num_agents < 1) throw UsageError("total_cost: num_agents must be >= 1");
    if (num_rounds < 1) throw UsageError("total_cost: num_rounds must be >= 1");
    if (avg_solution_tokens < 0) throw UsageError("total_cost: avg length must be >= 0");
    return static_cast<double>(num_agents) * num_agents * avg_solution_tokens * num_rounds *
           (num_rounds - 1) / 2.0;
}

CostReport cost_report(int num_agents, int num_rounds, double avg_solution_tokens) {
    CostReport report;
    report.avg_solution_length = avg_solution_tokens;
    for (int r = 1; r <= num_rounds; ++r) {
        double c = round_cost(num_agents, r, avg_solution_tokens);
        report.per_round_cost.push_back(c);
        report.total += c;
    }
    return report;
}

namespace {

PromptTemplate template_for(MemoryKind kind) {
    switch (kind) {
        case MemoryKind::full_text:
            return PromptTemplate::text;
        case MemoryKind::summary:
            return PromptTemplate::summary;
        case MemoryKind::visual:
            return PromptTemplate::vision;
    }
    return PromptTemplate::text;
}

// Copy of `state` with the oldest `drop` rounds removed. Round numbers of the
// surviving responses keep their original values.
DebateState drop_oldest_rounds(const DebateState& state, int drop) {
    DebateState out(state.num_agents());
    const auto& rounds = state.rounds();
    for (std::size_t i = static_cast<std::size_t>(drop); i < rounds.size(); ++i) {
        auto responses = rounds[i];
        for (auto& r : responses) r.round = out.current_round();
        out = out.advanced(std::move(responses));
    }
    return out;
}

}  // namespace

DebateOutcome run_debate(const DebateConfig& config, const Query& query,
                         ChatBackendIface& backend, CompressionStrategy& strategy,
                         const Tokenizer& tokenizer,
                         const std::function<void(const TranscriptRecord&)>& sink) {
    config.validate();
    if (query.text.empty()) throw UsageError("run_debate: query text is empty");

    DebateOutcome outcome;
    DebateState state(config.num_agents);
    const PromptTemplate tmpl = template_for(strategy.kind());

    for (int round = 1; round <= config.num_rounds; ++round) {
        MemoryContext context = strategy.compress(state);
        outcome.measured_input_tokens += strategy.side_channel_tokens();

        std::vector<AgentResponse> responses;
        double round_latency_ms = 0.0;
        for (int agent = 1; agent <= config.num_agents; ++agent) {
            ChatRequest request = build_prompt(tmpl, query, context, config.num_agents);
            request.max_tokens = config.max_response_tokens;
            request.query_id = query.id;
            request.agent_index = agent;
            request.round = round;

            ChatResponse reply;
            bool sent = false;
            int dropped = 0;
            while (!sent) {
                try {
                    reply = backend.chat(request);
                    sent = true;
                } catch (const ContextLengthError&) {
                    // Truncation policy: drop oldest rounds from the shared
                    // context until the request fits, and flag the run.
                    ++dropped;
                    if (dropped > static_cast<int>(state.rounds().size())) throw;
                    outcome.truncated = true;
                    context = strategy.compress(drop_oldest_rounds(state, dropped));
                    request = build_prompt(tmpl, query, context, config.num_agents);
                    request.max_tokens = config.max_response_tokens;
                    request.query_id = query.id;
                    request.agent_index = agent;
                    request.round = round;
                } catch (const BackendError&) {
                    outcome.aborted = true;
                    outcome.transcript = state;
                    return outcome;
                }
            }

            AgentResponse resp;
            resp.agent_index = agent;
            resp.round = round;
            resp.text = reply.text;
            resp.token_count = tokenizer.count(reply.text);
            resp.elapsed_ms = reply.latency_ms;
            outcome.measured_input_tokens += reply.prompt_tokens;
            outcome.measured_history_tokens += context.context_tokens;
            round_latency_ms = std::max(round_latency_ms, reply.latency_ms);

            if (sink) {
                sink(TranscriptRecord{query.id, round, agent, resp.text, resp.token_count,
                                      to_string(strategy.kind()), reply.latency_ms});
            }
            responses.push_back(std::move(resp));
        }
        // Requests within a round may run concurrently, so the round's wall
        // time is the slowest agent, not the sum.
        outcome.wall_time_seconds += round_latency_ms / 1000.0;
        outcome.per_round_context_tokens.push_back(
            static_cast<long long>(context.context_tokens) * config.num_agents);
        state = state.advanced(std::move(responses));
    }

    const auto& final_round = state.rounds().back();
    std::vector<std::pair<int, std::string>> votes;
    for (const auto& resp : final_round) {
        std::string answer = extract_answer(resp.text, config.answer_mode);
        outcome.final_answers.push_back(answer);
        votes.emplace_back(resp.agent_index, answer);
    }
    outcome.consensus = majority_vote(votes);
    outcome.transcript = state;
    return outcome;
}

}  // namespace debatekit
