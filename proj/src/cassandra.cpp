#include "reveal/cassandra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace reveal {

ParseError::ParseError(std::string const& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line(line),
      column(column) {}

namespace {

struct Token {
    std::string text;
    int column; // 1-based
};

struct Line {
    int number; // 1-based
    std::vector<Token> tokens;
};

// Tokenizes one line: '#' starts a comment; ':' is its own token.
std::vector<Token> tokenize(std::string const& raw) {
    std::vector<Token> tokens;
    std::string cur;
    int start = 0;
    auto flush = [&](int end) {
        if (!cur.empty()) {
            tokens.push_back({cur, start + 1});
            cur.clear();
        }
        (void)end;
    };
    for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
        char c = raw[i];
        if (c == '#') {
            break;
        }
        if (std::isspace(static_cast<unsigned char>(c)) || c == '\r') {
            flush(i);
        } else if (c == ':') {
            flush(i);
            tokens.push_back({":", i + 1});
        } else {
            if (cur.empty()) {
                start = i;
            }
            cur += c;
        }
    }
    flush(static_cast<int>(raw.size()));
    return tokens;
}

bool isNumber(std::string const& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0';
}

class Parser {
public:
    explicit Parser(std::string const& text) {
        std::istringstream in(text);
        std::string raw;
        int number = 0;
        while (std::getline(in, raw)) {
            ++number;
            auto tokens = tokenize(raw);
            if (!tokens.empty()) {
                lines_.push_back({number, std::move(tokens)});
            }
        }
    }

    Pomdp run() {
        while (pos_ < lines_.size()) {
            Line const& line = lines_[pos_];
            std::string const& key = line.tokens[0].text;
            if (key == "states") {
                readNames(pomdp_.state_names);
            } else if (key == "actions") {
                readNames(pomdp_.action_names);
            } else if (key == "observations") {
                readNames(pomdp_.signal_names);
            } else if (key == "start") {
                readStart();
            } else if (key == "priorities") {
                readPriorities();
            } else if (key == "T") {
                readTransition();
            } else if (key == "O") {
                readObservation();
            } else if (key == "D") {
                readDirect();
            } else if (key == "discount" || key == "values") {
                ++pos_;
            } else if (key == "R") {
                skipReward();
            } else {
                fail(line, 0, "unknown keyword '" + key + "'");
            }
        }
        return finish();
    }

private:
    std::vector<Line> lines_;
    std::size_t pos_ = 0;
    Pomdp pomdp_;
    // Dense T/O matrices per action; filled lazily once dimensions are known.
    std::map<int, std::vector<double>> t_; // action -> Q*Q
    std::map<int, std::vector<double>> o_; // action -> Q*S
    struct DirectEntry {
        int action, from, to, signal;
        double prob;
    };
    std::vector<DirectEntry> direct_;
    bool has_start_ = false;
    std::vector<double> start_;
    std::vector<int> priorities_;

    [[noreturn]] void fail(Line const& line, std::size_t token, std::string const& msg) {
        int column = token < line.tokens.size() ? line.tokens[token].column : 1;
        throw ParseError(msg, line.number, column);
    }

    Line const& expectLine(char const* what) {
        if (pos_ >= lines_.size()) {
            int last = lines_.empty() ? 1 : lines_.back().number;
            throw ParseError(std::string("unexpected end of file, expected ") + what, last, 1);
        }
        return lines_[pos_];
    }

    void expectColon(Line const& line, std::size_t token) {
        if (token >= line.tokens.size() || line.tokens[token].text != ":") {
            fail(line, token, "expected ':'");
        }
    }

    double number(Line const& line, std::size_t token) {
        if (token >= line.tokens.size() || !isNumber(line.tokens[token].text)) {
            fail(line, token, "expected a number");
        }
        return std::strtod(line.tokens[token].text.c_str(), nullptr);
    }

    // Resolves a state/action/observation reference (name or 0-based index).
    int resolve(Line const& line, std::size_t token, std::vector<std::string> const& names,
                char const* what) {
        if (token >= line.tokens.size()) {
            fail(line, token, std::string("expected a ") + what);
        }
        std::string const& text = line.tokens[token].text;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == text) {
                return static_cast<int>(i);
            }
        }
        if (!text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) {
                return std::isdigit(c);
            })) {
            int idx = std::atoi(text.c_str());
            if (idx >= 0 && idx < static_cast<int>(names.size())) {
                return idx;
            }
        }
        fail(line, token, std::string("unknown ") + what + " '" + text + "'");
    }

    void readNames(std::vector<std::string>& out) {
        Line const& line = lines_[pos_];
        expectColon(line, 1);
        if (line.tokens.size() < 3) {
            fail(line, 2, "expected a count or a name list");
        }
        if (!out.empty()) {
            fail(line, 0, "duplicate declaration");
        }
        if (line.tokens.size() == 3 && isNumber(line.tokens[2].text)) {
            int count = std::atoi(line.tokens[2].text.c_str());
            if (count <= 0) {
                fail(line, 2, "count must be positive");
            }
            for (int i = 0; i < count; ++i) {
                out.push_back(std::to_string(i));
            }
        } else {
            for (std::size_t i = 2; i < line.tokens.size(); ++i) {
                out.push_back(line.tokens[i].text);
            }
        }
        ++pos_;
    }

    void needStates(Line const& line) {
        if (pomdp_.state_names.empty()) {
            fail(line, 0, "states must be declared first");
        }
    }

    void readStart() {
        Line const& line = lines_[pos_];
        needStates(line);
        int const n = static_cast<int>(pomdp_.state_names.size());
        start_.assign(n, 0.0);
        has_start_ = true;
        if (line.tokens.size() >= 2 && line.tokens[1].text == "include") {
            expectColon(line, 2);
            if (line.tokens.size() < 4) {
                fail(line, 3, "expected state names");
            }
            double mass = 1.0 / static_cast<double>(line.tokens.size() - 3);
            for (std::size_t i = 3; i < line.tokens.size(); ++i) {
                start_[resolve(line, i, pomdp_.state_names, "state")] = mass;
            }
            ++pos_;
            return;
        }
        expectColon(line, 1);
        if (line.tokens.size() == 2) {
            // Distribution row on the following line.
            ++pos_;
            Line const& row = expectLine("a start distribution row");
            if (static_cast<int>(row.tokens.size()) != n) {
                fail(row, 0, "start distribution needs one value per state");
            }
            for (int q = 0; q < n; ++q) {
                start_[q] = number(row, q);
            }
            ++pos_;
            return;
        }
        if (static_cast<int>(line.tokens.size()) != n + 2) {
            fail(line, 2, "start distribution needs one value per state");
        }
        for (int q = 0; q < n; ++q) {
            start_[q] = number(line, q + 2);
        }
        ++pos_;
    }

    void readPriorities() {
        Line const& line = lines_[pos_];
        needStates(line);
        expectColon(line, 1);
        int const n = static_cast<int>(pomdp_.state_names.size());
        if (static_cast<int>(line.tokens.size()) != n + 2) {
            fail(line, 2, "priorities need one integer per state");
        }
        priorities_.clear();
        for (int q = 0; q < n; ++q) {
            double v = number(line, q + 2);
            if (v < 0 || v != std::floor(v)) {
                fail(line, q + 2, "priorities must be non-negative integers");
            }
            priorities_.push_back(static_cast<int>(v));
        }
        ++pos_;
    }

    std::vector<double>& tMatrix(int action) {
        int const n = static_cast<int>(pomdp_.state_names.size());
        auto [it, fresh] = t_.try_emplace(action);
        if (fresh) {
            it->second.assign(static_cast<std::size_t>(n) * n, 0.0);
        }
        return it->second;
    }

    std::vector<double>& oMatrix(int action) {
        int const n = static_cast<int>(pomdp_.state_names.size());
        int const s = static_cast<int>(pomdp_.signal_names.size());
        auto [it, fresh] = o_.try_emplace(action);
        if (fresh) {
            it->second.assign(static_cast<std::size_t>(n) * s, 0.0);
        }
        return it->second;
    }

    // Reads a block body: `identity`, `uniform`, or `rows` x `cols` numbers.
    void readBlock(std::vector<double>& matrix, int rows, int cols, bool identity_ok) {
        Line const& body = expectLine("a matrix block");
        if (body.tokens.size() == 1 && body.tokens[0].text == "identity") {
            if (!identity_ok || rows != cols) {
                fail(body, 0, "identity requires a square matrix");
            }
            for (int i = 0; i < rows; ++i) {
                matrix[static_cast<std::size_t>(i) * cols + i] = 1.0;
            }
            ++pos_;
            return;
        }
        if (body.tokens.size() == 1 && body.tokens[0].text == "uniform") {
            for (int i = 0; i < rows; ++i) {
                for (int j = 0; j < cols; ++j) {
                    matrix[static_cast<std::size_t>(i) * cols + j] = 1.0 / cols;
                }
            }
            ++pos_;
            return;
        }
        for (int i = 0; i < rows; ++i) {
            Line const& row = expectLine("a matrix row");
            if (static_cast<int>(row.tokens.size()) != cols) {
                fail(row, 0, "matrix row has wrong width");
            }
            for (int j = 0; j < cols; ++j) {
                matrix[static_cast<std::size_t>(i) * cols + j] = number(row, j);
            }
            ++pos_;
        }
    }

    void readTransition() {
        Line const& line = lines_[pos_];
        needStates(line);
        if (pomdp_.action_names.empty()) {
            fail(line, 0, "actions must be declared before T:");
        }
        expectColon(line, 1);
        int action = resolve(line, 2, pomdp_.action_names, "action");
        int const n = static_cast<int>(pomdp_.state_names.size());
        if (line.tokens.size() == 3) {
            ++pos_;
            readBlock(tMatrix(action), n, n, true);
            return;
        }
        // Single entry: T: a : from : to prob
        expectColon(line, 3);
        int from = resolve(line, 4, pomdp_.state_names, "state");
        expectColon(line, 5);
        int to = resolve(line, 6, pomdp_.state_names, "state");
        double prob = number(line, 7);
        tMatrix(action)[static_cast<std::size_t>(from) * n + to] = prob;
        ++pos_;
    }

    void readObservation() {
        Line const& line = lines_[pos_];
        needStates(line);
        if (pomdp_.action_names.empty() || pomdp_.signal_names.empty()) {
            fail(line, 0, "actions and observations must be declared before O:");
        }
        expectColon(line, 1);
        int action = resolve(line, 2, pomdp_.action_names, "action");
        int const n = static_cast<int>(pomdp_.state_names.size());
        int const s = static_cast<int>(pomdp_.signal_names.size());
        if (line.tokens.size() == 3) {
            ++pos_;
            readBlock(oMatrix(action), n, s, n == s);
            return;
        }
        // Single entry: O: a : to : obs prob
        expectColon(line, 3);
        int to = resolve(line, 4, pomdp_.state_names, "state");
        expectColon(line, 5);
        int obs = resolve(line, 6, pomdp_.signal_names, "observation");
        double prob = number(line, 7);
        oMatrix(action)[static_cast<std::size_t>(to) * s + obs] = prob;
        ++pos_;
    }

    void readDirect() {
        // D: a : from : to : obs prob  (joint transition entry)
        Line const& line = lines_[pos_];
        needStates(line);
        if (pomdp_.action_names.empty() || pomdp_.signal_names.empty()) {
            fail(line, 0, "actions and observations must be declared before D:");
        }
        expectColon(line, 1);
        DirectEntry e;
        e.action = resolve(line, 2, pomdp_.action_names, "action");
        expectColon(line, 3);
        e.from = resolve(line, 4, pomdp_.state_names, "state");
        expectColon(line, 5);
        e.to = resolve(line, 6, pomdp_.state_names, "state");
        expectColon(line, 7);
        e.signal = resolve(line, 8, pomdp_.signal_names, "observation");
        e.prob = number(line, 9);
        direct_.push_back(e);
        ++pos_;
    }

    void skipReward() {
        // R: lines are recognized and ignored, including matrix-form bodies.
        ++pos_;
        while (pos_ < lines_.size()) {
            auto const& tokens = lines_[pos_].tokens;
            bool numeric = std::all_of(tokens.begin(), tokens.end(),
                                       [](Token const& t) { return isNumber(t.text); });
            if (!numeric) {
                break;
            }
            ++pos_;
        }
    }

    Pomdp finish() {
        Line last{lines_.empty() ? 1 : lines_.back().number, {}};
        if (pomdp_.state_names.empty()) {
            throw ParseError("missing states declaration", last.number, 1);
        }
        if (pomdp_.action_names.empty()) {
            throw ParseError("missing actions declaration", last.number, 1);
        }
        if (pomdp_.signal_names.empty()) {
            throw ParseError("missing observations declaration", last.number, 1);
        }
        int const n = static_cast<int>(pomdp_.state_names.size());
        int const na = static_cast<int>(pomdp_.action_names.size());
        int const ns = static_cast<int>(pomdp_.signal_names.size());

        pomdp_.rows.resize(static_cast<std::size_t>(n) * na);
        for (int q = 0; q < n; ++q) {
            for (int a = 0; a < na; ++a) {
                // delta(q,a)(s,q') = T(q,a,q') * O(a,q',s), plus D: entries.
                std::map<std::pair<int, int>, double> mass; // (signal, next) -> prob
                auto t_it = t_.find(a);
                auto o_it = o_.find(a);
                if (t_it != t_.end() && o_it != o_.end()) {
                    for (int next = 0; next < n; ++next) {
                        double t = t_it->second[static_cast<std::size_t>(q) * n + next];
                        if (t <= 0.0) {
                            continue;
                        }
                        for (int sig = 0; sig < ns; ++sig) {
                            double o = o_it->second[static_cast<std::size_t>(next) * ns + sig];
                            if (o > 0.0) {
                                mass[{sig, next}] += t * o;
                            }
                        }
                    }
                }
                for (auto const& e : direct_) {
                    if (e.action == a && e.from == q && e.prob > 0.0) {
                        mass[{e.signal, e.to}] += e.prob;
                    }
                }
                auto& row = pomdp_.rows[static_cast<std::size_t>(q) * na + a];
                for (auto const& [key, p] : mass) {
                    row.push_back({key.first, key.second, p});
                }
            }
        }

        if (has_start_) {
            pomdp_.initial_distribution = start_;
        } else {
            pomdp_.initial_distribution.assign(n, 1.0 / n);
        }
        pomdp_.syncInitialSupport();
        pomdp_.priorities = priorities_.empty() ? std::vector<int>(n, 0) : priorities_;
        return pomdp_;
    }
};

std::string formatProb(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    return buf;
}

// Attempts the Cassandra factorization delta = T * O; the observation row for
// (action, next state) must be consistent across all source states, and the
// positivity pattern must match exactly so supports survive the round trip.
bool factorize(Pomdp const& pomdp, int action, std::vector<double>& t, std::vector<double>& o) {
    int const n = pomdp.stateCount();
    int const ns = pomdp.signalCount();
    t.assign(static_cast<std::size_t>(n) * n, 0.0);
    o.assign(static_cast<std::size_t>(n) * ns, 0.0);
    std::vector<bool> o_known(n, false);

    for (int q = 0; q < n; ++q) {
        std::vector<double> joint(static_cast<std::size_t>(n) * ns, 0.0);
        for (auto const& e : pomdp.row(q, action)) {
            joint[static_cast<std::size_t>(e.next) * ns + e.signal] = e.prob;
            t[static_cast<std::size_t>(q) * n + e.next] += e.prob;
        }
        for (int next = 0; next < n; ++next) {
            double total = t[static_cast<std::size_t>(q) * n + next];
            if (total <= 0.0) {
                continue;
            }
            for (int sig = 0; sig < ns; ++sig) {
                double cond = joint[static_cast<std::size_t>(next) * ns + sig] / total;
                double& known = o[static_cast<std::size_t>(next) * ns + sig];
                if (!o_known[next]) {
                    known = cond;
                } else {
                    if ((cond > 0.0) != (known > 0.0)) {
                        return false; // positivity pattern differs between sources
                    }
                    if (std::abs(cond - known) > 1e-12) {
                        return false;
                    }
                }
            }
            o_known[next] = true;
        }
    }
    // States never reached under this action get a uniform observation row.
    for (int next = 0; next < n; ++next) {
        if (!o_known[next]) {
            for (int sig = 0; sig < ns; ++sig) {
                o[static_cast<std::size_t>(next) * ns + sig] = 1.0 / ns;
            }
        }
    }
    return true;
}

} // namespace

Pomdp parsePomdp(std::string const& text) { return Parser(text).run(); }

Pomdp parsePomdpFile(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parsePomdp(buffer.str());
}

std::string serializePomdp(Pomdp const& pomdp) {
    std::ostringstream out;
    auto names = [&](char const* key, std::vector<std::string> const& list) {
        out << key << ":";
        for (auto const& n : list) {
            out << " " << n;
        }
        out << "\n";
    };
    names("states", pomdp.state_names);
    names("actions", pomdp.action_names);
    names("observations", pomdp.signal_names);
    out << "start:";
    for (double p : pomdp.initial_distribution) {
        out << " " << formatProb(p);
    }
    out << "\n";
    out << "priorities:";
    for (int p : pomdp.priorities) {
        out << " " << p;
    }
    out << "\n";

    int const n = pomdp.stateCount();
    int const ns = pomdp.signalCount();
    for (int a = 0; a < pomdp.actionCount(); ++a) {
        std::vector<double> t, o;
        if (factorize(pomdp, a, t, o)) {
            out << "\nT:" << pomdp.action_names[a] << "\n";
            for (int q = 0; q < n; ++q) {
                for (int next = 0; next < n; ++next) {
                    out << (next ? " " : "") << formatProb(t[static_cast<std::size_t>(q) * n + next]);
                }
                out << "\n";
            }
            out << "\nO:" << pomdp.action_names[a] << "\n";
            for (int next = 0; next < n; ++next) {
                for (int sig = 0; sig < ns; ++sig) {
                    out << (sig ? " " : "")
                        << formatProb(o[static_cast<std::size_t>(next) * ns + sig]);
                }
                out << "\n";
            }
        } else {
            out << "\n";
            for (int q = 0; q < n; ++q) {
                for (auto const& e : pomdp.row(q, a)) {
                    out << "D: " << pomdp.action_names[a] << " : " << pomdp.state_names[q] << " : "
                        << pomdp.state_names[e.next] << " : " << pomdp.signal_names[e.signal] << " "
                        << formatProb(e.prob) << "\n";
                }
            }
        }
    }
    return out.str();
}

} // namespace reveal
