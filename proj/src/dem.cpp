#include "libra/dem.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace libra {

namespace {

struct Token {
    std::string text;
    size_t column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace((unsigned char)line[i])) {
            i++;
            continue;
        }
        size_t start = i;
        while (i < line.size() && !std::isspace((unsigned char)line[i]))
            i++;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

uint64_t parse_uint(const std::string& s, size_t line_no, size_t col) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("expected unsigned integer, got '" + s + "'", line_no, col);
    return v;
}

struct Target {
    bool is_detector;
    uint64_t index;
};

Target parse_target(const Token& tok, size_t line_no) {
    if (tok.text.size() < 2 || (tok.text[0] != 'D' && tok.text[0] != 'L'))
        throw ParseError("expected target 'D<n>' or 'L<n>', got '" + tok.text + "'", line_no, tok.column);
    return {tok.text[0] == 'D', parse_uint(tok.text.substr(1), line_no, tok.column + 1)};
}

}  // namespace

ErrorModel parse_model(const std::string& text) {
    size_t declared_detectors = 0;
    size_t declared_observables = 0;
    size_t max_detector = 0;
    bool any_detector = false;
    size_t max_observable = 0;
    bool any_observable = false;
    std::vector<Hyperedge> edges;
    std::vector<std::pair<std::vector<uint32_t>, size_t>> logical_lines;  // members, line_no

    std::istringstream in(text);
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        line_no++;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        // '#' starts a comment except for the '#logical' directive.
        std::string line = raw;
        size_t hash = raw.find('#');
        bool is_logical = false;
        if (hash != std::string::npos) {
            if (raw.compare(hash, 8, "#logical") == 0 &&
                (hash + 8 == raw.size() || std::isspace((unsigned char)raw[hash + 8]))) {
                is_logical = true;
                line = raw.substr(hash + 8);
            } else {
                line = raw.substr(0, hash);
            }
        }
        auto tokens = tokenize(line);
        if (is_logical) {
            std::vector<uint32_t> members;
            if (tokens.empty())
                throw ParseError("#logical requires at least one edge index", line_no, hash + 1);
            for (const auto& t : tokens)
                members.push_back((uint32_t)parse_uint(t.text, line_no, t.column));
            logical_lines.emplace_back(std::move(members), line_no);
            continue;
        }
        if (tokens.empty())
            continue;

        const std::string& head = tokens[0].text;
        if (head == "detector" || head == "logical_observable") {
            if (tokens.size() != 2)
                throw ParseError("'" + head + "' takes exactly one target", line_no, tokens[0].column);
            Target t = parse_target(tokens[1], line_no);
            if (head == "detector") {
                if (!t.is_detector)
                    throw ParseError("'detector' requires a D target", line_no, tokens[1].column);
                declared_detectors = std::max(declared_detectors, (size_t)t.index + 1);
            } else {
                if (t.is_detector)
                    throw ParseError("'logical_observable' requires an L target", line_no, tokens[1].column);
                declared_observables = std::max(declared_observables, (size_t)t.index + 1);
            }
            continue;
        }

        if (head.rfind("error(", 0) == 0 && head.size() > 7 && head.back() == ')') {
            std::string num = head.substr(6, head.size() - 7);
            double p = 0;
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
            if (ec != std::errc{} || ptr != num.data() + num.size())
                throw ParseError("bad probability '" + num + "'", line_no, tokens[0].column + 6);
            if (!(p > 0.0) || !(p < 0.5))
                throw ParseError("probability must be in (0, 0.5), got " + num, line_no, tokens[0].column + 6);

            // '^'-separated target groups become decomposition components.
            std::vector<EdgeComponent> components;
            EdgeComponent current;
            bool saw_separator = false;
            bool group_open = false;
            for (size_t k = 1; k < tokens.size(); k++) {
                if (tokens[k].text == "^") {
                    if (!group_open)
                        throw ParseError("'^' must separate non-empty target groups", line_no, tokens[k].column);
                    components.push_back(std::move(current));
                    current = EdgeComponent{};
                    saw_separator = true;
                    group_open = false;
                    continue;
                }
                Target t = parse_target(tokens[k], line_no);
                if (t.is_detector) {
                    if (std::find(current.detectors.begin(), current.detectors.end(), (uint32_t)t.index) !=
                        current.detectors.end())
                        throw ParseError("duplicate detector D" + std::to_string(t.index) + " in target group",
                                         line_no, tokens[k].column);
                    current.detectors.push_back((uint32_t)t.index);
                    max_detector = std::max(max_detector, (size_t)t.index);
                    any_detector = true;
                } else {
                    if (t.index >= kMaxObservables)
                        throw ParseError("observable index too large (max 63)", line_no, tokens[k].column);
                    current.observables ^= ObsMask{1} << t.index;
                    max_observable = std::max(max_observable, (size_t)t.index);
                    any_observable = true;
                }
                group_open = true;
            }
            if (!group_open)
                throw ParseError("error line requires at least one target", line_no, tokens[0].column);
            components.push_back(std::move(current));

            Hyperedge e;
            e.probability = p;
            BitVec det_xor(max_detector + 1);
            for (auto& comp : components) {
                std::sort(comp.detectors.begin(), comp.detectors.end());
                if (saw_separator && comp.detectors.size() > 2)
                    throw ParseError("decomposition component has more than 2 detectors", line_no,
                                     tokens[0].column);
                for (uint32_t d : comp.detectors)
                    det_xor.flip(d);
                e.observables ^= comp.observables;
            }
            e.detectors = det_xor.indices();
            if (saw_separator)
                e.decomposition = std::move(components);
            edges.push_back(std::move(e));
            continue;
        }

        throw ParseError("unrecognized line start '" + head + "'", line_no, tokens[0].column);
    }

    size_t num_detectors = std::max(declared_detectors, any_detector ? max_detector + 1 : 0);
    size_t num_observables = std::max(declared_observables, any_observable ? max_observable + 1 : 0);

    std::vector<std::vector<uint32_t>> reps;
    for (auto& [members, lno] : logical_lines) {
        for (uint32_t m : members)
            if (m >= edges.size())
                throw ParseError("#logical references unknown edge index " + std::to_string(m), lno, 1);
        reps.push_back(std::move(members));
    }

    try {
        return ErrorModel(num_detectors, num_observables, std::move(edges), std::move(reps));
    } catch (const Error& err) {
        throw ParseError(err.what(), line_no, 1);
    }
}

ErrorModel parse_model_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open model file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_model(ss.str());
}

namespace {

// Shortest decimal that round-trips to the same double.
std::string format_probability(double p) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p);
    (void)ec;
    return std::string(buf, ptr);
}

void append_targets(std::string& out, const std::vector<uint32_t>& detectors, ObsMask obs) {
    for (uint32_t d : detectors)
        out += " D" + std::to_string(d);
    for (int b = 0; b < kMaxObservables; b++)
        if (obs & (ObsMask{1} << b))
            out += " L" + std::to_string(b);
}

}  // namespace

std::string serialize_model(const ErrorModel& model) {
    std::string out;
    if (model.num_detectors() > 0)
        out += "detector D" + std::to_string(model.num_detectors() - 1) + "\n";
    if (model.num_observables() > 0)
        out += "logical_observable L" + std::to_string(model.num_observables() - 1) + "\n";
    for (const auto& e : model.edges()) {
        out += "error(" + format_probability(e.probability) + ")";
        if (e.decomposition.empty()) {
            append_targets(out, e.detectors, e.observables);
        } else {
            for (size_t k = 0; k < e.decomposition.size(); k++) {
                if (k)
                    out += " ^";
                append_targets(out, e.decomposition[k].detectors, e.decomposition[k].observables);
            }
        }
        out += "\n";
    }
    for (const auto& rep : model.logical_representatives()) {
        out += "#logical";
        rep.for_each_set([&](size_t e) { out += " " + std::to_string(e); });
        out += "\n";
    }
    return out;
}

void write_model_file(const ErrorModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open output file: " + path);
    f << serialize_model(model);
}

}  // namespace libra
