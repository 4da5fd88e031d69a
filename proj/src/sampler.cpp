#include "libra/sampler.hpp"

#include <charconv>
#include <sstream>

#include "libra/rng.hpp"

namespace libra {

ShotRecord sample_shot(const ErrorModel& model, uint64_t seed, uint64_t shot_index, bool keep_config) {
    Rng rng(seed, shot_index);
    ShotRecord shot;
    shot.shot_index = shot_index;
    shot.syndrome = model.empty_syndrome();
    ErrorConfig config = model.empty_config();
    for (size_t e = 0; e < model.num_edges(); e++) {
        if (rng.bernoulli(model.edge(e).probability)) {
            config.flip(e);
            shot.syndrome ^= model.edge_detectors(e);
            shot.true_observables ^= model.edge(e).observables;
        }
    }
    if (keep_config)
        shot.true_config = std::move(config);
    return shot;
}

std::string format_shot(const ShotRecord& shot) {
    std::string out = "S:";
    shot.syndrome.for_each_set([&](size_t d) { out += " " + std::to_string(d); });
    out += " | O: ";
    char buf[20];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), shot.true_observables, 16);
    (void)ec;
    out.append(buf, ptr);
    return out;
}

ShotRecord parse_shot(const std::string& line, const ErrorModel& model, uint64_t shot_index) {
    ShotRecord shot;
    shot.shot_index = shot_index;
    shot.syndrome = model.empty_syndrome();
    std::istringstream in(line);
    std::string tok;
    if (!(in >> tok) || tok != "S:")
        throw Error("bad shot line: expected 'S:'");
    bool seen_bar = false;
    while (in >> tok) {
        if (tok == "|") {
            seen_bar = true;
            break;
        }
        size_t d = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || d >= model.num_detectors())
            throw Error("bad shot line: invalid detector index '" + tok + "'");
        shot.syndrome.set(d);
    }
    if (!seen_bar || !(in >> tok) || tok != "O:" || !(in >> tok))
        throw Error("bad shot line: expected '| O: <hex>'");
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), shot.true_observables, 16);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw Error("bad shot line: invalid observable mask '" + tok + "'");
    return shot;
}

}  // namespace libra
