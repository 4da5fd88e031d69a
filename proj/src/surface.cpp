#include "libra/surface.hpp"

#include <algorithm>
#include <map>

namespace libra {

namespace {

struct Lattice {
    int d;
    // Check positions as plaquette coordinates (r, c), r/c in [-1, d-1].
    std::vector<std::pair<int, int>> z_checks;
    std::vector<std::pair<int, int>> x_checks;
    // Per data qubit (row-major), indices into z_checks / x_checks.
    std::vector<std::vector<uint32_t>> z_adj;
    std::vector<std::vector<uint32_t>> x_adj;
};

// Rotated layout: bulk plaquettes checkerboarded X/Z; X boundary checks on
// the top/bottom rows, Z on the left/right columns.  Logical Z runs along
// data row 0, so X chains terminating on top/bottom cross it an odd number
// of times.
Lattice build_lattice(int d) {
    Lattice lat;
    lat.d = d;
    std::map<std::pair<int, int>, uint32_t> z_index, x_index;
    for (int r = -1; r <= d - 1; r++) {
        for (int c = -1; c <= d - 1; c++) {
            int covered = 0;
            for (int dr = 0; dr <= 1; dr++)
                for (int dc = 0; dc <= 1; dc++)
                    if (r + dr >= 0 && r + dr < d && c + dc >= 0 && c + dc < d)
                        covered++;
            if (covered < 2)
                continue;
            bool is_x = ((r + c) % 2 + 2) % 2 == 0;
            bool bulk = covered == 4;
            bool top_bottom = r == -1 || r == d - 1;
            bool left_right = c == -1 || c == d - 1;
            if (!bulk) {
                if (is_x && !top_bottom)
                    continue;
                if (!is_x && !left_right)
                    continue;
            }
            if (is_x) {
                x_index[{r, c}] = (uint32_t)lat.x_checks.size();
                lat.x_checks.push_back({r, c});
            } else {
                z_index[{r, c}] = (uint32_t)lat.z_checks.size();
                lat.z_checks.push_back({r, c});
            }
        }
    }
    lat.z_adj.resize((size_t)d * d);
    lat.x_adj.resize((size_t)d * d);
    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            size_t q = (size_t)i * d + j;
            for (int dr = -1; dr <= 0; dr++) {
                for (int dc = -1; dc <= 0; dc++) {
                    auto key = std::make_pair(i + dr, j + dc);
                    if (auto it = z_index.find(key); it != z_index.end())
                        lat.z_adj[q].push_back(it->second);
                    if (auto it = x_index.find(key); it != x_index.end())
                        lat.x_adj[q].push_back(it->second);
                }
            }
        }
    }
    return lat;
}

}  // namespace

ErrorModel generate_surface_model(const SurfaceParams& params) {
    int d = params.distance;
    int r = params.rounds;
    if (d < 3 || d % 2 == 0)
        throw ConfigError("distance must be odd and >= 3");
    if (r < 1)
        throw ConfigError("rounds must be >= 1");
    for (double p : {params.p_x, params.p_z, params.p_y, params.p_m})
        if (!(p > 0.0) || !(p < 0.5))
            throw InvalidProbabilityError("surface-model probabilities must be in (0, 0.5)");

    Lattice lat = build_lattice(d);
    size_t n_z = lat.z_checks.size();
    size_t n_x = lat.x_checks.size();
    // Z-check detectors: layers 0..r (init comparison, r-1 consecutive
    // comparisons, data-readout comparison).  X-check detectors: layers
    // 1..r-1 (consecutive comparisons only).
    size_t x_offset = (r + 1) * n_z;
    size_t num_detectors = x_offset + (size_t)std::max(r - 1, 0) * n_x;
    auto z_det = [&](uint32_t check, int layer) { return (uint32_t)((size_t)layer * n_z + check); };
    auto x_det = [&](uint32_t check, int layer) {
        return (uint32_t)(x_offset + (size_t)(layer - 1) * n_x + check);
    };

    std::vector<Hyperedge> edges;
    // X-mechanism edge id per (qubit, window), for logical representatives.
    std::vector<std::vector<uint32_t>> x_mech_id((size_t)r + 1, std::vector<uint32_t>((size_t)d * d));

    auto sorted = [](std::vector<uint32_t> v) {
        std::sort(v.begin(), v.end());
        return v;
    };

    for (int t = 1; t <= r; t++) {
        for (int i = 0; i < d; i++) {
            for (int j = 0; j < d; j++) {
                size_t q = (size_t)i * d + j;
                ObsMask obs = i == 0 ? 1 : 0;

                std::vector<uint32_t> x_part;
                for (uint32_t s : lat.z_adj[q])
                    x_part.push_back(z_det(s, t - 1));
                x_part = sorted(std::move(x_part));

                std::vector<uint32_t> z_part;
                if (t >= 2)
                    for (uint32_t s : lat.x_adj[q])
                        z_part.push_back(x_det(s, t - 1));
                z_part = sorted(std::move(z_part));

                Hyperedge ex;
                ex.detectors = x_part;
                ex.probability = params.p_x;
                ex.observables = obs;
                x_mech_id[t][q] = (uint32_t)edges.size();
                edges.push_back(ex);

                if (!z_part.empty()) {
                    Hyperedge ez;
                    ez.detectors = z_part;
                    ez.probability = params.p_z;
                    edges.push_back(ez);
                }

                Hyperedge ey;
                std::vector<uint32_t> both = x_part;
                both.insert(both.end(), z_part.begin(), z_part.end());
                ey.detectors = sorted(std::move(both));
                ey.probability = params.p_y;
                ey.observables = obs;
                if (!z_part.empty())
                    ey.decomposition = {{x_part, obs}, {z_part, 0}};
                edges.push_back(ey);
            }
        }
        for (uint32_t s = 0; s < n_z; s++) {
            Hyperedge em;
            em.detectors = {z_det(s, t - 1), z_det(s, t)};
            std::sort(em.detectors.begin(), em.detectors.end());
            em.probability = params.p_m;
            edges.push_back(em);
        }
        for (uint32_t s = 0; s < n_x; s++) {
            std::vector<uint32_t> dets;
            if (t - 1 >= 1)
                dets.push_back(x_det(s, t - 1));
            if (t <= r - 1)
                dets.push_back(x_det(s, t));
            if (dets.empty())
                continue;
            Hyperedge em;
            em.detectors = sorted(std::move(dets));
            em.probability = params.p_m;
            edges.push_back(em);
        }
    }

    // One vertical chain of final-window X mechanisms per column; each
    // crosses row 0 once, so it is a null-syndrome logical representative.
    std::vector<std::vector<uint32_t>> reps;
    for (int j = 0; j < d; j++) {
        std::vector<uint32_t> members;
        for (int i = 0; i < d; i++)
            members.push_back(x_mech_id[r][(size_t)i * d + j]);
        reps.push_back(std::move(members));
    }

    ErrorModel model(num_detectors, 1, std::move(edges), std::move(reps));
    // The ErrorModel constructor has already asserted that every
    // representative has null syndrome and nonzero observable mask.
    return model;
}

}  // namespace libra
