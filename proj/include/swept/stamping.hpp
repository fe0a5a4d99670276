#pragma once
// Stamping baseline: pointwise minimum of the model's SDF posed at discrete
// times, surfaced with marching tetrahedra on the same 5-tet grid.
//
// The folded field is 1-Lipschitz, so a block of cells whose corner value
// exceeds the block diagonal in magnitude has a single sign and cannot carry
// surface. Refining only the remaining blocks gives the same triangles as
// evaluating every lattice vertex.

#include "swept/detail/flat_map.hpp"
#include "swept/detail/parallel.hpp"
#include "swept/envelope.hpp"

namespace swept {

struct StampOptions {
    bool narrow_band = true;
    unsigned threads = 1;
};

struct StampStats {
    size_t vertices_evaluated = 0;
    size_t surface_cells = 0;
};

/// `sdf` is evaluated in the model frame; `inverses` are f(t_k)^-1 per stamp.
template <typename Sdf>
SurfaceMesh stamp_surface(const TetGrid &grid, const std::vector<RigidTransform> &inverses, Sdf &&sdf,
                          const StampOptions &opt = {}, StampStats *stats = nullptr) {
    if (inverses.empty()) throw Error("stamping", "no stamp times");
    const auto dims = grid.dims();
    detail::FlatMap<double> values(1 << 16);

    auto folded = [&](uint64_t id) {
        const Vec3 x = grid.vertex_position(id);
        double best = std::numeric_limits<double>::infinity();
        for (const auto &inv : inverses) best = std::min(best, sdf(inv.apply(x)));
        return best;
    };
    // Evaluates every id not yet known, in parallel, in a deterministic layout.
    auto ensure = [&](std::vector<uint64_t> ids) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        ids.erase(std::remove_if(ids.begin(), ids.end(), [&](uint64_t id) { return values.find(id) != nullptr; }), ids.end());
        std::vector<double> out(ids.size());
        detail::parallel_chunks(ids.size(), 256, opt.threads, [&](size_t, size_t b, size_t e) {
            for (size_t i = b; i < e; ++i) out[i] = folded(ids[i]);
        });
        for (size_t i = 0; i < ids.size(); ++i) *values.try_emplace(ids[i]).first = out[i];
    };

    struct Block {
        std::array<int, 3> lo, hi; // cell index range [lo, hi)
    };
    auto corner_ids = [&](const Block &b) {
        std::array<uint64_t, 8> ids;
        for (int c = 0; c < 8; ++c)
            ids[c] = grid.vertex_id(c & 1 ? b.hi[0] : b.lo[0], c & 2 ? b.hi[1] : b.lo[1], c & 4 ? b.hi[2] : b.lo[2]);
        return ids;
    };

    std::vector<Block> level;
    int size = 1;
    if (opt.narrow_band)
        while (size * 8 <= std::max({dims[0], dims[1], dims[2]})) size *= 2;
    for (int k = 0; k < dims[2]; k += size)
        for (int j = 0; j < dims[1]; j += size)
            for (int i = 0; i < dims[0]; i += size)
                level.push_back({{i, j, k}, {std::min(i + size, dims[0]), std::min(j + size, dims[1]), std::min(k + size, dims[2])}});

    std::vector<std::array<int, 3>> cells;
    while (!level.empty()) {
        std::vector<uint64_t> need;
        need.reserve(level.size() * 8);
        for (const auto &b : level)
            for (uint64_t id : corner_ids(b)) need.push_back(id);
        ensure(std::move(need));

        std::vector<Block> next;
        for (const auto &b : level) {
            const std::array<int, 3> ext{b.hi[0] - b.lo[0], b.hi[1] - b.lo[1], b.hi[2] - b.lo[2]};
            if (ext[0] == 1 && ext[1] == 1 && ext[2] == 1) {
                cells.push_back(b.lo);
                continue;
            }
            const double diag = grid.cell_size() * std::sqrt(double(ext[0]) * ext[0] + double(ext[1]) * ext[1] + double(ext[2]) * ext[2]);
            bool uniform = false;
            for (uint64_t id : corner_ids(b)) uniform |= std::abs(*values.find(id)) > diag;
            if (uniform) continue;
            const std::array<int, 3> mid{b.lo[0] + (ext[0] + 1) / 2, b.lo[1] + (ext[1] + 1) / 2, b.lo[2] + (ext[2] + 1) / 2};
            for (int c = 0; c < 8; ++c) {
                Block child;
                bool ok = true;
                for (int a = 0; a < 3; ++a) {
                    const bool upper = (c >> a) & 1;
                    child.lo[a] = upper ? mid[a] : b.lo[a];
                    child.hi[a] = upper ? b.hi[a] : mid[a];
                    ok &= child.lo[a] < child.hi[a];
                }
                if (ok) next.push_back(child);
            }
        }
        level = std::move(next);
    }

    std::sort(cells.begin(), cells.end(), [](const auto &a, const auto &b) {
        return std::tie(a[2], a[1], a[0]) < std::tie(b[2], b[1], b[0]);
    });
    std::vector<std::array<Vec3, 3>> soup;
    size_t surfaceCells = 0;
    for (const auto &c : cells) {
        const size_t before = soup.size();
        for (int l = 0; l < 5; ++l) {
            const TetRef t{c, l};
            const auto ids = grid.tet_vertex_ids(t);
            const std::array<double, 4> d{*values.find(ids[0]), *values.find(ids[1]), *values.find(ids[2]), *values.find(ids[3])};
            for (const auto &tri : marching_tet(grid.tet_vertices(t), d)) soup.push_back(tri);
        }
        surfaceCells += soup.size() > before;
    }
    if (stats) {
        stats->vertices_evaluated = values.size();
        stats->surface_cells = surfaceCells;
    }
    return assemble_triangles(soup, grid.cell_size());
}

} // namespace swept
