// Library-level walk through the analysis on the rename-cycle corpus:
// distance matrix, dispersion, persistence and a 2-D embedding.

#include <cstdio>

#include "progmetric/progmetric.hpp"

int main() {
    namespace pm = progmetric;
    pm::Corpus corpus = pm::rename_cycle_fixture();
    auto result = pm::compute_matrix(corpus, {.workers = 2});
    const auto& d = result.matrix;
    std::printf("%zu programs, %zu pairs\n", d.size(), result.pairs_computed);

    auto disp = pm::dispersion(d);
    std::printf("medoid program %d (%s), avg dispersion %.2f, median %.2f\n", disp.medoid_program_id,
                pm::rename_cycle_states()[disp.medoid].c_str(), disp.avg_dispersion, disp.median_dispersion);

    for (const auto& p : pm::vr_persistence(d))
        if (p.dim == 1) std::printf("H1 class born %.0f, dies %s\n", p.birth, pm::format_real(p.death).c_str());

    auto e = pm::mds_embed(d, {.seed = 1});
    std::printf("SMACOF: raw stress %.3f, %d iterations\n", e.raw_stress, e.iterations);
    for (std::size_t i = 0; i < d.size(); ++i)
        std::printf("  %s  % .3f % .3f\n", pm::rename_cycle_states()[i].c_str(), e.points[i][0], e.points[i][1]);
    return 0;
}
