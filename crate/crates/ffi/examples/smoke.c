#include <stdio.h>
#include <string.h>

#include "consensus_hpo.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        ChpoStatus s_ = (call);                                            \
        if (s_ != CHPO_STATUS_OK) {                                        \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,        \
                    chpo_last_error());                                    \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    double points[12 * 2];
    for (int i = 0; i < 12; i++) {
        points[2 * i] = (i < 6 ? 0.0 : 10.0) + 0.01 * i;
        points[2 * i + 1] = 0.0;
    }
    ChpoDataset *ds = NULL;
    CHECK(chpo_dataset_new(points, 12, 2, &ds));

    ChpoGrid *grid = NULL;
    CHECK(chpo_grid_from_json(
        "[{\"algorithm\": \"kmeans\", \"k\": [2, 3], \"seed\": 1},"
        " {\"algorithm\": \"dbscan\", \"eps\": [0.5, 20], \"min_points\": 2}]",
        &grid));

    ChpoEnsemble *ens = NULL;
    CHECK(chpo_ensemble_build(ds, grid, &ens));

    ChpoSelection *sel = NULL;
    CHECK(chpo_select_best_match(ens, 2, CHPO_LINKAGE_AVERAGE, &sel));
    double score = 0.0;
    char *name = NULL;
    CHECK(chpo_selection_score(sel, &score));
    CHECK(chpo_selection_config(sel, &name));
    printf("%s %.6f\n", name, score);

    ChpoLabeling *bad = NULL;
    if (chpo_labeling_new(NULL, 3, &bad) != CHPO_STATUS_NULL_POINTER) {
        return 2;
    }

    chpo_string_free(name);
    chpo_selection_free(sel);
    chpo_ensemble_free(ens);
    chpo_grid_free(grid);
    chpo_dataset_free(ds);
    return score == 1.0 ? 0 : 3;
}
