#include <stdio.h>
#include <stdlib.h>
#include "lais.h"

#define CHECK(call)                                              \
    do {                                                         \
        LaisStatus st_ = (call);                                 \
        if (st_ != LAIS_STATUS_OK) {                             \
            char msg_[256];                                      \
            lais_last_error_message(msg_, sizeof msg_);          \
            fprintf(stderr, "%s failed: %d %s\n", #call, st_, msg_); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    LaisPotential *p = NULL;
    LaisSchedule *s = NULL;
    LaisMeasure *m = NULL;
    CHECK(lais_potential_new("double_well_1d", 0.0, &p));
    CHECK(lais_schedule_new(0.3, 1.0, 1.0, &s));
    CHECK(lais_ais_run(p, s, 0.05, 64, 1.0, 1, 7, &m));
    size_t n = lais_measure_len(m);
    double *w = malloc(n * sizeof *w);
    CHECK(lais_measure_weights(m, w, n));
    double total = 0.0;
    for (size_t i = 0; i < n; i++) total += w[i];
    double e = 0.0;
    CHECK(lais_measure_ess(m, &e));
    printf("n=%zu sum=%.15f ess=%.3f\n", n, total, e);
    if (lais_schedule_new(2.0, 1.0, 1.0, &s) != LAIS_STATUS_INVALID_ARGUMENT) return 2;
    free(w);
    lais_measure_free(m);
    lais_schedule_free(s);
    lais_potential_free(p);
    return total > 1.0 - 1e-12 && total < 1.0 + 1e-12 ? 0 : 3;
}
