#include <stdio.h>
#include "structlight.h"

int main(void) {
    SlBeam *beam = NULL;
    if (sl_beam_lg(1, 0, 1, 0.729e-6, 1e-6, &beam) != SL_STATUS_OK) {
        return 1;
    }
    SlTransition t = {1, 1, 5, 5, SL_MULTIPOLE_E2_DELTA_J2};
    SlComplex mu;
    SlStatus status = sl_strength(beam, 0.0, 0.0, 0.0, &t, NULL, &mu);
    sl_beam_free(beam);
    if (status != SL_STATUS_OK) {
        char msg[256];
        sl_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s\n", msg);
        return 2;
    }
    printf("%.17g %.17g\n", mu.re, mu.im);

    double cg = 0.0;
    sl_clebsch_gordan(2, 0, 2, 0, 0, 0, &cg);
    printf("%.17g\n", cg);
    return 0;
}
