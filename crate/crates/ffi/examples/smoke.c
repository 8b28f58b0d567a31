/* cc smoke.c -I../include -L../../../target/release -lelocast_ffi -o smoke */
#include <stdio.h>
#include "elocast.h"

int main(int argc, char **argv) {
    const char *data = argc > 1 ? argv[1] : "data/matches";
    ElocastInputs *inputs = NULL;
    ElocastCoefficients *coeffs = NULL;
    ElocastDistribution *dist = NULL;
    ElocastSimConfig cfg = elocast_sim_config_default();
    cfg.replications = 10000;

    if (elocast_inputs_from_preset(2018, data, NULL, &inputs) != ELOCAST_STATUS_OK ||
        elocast_fit(inputs, ELOCAST_FAMILY_NESTED, &coeffs) != ELOCAST_STATUS_OK ||
        elocast_simulate(inputs, coeffs, ELOCAST_FAMILY_NESTED, &cfg, &dist) != ELOCAST_STATUS_OK) {
        fprintf(stderr, "error: %s\n", elocast_last_error());
        elocast_coefficients_free(coeffs);
        elocast_inputs_free(inputs);
        return 1;
    }
    for (size_t i = 0; i < elocast_distribution_team_count(dist); i++) {
        double p[6];
        elocast_distribution_probs(dist, i, p);
        printf("%-24s %.4f\n", elocast_distribution_team_name(dist, i), p[0]);
    }
    elocast_distribution_free(dist);
    elocast_coefficients_free(coeffs);
    elocast_inputs_free(inputs);
    return 0;
}
