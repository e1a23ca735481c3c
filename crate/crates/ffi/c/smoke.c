/* Builds a Bell pair, swaps two of them and runs a bundled-style scenario. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "catswap.h"

#define CHECK(call)                                                       \
    do {                                                                  \
        CsStatus s_ = (call);                                             \
        if (s_ != CS_STATUS_OK) {                                         \
            fprintf(stderr, "%s failed (%d): %s\n", #call, s_, cs_last_error()); \
            return 1;                                                     \
        }                                                                 \
    } while (0)

int main(void) {
    CsState *pair = NULL, *bell = NULL, *zero = NULL;
    CHECK(cs_state_new_basis(2, "00", &zero));
    CHECK(cs_state_apply_h(zero, 0));
    CHECK(cs_state_apply_cnot(zero, 0, 1));
    CHECK(cs_state_new_cat("00", 1, &bell));

    double re[4], im[4];
    CHECK(cs_state_amplitudes(zero, re, im, 4));
    if (fabs(re[0] - M_SQRT1_2) > 1e-12 || fabs(re[3] - M_SQRT1_2) > 1e-12) {
        fprintf(stderr, "unexpected amplitudes\n");
        return 1;
    }

    /* two Bell pairs, project qubits 1 and 2 onto Phi+ */
    CsState *four = NULL;
    CHECK(cs_state_new_basis(4, "0000", &four));
    CHECK(cs_state_apply_h(four, 0));
    CHECK(cs_state_apply_cnot(four, 0, 1));
    CHECK(cs_state_apply_h(four, 2));
    CHECK(cs_state_apply_cnot(four, 2, 3));
    size_t subset[2] = {1, 2};
    double p = 0.0;
    CHECK(cs_state_project(four, subset, 2, bell, &p, &pair));
    int found = 0, sign = 0;
    char pattern[8];
    CHECK(cs_state_identify_cat(pair, &found, pattern, sizeof pattern, &sign));
    if (fabs(p - 0.25) > 1e-12 || !found || strcmp(pattern, "00") != 0 || sign != 1) {
        fprintf(stderr, "swap gave p=%f found=%d pattern=%s sign=%d\n", p, found, pattern, sign);
        return 1;
    }

    if (cs_state_apply_cnot(four, 1, 1) != CS_STATUS_INVALID_ARGUMENT || strlen(cs_last_error()) == 0) {
        fprintf(stderr, "expected an error for CNOT(1, 1)\n");
        return 1;
    }

    const char *config =
        "name = \"c\"\n[scenario]\nkind = \"grow\"\nn = 3\n";
    char *report = NULL;
    int passed = 0;
    CHECK(cs_run_scenario(config, 1, &report, &passed));
    if (!passed || strstr(report, "PASS") == NULL) {
        fprintf(stderr, "scenario failed:\n%s\n", report);
        return 1;
    }
    cs_string_free(report);

    cs_state_free(pair);
    cs_state_free(bell);
    cs_state_free(zero);
    cs_state_free(four);
    printf("catswap %s ok\n", cs_version());
    return 0;
}
