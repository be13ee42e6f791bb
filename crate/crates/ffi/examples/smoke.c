#include <stdio.h>
#include "gelfand_orbit.h"

int main(void) {
    GorbPair *pair = NULL;
    if (gorb_pair_builtin("u2su2", &pair) != GORB_STATUS_OK) {
        fprintf(stderr, "%s\n", gorb_last_error());
        return 1;
    }
    uint32_t m[3] = {0, 0, 1};
    char *text = NULL;
    double re = 0.0, im = 0.0;
    if (gorb_eigenvalue_type1(pair, 2, 1, 1, m, 3, &re, &im, &text) != GORB_STATUS_OK) {
        fprintf(stderr, "%s\n", gorb_last_error());
        gorb_pair_free(pair);
        return 1;
    }
    printf("%s\n", text);
    gorb_string_free(text);

    GorbPair *missing = NULL;
    GorbStatus status = gorb_pair_builtin("nope", &missing);
    printf("%d %s\n", (int)status, missing == NULL ? "null" : "set");
    gorb_pair_free(pair);
    return 0;
}
