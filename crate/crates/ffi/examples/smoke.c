#include <stdio.h>
#include "submax.h"

int main(void) {
    SubmaxInstance *inst = NULL;
    if (submax_instance_gen_coverage(200, 1000, 0.01, 1.0, 7, &inst) != SUBMAX_STATUS_OK) {
        fprintf(stderr, "%s\n", submax_last_error());
        return 1;
    }
    SubmaxResult *res = NULL;
    SubmaxStatus st = submax_solve(inst, SUBMAX_ALGORITHM_ADAPTIVE, 20, 0.2, false, 1, &res);
    if (st != SUBMAX_STATUS_OK) {
        fprintf(stderr, "solve failed (%d): %s\n", (int)st, submax_last_error());
        submax_instance_free(inst);
        return 1;
    }
    printf("value %.6f, %zu elements, %llu queries, %llu rounds\n", submax_result_value(res),
           submax_result_len(res), (unsigned long long)submax_result_queries(res),
           (unsigned long long)submax_result_rounds(res));
    submax_result_free(res);
    submax_instance_free(inst);
    return 0;
}
