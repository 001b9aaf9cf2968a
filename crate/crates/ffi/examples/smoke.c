#include <stdio.h>
#include <string.h>
#include "hochops.h"

int main(void) {
    HochopsMorphism *m = NULL;
    if (hochops_op("sh", 2, 3, "q", &m) != HOCHOPS_STATUS_OK) {
        fprintf(stderr, "%s\n", hochops_last_error());
        return 1;
    }
    size_t terms = 0;
    hochops_morphism_shape(m, &terms, NULL, NULL);
    hochops_morphism_free(m);
    m = NULL;

    if (hochops_op("nope", 1, 1, NULL, &m) != HOCHOPS_STATUS_INVALID_ARGUMENT || m != NULL) {
        return 2;
    }

    HochopsReport *r = NULL;
    if (hochops_verify("prop23", "{\"max_n\": 4}", &r) != HOCHOPS_STATUS_OK) {
        fprintf(stderr, "%s\n", hochops_last_error());
        return 3;
    }
    bool passed = false;
    hochops_report_summary(r, &passed, NULL);
    char *json = NULL;
    hochops_report_to_json(r, &json);
    int has_suite = strstr(json, "\"suite\":\"prop23\"") != NULL;
    hochops_string_free(json);
    hochops_report_free(r);

    printf("terms=%zu passed=%d suite=%d\n", terms, passed, has_suite);
    return 0;
}
