#include "nli_ffi.h"

int main(void) {
    NliScenario *s = NULL;
    NliReport *r = NULL;
    NliChannelResult rec;
    char *json = NULL;
    double phi = 0.0;
    if (nli_generate_scenario_json(NULL, 0, &json) != NLI_STATUS_OK) return 1;
    if (nli_scenario_from_json(json, &s) != NLI_STATUS_OK) return 2;
    if (nli_estimate(s, NLI_MODE_EGN, -1, &r) != NLI_STATUS_OK) return 3;
    for (size_t i = 0; i < nli_report_len(r); i++) {
        if (nli_report_get(r, i, &rec) != NLI_STATUS_OK) return 4;
    }
    if (nli_phi_constant("PM-QPSK", &phi) != NLI_STATUS_OK || phi != 1.0) return 5;
    if (nli_scenario_from_json("{", &s) == NLI_STATUS_OK || nli_last_error_message() == NULL) return 6;
    (void)nli_scenario_span_count(s);
    nli_report_free(r);
    nli_scenario_free(s);
    nli_string_free(json);
    return 0;
}
