#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hopcap.h"

#define CHECK(expr)                                                     \
    do {                                                                \
        if (!(expr)) {                                                  \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #expr);  \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    HopcapTrace *trace = NULL;
    CHECK(hopcap_simulate(HOPCAP_MODE_NETWORK_CODED, 5, 4, 15, &trace) == HOPCAP_STATUS_OK);
    uint64_t latency = 0;
    CHECK(hopcap_trace_latency(trace, HOPCAP_FLOW_REVERSE, &latency) == HOPCAP_STATUS_OK);
    CHECK(latency == 10);
    uint64_t num = 0, den = 0;
    CHECK(hopcap_trace_delivery_rate(trace, &num, &den) == HOPCAP_STATUS_OK);
    CHECK(num == 1 && den == 2);

    size_t len = 0;
    CHECK(hopcap_trace_render(trace, NULL, 0, &len) == HOPCAP_STATUS_BUFFER_TOO_SMALL);
    char *table = malloc(len);
    CHECK(hopcap_trace_render(trace, table, len, &len) == HOPCAP_STATUS_OK);
    CHECK(strstr(table, "4:F0^R0") != NULL);
    free(table);
    hopcap_trace_free(trace);

    HopcapScenario *s = NULL;
    CHECK(hopcap_scenario_new(&s) == HOPCAP_STATUS_OK);
    CHECK(hopcap_scenario_set(s, "mode", "tr") == HOPCAP_STATUS_OK);
    CHECK(hopcap_scenario_set(s, "hops", "3") == HOPCAP_STATUS_OK);
    size_t zs[] = {2, 3, 4, 5};
    size_t best = 0;
    double cap = 0;
    CHECK(hopcap_scenario_optimum_z(s, zs, 4, &best, &cap) == HOPCAP_STATUS_OK);
    CHECK(best == 3 && cap > 0);

    CHECK(hopcap_scenario_set(s, "z", "1") == HOPCAP_STATUS_OK);
    HopcapCapacity c;
    CHECK(hopcap_scenario_capacity(s, 0, &c) == HOPCAP_STATUS_INVALID_ARGUMENT);
    char msg[256];
    CHECK(hopcap_last_error_message(msg, sizeof msg, &len) == HOPCAP_STATUS_OK);
    CHECK(len > 1);
    hopcap_scenario_free(s);

    printf("c smoke ok\n");
    return 0;
}
