/* Compiles the public header as C and drives the library from C. */
#include <stdio.h>
#include <string.h>

#include "qdshield/qdshield.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  const char* config =
      "{\"scenario\": {\"name\": \"c\", \"initial_state\": \"bell_phi_plus\", \"nx_list\": [0, 2]},"
      " \"run\": {\"t_final\": 0.2}}";
  qds_run* run = NULL;
  double value = 0.0;
  int found = -1;

  EXPECT(strcmp(qds_version(), "1.0.0") == 0);
  EXPECT(qds_run_config_json(config, NULL, &run) == QDS_OK);
  EXPECT(run != NULL);
  EXPECT(qds_run_transition_time(run, &value, &found) == QDS_OK);
  EXPECT(found == 0);
  qds_run_free(run);

  EXPECT(qds_run_config_json("[1, 2", NULL, &run) == QDS_INVALID_ARGUMENT);
  EXPECT(strlen(qds_last_error()) > 0);

  if (failures == 0) printf("capi smoke: ok\n");
  return failures == 0 ? 0 : 1;
}
