/* Compiled as C: the public header must stay valid C. */
#include <math.h>
#include <stdio.h>

#include "fcmcrlb/fcm_crlb.h"

int main(void) {
  double v = 0.0;
  fcm_config* cfg = NULL;
  fcm_result* res = NULL;
  if (fcm_bessel_j0(0.0, &v) != FCM_OK || v != 1.0) return 1;
  if (fcm_config_parse("{\"n_tones_list\": [8], \"fdts_list\": [0.1]}", "eig-fit", &cfg) != FCM_OK) {
    fprintf(stderr, "%s\n", fcm_last_error());
    return 1;
  }
  if (fcm_run(cfg, &res) != FCM_OK || fcm_result_rows(res) != 1) return 1;
  fcm_result_free(res);
  fcm_config_free(cfg);
  return 0;
}
