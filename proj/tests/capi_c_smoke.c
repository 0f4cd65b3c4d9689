/* Compiled as C99: proves the public header is consumable from plain C. */

#include <rainsd.h>

#include <stdio.h>
#include <string.h>

int main(void) {
  if (strlen(rainsd_version()) == 0) {
    fprintf(stderr, "empty version\n");
    return 1;
  }

  rainsd_image* img = NULL;
  if (rainsd_image_create(4, 3, NULL, &img) != RAINSD_OK) {
    fprintf(stderr, "create: %s\n", rainsd_last_error());
    return 1;
  }
  if (rainsd_image_width(img) != 4 || rainsd_image_height(img) != 3) {
    fprintf(stderr, "bad dimensions\n");
    return 1;
  }

  rainsd_config* cfg = NULL;
  if (rainsd_config_load(NULL, &cfg) != RAINSD_OK) {
    fprintf(stderr, "config: %s\n", rainsd_last_error());
    return 1;
  }
  rainsd_image* rained = NULL;
  if (rainsd_rain_apply(cfg, img, 900.0, 7, &rained) != RAINSD_OK) {
    fprintf(stderr, "rain: %s\n", rainsd_last_error());
    return 1;
  }

  /* error path: NULL argument must come back as a status, not a crash */
  if (rainsd_image_load(NULL, &img) != RAINSD_ERR_INVALID_ARGUMENT) {
    fprintf(stderr, "expected invalid-argument status\n");
    return 1;
  }

  rainsd_image_free(rained);
  rainsd_image_free(img);
  rainsd_config_free(cfg);
  printf("c api smoke ok\n");
  return 0;
}
