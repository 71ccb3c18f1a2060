#include <stdio.h>
#include <string.h>

#include "glyphforge.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      const char *err = gf_last_error();                               \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,           \
              err ? err : "no error");                                 \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(int argc, char **argv) {
  if (argc < 2) return 2;
  GfKnowledgeBase *kb = NULL;
  CHECK(gf_kb_new(3, 2, &kb) == GF_STATUS_OK);

  const uint8_t s[6] = {1, 0, 1, 0, 1, 0};
  uint32_t count = 0;
  CHECK(gf_kb_teach(kb, "S", s, 6, &count) == GF_STATUS_OK && count == 1);
  CHECK(gf_kb_teach(kb, "bad label", s, 6, NULL) == GF_STATUS_INVALID_LABEL);
  CHECK(gf_kb_teach(kb, "S", s, 5, NULL) == GF_STATUS_DIMS_MISMATCH);

  GfDecision d;
  char *best = NULL;
  CHECK(gf_kb_classify(kb, s, 6, 1, 2, &d, &best) == GF_STATUS_OK);
  CHECK(d.kind == GF_DECISION_KIND_MATCH && d.q_num == 1 && d.q_den == 1);
  CHECK(best != NULL && strcmp(best, "S") == 0);
  gf_string_free(best);

  CHECK(gf_kb_save(kb, argv[1]) == GF_STATUS_OK);
  gf_kb_free(kb);

  GfKnowledgeBase *loaded = NULL;
  CHECK(gf_kb_load(argv[1], &loaded) == GF_STATUS_OK);
  int32_t w[6];
  CHECK(gf_kb_weights(loaded, "S", w, 6, &count) == GF_STATUS_OK && count == 1);
  CHECK(w[0] == 1 && w[1] == -1);
  gf_kb_free(loaded);
  printf("ok\n");
  return 0;
}
