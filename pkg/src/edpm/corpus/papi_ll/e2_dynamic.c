/* E2 with hand-written PAPI low-level instrumentation (dynamic sets). */
#include <papi.h>
#include <stdio.h>

#define ELEMS 4096

static double data[ELEMS];
static double work[ELEMS];

static double phase_one(void)
{
    double total = 0.0;
    int i;

    /* seed */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)i * 0.5;
    /* scale */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] * 1.25;
    /* mix */
    for (i = 1; i < ELEMS; i++)
        work[i] += work[i - 1] * 0.25;
    /* reduce */
    for (i = 0; i < ELEMS; i++)
        total += work[i];
    return total / ELEMS;
}

static double phase_two(void)
{
    double total = 0.0;
    int i;

    /* difference */
    for (i = 1; i < ELEMS; i++)
        work[i] = data[i] - data[i - 1];
    /* square */
    for (i = 0; i < ELEMS; i++)
        work[i] *= work[i];
    /* clamp */
    for (i = 0; i < ELEMS; i++)
        if (work[i] > 1.0)
            work[i] = 1.0;
    /* reduce */
    for (i = 0; i < ELEMS; i++)
        total += work[i];
    return total / ELEMS;
}

static double phase_three(void)
{
    double total = 0.0;
    int i;

    /* shift */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] + 1.0;
    /* divide */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / work[i];
    /* alternate */
    for (i = 0; i < ELEMS; i++)
        total += (i % 2 == 0) ? work[i] : -work[i];
    /* settle */
    for (i = 0; i < ELEMS; i++)
        data[i] = work[i];
    return total;
}

static int ev_seed_block = PAPI_NULL;
static long long val_seed_block[2];
static int ev_pipeline_block = PAPI_NULL;
static long long val_pipeline_block[1];
static int ev_rescale_block = PAPI_NULL;
static long long val_rescale_block[2];
static int ev_fold_block = PAPI_NULL;
static long long val_fold_block[1];

int main(void)
{
    double total = 0.0;
    int i;

    PAPI_library_init(PAPI_VER_CURRENT);
    PAPI_create_eventset(&ev_seed_block);
    PAPI_add_named_event(ev_seed_block, "PAPI_LD_INS");
    PAPI_add_named_event(ev_seed_block, "PAPI_SR_INS");
    PAPI_create_eventset(&ev_pipeline_block);
    PAPI_add_named_event(ev_pipeline_block, "PAPI_TOT_CYC");
    PAPI_create_eventset(&ev_rescale_block);
    PAPI_add_named_event(ev_rescale_block, "PAPI_FML_INS");
    PAPI_add_named_event(ev_rescale_block, "PAPI_FDV_INS");
    PAPI_create_eventset(&ev_fold_block);
    PAPI_add_named_event(ev_fold_block, "PAPI_L1_DCM");
    PAPI_start(ev_seed_block);
    /* block one: seed the working set */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)(i % 97) * 0.125;
    PAPI_stop(ev_seed_block, val_seed_block);
    printf("seed-block: PAPI_LD_INS=%lld PAPI_SR_INS=%lld\n", val_seed_block[0], val_seed_block[1]);
    PAPI_start(ev_pipeline_block);
    /* block two: run the phase pipeline */
    total += phase_one();
    total += phase_two();
    total += phase_three();
    PAPI_stop(ev_pipeline_block, val_pipeline_block);
    printf("pipeline-block: PAPI_TOT_CYC=%lld\n", val_pipeline_block[0]);
    PAPI_start(ev_rescale_block);
    /* block three: rescale by the running total */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / (1.0 + total * total);
    PAPI_stop(ev_rescale_block, val_rescale_block);
    printf("rescale-block: PAPI_FML_INS=%lld PAPI_FDV_INS=%lld\n", val_rescale_block[0], val_rescale_block[1]);
    PAPI_start(ev_fold_block);
    /* block four: fold the checksum */
    for (i = 0; i < ELEMS; i++)
        total += work[i] * 0.001;
    PAPI_stop(ev_fold_block, val_fold_block);
    printf("fold-block: PAPI_L1_DCM=%lld\n", val_fold_block[0]);
    PAPI_cleanup_eventset(ev_seed_block);
    PAPI_destroy_eventset(&ev_seed_block);
    PAPI_cleanup_eventset(ev_pipeline_block);
    PAPI_destroy_eventset(&ev_pipeline_block);
    PAPI_cleanup_eventset(ev_rescale_block);
    PAPI_destroy_eventset(&ev_rescale_block);
    PAPI_cleanup_eventset(ev_fold_block);
    PAPI_destroy_eventset(&ev_fold_block);
    PAPI_shutdown();
    printf("total %.6f\n", total);
    return 0;
}
