/* E3 (nested regions) with hand-written PAPI low-level bookkeeping. */
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

static int ev_shared = PAPI_NULL;
static long long shared_vals[4];
static long long scratch[4];
static long long outer_start[2], middle_start, inner_start;

int main(void)
{
    double total = 0.0;
    int i;

    PAPI_library_init(PAPI_VER_CURRENT);
    PAPI_create_eventset(&ev_shared);
    PAPI_add_named_event(ev_shared, "PAPI_TOT_CYC");
    PAPI_add_named_event(ev_shared, "PAPI_TOT_INS");
    PAPI_add_named_event(ev_shared, "PAPI_SR_INS");
    PAPI_add_named_event(ev_shared, "PAPI_FDV_INS");

    /* outer-span covers all four blocks */
    for (i = 0; i < 4; i++)
        shared_vals[i] = 0;
    PAPI_start(ev_shared);
    outer_start[0] = shared_vals[0];
    outer_start[1] = shared_vals[1];

    /* block one: seed the working set */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)(i % 97) * 0.125;

    /* middle-span covers blocks two and three */
    PAPI_accum(ev_shared, shared_vals);
    middle_start = shared_vals[2];

    /* block two: run the phase pipeline */
    total += phase_one();
    total += phase_two();
    total += phase_three();

    /* inner-span covers block three */
    PAPI_accum(ev_shared, shared_vals);
    inner_start = shared_vals[3];

    /* block three: rescale by the running total */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / (1.0 + total * total);

    PAPI_accum(ev_shared, shared_vals);
    printf("inner-span: PAPI_FDV_INS=%lld\n", shared_vals[3] - inner_start);
    printf("middle-span: PAPI_SR_INS=%lld\n", shared_vals[2] - middle_start);

    /* block four: fold the checksum */
    for (i = 0; i < ELEMS; i++)
        total += work[i] * 0.001;

    PAPI_accum(ev_shared, shared_vals);
    PAPI_stop(ev_shared, scratch);
    printf("outer-span: PAPI_TOT_CYC=%lld PAPI_TOT_INS=%lld\n",
           shared_vals[0] - outer_start[0], shared_vals[1] - outer_start[1]);

    PAPI_cleanup_eventset(ev_shared);
    PAPI_destroy_eventset(&ev_shared);
    PAPI_shutdown();
    printf("total %.6f\n", total);
    return 0;
}
