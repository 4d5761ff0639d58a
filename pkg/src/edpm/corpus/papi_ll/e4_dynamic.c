/* E4 (overlapping regions) with hand-written PAPI low-level bookkeeping. */
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
static long long shared_vals[6];
static long long scratch[6];
static long long one_start[2], two_start[2], three_start[2];

int main(void)
{
    double total = 0.0;
    int i;

    PAPI_library_init(PAPI_VER_CURRENT);
    PAPI_create_eventset(&ev_shared);
    PAPI_add_named_event(ev_shared, "PAPI_LD_INS");
    PAPI_add_named_event(ev_shared, "PAPI_SR_INS");
    PAPI_add_named_event(ev_shared, "PAPI_BR_CN");
    PAPI_add_named_event(ev_shared, "PAPI_BR_MSP");
    PAPI_add_named_event(ev_shared, "PAPI_L1_DCM");
    PAPI_add_named_event(ev_shared, "PAPI_L1_ICM");

    /* stride-one covers blocks one and two */
    for (i = 0; i < 6; i++)
        shared_vals[i] = 0;
    PAPI_start(ev_shared);
    one_start[0] = shared_vals[0];
    one_start[1] = shared_vals[1];

    /* block one: seed the working set */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)(i % 97) * 0.125;

    /* stride-two covers blocks two and three */
    PAPI_accum(ev_shared, shared_vals);
    two_start[0] = shared_vals[2];
    two_start[1] = shared_vals[3];

    /* block two: run the phase pipeline */
    total += phase_one();
    total += phase_two();
    total += phase_three();

    PAPI_accum(ev_shared, shared_vals);
    printf("stride-one: PAPI_LD_INS=%lld PAPI_SR_INS=%lld\n",
           shared_vals[0] - one_start[0], shared_vals[1] - one_start[1]);
    /* stride-three covers blocks three and four */
    three_start[0] = shared_vals[4];
    three_start[1] = shared_vals[5];

    /* block three: rescale by the running total */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / (1.0 + total * total);

    PAPI_accum(ev_shared, shared_vals);
    printf("stride-two: PAPI_BR_CN=%lld PAPI_BR_MSP=%lld\n",
           shared_vals[2] - two_start[0], shared_vals[3] - two_start[1]);

    /* block four: fold the checksum */
    for (i = 0; i < ELEMS; i++)
        total += work[i] * 0.001;

    PAPI_accum(ev_shared, shared_vals);
    PAPI_stop(ev_shared, scratch);
    printf("stride-three: PAPI_L1_DCM=%lld PAPI_L1_ICM=%lld\n",
           shared_vals[4] - three_start[0], shared_vals[5] - three_start[1]);

    PAPI_cleanup_eventset(ev_shared);
    PAPI_destroy_eventset(&ev_shared);
    PAPI_shutdown();
    printf("total %.6f\n", total);
    return 0;
}
