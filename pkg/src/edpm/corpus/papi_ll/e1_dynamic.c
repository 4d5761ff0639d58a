/* E1 with hand-written PAPI low-level instrumentation (dynamic sets). */
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

static int ev_phase_one_call = PAPI_NULL;
static long long val_phase_one_call[2];
static int ev_phase_two_call = PAPI_NULL;
static long long val_phase_two_call[2];
static int ev_phase_three_call = PAPI_NULL;
static long long val_phase_three_call[2];

int main(void)
{
    double total = 0.0;
    int i;

    PAPI_library_init(PAPI_VER_CURRENT);
    PAPI_create_eventset(&ev_phase_one_call);
    PAPI_add_named_event(ev_phase_one_call, "PAPI_LD_INS");
    PAPI_add_named_event(ev_phase_one_call, "PAPI_SR_INS");
    PAPI_create_eventset(&ev_phase_two_call);
    PAPI_add_named_event(ev_phase_two_call, "PAPI_L1_DCM");
    PAPI_add_named_event(ev_phase_two_call, "PAPI_L2_DCM");
    PAPI_create_eventset(&ev_phase_three_call);
    PAPI_add_named_event(ev_phase_three_call, "PAPI_BR_TKN");
    PAPI_add_named_event(ev_phase_three_call, "PAPI_BR_MSP");
    /* block one: seed the working set */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)(i % 97) * 0.125;
    /* block two: run the phase pipeline, one region per call */
    PAPI_start(ev_phase_one_call);
    total += phase_one();
    PAPI_stop(ev_phase_one_call, val_phase_one_call);
    printf("phase-one-call: PAPI_LD_INS=%lld PAPI_SR_INS=%lld\n", val_phase_one_call[0], val_phase_one_call[1]);
    PAPI_start(ev_phase_two_call);
    total += phase_two();
    PAPI_stop(ev_phase_two_call, val_phase_two_call);
    printf("phase-two-call: PAPI_L1_DCM=%lld PAPI_L2_DCM=%lld\n", val_phase_two_call[0], val_phase_two_call[1]);
    PAPI_start(ev_phase_three_call);
    total += phase_three();
    PAPI_stop(ev_phase_three_call, val_phase_three_call);
    printf("phase-three-call: PAPI_BR_TKN=%lld PAPI_BR_MSP=%lld\n", val_phase_three_call[0], val_phase_three_call[1]);
    /* block three: rescale by the running total */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / (1.0 + total * total);
    /* block four: fold the checksum */
    for (i = 0; i < ELEMS; i++)
        total += work[i] * 0.001;
    PAPI_cleanup_eventset(ev_phase_one_call);
    PAPI_destroy_eventset(&ev_phase_one_call);
    PAPI_cleanup_eventset(ev_phase_two_call);
    PAPI_destroy_eventset(&ev_phase_two_call);
    PAPI_cleanup_eventset(ev_phase_three_call);
    PAPI_destroy_eventset(&ev_phase_three_call);
    PAPI_shutdown();
    printf("total %.6f\n", total);
    return 0;
}
