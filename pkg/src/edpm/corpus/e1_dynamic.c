/* E1: one region around each phase call. */
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

int main(void)
{
    double total = 0.0;
    int i;

#pragma edpm init
    /* block one: seed the working set */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)(i % 97) * 0.125;
    /* block two: run the phase pipeline, one region per call */
#pragma edpm start phase-one-call memory()
    total += phase_one();
#pragma edpm stop phase-one-call
#pragma edpm start phase-two-call cache(l1-data, l2-data)
    total += phase_two();
#pragma edpm stop phase-two-call
#pragma edpm start phase-three-call branch(taken, mispredicted)
    total += phase_three();
#pragma edpm stop phase-three-call
    /* block three: rescale by the running total */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / (1.0 + total * total);
    /* block four: fold the checksum */
    for (i = 0; i < ELEMS; i++)
        total += work[i] * 0.001;
#pragma edpm deinit
    printf("total %.6f\n", total);
    return 0;
}
