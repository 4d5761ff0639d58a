/* E3: properly nested regions around the code blocks. */
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
#pragma edpm start outer-span cpu()
    /* block one: seed the working set */
    for (i = 0; i < ELEMS; i++)
        data[i] = (double)(i % 97) * 0.125;
#pragma edpm start middle-span memory(stores)
    /* block two: run the phase pipeline */
    total += phase_one();
    total += phase_two();
    total += phase_three();
#pragma edpm start inner-span floating-point(divide)
    /* block three: rescale by the running total */
    for (i = 0; i < ELEMS; i++)
        work[i] = data[i] / (1.0 + total * total);
#pragma edpm stop inner-span
#pragma edpm stop middle-span
    /* block four: fold the checksum */
    for (i = 0; i < ELEMS; i++)
        total += work[i] * 0.001;
#pragma edpm stop outer-span
#pragma edpm deinit
    printf("total %.6f\n", total);
    return 0;
}
