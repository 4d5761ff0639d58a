/* Naive matrix multiplication with two monitored regions: one around the
 * repetition loop, one around each multiplication inside it. */
#include <stdio.h>

#ifndef EDPM_MATMUL_N
#define EDPM_MATMUL_N 64
#endif
#ifndef EDPM_MATMUL_T
#define EDPM_MATMUL_T 8
#endif

#define N EDPM_MATMUL_N

static double a[N][N], b[N][N], c[N][N];

static void fill(void)
{
    int i, j;
    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++) {
            a[i][j] = (double)(i + j) / (double)N;
            b[i][j] = (double)(i - j) / (double)N;
            c[i][j] = 0.0;
        }
}

static void multiply(void)
{
    int i, j, k;
    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++) {
            double sum = 0.0;
            for (k = 0; k < N; k++)
                sum += a[i][k] * b[k][j];
            c[i][j] = sum;
        }
}

static double checksum(void)
{
    double total = 0.0;
    int i, j;
    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
            total += c[i][j];
    return total;
}

int main(void)
{
    int t;
#pragma edpm init
    fill();
#pragma edpm start for-iterated branch(taken, mispredicted)
    for (t = 0; t < EDPM_MATMUL_T; t++) {
#pragma edpm start multiply-iterated memory(loads), cache(l2-stores)
        multiply();
#pragma edpm stop multiply-iterated
    }
#pragma edpm stop for-iterated
#pragma edpm deinit
    printf("checksum %.6f\n", checksum());
    return 0;
}
