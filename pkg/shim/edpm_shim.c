#define _POSIX_C_SOURCE 200809L

#include "edpm_shim.h"

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define EDPM_MAX_COUNTERS 64

static FILE *out = NULL;
static int initialized = 0;
static int finalized = 0;
static int first_record = 1;
static int buffered = 0;

static char **held_records = NULL;
static int held_count = 0;
static int held_capacity = 0;

static const char *const *block_names = NULL;
static int block_count = 0;
static int block_active = 0;
static int block_paused = 0;
static int next_handle = 0;
static unsigned long long tallies[EDPM_MAX_COUNTERS];

void edpm_shim_init(const char *path)
{
    const char *env;

    if (initialized) {
        fprintf(stderr, "edpm: shim already initialized, ignoring\n");
        return;
    }
    env = getenv("EDPM_OUTPUT");
    if (env && env[0])
        path = env;
    out = fopen(path, "w");
    if (!out) {
        fprintf(stderr, "edpm: cannot open output file '%s'\n", path);
        exit(1);
    }
    fputc('[', out);
    initialized = 1;
    finalized = 0;
    first_record = 1;
}

void edpm_shim_set_buffered(int on)
{
    if (!first_record) {
        fprintf(stderr, "edpm: cannot change buffering after the first record\n");
        return;
    }
    buffered = on != 0;
}

int edpm_soft_block_create(const char *const *names, int count)
{
    if (count < 0 || count > EDPM_MAX_COUNTERS) {
        fprintf(stderr, "edpm: unsupported block counter count %d\n", count);
        exit(1);
    }
    block_names = names;
    block_count = count;
    block_active = 1;
    block_paused = 1; /* counting begins at block start */
    memset(tallies, 0, sizeof tallies);
    return next_handle++;
}

void edpm_soft_block_start(void)
{
    if (block_active)
        block_paused = 0;
}

void edpm_soft_pause(void)
{
    if (block_active)
        block_paused = 1;
}

void edpm_soft_resume(void)
{
    if (block_active)
        block_paused = 0;
}

void edpm_soft_read(long long *values_out)
{
    int i;

    if (!block_active)
        return;
    for (i = 0; i < block_count; i++)
        values_out[i] = (long long)tallies[i];
}

void edpm_soft_block_destroy(void)
{
    block_active = 0;
    block_paused = 0;
    block_names = NULL;
    block_count = 0;
    memset(tallies, 0, sizeof tallies);
}

void edpm_soft_tick(const char *counter, long long amount)
{
    int i;

    if (!block_active || block_paused || amount <= 0)
        return;
    for (i = 0; i < block_count; i++) {
        if (strcmp(block_names[i], counter) == 0) {
            tallies[i] += (unsigned long long)amount;
            return;
        }
    }
}

static void write_json_string(FILE *f, const char *s)
{
    fputc('"', f);
    for (; *s; s++) {
        unsigned char c = (unsigned char)*s;
        if (c == '"' || c == '\\')
            fprintf(f, "\\%c", c);
        else if (c < 0x20)
            fprintf(f, "\\u%04x", c);
        else
            fputc(c, f);
    }
    fputc('"', f);
}

static void write_record(FILE *f, const char *name, long long temporal_id,
                         const char *const *counter_names,
                         const long long *values, int count)
{
    int i;

    fputc('{', f);
    fputs("\"name\":", f);
    write_json_string(f, name);
    fprintf(f, ",\"temporal-id\":%lld,\"counters\":{", temporal_id);
    for (i = 0; i < count; i++) {
        if (i)
            fputc(',', f);
        write_json_string(f, counter_names[i]);
        fprintf(f, ":%lld", values[i]);
    }
    fputs("}}", f);
}

void edpm_emit_record(const char *name, long long temporal_id,
                      const char *const *counter_names,
                      const long long *values, int count)
{
    if (!initialized || finalized) {
        fprintf(stderr, "edpm: record for '%s' dropped (no open stream)\n", name);
        return;
    }
    if (buffered) {
        char *text = NULL;
        size_t size = 0;
        FILE *mem = open_memstream(&text, &size);
        if (!mem) {
            fprintf(stderr, "edpm: cannot buffer record\n");
            exit(1);
        }
        write_record(mem, name, temporal_id, counter_names, values, count);
        fclose(mem);
        if (held_count == held_capacity) {
            held_capacity = held_capacity ? held_capacity * 2 : 16;
            held_records = realloc(held_records,
                                   (size_t)held_capacity * sizeof *held_records);
            if (!held_records) {
                fprintf(stderr, "edpm: out of memory buffering records\n");
                exit(1);
            }
        }
        held_records[held_count++] = text;
        first_record = 0;
        return;
    }
    fputs(first_record ? "\n" : ",\n", out);
    first_record = 0;
    write_record(out, name, temporal_id, counter_names, values, count);
}

void edpm_shim_finalize(void)
{
    int i;

    if (!initialized || finalized)
        return;
    if (buffered) {
        for (i = 0; i < held_count; i++) {
            fputs(i ? ",\n" : "\n", out);
            fputs(held_records[i], out);
            free(held_records[i]);
        }
        free(held_records);
        held_records = NULL;
        first_record = held_count == 0;
        held_count = 0;
        held_capacity = 0;
    }
    fputs(first_record ? "]\n" : "\n]\n", out);
    fclose(out);
    out = NULL;
    finalized = 1;
}
