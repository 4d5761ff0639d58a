/* Soft-backend runtime for edpm-instrumented programs.
 *
 * Deterministic virtual counters: tallies only move through explicit
 * edpm_soft_tick() calls, so instrumented test programs produce exact,
 * reproducible record files. Single-threaded use only; concurrent calls
 * are undefined.
 */
#ifndef EDPM_SHIM_H
#define EDPM_SHIM_H

/* Record stream lifecycle. The path given to edpm_shim_init() is
 * overridden by the EDPM_OUTPUT environment variable when set. */
void edpm_shim_init(const char *path);
void edpm_shim_set_buffered(int on);
void edpm_shim_finalize(void);

/* One block may be active at a time. Creating a block installs its
 * counter-name table (canonical order, borrowed pointer) and zeroes the
 * tallies; counting runs from block start until pause or destroy. */
int  edpm_soft_block_create(const char *const *names, int count);
void edpm_soft_block_start(void);
void edpm_soft_pause(void);
void edpm_soft_resume(void);
void edpm_soft_read(long long *values_out);
void edpm_soft_block_destroy(void);

/* Advance a virtual counter. No-op when no block is active, the block is
 * paused, or the counter is outside the block's set. */
void edpm_soft_tick(const char *counter, long long amount);

/* Append one region record to the output stream. */
void edpm_emit_record(const char *name, long long temporal_id,
                      const char *const *counter_names,
                      const long long *values, int count);

#endif /* EDPM_SHIM_H */
